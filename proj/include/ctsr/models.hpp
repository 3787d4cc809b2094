#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ctsr/nn.hpp"
#include "ctsr/params.hpp"
#include "ctsr/rng.hpp"
#include "ctsr/series.hpp"

namespace ctsr {

constexpr int kEmbeddingDim = 64;
constexpr int kTrunkChannels = 64;
constexpr int kBottleneckChannels = 16;
constexpr int kNumBlocks = 8;
constexpr int kStemKernel = 7;
constexpr int kStemStride = 2;
constexpr int kStemPadding = 3;

enum class ModelKind { kRn2DwT, kRn2D, kRn1D };

const char* model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& name);
bool is_embedding_model(ModelKind k);

using Embedding = std::array<float, kEmbeddingDim>;

// Negated Euclidean distance: larger means more relevant, 0 is the maximum.
double relevance_from_embeddings(const Embedding& e1, const Embedding& e2);

// Process-wide count of trunk evaluations (one per embed/score call), used to
// verify the 1-vs-n query cost contracts.
std::uint64_t trunk_invocations();
void reset_trunk_invocations();
namespace detail {
void count_trunk_invocation();
}

// ---------------------------------------------------------------------------
// parameter construction
// ---------------------------------------------------------------------------

namespace model_detail {

template <typename T>
nn::Tensor<T> uniform_fan_in(std::vector<std::int64_t> shape, std::int64_t fan_in,
                             std::mt19937_64& rng) {
    nn::Tensor<T> t(std::move(shape));
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (auto& v : t.data) v = static_cast<T>(uniform_real(rng, -bound, bound));
    return t;
}

template <typename T>
void add_conv2d(nn::ParamStore<T>& p, const std::string& name, std::int64_t kh, std::int64_t kw,
                std::int64_t cin, std::int64_t cout, std::mt19937_64& rng) {
    p.add(name + ".w", uniform_fan_in<T>({kh, kw, cin, cout}, kh * kw * cin, rng));
    p.add(name + ".b", nn::Tensor<T>({cout}));
}

template <typename T>
void add_conv1d(nn::ParamStore<T>& p, const std::string& name, std::int64_t k, std::int64_t cin,
                std::int64_t cout, std::mt19937_64& rng) {
    p.add(name + ".w", uniform_fan_in<T>({k, cin, cout}, k * cin, rng));
    p.add(name + ".b", nn::Tensor<T>({cout}));
}

template <typename T>
void add_linear(nn::ParamStore<T>& p, const std::string& name, std::int64_t in, std::int64_t out,
                std::mt19937_64& rng) {
    p.add(name + ".w", uniform_fan_in<T>({in, out}, in, rng));
    p.add(name + ".b", nn::Tensor<T>({out}));
}

template <typename T>
void add_trunk(nn::ParamStore<T>& p, std::int64_t stem_cin, std::mt19937_64& rng) {
    add_conv2d(p, "stem", kStemKernel, kStemKernel, stem_cin, kTrunkChannels, rng);
    for (int b = 0; b < kNumBlocks; ++b) {
        const std::string pre = "block" + std::to_string(b);
        add_conv2d(p, pre + ".reduce", 1, 1, kTrunkChannels, kBottleneckChannels, rng);
        add_conv2d(p, pre + ".spatial", 3, 3, kBottleneckChannels, kBottleneckChannels, rng);
        add_conv2d(p, pre + ".expand", 1, 1, kBottleneckChannels, kTrunkChannels, rng);
    }
}

}  // namespace model_detail

// Templates start as standard normal draws; the trainer overwrites them with
// series sampled from the training split before optimization.
template <typename T>
nn::ParamStore<T> init_rn2dwt_params(int n_templates, int series_length, std::mt19937_64& rng) {
    if (n_templates < 1) throw std::invalid_argument("need at least one template");
    if (series_length < 2) throw std::invalid_argument("series length must be >= 2");
    nn::ParamStore<T> p;
    nn::Tensor<T> templates({n_templates, series_length});
    for (auto& v : templates.data) v = static_cast<T>(normal(rng));
    p.add("templates", std::move(templates));
    model_detail::add_trunk(p, n_templates, rng);
    model_detail::add_linear(p, "head", kTrunkChannels, kEmbeddingDim, rng);
    return p;
}

template <typename T>
nn::ParamStore<T> init_rn2d_params(std::mt19937_64& rng) {
    nn::ParamStore<T> p;
    model_detail::add_trunk(p, 1, rng);
    model_detail::add_linear(p, "head", kTrunkChannels, 1, rng);
    return p;
}

constexpr std::array<int, 3> kRn1dKernels = {8, 5, 3};
constexpr int kRn1dStages = 3;

template <typename T>
nn::ParamStore<T> init_rn1d_params(std::mt19937_64& rng) {
    nn::ParamStore<T> p;
    for (int s = 0; s < kRn1dStages; ++s) {
        const std::string pre = "stage" + std::to_string(s);
        const std::int64_t cin = s == 0 ? 1 : kTrunkChannels;
        model_detail::add_conv1d(p, pre + ".conv1", kRn1dKernels[0], cin, kTrunkChannels, rng);
        model_detail::add_conv1d(p, pre + ".conv2", kRn1dKernels[1], kTrunkChannels,
                                 kTrunkChannels, rng);
        model_detail::add_conv1d(p, pre + ".conv3", kRn1dKernels[2], kTrunkChannels,
                                 kTrunkChannels, rng);
        if (cin != kTrunkChannels)
            model_detail::add_conv1d(p, pre + ".skip", 1, cin, kTrunkChannels, rng);
    }
    model_detail::add_linear(p, "head", kTrunkChannels, kEmbeddingDim, rng);
    return p;
}

// Shape bookkeeping derived from a parameter store.
template <typename T>
int rn2dwt_n_templates(const nn::ParamStore<T>& p) {
    return static_cast<int>(p.at("templates").dim(0));
}
template <typename T>
int rn2dwt_series_length(const nn::ParamStore<T>& p) {
    return static_cast<int>(p.at("templates").dim(1));
}

template <typename T>
ModelKind infer_model_kind(const nn::ParamStore<T>& p) {
    if (p.has("templates")) return ModelKind::kRn2DwT;
    if (p.has("stage0.conv1.w")) return ModelKind::kRn1D;
    return ModelKind::kRn2D;
}

// ---------------------------------------------------------------------------
// shared 2-D trunk: stem conv -> relu -> 8 bottleneck blocks -> GAP
// ---------------------------------------------------------------------------

template <typename T>
struct TrunkActs {
    nn::Tensor<T> input;      // [1,H,W,Cin]
    nn::Tensor<T> stem_relu;  // [1,H',W',64]
    struct BlockActs {
        nn::Tensor<T> reduce_relu;   // [1,H',W',16]
        nn::Tensor<T> spatial_relu;  // [1,H',W',16]
        nn::Tensor<T> out;           // [1,H',W',64]
    };
    std::array<BlockActs, kNumBlocks> blocks;
    nn::Tensor<T> gap;  // [1,64]
};

// One bottleneck block: relu(x + expand(relu(spatial(relu(reduce(x)))))).
template <typename T>
nn::Tensor<T> bottleneck_block(const nn::ParamStore<T>& p, const std::string& prefix,
                               const nn::Tensor<T>& x,
                               typename TrunkActs<T>::BlockActs* acts) {
    nn::detail::require(x.rank() == 4 && x.dim(3) == kTrunkChannels,
                        "bottleneck_block: input must have 64 channels, got " + nn::shape_str(x));
    typename TrunkActs<T>::BlockActs local;
    auto& a = acts ? *acts : local;
    a.reduce_relu = nn::relu(nn::conv2d(x, p.at(prefix + ".reduce.w"), p.at(prefix + ".reduce.b"), 1, 0));
    a.spatial_relu =
        nn::relu(nn::conv2d(a.reduce_relu, p.at(prefix + ".spatial.w"), p.at(prefix + ".spatial.b"), 1, 1));
    nn::Tensor<T> expanded =
        nn::conv2d(a.spatial_relu, p.at(prefix + ".expand.w"), p.at(prefix + ".expand.b"), 1, 0);
    a.out = nn::relu(nn::add(x, expanded));
    return a.out;
}

template <typename T>
void bottleneck_block_backward(const nn::ParamStore<T>& params, nn::ParamStore<T>& grads,
                               const std::string& prefix, const nn::Tensor<T>& x,
                               const typename TrunkActs<T>::BlockActs& a,
                               const nn::Tensor<T>& grad_out, T* grad_x) {
    // through the final relu
    nn::Tensor<T> g_sum(a.out.shape);
    nn::relu_backward(a.out, grad_out, g_sum.data.data());
    // skip path
    nn::add_backward(g_sum, grad_x, static_cast<T*>(nullptr));
    // main path: expand <- spatial <- reduce
    nn::Tensor<T> g_spatial_relu(a.spatial_relu.shape);
    nn::conv2d_backward(a.spatial_relu, params.at(prefix + ".expand.w"), 1, 0, g_sum,
                        g_spatial_relu.data.data(), grads.at(prefix + ".expand.w").grad.data(),
                        grads.at(prefix + ".expand.b").grad.data());
    nn::Tensor<T> g_spatial(a.spatial_relu.shape);
    nn::relu_backward(a.spatial_relu, g_spatial_relu, g_spatial.data.data());
    nn::Tensor<T> g_reduce_relu(a.reduce_relu.shape);
    nn::conv2d_backward(a.reduce_relu, params.at(prefix + ".spatial.w"), 1, 1, g_spatial,
                        g_reduce_relu.data.data(), grads.at(prefix + ".spatial.w").grad.data(),
                        grads.at(prefix + ".spatial.b").grad.data());
    nn::Tensor<T> g_reduce(a.reduce_relu.shape);
    nn::relu_backward(a.reduce_relu, g_reduce_relu, g_reduce.data.data());
    nn::conv2d_backward(x, params.at(prefix + ".reduce.w"), 1, 0, g_reduce, grad_x,
                        grads.at(prefix + ".reduce.w").grad.data(),
                        grads.at(prefix + ".reduce.b").grad.data());
}

template <typename T>
nn::Tensor<T> trunk_forward(const nn::ParamStore<T>& p, nn::Tensor<T> input, TrunkActs<T>* acts) {
    TrunkActs<T> local;
    auto& a = acts ? *acts : local;
    a.input = std::move(input);
    a.stem_relu =
        nn::relu(nn::conv2d(a.input, p.at("stem.w"), p.at("stem.b"), kStemStride, kStemPadding));
    const nn::Tensor<T>* cur = &a.stem_relu;
    for (int b = 0; b < kNumBlocks; ++b) {
        bottleneck_block(p, "block" + std::to_string(b), *cur,
                         &a.blocks[static_cast<std::size_t>(b)]);
        cur = &a.blocks[static_cast<std::size_t>(b)].out;
    }
    a.gap = nn::global_avg_pool(*cur);
    return a.gap;
}

// Accumulates parameter gradients into `grads` and, when grad_input is given,
// the gradient w.r.t. the trunk input.
template <typename T>
void trunk_backward(const nn::ParamStore<T>& params, nn::ParamStore<T>& grads,
                    const TrunkActs<T>& a, const nn::Tensor<T>& grad_gap, T* grad_input) {
    const nn::Tensor<T>& last =
        kNumBlocks > 0 ? a.blocks[kNumBlocks - 1].out : a.stem_relu;
    nn::Tensor<T> g_cur(last.shape);
    nn::global_avg_pool_backward(last, grad_gap, g_cur.data.data());
    for (int b = kNumBlocks - 1; b >= 0; --b) {
        const nn::Tensor<T>& x = b == 0 ? a.stem_relu : a.blocks[static_cast<std::size_t>(b - 1)].out;
        nn::Tensor<T> g_x(x.shape);
        bottleneck_block_backward(params, grads, "block" + std::to_string(b), x,
                                  a.blocks[static_cast<std::size_t>(b)], g_cur, g_x.data.data());
        g_cur = std::move(g_x);
    }
    nn::Tensor<T> g_stem_pre(a.stem_relu.shape);
    nn::relu_backward(a.stem_relu, g_cur, g_stem_pre.data.data());
    nn::conv2d_backward(a.input, params.at("stem.w"), kStemStride, kStemPadding, g_stem_pre,
                        grad_input, grads.at("stem.w").grad.data(), grads.at("stem.b").grad.data());
}

// ---------------------------------------------------------------------------
// RN2Dw/T: template distance tensor -> trunk -> linear head -> 64-d embedding
// ---------------------------------------------------------------------------

// D[0,i,j,k] = |a_i - t_{k,j}|, differentiable w.r.t. the template bank.
template <typename T>
nn::Tensor<T> template_distance_input(const std::vector<double>& series,
                                      const nn::Tensor<T>& templates) {
    const std::int64_t w = static_cast<std::int64_t>(series.size());
    const std::int64_t K = templates.dim(0), h = templates.dim(1);
    nn::Tensor<T> d({1, w, h, K});
    for (std::int64_t i = 0; i < w; ++i) {
        const T ai = static_cast<T>(series[static_cast<std::size_t>(i)]);
        T* row = d.data.data() + i * h * K;
        for (std::int64_t k = 0; k < K; ++k) {
            const T* t = templates.data.data() + k * h;
            for (std::int64_t j = 0; j < h; ++j) {
                const T diff = ai - t[j];
                row[j * K + k] = diff < T(0) ? -diff : diff;
            }
        }
    }
    return d;
}

template <typename T>
void template_distance_input_backward(const std::vector<double>& series,
                                      const nn::Tensor<T>& templates,
                                      const nn::Tensor<T>& grad_d, T* grad_templates) {
    const std::int64_t w = static_cast<std::int64_t>(series.size());
    const std::int64_t K = templates.dim(0), h = templates.dim(1);
    for (std::int64_t k = 0; k < K; ++k) {
        const T* t = templates.data.data() + k * h;
        T* gt = grad_templates + k * h;
        for (std::int64_t j = 0; j < h; ++j) {
            T acc = 0;
            for (std::int64_t i = 0; i < w; ++i) {
                const T diff = static_cast<T>(series[static_cast<std::size_t>(i)]) - t[j];
                const T g = grad_d.data[(i * h + j) * K + k];
                if (diff > T(0))
                    acc -= g;
                else if (diff < T(0))
                    acc += g;
            }
            gt[j] += acc;
        }
    }
}

template <typename T>
struct Rn2DwTActs {
    TrunkActs<T> trunk;
    nn::Tensor<T> head;  // [1,64]
};

template <typename T>
nn::Tensor<T> rn2dwt_forward(const nn::ParamStore<T>& p, const std::vector<double>& series,
                             Rn2DwTActs<T>* acts) {
    const nn::Tensor<T>& templates = p.at("templates");
    if (static_cast<std::int64_t>(series.size()) != templates.dim(1))
        throw std::invalid_argument("rn2dwt: series length " + std::to_string(series.size()) +
                                    " != template length " + std::to_string(templates.dim(1)));
    detail::count_trunk_invocation();
    Rn2DwTActs<T> local;
    auto& a = acts ? *acts : local;
    nn::Tensor<T> gap = trunk_forward(p, template_distance_input(series, templates), &a.trunk);
    a.head = nn::linear(gap, p.at("head.w"), p.at("head.b"));
    return a.head;
}

template <typename T>
void rn2dwt_backward(const nn::ParamStore<T>& params, nn::ParamStore<T>& grads,
                     const std::vector<double>& series, const Rn2DwTActs<T>& a,
                     const nn::Tensor<T>& grad_embedding) {
    nn::Tensor<T> g_gap(a.trunk.gap.shape);
    nn::linear_backward(a.trunk.gap, params.at("head.w"), grad_embedding, g_gap.data.data(),
                        grads.at("head.w").grad.data(), grads.at("head.b").grad.data());
    nn::Tensor<T> g_input(a.trunk.input.shape);
    trunk_backward(params, grads, a.trunk, g_gap, g_input.data.data());
    template_distance_input_backward(series, params.at("templates"), g_input,
                                     grads.at("templates").grad.data());
}

// ---------------------------------------------------------------------------
// RN2D: pairwise |a_i - b_j| matrix -> trunk -> linear head -> scalar score
// ---------------------------------------------------------------------------

template <typename T>
nn::Tensor<T> pair_matrix_input(const std::vector<double>& a, const std::vector<double>& b) {
    const std::int64_t w = static_cast<std::int64_t>(a.size());
    const std::int64_t h = static_cast<std::int64_t>(b.size());
    nn::Tensor<T> d({1, w, h, 1});
    for (std::int64_t i = 0; i < w; ++i) {
        const double ai = a[static_cast<std::size_t>(i)];
        T* row = d.data.data() + i * h;
        for (std::int64_t j = 0; j < h; ++j)
            row[j] = static_cast<T>(std::fabs(ai - b[static_cast<std::size_t>(j)]));
    }
    return d;
}

template <typename T>
struct Rn2DActs {
    TrunkActs<T> trunk;
    nn::Tensor<T> head;  // [1,1]
};

template <typename T>
T rn2d_forward(const nn::ParamStore<T>& p, const std::vector<double>& a,
               const std::vector<double>& b, Rn2DActs<T>* acts) {
    if (a.size() < 2 || b.size() < 2)
        throw std::invalid_argument("rn2d: series must have length >= 2");
    detail::count_trunk_invocation();
    Rn2DActs<T> local;
    auto& ac = acts ? *acts : local;
    nn::Tensor<T> gap = trunk_forward(p, pair_matrix_input<T>(a, b), &ac.trunk);
    ac.head = nn::linear(gap, p.at("head.w"), p.at("head.b"));
    return ac.head.data[0];
}

template <typename T>
void rn2d_backward(const nn::ParamStore<T>& params, nn::ParamStore<T>& grads,
                   const Rn2DActs<T>& a, T grad_score) {
    nn::Tensor<T> g_head({1, 1});
    g_head.data[0] = grad_score;
    nn::Tensor<T> g_gap(a.trunk.gap.shape);
    nn::linear_backward(a.trunk.gap, params.at("head.w"), g_head, g_gap.data.data(),
                        grads.at("head.w").grad.data(), grads.at("head.b").grad.data());
    trunk_backward(params, grads, a.trunk, g_gap, static_cast<T*>(nullptr));
}

// ---------------------------------------------------------------------------
// RN1D: residual 1-D conv stages over the raw series -> GAP -> linear head
// ---------------------------------------------------------------------------

template <typename T>
struct Rn1DActs {
    struct StageActs {
        nn::Tensor<T> x;       // stage input [1,L,Cin]
        nn::Tensor<T> padded;  // after pad1d for the even stem kernel
        nn::Tensor<T> t1, t2;  // post-relu conv outputs
        nn::Tensor<T> out;     // [1,L,64]
    };
    std::array<StageActs, kRn1dStages> stages;
    nn::Tensor<T> gap;   // [1,64]
    nn::Tensor<T> head;  // [1,64]
};

template <typename T>
nn::Tensor<T> rn1d_forward(const nn::ParamStore<T>& p, const std::vector<double>& series,
                           Rn1DActs<T>* acts) {
    if (series.size() < 2) throw std::invalid_argument("rn1d: series must have length >= 2");
    detail::count_trunk_invocation();
    Rn1DActs<T> local;
    auto& a = acts ? *acts : local;
    const std::int64_t L = static_cast<std::int64_t>(series.size());
    nn::Tensor<T> x({1, L, 1});
    for (std::int64_t i = 0; i < L; ++i)
        x.data[static_cast<std::size_t>(i)] = static_cast<T>(series[static_cast<std::size_t>(i)]);
    for (int s = 0; s < kRn1dStages; ++s) {
        auto& st = a.stages[static_cast<std::size_t>(s)];
        const std::string pre = "stage" + std::to_string(s);
        st.x = std::move(x);
        // kernel 8 is even: pad (3,4) keeps the length
        st.padded = nn::pad1d(st.x, 3, 4);
        st.t1 = nn::relu(nn::conv1d(st.padded, p.at(pre + ".conv1.w"), p.at(pre + ".conv1.b"), 1, 0));
        st.t2 = nn::relu(nn::conv1d(st.t1, p.at(pre + ".conv2.w"), p.at(pre + ".conv2.b"), 1, 2));
        nn::Tensor<T> main =
            nn::conv1d(st.t2, p.at(pre + ".conv3.w"), p.at(pre + ".conv3.b"), 1, 1);
        nn::Tensor<T> skip =
            p.has(pre + ".skip.w")
                ? nn::conv1d(st.x, p.at(pre + ".skip.w"), p.at(pre + ".skip.b"), 1, 0)
                : st.x;
        st.out = nn::relu(nn::add(main, skip));
        x = st.out;
    }
    a.gap = nn::global_avg_pool(a.stages[kRn1dStages - 1].out);
    a.head = nn::linear(a.gap, p.at("head.w"), p.at("head.b"));
    return a.head;
}

template <typename T>
void rn1d_backward(const nn::ParamStore<T>& params, nn::ParamStore<T>& grads,
                   const Rn1DActs<T>& a, const nn::Tensor<T>& grad_embedding) {
    nn::Tensor<T> g_gap(a.gap.shape);
    nn::linear_backward(a.gap, params.at("head.w"), grad_embedding, g_gap.data.data(),
                        grads.at("head.w").grad.data(), grads.at("head.b").grad.data());
    nn::Tensor<T> g_cur(a.stages[kRn1dStages - 1].out.shape);
    nn::global_avg_pool_backward(a.stages[kRn1dStages - 1].out, g_gap, g_cur.data.data());
    for (int s = kRn1dStages - 1; s >= 0; --s) {
        const auto& st = a.stages[static_cast<std::size_t>(s)];
        const std::string pre = "stage" + std::to_string(s);
        nn::Tensor<T> g_sum(st.out.shape);
        nn::relu_backward(st.out, g_cur, g_sum.data.data());
        nn::Tensor<T> g_x(st.x.shape);
        if (params.has(pre + ".skip.w"))
            nn::conv1d_backward(st.x, params.at(pre + ".skip.w"), 1, 0, g_sum, g_x.data.data(),
                                grads.at(pre + ".skip.w").grad.data(),
                                grads.at(pre + ".skip.b").grad.data());
        else
            nn::add_backward(g_sum, g_x.data.data(), static_cast<T*>(nullptr));
        nn::Tensor<T> g_t2_relu(st.t2.shape);
        nn::conv1d_backward(st.t2, params.at(pre + ".conv3.w"), 1, 1, g_sum, g_t2_relu.data.data(),
                            grads.at(pre + ".conv3.w").grad.data(),
                            grads.at(pre + ".conv3.b").grad.data());
        nn::Tensor<T> g_t2(st.t2.shape);
        nn::relu_backward(st.t2, g_t2_relu, g_t2.data.data());
        nn::Tensor<T> g_t1_relu(st.t1.shape);
        nn::conv1d_backward(st.t1, params.at(pre + ".conv2.w"), 1, 2, g_t2, g_t1_relu.data.data(),
                            grads.at(pre + ".conv2.w").grad.data(),
                            grads.at(pre + ".conv2.b").grad.data());
        nn::Tensor<T> g_t1(st.t1.shape);
        nn::relu_backward(st.t1, g_t1_relu, g_t1.data.data());
        nn::Tensor<T> g_padded(st.padded.shape);
        nn::conv1d_backward(st.padded, params.at(pre + ".conv1.w"), 1, 0, g_t1,
                            g_padded.data.data(), grads.at(pre + ".conv1.w").grad.data(),
                            grads.at(pre + ".conv1.b").grad.data());
        nn::pad1d_backward(st.x, 3, g_padded, g_x.data.data());
        g_cur = std::move(g_x);
    }
}

// ---------------------------------------------------------------------------
// score utilities shared by training and retrieval
// ---------------------------------------------------------------------------

// score = -||e1 - e2||_2 over [1,64] tensors
template <typename T>
T neg_l2_score(const nn::Tensor<T>& e1, const nn::Tensor<T>& e2) {
    T acc = 0;
    for (std::size_t i = 0; i < e1.data.size(); ++i) {
        const T d = e1.data[i] - e2.data[i];
        acc += d * d;
    }
    return -std::sqrt(acc);
}

// d(score)/de1 = -(e1-e2)/||e1-e2||; zero at coincident embeddings
template <typename T>
void neg_l2_score_backward(const nn::Tensor<T>& e1, const nn::Tensor<T>& e2, T grad_score,
                           nn::Tensor<T>* g1, nn::Tensor<T>* g2) {
    T acc = 0;
    for (std::size_t i = 0; i < e1.data.size(); ++i) {
        const T d = e1.data[i] - e2.data[i];
        acc += d * d;
    }
    const T norm = std::sqrt(acc);
    if (!(norm > T(0))) return;
    const T scale = grad_score / norm;
    for (std::size_t i = 0; i < e1.data.size(); ++i) {
        const T d = e1.data[i] - e2.data[i];
        if (g1) g1->data[i] -= scale * d;
        if (g2) g2->data[i] += scale * d;
    }
}

// ---------------------------------------------------------------------------
// float-precision conveniences used by the retrieval stack
// ---------------------------------------------------------------------------

Embedding embed_rn2dwt(const TimeSeries& s, const nn::ParamStore<float>& params);
Embedding embed_rn1d(const TimeSeries& s, const nn::ParamStore<float>& params);
Embedding embed_series(const TimeSeries& s, const nn::ParamStore<float>& params, ModelKind kind);
double score_rn2d(const TimeSeries& a, const TimeSeries& b, const nn::ParamStore<float>& params);

}  // namespace ctsr
