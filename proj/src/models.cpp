#include "ctsr/models.hpp"

#include <stdexcept>

namespace ctsr {

namespace {
std::atomic<std::uint64_t> g_trunk_invocations{0};
}

std::uint64_t trunk_invocations() { return g_trunk_invocations.load(); }
void reset_trunk_invocations() { g_trunk_invocations.store(0); }
namespace detail {
void count_trunk_invocation() { g_trunk_invocations.fetch_add(1, std::memory_order_relaxed); }
}  // namespace detail

const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::kRn2DwT: return "rn2dwt";
        case ModelKind::kRn2D: return "rn2d";
        case ModelKind::kRn1D: return "rn1d";
    }
    return "?";
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "rn2dwt") return ModelKind::kRn2DwT;
    if (name == "rn2d") return ModelKind::kRn2D;
    if (name == "rn1d") return ModelKind::kRn1D;
    throw std::invalid_argument("unknown model kind '" + name + "' (expected rn2dwt|rn2d|rn1d)");
}

bool is_embedding_model(ModelKind k) { return k != ModelKind::kRn2D; }

double relevance_from_embeddings(const Embedding& e1, const Embedding& e2) {
    double acc = 0.0;
    for (int i = 0; i < kEmbeddingDim; ++i) {
        const double d = static_cast<double>(e1[i]) - static_cast<double>(e2[i]);
        acc += d * d;
    }
    return -std::sqrt(acc);
}

namespace {
Embedding to_embedding(const nn::Tensor<float>& t) {
    Embedding e;
    for (int i = 0; i < kEmbeddingDim; ++i) e[static_cast<std::size_t>(i)] = t.data[static_cast<std::size_t>(i)];
    return e;
}
}  // namespace

Embedding embed_rn2dwt(const TimeSeries& s, const nn::ParamStore<float>& params) {
    return to_embedding(rn2dwt_forward<float>(params, s.values, nullptr));
}

Embedding embed_rn1d(const TimeSeries& s, const nn::ParamStore<float>& params) {
    return to_embedding(rn1d_forward<float>(params, s.values, nullptr));
}

Embedding embed_series(const TimeSeries& s, const nn::ParamStore<float>& params, ModelKind kind) {
    switch (kind) {
        case ModelKind::kRn2DwT: return embed_rn2dwt(s, params);
        case ModelKind::kRn1D: return embed_rn1d(s, params);
        case ModelKind::kRn2D: break;
    }
    throw std::invalid_argument("rn2d is a pairwise scorer, not an embedding model");
}

double score_rn2d(const TimeSeries& a, const TimeSeries& b, const nn::ParamStore<float>& params) {
    return static_cast<double>(rn2d_forward<float>(params, a.values, b.values, nullptr));
}

}  // namespace ctsr
