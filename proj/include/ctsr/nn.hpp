#pragma once

#include <algorithm>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctsr/tensor.hpp"

// Forward and backward passes for the layers the models are built from.
// Backward functions accumulate (+=) into caller-provided buffers so that
// parameter gradients from several inputs can be summed in a fixed order;
// null buffers skip that gradient. All loops run in a fixed order, so results
// are bit-reproducible for identical inputs.
namespace ctsr::nn {

namespace detail {

template <typename T>
inline T dot(const T* a, const T* b, std::int64_t n) {
    T s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0, s6 = 0, s7 = 0;
    std::int64_t i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
        s4 += a[i + 4] * b[i + 4];
        s5 += a[i + 5] * b[i + 5];
        s6 += a[i + 6] * b[i + 6];
        s7 += a[i + 7] * b[i + 7];
    }
    T s = ((s0 + s1) + (s2 + s3)) + ((s4 + s5) + (s6 + s7));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// zero-padded copy of one [H,W,C] image
template <typename T>
void pad_image(const T* src, std::int64_t H, std::int64_t W, std::int64_t C,
               std::int64_t pad, std::vector<T>& dst) {
    const std::int64_t Hp = H + 2 * pad, Wp = W + 2 * pad;
    dst.assign(static_cast<std::size_t>(Hp * Wp * C), T(0));
    for (std::int64_t y = 0; y < H; ++y)
        std::memcpy(dst.data() + ((y + pad) * Wp + pad) * C, src + y * W * C,
                    sizeof(T) * static_cast<std::size_t>(W * C));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// conv2d: input [N,H,W,Cin], weight [kh,kw,Cin,Cout], bias [Cout]
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias,
                 int stride, int padding) {
    detail::require(input.rank() == 4, "conv2d: input must be [N,H,W,Cin], got " + shape_str(input));
    detail::require(weight.rank() == 4, "conv2d: weight must be [kh,kw,Cin,Cout]");
    detail::require(bias.rank() == 1, "conv2d: bias must be [Cout]");
    detail::require(stride == 1 || stride == 2, "conv2d: stride must be 1 or 2");
    detail::require(padding >= 0, "conv2d: padding must be >= 0");
    const std::int64_t N = input.dim(0), H = input.dim(1), W = input.dim(2), Cin = input.dim(3);
    const std::int64_t kh = weight.dim(0), kw = weight.dim(1), Cout = weight.dim(3);
    detail::require(weight.dim(2) == Cin, "conv2d: weight Cin " + std::to_string(weight.dim(2)) +
                                              " != input Cin " + std::to_string(Cin));
    detail::require(bias.dim(0) == Cout, "conv2d: bias size != Cout");
    const std::int64_t Hp = H + 2 * padding, Wp = W + 2 * padding;
    detail::require(Hp >= kh && Wp >= kw, "conv2d: kernel larger than padded input");
    const std::int64_t Ho = (Hp - kh) / stride + 1;
    const std::int64_t Wo = (Wp - kw) / stride + 1;

    Tensor<T> out({N, Ho, Wo, Cout});
    std::vector<T> padded;
    std::vector<T> acc(static_cast<std::size_t>(Cout));
    for (std::int64_t n = 0; n < N; ++n) {
        detail::pad_image(input.data.data() + n * H * W * Cin, H, W, Cin, padding, padded);
        T* out_n = out.data.data() + n * Ho * Wo * Cout;
        for (std::int64_t yo = 0; yo < Ho; ++yo) {
            for (std::int64_t xo = 0; xo < Wo; ++xo) {
                std::copy(bias.data.begin(), bias.data.end(), acc.begin());
                const std::int64_t y0 = yo * stride, x0 = xo * stride;
                for (std::int64_t ky = 0; ky < kh; ++ky) {
                    const T* in_row = padded.data() + ((y0 + ky) * Wp + x0) * Cin;
                    const T* w_row = weight.data.data() + ky * kw * Cin * Cout;
                    for (std::int64_t kx = 0; kx < kw; ++kx) {
                        const T* in_px = in_row + kx * Cin;
                        const T* w_px = w_row + kx * Cin * Cout;
                        for (std::int64_t ci = 0; ci < Cin; ++ci) {
                            const T a = in_px[ci];
                            const T* wr = w_px + ci * Cout;
                            for (std::int64_t co = 0; co < Cout; ++co) acc[co] += a * wr[co];
                        }
                    }
                }
                std::copy(acc.begin(), acc.end(), out_n + (yo * Wo + xo) * Cout);
            }
        }
    }
    return out;
}

template <typename T>
void conv2d_backward(const Tensor<T>& input, const Tensor<T>& weight, int stride, int padding,
                     const Tensor<T>& grad_out, T* grad_input, T* grad_weight, T* grad_bias) {
    const std::int64_t N = input.dim(0), H = input.dim(1), W = input.dim(2), Cin = input.dim(3);
    const std::int64_t kh = weight.dim(0), kw = weight.dim(1), Cout = weight.dim(3);
    const std::int64_t Hp = H + 2 * padding, Wp = W + 2 * padding;
    const std::int64_t Ho = grad_out.dim(1), Wo = grad_out.dim(2);
    detail::require(grad_out.dim(0) == N && grad_out.dim(3) == Cout &&
                        Ho == (Hp - kh) / stride + 1 && Wo == (Wp - kw) / stride + 1,
                    "conv2d_backward: grad_out shape mismatch");

    std::vector<T> padded, gpad;
    std::vector<T> acc(static_cast<std::size_t>(Cout));
    for (std::int64_t n = 0; n < N; ++n) {
        const T* go_n = grad_out.data.data() + n * Ho * Wo * Cout;
        if (grad_bias) {
            for (std::int64_t p = 0; p < Ho * Wo; ++p)
                for (std::int64_t co = 0; co < Cout; ++co) grad_bias[co] += go_n[p * Cout + co];
        }
        if (grad_weight) {
            detail::pad_image(input.data.data() + n * H * W * Cin, H, W, Cin, padding, padded);
            for (std::int64_t ky = 0; ky < kh; ++ky) {
                for (std::int64_t kx = 0; kx < kw; ++kx) {
                    for (std::int64_t ci = 0; ci < Cin; ++ci) {
                        std::fill(acc.begin(), acc.end(), T(0));
                        for (std::int64_t yo = 0; yo < Ho; ++yo) {
                            const T* prow = padded.data() + ((yo * stride + ky) * Wp + kx) * Cin + ci;
                            const T* grow = go_n + yo * Wo * Cout;
                            for (std::int64_t xo = 0; xo < Wo; ++xo) {
                                const T a = prow[xo * stride * Cin];
                                const T* g = grow + xo * Cout;
                                for (std::int64_t co = 0; co < Cout; ++co) acc[co] += a * g[co];
                            }
                        }
                        T* gw = grad_weight + ((ky * kw + kx) * Cin + ci) * Cout;
                        for (std::int64_t co = 0; co < Cout; ++co) gw[co] += acc[co];
                    }
                }
            }
        }
        if (grad_input) {
            gpad.assign(static_cast<std::size_t>(Hp * Wp * Cin), T(0));
            for (std::int64_t yo = 0; yo < Ho; ++yo) {
                for (std::int64_t xo = 0; xo < Wo; ++xo) {
                    const T* g = go_n + (yo * Wo + xo) * Cout;
                    const std::int64_t y0 = yo * stride, x0 = xo * stride;
                    for (std::int64_t ky = 0; ky < kh; ++ky) {
                        T* gp_row = gpad.data() + ((y0 + ky) * Wp + x0) * Cin;
                        const T* w_row = weight.data.data() + ky * kw * Cin * Cout;
                        for (std::int64_t kx = 0; kx < kw; ++kx) {
                            T* gp = gp_row + kx * Cin;
                            const T* w_px = w_row + kx * Cin * Cout;
                            for (std::int64_t ci = 0; ci < Cin; ++ci)
                                gp[ci] += detail::dot(w_px + ci * Cout, g, Cout);
                        }
                    }
                }
            }
            T* gi_n = grad_input + n * H * W * Cin;
            for (std::int64_t y = 0; y < H; ++y) {
                const T* src = gpad.data() + ((y + padding) * Wp + padding) * Cin;
                T* dst = gi_n + y * W * Cin;
                for (std::int64_t i = 0; i < W * Cin; ++i) dst[i] += src[i];
            }
        }
    }
}

// ---------------------------------------------------------------------------
// conv1d: input [N,L,Cin], weight [k,Cin,Cout], bias [Cout]
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> conv1d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias,
                 int stride, int padding) {
    detail::require(input.rank() == 3, "conv1d: input must be [N,L,Cin], got " + shape_str(input));
    detail::require(weight.rank() == 3, "conv1d: weight must be [k,Cin,Cout]");
    detail::require(stride == 1 || stride == 2, "conv1d: stride must be 1 or 2");
    const std::int64_t N = input.dim(0), L = input.dim(1), Cin = input.dim(2);
    const std::int64_t k = weight.dim(0), Cout = weight.dim(2);
    detail::require(weight.dim(1) == Cin, "conv1d: weight Cin mismatch");
    detail::require(bias.rank() == 1 && bias.dim(0) == Cout, "conv1d: bias size != Cout");
    const std::int64_t Lp = L + 2 * padding;
    detail::require(Lp >= k, "conv1d: kernel larger than padded input");
    const std::int64_t Lo = (Lp - k) / stride + 1;

    Tensor<T> out({N, Lo, Cout});
    std::vector<T> padded;
    std::vector<T> acc(static_cast<std::size_t>(Cout));
    for (std::int64_t n = 0; n < N; ++n) {
        padded.assign(static_cast<std::size_t>(Lp * Cin), T(0));
        std::memcpy(padded.data() + padding * Cin, input.data.data() + n * L * Cin,
                    sizeof(T) * static_cast<std::size_t>(L * Cin));
        for (std::int64_t lo = 0; lo < Lo; ++lo) {
            std::copy(bias.data.begin(), bias.data.end(), acc.begin());
            const T* in_base = padded.data() + lo * stride * Cin;
            for (std::int64_t kk = 0; kk < k; ++kk) {
                const T* in_px = in_base + kk * Cin;
                const T* w_px = weight.data.data() + kk * Cin * Cout;
                for (std::int64_t ci = 0; ci < Cin; ++ci) {
                    const T a = in_px[ci];
                    const T* wr = w_px + ci * Cout;
                    for (std::int64_t co = 0; co < Cout; ++co) acc[co] += a * wr[co];
                }
            }
            std::copy(acc.begin(), acc.end(), out.data.data() + (n * Lo + lo) * Cout);
        }
    }
    return out;
}

template <typename T>
void conv1d_backward(const Tensor<T>& input, const Tensor<T>& weight, int stride, int padding,
                     const Tensor<T>& grad_out, T* grad_input, T* grad_weight, T* grad_bias) {
    const std::int64_t N = input.dim(0), L = input.dim(1), Cin = input.dim(2);
    const std::int64_t k = weight.dim(0), Cout = weight.dim(2);
    const std::int64_t Lp = L + 2 * padding;
    const std::int64_t Lo = grad_out.dim(1);
    detail::require(grad_out.dim(0) == N && grad_out.dim(2) == Cout && Lo == (Lp - k) / stride + 1,
                    "conv1d_backward: grad_out shape mismatch");

    std::vector<T> padded(static_cast<std::size_t>(Lp * Cin)), gpad;
    for (std::int64_t n = 0; n < N; ++n) {
        const T* go_n = grad_out.data.data() + n * Lo * Cout;
        std::fill(padded.begin(), padded.end(), T(0));
        std::memcpy(padded.data() + padding * Cin, input.data.data() + n * L * Cin,
                    sizeof(T) * static_cast<std::size_t>(L * Cin));
        if (grad_bias) {
            for (std::int64_t p = 0; p < Lo; ++p)
                for (std::int64_t co = 0; co < Cout; ++co) grad_bias[co] += go_n[p * Cout + co];
        }
        if (grad_weight) {
            for (std::int64_t kk = 0; kk < k; ++kk) {
                for (std::int64_t ci = 0; ci < Cin; ++ci) {
                    T* gw = grad_weight + (kk * Cin + ci) * Cout;
                    for (std::int64_t lo = 0; lo < Lo; ++lo) {
                        const T a = padded[(lo * stride + kk) * Cin + ci];
                        const T* g = go_n + lo * Cout;
                        for (std::int64_t co = 0; co < Cout; ++co) gw[co] += a * g[co];
                    }
                }
            }
        }
        if (grad_input) {
            gpad.assign(static_cast<std::size_t>(Lp * Cin), T(0));
            for (std::int64_t lo = 0; lo < Lo; ++lo) {
                const T* g = go_n + lo * Cout;
                T* gp_base = gpad.data() + lo * stride * Cin;
                for (std::int64_t kk = 0; kk < k; ++kk) {
                    T* gp = gp_base + kk * Cin;
                    const T* w_px = weight.data.data() + kk * Cin * Cout;
                    for (std::int64_t ci = 0; ci < Cin; ++ci)
                        gp[ci] += detail::dot(w_px + ci * Cout, g, Cout);
                }
            }
            T* gi_n = grad_input + n * L * Cin;
            const T* src = gpad.data() + padding * Cin;
            for (std::int64_t i = 0; i < L * Cin; ++i) gi_n[i] += src[i];
        }
    }
}

// ---------------------------------------------------------------------------
// relu
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> relu(const Tensor<T>& input) {
    Tensor<T> out(input.shape);
    for (std::size_t i = 0; i < input.data.size(); ++i)
        out.data[i] = input.data[i] > T(0) ? input.data[i] : T(0);
    return out;
}

// Mask comes from the forward output: out > 0 iff in > 0, and the subgradient
// at 0 is 0.
template <typename T>
void relu_backward(const Tensor<T>& out, const Tensor<T>& grad_out, T* grad_input) {
    for (std::size_t i = 0; i < out.data.size(); ++i)
        if (out.data[i] > T(0)) grad_input[i] += grad_out.data[i];
}

// ---------------------------------------------------------------------------
// linear: input [N,F], weight [F,G], bias [G]
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> linear(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias) {
    detail::require(input.rank() == 2, "linear: input must be [N,F]");
    detail::require(weight.rank() == 2 && weight.dim(0) == input.dim(1),
                    "linear: weight rows " + std::to_string(weight.dim(0)) +
                        " != input features " + std::to_string(input.dim(1)));
    detail::require(bias.rank() == 1 && bias.dim(0) == weight.dim(1), "linear: bias size mismatch");
    const std::int64_t N = input.dim(0), F = input.dim(1), G = weight.dim(1);
    Tensor<T> out({N, G});
    for (std::int64_t n = 0; n < N; ++n) {
        T* o = out.data.data() + n * G;
        std::copy(bias.data.begin(), bias.data.end(), o);
        const T* in = input.data.data() + n * F;
        for (std::int64_t f = 0; f < F; ++f) {
            const T a = in[f];
            const T* w = weight.data.data() + f * G;
            for (std::int64_t g = 0; g < G; ++g) o[g] += a * w[g];
        }
    }
    return out;
}

template <typename T>
void linear_backward(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& grad_out,
                     T* grad_input, T* grad_weight, T* grad_bias) {
    const std::int64_t N = input.dim(0), F = input.dim(1), G = weight.dim(1);
    detail::require(grad_out.dim(0) == N && grad_out.dim(1) == G,
                    "linear_backward: grad_out shape mismatch");
    for (std::int64_t n = 0; n < N; ++n) {
        const T* g = grad_out.data.data() + n * G;
        const T* in = input.data.data() + n * F;
        if (grad_bias)
            for (std::int64_t j = 0; j < G; ++j) grad_bias[j] += g[j];
        if (grad_weight) {
            for (std::int64_t f = 0; f < F; ++f) {
                const T a = in[f];
                T* gw = grad_weight + f * G;
                for (std::int64_t j = 0; j < G; ++j) gw[j] += a * g[j];
            }
        }
        if (grad_input) {
            T* gi = grad_input + n * F;
            for (std::int64_t f = 0; f < F; ++f)
                gi[f] += detail::dot(weight.data.data() + f * G, g, G);
        }
    }
}

// ---------------------------------------------------------------------------
// global average pooling: [N,H,W,C] or [N,L,C] -> [N,C]
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> global_avg_pool(const Tensor<T>& input) {
    detail::require(input.rank() == 3 || input.rank() == 4,
                    "global_avg_pool: input must be [N,H,W,C] or [N,L,C]");
    const std::int64_t N = input.dim(0);
    const std::int64_t C = input.dim(input.rank() - 1);
    const std::int64_t S = input.numel() / (N * C);
    Tensor<T> out({N, C});
    const T inv = T(1) / static_cast<T>(S);
    for (std::int64_t n = 0; n < N; ++n) {
        T* o = out.data.data() + n * C;
        const T* in = input.data.data() + n * S * C;
        for (std::int64_t s = 0; s < S; ++s)
            for (std::int64_t c = 0; c < C; ++c) o[c] += in[s * C + c];
        for (std::int64_t c = 0; c < C; ++c) o[c] *= inv;
    }
    return out;
}

template <typename T>
void global_avg_pool_backward(const Tensor<T>& input, const Tensor<T>& grad_out, T* grad_input) {
    const std::int64_t N = input.dim(0);
    const std::int64_t C = input.dim(input.rank() - 1);
    const std::int64_t S = input.numel() / (N * C);
    const T inv = T(1) / static_cast<T>(S);
    for (std::int64_t n = 0; n < N; ++n) {
        const T* g = grad_out.data.data() + n * C;
        T* gi = grad_input + n * S * C;
        for (std::int64_t s = 0; s < S; ++s)
            for (std::int64_t c = 0; c < C; ++c) gi[s * C + c] += g[c] * inv;
    }
}

// ---------------------------------------------------------------------------
// elementwise add
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
    detail::require(a.same_shape(b), "add: shapes differ, " + shape_str(a) + " vs " + shape_str(b));
    Tensor<T> out(a.shape);
    for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] + b.data[i];
    return out;
}

template <typename T>
void add_backward(const Tensor<T>& grad_out, T* grad_a, T* grad_b) {
    if (grad_a)
        for (std::size_t i = 0; i < grad_out.data.size(); ++i) grad_a[i] += grad_out.data[i];
    if (grad_b)
        for (std::size_t i = 0; i < grad_out.data.size(); ++i) grad_b[i] += grad_out.data[i];
}

// ---------------------------------------------------------------------------
// asymmetric 1-D zero padding (for even kernels): [N,L,C] -> [N,left+L+right,C]
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> pad1d(const Tensor<T>& input, std::int64_t left, std::int64_t right) {
    detail::require(input.rank() == 3, "pad1d: input must be [N,L,C]");
    const std::int64_t N = input.dim(0), L = input.dim(1), C = input.dim(2);
    Tensor<T> out({N, left + L + right, C});
    for (std::int64_t n = 0; n < N; ++n)
        std::memcpy(out.data.data() + (n * (left + L + right) + left) * C,
                    input.data.data() + n * L * C, sizeof(T) * static_cast<std::size_t>(L * C));
    return out;
}

template <typename T>
void pad1d_backward(const Tensor<T>& input, std::int64_t left, const Tensor<T>& grad_out,
                    T* grad_input) {
    const std::int64_t N = input.dim(0), L = input.dim(1), C = input.dim(2);
    const std::int64_t Lp = grad_out.dim(1);
    for (std::int64_t n = 0; n < N; ++n) {
        const T* g = grad_out.data.data() + (n * Lp + left) * C;
        T* gi = grad_input + n * L * C;
        for (std::int64_t i = 0; i < L * C; ++i) gi[i] += g[i];
    }
}

}  // namespace ctsr::nn
