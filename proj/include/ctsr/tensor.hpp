#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctsr::nn {

// Dense row-major tensor, channel innermost, rank <= 4. Layouts used across
// the project: [N,H,W,C] for 2-D maps, [N,L,C] for 1-D maps, [N,F] for
// feature vectors.
template <typename T>
struct Tensor {
    std::vector<std::int64_t> shape;
    std::vector<T> data;
    std::vector<T> grad;  // same length as data when requires_grad
    bool requires_grad = false;

    Tensor() = default;
    explicit Tensor(std::vector<std::int64_t> s, bool with_grad = false)
        : shape(std::move(s)) {
        data.assign(static_cast<std::size_t>(numel_of(shape)), T(0));
        if (with_grad) enable_grad();
    }

    static std::int64_t numel_of(const std::vector<std::int64_t>& s) {
        std::int64_t n = 1;
        for (auto d : s) {
            if (d <= 0) throw std::invalid_argument("tensor dims must be positive");
            n *= d;
        }
        return n;
    }

    std::int64_t numel() const { return static_cast<std::int64_t>(data.size()); }
    std::int64_t dim(std::size_t i) const { return shape.at(i); }
    std::size_t rank() const { return shape.size(); }

    void enable_grad() {
        requires_grad = true;
        grad.assign(data.size(), T(0));
    }
    void zero_grad() { std::fill(grad.begin(), grad.end(), T(0)); }

    bool same_shape(const Tensor& other) const { return shape == other.shape; }

    void check_finite(const char* what) const {
        for (const T& v : data)
            if (!std::isfinite(static_cast<double>(v)))
                throw std::runtime_error(std::string("non-finite value in ") + what);
    }
};

template <typename T>
std::string shape_str(const Tensor<T>& t) {
    std::string s = "[";
    for (std::size_t i = 0; i < t.shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(t.shape[i]);
    }
    return s + "]";
}

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

}  // namespace ctsr::nn
