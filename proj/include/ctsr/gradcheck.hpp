#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

#include "ctsr/rng.hpp"
#include "ctsr/tensor.hpp"

namespace ctsr::nn {

// f maps a tensor to (scalar value, analytic gradient w.r.t. that tensor).
// Central differences per coordinate, relative error with a max(1, |analytic|)
// denominator. Returns the max relative error over the checked coordinates.
template <typename F>
double finite_difference_check(F&& f, const Tensor<double>& x, double step) {
    const auto [value0, analytic] = f(x);
    (void)value0;
    Tensor<double> probe = x;
    double max_err = 0.0;
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        const double orig = probe.data[i];
        probe.data[i] = orig + step;
        const double fp = f(probe).first;
        probe.data[i] = orig - step;
        const double fm = f(probe).first;
        probe.data[i] = orig;
        const double fd = (fp - fm) / (2.0 * step);
        const double an = analytic.data[i];
        const double err = std::fabs(fd - an) / std::max(1.0, std::fabs(an));
        if (err > max_err) max_err = err;
    }
    return max_err;
}

// Same check restricted to n_coords randomly chosen coordinates; used for
// whole-model checks where the full sweep would be too slow.
template <typename F>
double finite_difference_check_sampled(F&& f, const Tensor<double>& x, double step,
                                       std::size_t n_coords, std::mt19937_64& rng) {
    const auto [value0, analytic] = f(x);
    (void)value0;
    Tensor<double> probe = x;
    double max_err = 0.0;
    const std::size_t total = x.data.size();
    for (std::size_t c = 0; c < n_coords; ++c) {
        const std::size_t i = static_cast<std::size_t>(uniform_index(rng, total));
        const double orig = probe.data[i];
        probe.data[i] = orig + step;
        const double fp = f(probe).first;
        probe.data[i] = orig - step;
        const double fm = f(probe).first;
        probe.data[i] = orig;
        const double fd = (fp - fm) / (2.0 * step);
        const double an = analytic.data[i];
        const double err = std::fabs(fd - an) / std::max(1.0, std::fabs(an));
        if (err > max_err) max_err = err;
    }
    return max_err;
}

template <typename T>
Tensor<T> random_tensor(std::vector<std::int64_t> shape, std::mt19937_64& rng, double scale = 1.0) {
    Tensor<T> t(std::move(shape));
    for (auto& v : t.data) v = static_cast<T>(scale * normal(rng));
    return t;
}

}  // namespace ctsr::nn
