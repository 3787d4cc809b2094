#pragma once

#include <cstddef>
#include <vector>

#include "ctsr/series.hpp"

namespace ctsr {

// Row-major w x h matrix of nonnegative local costs.
struct DistanceMatrix {
    std::size_t w = 0;
    std::size_t h = 0;
    std::vector<double> entries;  // entries[i * h + j]

    double at(std::size_t i, std::size_t j) const { return entries[i * h + j]; }
};

// Stacked |a_i - t_{k,j}| matrices, row-major with the channel innermost:
// entries[(i * h + j) * K + k].
struct DistanceTensor {
    std::size_t w = 0;
    std::size_t h = 0;
    std::size_t K = 0;
    std::vector<double> entries;

    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return entries[(i * h + j) * K + k];
    }
};

double euclidean_distance(const TimeSeries& a, const TimeSeries& b);

DistanceMatrix pairwise_abs_matrix(const TimeSeries& a, const TimeSeries& b);

// Unconstrained DTW over the |a_i - b_j| matrix with boundary-anchored
// accumulation; local cost is L1, the result is the summed path cost.
double dtw_distance(const TimeSeries& a, const TimeSeries& b);

// Exact minimum over all monotone boundary-anchored warping paths, found by
// exhaustive path enumeration. Only valid for w, h <= 8.
double dtw_brute_force(const TimeSeries& a, const TimeSeries& b);

DistanceTensor template_distance_tensor(const TimeSeries& a,
                                        const std::vector<TimeSeries>& templates);

}  // namespace ctsr
