#include "ctsr/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ctsr {

double euclidean_distance(const TimeSeries& a, const TimeSeries& b) {
    if (a.values.size() != b.values.size())
        throw std::invalid_argument("euclidean_distance: lengths differ (" +
                                    std::to_string(a.values.size()) + " vs " +
                                    std::to_string(b.values.size()) + ")");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

DistanceMatrix pairwise_abs_matrix(const TimeSeries& a, const TimeSeries& b) {
    DistanceMatrix m;
    m.w = a.values.size();
    m.h = b.values.size();
    m.entries.resize(m.w * m.h);
    for (std::size_t i = 0; i < m.w; ++i) {
        const double ai = a.values[i];
        double* row = &m.entries[i * m.h];
        for (std::size_t j = 0; j < m.h; ++j) row[j] = std::fabs(ai - b.values[j]);
    }
    return m;
}

double dtw_distance(const TimeSeries& a, const TimeSeries& b) {
    const std::size_t w = a.values.size();
    const std::size_t h = b.values.size();
    if (w == 0 || h == 0) throw std::invalid_argument("dtw_distance: empty series");

    // two-row DP over |a_i - b_j|
    std::vector<double> prev(h), cur(h);
    for (std::size_t j = 0; j < h; ++j) {
        const double c = std::fabs(a.values[0] - b.values[j]);
        prev[j] = j == 0 ? c : c + prev[j - 1];
    }
    for (std::size_t i = 1; i < w; ++i) {
        const double ai = a.values[i];
        cur[0] = std::fabs(ai - b.values[0]) + prev[0];
        for (std::size_t j = 1; j < h; ++j) {
            const double c = std::fabs(ai - b.values[j]);
            cur[j] = c + std::min({prev[j], cur[j - 1], prev[j - 1]});
        }
        std::swap(prev, cur);
    }
    return prev[h - 1];
}

namespace {

void enumerate_paths(const DistanceMatrix& m, std::size_t i, std::size_t j, double cost,
                     double* best) {
    cost += m.at(i, j);
    if (cost >= *best) return;  // cost only grows along a path
    if (i + 1 == m.w && j + 1 == m.h) {
        *best = cost;
        return;
    }
    if (i + 1 < m.w && j + 1 < m.h) enumerate_paths(m, i + 1, j + 1, cost, best);
    if (i + 1 < m.w) enumerate_paths(m, i + 1, j, cost, best);
    if (j + 1 < m.h) enumerate_paths(m, i, j + 1, cost, best);
}

}  // namespace

double dtw_brute_force(const TimeSeries& a, const TimeSeries& b) {
    const std::size_t w = a.values.size();
    const std::size_t h = b.values.size();
    if (w == 0 || h == 0) throw std::invalid_argument("dtw_brute_force: empty series");
    if (w > 8 || h > 8)
        throw std::invalid_argument("dtw_brute_force: inputs too long (limit 8)");
    const DistanceMatrix m = pairwise_abs_matrix(a, b);
    double best = std::numeric_limits<double>::infinity();
    enumerate_paths(m, 0, 0, 0.0, &best);
    return best;
}

DistanceTensor template_distance_tensor(const TimeSeries& a,
                                        const std::vector<TimeSeries>& templates) {
    if (templates.empty())
        throw std::invalid_argument("template_distance_tensor: no templates");
    const std::size_t h = templates.front().values.size();
    for (const auto& t : templates)
        if (t.values.size() != h)
            throw std::invalid_argument("template_distance_tensor: template lengths differ");
    DistanceTensor d;
    d.w = a.values.size();
    d.h = h;
    d.K = templates.size();
    d.entries.resize(d.w * d.h * d.K);
    for (std::size_t i = 0; i < d.w; ++i) {
        const double ai = a.values[i];
        for (std::size_t j = 0; j < h; ++j) {
            double* cell = &d.entries[(i * h + j) * d.K];
            for (std::size_t k = 0; k < d.K; ++k)
                cell[k] = std::fabs(ai - templates[k].values[j]);
        }
    }
    return d;
}

}  // namespace ctsr
