#pragma once

#include "mincop/prob_array.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace mincop::testing {

/// Positive random array normalized to one, with the rounding residue put on
/// the first cell so that the sum is exact enough for ProbArray.
inline ProbArray random_prob_array(const GridShape& shape, std::mt19937_64& rng, double zero_fraction = 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(shape.size());
    double total = 0.0;
    for (double& x : v) {
        x = u(rng) < zero_fraction ? 0.0 : 0.1 + u(rng);
        total += x;
    }
    if (total == 0.0) {
        v[0] = 1.0;
        total = 1.0;
    }
    for (double& x : v) x /= total;
    return {shape, std::move(v)};
}

/// Sums by decoding every cell's multi-index; independent of the library's strides.
inline std::vector<double> brute_margin(const ProbArray& p, const Axes& axes) {
    const std::size_t n = p.shape().n();
    std::size_t size = 1;
    for (std::size_t k = 0; k < axes.size(); ++k) size *= n;
    std::vector<double> out(size, 0.0);
    for (std::size_t linear = 0; linear < p.size(); ++linear) {
        std::size_t rem = linear;
        std::vector<std::size_t> idx(p.shape().dims());
        for (std::size_t k = p.shape().dims(); k-- > 0;) {
            idx[k] = rem % n;
            rem /= n;
        }
        std::size_t sub = 0;
        for (std::size_t a : axes) sub = sub * n + idx[a];
        out[sub] += p[linear];
    }
    return out;
}

inline double max_abs(const std::vector<double>& a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

}  // namespace mincop::testing
