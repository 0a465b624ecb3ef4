#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "cdb/error.hpp"
#include "cdb/numeric.hpp"

namespace cdb {

/// inf_n prod_{k != n} |(z_n - z_k) / (z_n - conj(z_k))| over the points,
/// accumulated as sums of logarithms.
inline double carleson_constant(std::span<const Complex> pts, unsigned threads = 1) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!is_finite(pts[i])) throw Error(ErrorKind::NonfiniteValue, "point " + std::to_string(i), {i});
        if (!(pts[i].imag() > 0.0))
            throw Error(ErrorKind::PointOnRealLine, "point " + std::to_string(i), {i});
    }
    if (pts.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least two points");
    std::vector<double> logs(pts.size());
    parallel_for(pts.size(), threads, [&](std::size_t n) {
        std::vector<double> terms;
        terms.reserve(pts.size());
        for (std::size_t k = 0; k < pts.size(); ++k) {
            if (k == n) continue;
            const double num = std::abs(pts[n] - pts[k]);
            if (num == 0.0) {
                terms.push_back(-std::numeric_limits<double>::infinity());
                continue;
            }
            terms.push_back(std::log(num) - std::log(std::abs(pts[n] - std::conj(pts[k]))));
        }
        logs[n] = sorted_sum(terms);
    });
    const double lo = *std::min_element(logs.begin(), logs.end());
    return std::exp(lo);
}

/// alpha = (i + gamma) / (i - gamma).
inline Complex gamma_to_alpha(Complex gamma) {
    if (gamma == kI) throw Error(ErrorKind::MapPole, "gamma = i");
    return (kI + gamma) / (kI - gamma);
}

/// gamma = i (alpha - 1) / (alpha + 1), the inverse map.
inline Complex alpha_to_gamma(Complex alpha) {
    if (alpha == Complex{-1.0, 0.0}) throw Error(ErrorKind::MapPole, "alpha = -1");
    return kI * (alpha - 1.0) / (alpha + 1.0);
}

}  // namespace cdb
