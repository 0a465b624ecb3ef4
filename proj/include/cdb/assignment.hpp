#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "cdb/error.hpp"
#include "cdb/numeric.hpp"

namespace cdb {

/// Minimum-cost assignment of rows to distinct columns (Hungarian method,
/// O(n^2 m)). `cost` is row-major rows x cols with rows <= cols. Returns the
/// column assigned to each row.
inline std::vector<std::size_t> optimal_assignment(std::span<const double> cost, std::size_t rows,
                                                   std::size_t cols) {
    if (rows > cols) throw Error(ErrorKind::InvalidArgument, "assignment needs rows <= cols");
    if (cost.size() != rows * cols) throw Error(ErrorKind::LengthMismatch, "cost matrix size");
    const double inf = std::numeric_limits<double>::infinity();
    // 1-based potentials; column 0 is the virtual source.
    std::vector<double> u(rows + 1, 0.0);
    std::vector<double> v(cols + 1, 0.0);
    std::vector<std::size_t> owner(cols + 1, 0);
    std::vector<std::size_t> way(cols + 1, 0);
    for (std::size_t i = 1; i <= rows; ++i) {
        owner[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(cols + 1, inf);
        std::vector<char> used(cols + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = owner[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= cols; ++j) {
                if (used[j]) continue;
                const double cur = cost[(i0 - 1) * cols + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= cols; ++j) {
                if (used[j]) {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (owner[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> result(rows, 0);
    for (std::size_t j = 1; j <= cols; ++j) {
        if (owner[j] != 0) result[owner[j] - 1] = j - 1;
    }
    return result;
}

struct PointMatching {
    std::vector<std::size_t> partner;  // index into `b` for every element of `a`
    double max_distance = 0.0;
};

/// Optimal matching of two point multisets by total distance; reports the
/// largest matched distance. Requires a.size() <= b.size().
inline PointMatching match_points(std::span<const Complex> a, std::span<const Complex> b) {
    std::vector<double> cost(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) cost[i * b.size() + j] = std::abs(a[i] - b[j]);
    PointMatching m;
    m.partner = optimal_assignment(cost, a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        m.max_distance = std::max(m.max_distance, std::abs(a[i] - b[m.partner[i]]));
    return m;
}

}  // namespace cdb
