#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cdb/error.hpp"
#include "cdb/numeric.hpp"
#include "cdb/spectra.hpp"
#include "cdb/zeros.hpp"

namespace cdb {

/// Reproducing kernel at w in orthonormal-basis coordinates, normalized.
/// raw_norm is the l2 norm of (mu_n^(1/2) / (conj(w) - conj(t_n)))_n, which
/// is infinite at a node.
struct KernelVector {
    Complex point;
    std::vector<Complex> coeffs;
    double raw_norm = 0.0;
    bool is_node = false;
    std::size_t node_index = 0;
};

inline KernelVector kernel_vector(const Spectrum& s, Complex w) {
    KernelVector k;
    k.point = w;
    k.coeffs.assign(s.size(), Complex{0.0, 0.0});
    for (std::size_t n = 0; n < s.size(); ++n) {
        if (s.node(n) == w) {
            k.is_node = true;
            k.node_index = n;
            k.coeffs[n] = 1.0;
            k.raw_norm = std::numeric_limits<double>::infinity();
            return k;
        }
    }
    std::vector<double> sq(s.size());
    for (std::size_t n = 0; n < s.size(); ++n) {
        k.coeffs[n] = std::sqrt(s.weight(n)) / std::conj(w - s.node(n));
        sq[n] = std::norm(k.coeffs[n]);
    }
    k.raw_norm = std::sqrt(sorted_sum(sq));
    for (Complex& c : k.coeffs) c /= k.raw_norm;
    return k;
}

struct KernelFrameReport {
    std::vector<Complex> points;
    Eigen::MatrixXcd gram;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double condition = 0.0;  // infinite when lambda_min < singular_floor
    std::size_t truncation = 0;
};

inline constexpr double kSingularFloor = 1e-10;

/// G_jk = <u_k, u_j> over normalized kernels u at the points.
inline KernelFrameReport gram(const Spectrum& s, std::span<const Complex> points,
                              unsigned threads = 1) {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!is_finite(points[i]))
            throw Error(ErrorKind::NonfiniteValue, "point " + std::to_string(i), {i});
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (points[i] == points[j])
                throw Error(ErrorKind::DuplicatePoint,
                            "points " + std::to_string(i) + " and " + std::to_string(j), {i, j});
    }
    KernelFrameReport r;
    r.points.assign(points.begin(), points.end());
    r.truncation = s.size();
    const Eigen::Index N = static_cast<Eigen::Index>(s.size());
    const Eigen::Index P = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXcd U(N, P);
    parallel_for(points.size(), threads, [&](std::size_t j) {
        const KernelVector k = kernel_vector(s, points[j]);
        for (Eigen::Index n = 0; n < N; ++n) U(n, static_cast<Eigen::Index>(j)) = k.coeffs[n];
    });
    r.gram = U.adjoint() * U;
    if (P == 0) return r;
    // Hermitian up to rounding; symmetrize before the eigensolve.
    const Eigen::MatrixXcd H = 0.5 * (r.gram + r.gram.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::NonConvergence, "Hermitian eigensolve");
    r.lambda_min = std::max(0.0, es.eigenvalues().minCoeff());
    r.lambda_max = es.eigenvalues().maxCoeff();
    r.condition = r.lambda_min < kSingularFloor ? std::numeric_limits<double>::infinity()
                                                : r.lambda_max / r.lambda_min;
    return r;
}

struct ClosenessReport {
    std::vector<std::size_t> indices;  // node indices in summation order
    std::vector<double> terms;
    std::vector<double> partial_sums;
    double bound_ratio = 0.0;
};

/// Terms |s_n - t_n|^2 sum_{k != n} mu_k / |s_n - t_k|^2 / mu_n over paired
/// nodes (all paired nodes when `indices` is empty). bound_ratio compares the
/// total with sum |c_n|^2, c_n = -mu_n^(1/2) / gamma.
inline ClosenessReport quadratic_closeness(const Spectrum& s, const ZeroPairing& pairing,
                                           std::span<const Complex> zeros, Complex gamma,
                                           std::span<const std::size_t> indices = {}) {
    if (gamma == Complex{}) throw Error(ErrorKind::GammaZero, "closeness needs gamma != 0");
    ClosenessReport r;
    if (indices.empty()) {
        for (const ZeroPair& p : pairing.pairs) r.indices.push_back(p.node_index);
    } else {
        r.indices.assign(indices.begin(), indices.end());
    }
    std::vector<Complex> paired(s.size());
    std::vector<char> has(s.size(), 0);
    for (const ZeroPair& p : pairing.pairs) {
        if (p.node_index >= s.size() || p.zero_index >= zeros.size())
            throw Error(ErrorKind::InvalidArgument, "pairing does not fit the inputs");
        paired[p.node_index] = zeros[p.zero_index];
        has[p.node_index] = 1;
    }
    std::vector<double> c_terms;
    double acc = 0.0;
    for (std::size_t n : r.indices) {
        if (n >= s.size() || !has[n])
            throw Error(ErrorKind::MissingPair, "node " + std::to_string(n), {n});
        const Complex sn = paired[n];
        std::vector<double> inner;
        for (std::size_t k = 0; k < s.size(); ++k)
            if (k != n) inner.push_back(s.weight(k) / std::norm(sn - s.node(k)));
        const double term = std::norm(sn - s.node(n)) * sorted_sum(inner) / s.weight(n);
        r.terms.push_back(term);
        acc += term;
        r.partial_sums.push_back(acc);
        c_terms.push_back(s.weight(n) / std::norm(gamma));
    }
    const double denom = sorted_sum(c_terms);
    r.bound_ratio = denom > 0.0 ? acc / denom : 0.0;
    return r;
}

/// <f, u_w> for each point: (sum_n f_n mu_n^(1/2) / (w - t_n)) / raw_norm(w),
/// and f_m at a node t_m.
inline std::vector<Complex> analysis_coefficients(const Spectrum& s, std::span<const Complex> f,
                                                  std::span<const Complex> points) {
    if (f.size() != s.size())
        throw Error(ErrorKind::LengthMismatch, "coefficients differ in length from spectrum");
    std::vector<Complex> out(points.size());
    for (std::size_t j = 0; j < points.size(); ++j) {
        const KernelVector k = kernel_vector(s, points[j]);
        std::vector<Complex> terms(s.size());
        for (std::size_t n = 0; n < s.size(); ++n) terms[n] = f[n] * std::conj(k.coeffs[n]);
        out[j] = sorted_sum(terms);
    }
    return out;
}

struct BVectors {
    std::vector<std::vector<Complex>> vectors;  // j = 0..N-1, (conj(t_n)^j mu_n^(1/2))_n
    std::vector<double> moment_check;           // moment_sum(s, j)
    std::optional<bool> moment_condition;       // sum |t|^(2N-2) mu finite per classify
};

inline BVectors bvectors(const Spectrum& s, unsigned N) {
    if (!s.origin_excluded()) throw Error(ErrorKind::OriginInSpectrum, "0 is a node");
    if (N == 0) throw Error(ErrorKind::InvalidArgument, "N must be positive");
    BVectors b;
    for (unsigned j = 0; j < N; ++j) {
        std::vector<Complex> v(s.size());
        for (std::size_t n = 0; n < s.size(); ++n)
            v[n] = std::pow(std::conj(s.node(n)), static_cast<int>(j)) * std::sqrt(s.weight(n));
        b.vectors.push_back(std::move(v));
        b.moment_check.push_back(moment_sum(s, j));
    }
    const SpectrumClass c = classify(s);
    if (c.confidence != Confidence::unknown && c.law) b.moment_condition = moment_converges(*c.law, N - 1);
    return b;
}

/// f minus its orthogonal projection onto span(vectors), applied twice.
inline std::vector<Complex> project_out(std::span<const std::vector<Complex>> vectors,
                                        std::span<const Complex> f) {
    const Eigen::Index n = static_cast<Eigen::Index>(f.size());
    const Eigen::Index m = static_cast<Eigen::Index>(vectors.size());
    Eigen::MatrixXcd B(n, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        if (static_cast<Eigen::Index>(vectors[j].size()) != n)
            throw Error(ErrorKind::LengthMismatch, "constraint vector length");
        for (Eigen::Index i = 0; i < n; ++i) B(i, j) = vectors[j][i];
    }
    Eigen::VectorXcd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = f[i];
    if (m == 0) return {f.begin(), f.end()};
    if (m > n) throw Error(ErrorKind::RankDeficient, "more constraints than coordinates");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(B);
    qr.setThreshold(1e-13);
    if (qr.rank() < m) throw Error(ErrorKind::RankDeficient, "constraint vectors are dependent");
    const Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, m);
    for (int pass = 0; pass < 2; ++pass) x -= Q * (Q.adjoint() * x);
    std::vector<Complex> out(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) out[i] = x(i);
    return out;
}

/// Projection onto the orthogonal complement of span{B_0, ..., B_{N-1}}.
inline std::vector<Complex> project_domain(const Spectrum& s, std::span<const Complex> f,
                                           unsigned N) {
    if (f.size() != s.size())
        throw Error(ErrorKind::LengthMismatch, "coefficients differ in length from spectrum");
    const BVectors b = bvectors(s, N);
    if (N == s.size()) return std::vector<Complex>(s.size(), Complex{0.0, 0.0});
    return project_out(b.vectors, f);
}

/// <f, b> for the coefficient inner product sum f_n conj(b_n).
inline Complex inner(std::span<const Complex> f, std::span<const Complex> b) {
    if (f.size() != b.size()) throw Error(ErrorKind::LengthMismatch, "inner product lengths");
    std::vector<Complex> terms(f.size());
    for (std::size_t n = 0; n < f.size(); ++n) terms[n] = f[n] * std::conj(b[n]);
    return sorted_sum(terms);
}

/// Coefficients of F / (z - lambda) when F(lambda) = 0: c_n / (t_n - lambda).
inline std::vector<Complex> divide_at(const Spectrum& s, std::span<const Complex> f, Complex lambda) {
    if (f.size() != s.size())
        throw Error(ErrorKind::LengthMismatch, "coefficients differ in length from spectrum");
    std::vector<Complex> out(f.size());
    for (std::size_t n = 0; n < f.size(); ++n) {
        if (s.node(n) == lambda) throw Error(ErrorKind::PoleHit, "lambda is a node", {n});
        out[n] = f[n] / (s.node(n) - lambda);
    }
    return out;
}

/// Vector k with <f, k> = F(lambda) / A(lambda) = sum f_n mu_n^(1/2) / (lambda - t_n).
inline std::vector<Complex> evaluation_vector(const Spectrum& s, Complex lambda) {
    std::vector<Complex> k(s.size());
    for (std::size_t n = 0; n < s.size(); ++n) {
        if (s.node(n) == lambda) throw Error(ErrorKind::PoleHit, "lambda is a node", {n});
        k[n] = std::sqrt(s.weight(n)) / std::conj(lambda - s.node(n));
    }
    return k;
}

}  // namespace cdb
