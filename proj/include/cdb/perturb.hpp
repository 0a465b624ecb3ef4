#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cdb/assignment.hpp"
#include "cdb/cauchy.hpp"
#include "cdb/error.hpp"
#include "cdb/numeric.hpp"
#include "cdb/rank_one.hpp"
#include "cdb/spectra.hpp"
#include "cdb/zeros.hpp"

namespace cdb {

struct PerturbationSpectrumReport {
    std::vector<Complex> eigenvalues;  // dense eigensolve, sorted by (re, im)
    std::vector<Complex> char_zeros;   // characteristic zeros in z, sorted by (re, im)
    /// Eigenvalue partner of each characteristic zero (compact: of 1/z, with
    /// infinite z standing for eigenvalue 0).
    std::vector<std::size_t> partner;
    /// The values matched against the eigenvalues: z, or 1/z (compact).
    std::vector<Complex> compared;
    double max_mismatch = 0.0;
    std::optional<Complex> kappa;
};

inline constexpr std::size_t kDenseSolverCap = 500;

namespace detail {

inline void sort_lex(std::vector<Complex>& v) {
    std::sort(v.begin(), v.end(), [](const Complex& x, const Complex& y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
}

}  // namespace detail

/// Spectrum of diag(t) + a b* (or diag(1/t) + a b* for the compact variant)
/// two ways: zeros of the characteristic function and a dense eigensolve.
inline PerturbationSpectrumReport forward_spectrum(const RankOnePerturbation& p,
                                                   std::size_t cap = kDenseSolverCap) {
    const std::size_t n = p.size();
    if (n > cap)
        throw Error(ErrorKind::SolverCapExceeded,
                    std::to_string(n) + " exceeds the dense solver cap " + std::to_string(cap));
    PerturbationSpectrumReport r;
    const bool compact = p.variant() == PerturbationVariant::compact;

    const Eigen::Index N = static_cast<Eigen::Index>(n);
    Eigen::VectorXcd a(N);
    Eigen::VectorXcd b(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        a(i) = p.a()[i];
        b(i) = p.b()[i];
    }
    Eigen::MatrixXcd M = a * b.adjoint();
    for (Eigen::Index i = 0; i < N; ++i) {
        const Complex t = p.spectrum().node(static_cast<std::size_t>(i));
        M(i, i) += compact ? 1.0 / t : t;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::NonConvergence, "dense eigensolve");
    for (Eigen::Index i = 0; i < N; ++i) r.eigenvalues.push_back(es.eigenvalues()(i));
    detail::sort_lex(r.eigenvalues);

    r.char_zeros = rational_zeros_oracle(characteristic_handle(p));
    detail::sort_lex(r.char_zeros);

    std::vector<Complex> compare;
    for (const Complex& z : r.char_zeros) compare.push_back(compact ? 1.0 / z : z);
    while (compare.size() < n) compare.push_back(Complex{0.0, 0.0});
    if (compare.size() == r.eigenvalues.size() && !compare.empty()) {
        const PointMatching m = match_points(compare, r.eigenvalues);
        r.partner = m.partner;
        r.compared = compare;
        r.max_mismatch = m.max_distance;
    }
    if (!compact) {
        bool nonzero = true;
        for (std::size_t i = 0; i < n; ++i) nonzero = nonzero && p.spectrum().node(i) != Complex{};
        if (nonzero) r.kappa = kappa(p);
    }
    return r;
}

/// Rank-one data moving the nodes to the targets: a_n conj(b_n) = p_n =
/// -residue_quotient, split as a_n = p_n / |p_n|^(1/2), b_n = |p_n|^(1/2).
inline RankOnePerturbation inverse_design(std::shared_ptr<const Spectrum> s,
                                          std::span<const Complex> targets) {
    if (!s) throw Error(ErrorKind::EmptySpectrum, "inverse design needs a spectrum");
    if (targets.size() != s->size())
        throw Error(ErrorKind::LengthMismatch, "targets differ in length from spectrum");
    std::vector<Complex> a(s->size());
    std::vector<Complex> b(s->size());
    for (std::size_t n = 0; n < s->size(); ++n) {
        const Complex pn = -residue_quotient(*s, targets, n);
        if (!is_finite(pn)) throw Error(ErrorKind::Overflow, "product " + std::to_string(n), {n});
        const double mod = std::abs(pn);
        if (mod == 0.0) continue;
        const double root = std::sqrt(mod);
        a[n] = pn / root;
        b[n] = root;
    }
    return RankOnePerturbation::make(std::move(s), std::move(a), std::move(b),
                                     PerturbationVariant::unbounded);
}

struct TwoSpectraResult {
    Spectrum spectrum;
    double residual = 0.0;
};

namespace detail {

/// r_j = prod_k (v_j - u_k) / prod_{k != j} (v_j - v_k), as a product of ratios.
inline std::vector<Complex> partial_fraction_weights(std::span<const Complex> u,
                                                     std::span<const Complex> v) {
    std::vector<Complex> r(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        Complex acc = v[j] - u[j];
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (k == j) continue;
            acc *= (v[j] - u[k]) / (v[j] - v[k]);
        }
        r[j] = acc;
    }
    return r;
}

inline bool distinct(std::span<const Complex> v) {
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            if (v[i] == v[j]) return false;
    return true;
}

}  // namespace detail

/// Recovers (T, mu) from the zeros u of alpha + m and v of beta + m, where
/// m = sum mu_n / (t_n - z). With R = (alpha / beta) prod(z - u) / prod(z - v):
/// T = zeros of R - 1 and mu_n = (beta - alpha) / (sum 1/(t_n - u) - sum 1/(t_n - v)).
inline TwoSpectraResult two_spectra_reconstruct(Complex alpha, std::span<const Complex> zeros_alpha,
                                                Complex beta, std::span<const Complex> zeros_beta,
                                                double weight_tol = 1e-6) {
    if (alpha == beta || alpha == Complex{} || beta == Complex{})
        throw Error(ErrorKind::InvalidArgument, "need distinct nonzero alpha and beta");
    if (zeros_alpha.size() != zeros_beta.size())
        throw Error(ErrorKind::LengthMismatch, "zero lists differ in length");
    if (zeros_alpha.empty()) throw Error(ErrorKind::EmptySpectrum, "no zeros given");
    const std::size_t n = zeros_alpha.size();
    std::vector<Complex> u(zeros_alpha.begin(), zeros_alpha.end());
    std::vector<Complex> v(zeros_beta.begin(), zeros_beta.end());
    Complex al = alpha;
    Complex be = beta;
    if (!detail::distinct(v)) {
        // R - 1 = 0 is symmetric in the two roles up to a factor.
        if (!detail::distinct(u)) throw Error(ErrorKind::InconsistentSpectra, "repeated zeros");
        std::swap(u, v);
        std::swap(al, be);
    }
    const std::vector<Complex> r = detail::partial_fraction_weights(u, v);
    std::vector<Complex> coeffs(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (r[j] == Complex{} || !is_finite(r[j]))
            throw Error(ErrorKind::InconsistentSpectra, "common zero of both families", {j});
        coeffs[j] = -al * r[j];
    }
    // (R - 1) beta as a series on the nodes v.
    std::vector<SpectrumPoint> carrier(n);
    for (std::size_t j = 0; j < n; ++j) carrier[j] = {v[j], 1.0};
    auto carrier_s = std::make_shared<const Spectrum>(Spectrum::validate(carrier));
    std::vector<Complex> ordered(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k)
            if (carrier_s->node(k) == v[j]) ordered[k] = coeffs[j];
    }
    const MeromorphicHandle h = MeromorphicHandle::with_coefficients(carrier_s, al - be, ordered);
    const std::vector<Complex> t = rational_zeros_oracle(h);
    if (t.size() != n) throw Error(ErrorKind::InconsistentSpectra, "R - 1 has too few zeros");

    std::vector<SpectrumPoint> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Complex> terms;
        for (std::size_t j = 0; j < n; ++j) {
            terms.push_back(1.0 / (t[i] - zeros_alpha[j]));
            terms.push_back(-1.0 / (t[i] - zeros_beta[j]));
        }
        const Complex mu = (beta - alpha) / sorted_sum(terms);
        if (!is_finite(mu) || !(mu.real() > 0.0) ||
            std::abs(mu.imag()) > weight_tol * std::abs(mu))
            throw Error(ErrorKind::InconsistentSpectra,
                        "recovered weight " + std::to_string(i) + " is not positive", {i});
        pts[i] = {t[i], mu.real()};
    }
    Spectrum s = [&] {
        try {
            return Spectrum::validate(pts);
        } catch (const Error& e) {
            throw Error(ErrorKind::InconsistentSpectra, e.what(), e.indices());
        }
    }();

    // Probe ring beyond the nodes plus points between them.
    double R = 0.0;
    for (const Complex& z : t) R = std::max(R, std::abs(z));
    std::vector<Complex> probes;
    for (int k = 0; k < 16; ++k)
        probes.push_back(std::polar(1.5 * R + 1.0, 2.0 * kPi * (k + 0.5) / 16.0));
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        probes.push_back(0.5 * (s.node(i) + s.node(i + 1)) + Complex{0.0, 0.25});
    double residual = 0.0;
    for (const Complex& z : probes) {
        Complex logR = std::log(alpha / beta);
        for (std::size_t j = 0; j < n; ++j)
            logR += std::log((z - zeros_alpha[j]) / (z - zeros_beta[j]));
        const Complex Rz = std::exp(logR);
        const Complex m_rec = (alpha - beta * Rz) / (Rz - 1.0);
        Complex m_fit{0.0, 0.0};
        for (std::size_t i = 0; i < s.size(); ++i) m_fit += s.weight(i) / (s.node(i) - z);
        if (is_finite(m_rec)) residual = std::max(residual, std::abs(m_rec - m_fit));
    }
    return {std::move(s), residual};
}

}  // namespace cdb
