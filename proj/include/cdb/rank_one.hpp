#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "cdb/cauchy.hpp"
#include "cdb/error.hpp"
#include "cdb/numeric.hpp"
#include "cdb/spectra.hpp"

namespace cdb {

/// unbounded: L = diag(t) + a b*. compact: L = diag(1/t) + a b*, whose
/// eigenvalues are the reciprocals of the characteristic zeros in z.
enum class PerturbationVariant { unbounded, compact };

inline const char* variant_name(PerturbationVariant v) {
    return v == PerturbationVariant::unbounded ? "unbounded" : "compact";
}

class RankOnePerturbation {
public:
    static RankOnePerturbation make(std::shared_ptr<const Spectrum> s, std::vector<Complex> a,
                                    std::vector<Complex> b,
                                    PerturbationVariant variant = PerturbationVariant::unbounded) {
        if (!s) throw Error(ErrorKind::EmptySpectrum, "perturbation needs a spectrum");
        if (a.size() != s->size() || b.size() != s->size())
            throw Error(ErrorKind::LengthMismatch, "a and b must match the truncation length");
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!is_finite(a[i]) || !is_finite(b[i]))
                throw Error(ErrorKind::NonfiniteValue, "vector entry " + std::to_string(i), {i});
        if (variant == PerturbationVariant::compact)
            for (std::size_t i = 0; i < s->size(); ++i)
                if (s->node(i) == Complex{})
                    throw Error(ErrorKind::ZeroNode, "compact variant needs nonzero nodes", {i});
        RankOnePerturbation p;
        p.spectrum_ = std::move(s);
        p.a_ = std::move(a);
        p.b_ = std::move(b);
        p.variant_ = variant;
        return p;
    }

    const Spectrum& spectrum() const { return *spectrum_; }
    std::shared_ptr<const Spectrum> spectrum_ptr() const { return spectrum_; }
    const std::vector<Complex>& a() const { return a_; }
    const std::vector<Complex>& b() const { return b_; }
    PerturbationVariant variant() const { return variant_; }
    std::size_t size() const { return a_.size(); }

    /// a_n conj(b_n); the spectrum depends on these products only.
    Complex product(std::size_t n) const { return a_[n] * std::conj(b_[n]); }

    /// Model weights |b_n|^2 (unbounded) or |t_n|^2 |b_n|^2 (compact).
    std::vector<double> model_weights() const {
        std::vector<double> w(size());
        for (std::size_t n = 0; n < size(); ++n) {
            w[n] = std::norm(b_[n]);
            if (variant_ == PerturbationVariant::compact) w[n] *= std::norm(spectrum_->node(n));
        }
        return w;
    }

private:
    RankOnePerturbation() = default;

    std::shared_ptr<const Spectrum> spectrum_;
    std::vector<Complex> a_;
    std::vector<Complex> b_;
    PerturbationVariant variant_ = PerturbationVariant::unbounded;
};

/// kappa = 1 + sum a_n conj(b_n) / t_n; ker L = 0 iff kappa != 0.
inline Complex kappa(const RankOnePerturbation& p) {
    if (p.variant() != PerturbationVariant::unbounded)
        throw Error(ErrorKind::UnsupportedMode, "kappa is defined for the unbounded variant");
    std::vector<Complex> terms{Complex{1.0, 0.0}};
    for (std::size_t n = 0; n < p.size(); ++n) {
        const Complex t = p.spectrum().node(n);
        if (t == Complex{}) throw Error(ErrorKind::ZeroNode, "node " + std::to_string(n), {n});
        terms.push_back(p.product(n) / t);
    }
    return sorted_sum(terms);
}

/// True when |kappa| is at rounding level relative to its terms.
inline bool kappa_vanishes(const RankOnePerturbation& p, Complex k) {
    double scale = 1.0;
    for (std::size_t n = 0; n < p.size(); ++n) scale += std::abs(p.product(n) / p.spectrum().node(n));
    return std::abs(k) <= 4.0 * std::numeric_limits<double>::epsilon() * scale;
}

/// The characteristic function divided by A, written as a series handle
/// gamma' + sum a'_n / (t_n - z):
///   unbounded: 1 + sum p_n / (t_n - z)  (the 1/kappa factor is dropped);
///   compact:   (1 + sum p_n t_n) + sum (-p_n t_n^2) / (t_n - z).
inline MeromorphicHandle characteristic_handle(const RankOnePerturbation& p) {
    std::vector<Complex> coeffs(p.size());
    Complex gamma{1.0, 0.0};
    if (p.variant() == PerturbationVariant::unbounded) {
        for (std::size_t n = 0; n < p.size(); ++n) coeffs[n] = p.product(n);
    } else {
        std::vector<Complex> shift{Complex{1.0, 0.0}};
        for (std::size_t n = 0; n < p.size(); ++n) {
            const Complex t = p.spectrum().node(n);
            shift.push_back(p.product(n) * t);
            coeffs[n] = -p.product(n) * t * t;
        }
        gamma = sorted_sum(shift);
    }
    return MeromorphicHandle::with_coefficients(p.spectrum_ptr(), gamma, std::move(coeffs));
}

/// G/A at z: (1/kappa)(1 - sum p_n / (z - t_n)) for the unbounded variant,
/// 1 + sum p_n t_n + sum p_n t_n^2 / (z - t_n) for the compact one.
inline Complex eval_char_ratio(const RankOnePerturbation& p, Complex z) {
    const MeromorphicHandle h = characteristic_handle(p);
    const Complex v = eval_m(h, z).value;
    if (p.variant() == PerturbationVariant::compact) return v;
    const Complex k = kappa(p);
    if (k == Complex{} || kappa_vanishes(p, k)) throw Error(ErrorKind::KappaZero, "kappa vanishes");
    return v / k;
}

}  // namespace cdb
