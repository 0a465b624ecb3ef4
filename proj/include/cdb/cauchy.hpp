#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "cdb/error.hpp"
#include "cdb/numeric.hpp"
#include "cdb/spectra.hpp"

namespace cdb {

enum class HandleMode { plain, regularized, closed_form };
enum class ClosedForm { pw_tangent, cross_tangent };

inline const char* mode_name(HandleMode m) {
    switch (m) {
        case HandleMode::plain: return "plain";
        case HandleMode::regularized: return "regularized";
        case HandleMode::closed_form: return "closed_form";
    }
    return "plain";
}

inline const char* closed_form_name(ClosedForm c) {
    return c == ClosedForm::pw_tangent ? "pw_tangent" : "cross_tangent";
}

/// An evaluatable family member m_gamma. Series modes sum
/// gamma + sum a_n / (t_n - z) (plain) or gamma + sum a_n z / (t_n (t_n - z))
/// (regularized), with a_n = mu_n unless explicit coefficients are given.
/// Closed forms ignore the weights; their spectrum is the node window.
class MeromorphicHandle {
public:
    static MeromorphicHandle plain(std::shared_ptr<const Spectrum> s, Complex gamma) {
        return MeromorphicHandle(std::move(s), gamma, HandleMode::plain, std::nullopt, {});
    }

    static MeromorphicHandle regularized(std::shared_ptr<const Spectrum> s, Complex gamma) {
        return MeromorphicHandle(std::move(s), gamma, HandleMode::regularized, std::nullopt, {});
    }

    /// Series handle with generalized (complex) coefficients a_n.
    static MeromorphicHandle with_coefficients(std::shared_ptr<const Spectrum> s, Complex gamma,
                                               std::vector<Complex> a,
                                               HandleMode mode = HandleMode::plain) {
        if (mode == HandleMode::closed_form)
            throw Error(ErrorKind::UnsupportedMode, "closed forms take no coefficients");
        if (s && a.size() != s->size())
            throw Error(ErrorKind::LengthMismatch, "coefficients differ in length from spectrum");
        return MeromorphicHandle(std::move(s), gamma, mode, std::nullopt, std::move(a));
    }

    static MeromorphicHandle closed(ClosedForm id, Complex gamma,
                                    std::shared_ptr<const Spectrum> window) {
        return MeromorphicHandle(std::move(window), gamma, HandleMode::closed_form, id, {});
    }

    MeromorphicHandle with_gamma(Complex gamma) const {
        MeromorphicHandle h = *this;
        h.gamma_ = gamma;
        return h;
    }

    const Spectrum& spectrum() const { return *spectrum_; }
    std::shared_ptr<const Spectrum> spectrum_ptr() const { return spectrum_; }
    Complex gamma() const { return gamma_; }
    HandleMode mode() const { return mode_; }
    std::optional<ClosedForm> closed_form_id() const { return closed_form_; }
    bool has_coefficients() const { return !coefficients_.empty(); }
    const std::vector<Complex>& coefficients() const { return coefficients_; }
    Complex coefficient(std::size_t i) const {
        return coefficients_.empty() ? Complex{spectrum_->weight(i), 0.0} : coefficients_[i];
    }
    bool is_series() const { return mode_ != HandleMode::closed_form; }

private:
    MeromorphicHandle(std::shared_ptr<const Spectrum> s, Complex gamma, HandleMode mode,
                      std::optional<ClosedForm> id, std::vector<Complex> a)
        : spectrum_(std::move(s)),
          gamma_(gamma),
          mode_(mode),
          closed_form_(id),
          coefficients_(std::move(a)) {
        if (!spectrum_) throw Error(ErrorKind::EmptySpectrum, "handle needs a spectrum");
        if (!is_finite(gamma_)) throw Error(ErrorKind::NonfiniteValue, "gamma is not finite");
        if (mode_ == HandleMode::regularized && !spectrum_->origin_excluded())
            throw Error(ErrorKind::RegularizedAtOrigin, "regularized mode needs 0 outside T");
    }

    std::shared_ptr<const Spectrum> spectrum_;
    Complex gamma_;
    HandleMode mode_;
    std::optional<ClosedForm> closed_form_;
    std::vector<Complex> coefficients_;
};

struct PoleProximity {
    std::size_t nearest_index = 0;
    double distance = 0.0;
    bool safe = true;
};

struct MValue {
    Complex value;
    PoleProximity proximity;
};

inline double default_pole_floor(Complex z) { return 1e-13 * (1.0 + std::abs(z)); }

namespace detail {

/// Exact membership in Z + 1/2.
inline bool is_half_integer(double x) {
    const double y = x - 0.5;
    return std::isfinite(y) && y == std::floor(y);
}

inline bool closed_form_pole(ClosedForm id, Complex z) {
    if (z.imag() == 0.0 && is_half_integer(z.real())) return true;
    return id == ClosedForm::cross_tangent && z.real() == 0.0 && is_half_integer(z.imag());
}

/// Distance from z to the nearest pole of the closed form.
inline double closed_form_pole_distance(ClosedForm id, Complex z) {
    const double rx = z.real() - std::floor(z.real()) - 0.5;
    double d = std::hypot(rx, z.imag());
    if (id == ClosedForm::cross_tangent) {
        const double ry = z.imag() - std::floor(z.imag()) - 0.5;
        d = std::min(d, std::hypot(z.real(), ry));
    }
    return d;
}

/// pi tan(pi z) and its derivative, written with |q| <= 1 so that large
/// |Im z| neither overflows nor cancels.
inline Jet pi_tan(Complex z) {
    const double sy = z.imag() >= 0.0 ? 1.0 : -1.0;
    const Complex q = std::exp(2.0 * kPi * kI * sy * z);
    const Complex r = q / (1.0 + q);
    Jet j;
    j.value = kI * kPi * sy + kPi * sy * (-2.0 * kI * r);
    j.derivative = kPi * kPi * 4.0 * r / (1.0 + q);
    return j;
}

/// pi tanh(pi z) and its derivative with |p| <= 1.
inline Jet pi_tanh(Complex z) {
    const double sx = z.real() >= 0.0 ? 1.0 : -1.0;
    const Complex p = std::exp(-2.0 * kPi * sx * z);
    const Complex r = p / (1.0 + p);
    Jet j;
    j.value = kPi * sx + kPi * sx * (-2.0 * r);
    j.derivative = kPi * kPi * 4.0 * r / (1.0 + p);
    return j;
}

inline Jet closed_form_jet(ClosedForm id, Complex gamma, Complex z) {
    const Jet t = pi_tan(z);
    if (id == ClosedForm::pw_tangent) return {gamma + t.value, t.derivative};
    const double sy = z.imag() >= 0.0 ? 1.0 : -1.0;
    const double sx = z.real() >= 0.0 ? 1.0 : -1.0;
    const Complex q = std::exp(2.0 * kPi * kI * sy * z);
    const Complex p = std::exp(-2.0 * kPi * sx * z);
    // Constant part first: for gamma = pi(1 - i) in the first quadrant it is exactly 0.
    const Complex constant = gamma + kI * kPi * sy - kPi * sx;
    Jet j;
    j.value = constant + kPi * sy * (-2.0 * kI * q / (1.0 + q)) + kPi * sx * 2.0 * p / (1.0 + p);
    j.derivative = kPi * kPi * (4.0 * q / ((1.0 + q) * (1.0 + q)) -
                                4.0 * p / ((1.0 + p) * (1.0 + p)));
    return j;
}

/// Compensated (Neumaier) accumulator.
struct CompensatedSum {
    Complex sum{0.0, 0.0};
    Complex carry{0.0, 0.0};

    static void add_part(double& s, double& c, double x) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    void add(Complex x) {
        double sr = sum.real(), si = sum.imag(), cr = carry.real(), ci = carry.imag();
        add_part(sr, cr, x.real());
        add_part(si, ci, x.imag());
        sum = {sr, si};
        carry = {cr, ci};
    }
    Complex result() const { return sum + carry; }
};

inline void check_pole(const MeromorphicHandle& h, Complex z) {
    if (!is_finite(z)) throw Error(ErrorKind::NonfiniteValue, "evaluation point is not finite");
    if (h.mode() == HandleMode::closed_form) {
        if (closed_form_pole(*h.closed_form_id(), z))
            throw Error(ErrorKind::PoleHit, "evaluation at a pole");
        return;
    }
    const Spectrum& s = h.spectrum();
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s.node(i) == z) throw Error(ErrorKind::PoleHit, "evaluation at node " + std::to_string(i), {i});
}

}  // namespace detail

/// m and m' at z without proximity bookkeeping; used by the root finders.
/// Series terms are accumulated with compensated summation.
inline Jet eval_m_jet(const MeromorphicHandle& h, Complex z) {
    if (h.mode() == HandleMode::closed_form)
        return detail::closed_form_jet(*h.closed_form_id(), h.gamma(), z);
    const Spectrum& s = h.spectrum();
    detail::CompensatedSum value;
    detail::CompensatedSum deriv;
    value.add(h.gamma());
    const bool reg = h.mode() == HandleMode::regularized;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Complex t = s.node(i);
        const Complex a = h.coefficient(i);
        const Complex inv = 1.0 / (t - z);
        value.add(reg ? a * z * inv / t : a * inv);
        deriv.add(a * inv * inv);
    }
    return {value.result(), deriv.result()};
}

inline PoleProximity pole_proximity(const MeromorphicHandle& h, Complex z) {
    const Spectrum& s = h.spectrum();
    PoleProximity p;
    p.distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double d = std::abs(s.node(i) - z);
        if (d < p.distance) {
            p.distance = d;
            p.nearest_index = i;
        }
    }
    if (h.mode() == HandleMode::closed_form)
        p.distance = std::min(p.distance, detail::closed_form_pole_distance(*h.closed_form_id(), z));
    p.safe = p.distance > default_pole_floor(z);
    return p;
}

/// m_gamma(z); series terms are summed smallest first.
inline MValue eval_m(const MeromorphicHandle& h, Complex z) {
    detail::check_pole(h, z);
    MValue out;
    out.proximity = pole_proximity(h, z);
    if (h.mode() == HandleMode::closed_form) {
        out.value = detail::closed_form_jet(*h.closed_form_id(), h.gamma(), z).value;
        return out;
    }
    const Spectrum& s = h.spectrum();
    std::vector<Complex> terms;
    terms.reserve(s.size() + 1);
    terms.push_back(h.gamma());
    const bool reg = h.mode() == HandleMode::regularized;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Complex t = s.node(i);
        const Complex a = h.coefficient(i);
        terms.push_back(reg ? a * z / (t * (t - z)) : a / (t - z));
    }
    out.value = sorted_sum(terms);
    return out;
}

inline Complex eval_m_derivative(const MeromorphicHandle& h, Complex z) {
    detail::check_pole(h, z);
    return eval_m_jet(h, z).derivative;
}

/// Residue at t_n of prod_k (z - s_k) / (z - t_k):
/// (t_n - s_n) prod_{k != n} (t_n - s_k) / (t_n - t_k). Zero when t_n is a target.
inline Complex residue_quotient(const Spectrum& s, std::span<const Complex> targets, std::size_t n) {
    if (targets.size() != s.size())
        throw Error(ErrorKind::LengthMismatch, "targets differ in length from spectrum");
    if (n >= s.size()) throw Error(ErrorKind::InvalidArgument, "index out of range");
    const Complex tn = s.node(n);
    for (const Complex& sk : targets)
        if (sk == tn) return {0.0, 0.0};
    Complex r = tn - targets[n];
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (k == n) continue;
        const Complex den = tn - s.node(k);
        if (den == Complex{}) throw Error(ErrorKind::DegeneratePole, "repeated node", {n, k});
        r *= (tn - targets[k]) / den;
    }
    return r;
}

/// Absolute-sum bound sum |a_n| / |z - t_n| on |m - gamma| (for regularized
/// handles the terms are |a_n z| / (|t_n| |z - t_n|)). A value below |gamma|
/// certifies m(z) != 0.
inline double eval_series_decay(const MeromorphicHandle& h, Complex z) {
    if (h.mode() == HandleMode::closed_form)
        throw Error(ErrorKind::UnsupportedMode, "series bound needs a series handle");
    detail::check_pole(h, z);
    const Spectrum& s = h.spectrum();
    std::vector<double> terms(s.size());
    const bool reg = h.mode() == HandleMode::regularized;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Complex t = s.node(i);
        double term = std::abs(h.coefficient(i)) / std::abs(z - t);
        if (reg) term *= std::abs(z) / std::abs(t);
        terms[i] = term;
    }
    return sorted_sum(terms);
}

/// Largest r such that the series bound stays below |gamma| on the closed
/// disk of radius r about z (plain handles), found by bisection. 0 when the
/// bound already fails at z.
inline double zero_free_radius(const MeromorphicHandle& h, Complex z) {
    if (h.mode() != HandleMode::plain)
        throw Error(ErrorKind::UnsupportedMode, "zero-free radius needs a plain handle");
    const double g = std::abs(h.gamma());
    if (eval_series_decay(h, z) >= g) return 0.0;
    const Spectrum& s = h.spectrum();
    auto bound = [&](double r) {
        double acc = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double d = std::abs(z - s.node(i)) - r;
            if (d <= 0.0) return std::numeric_limits<double>::infinity();
            acc += std::abs(h.coefficient(i)) / d;
        }
        return acc;
    };
    double lo = 0.0;
    double hi = pole_proximity(h, z).distance;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (bound(mid) < g)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

}  // namespace cdb
