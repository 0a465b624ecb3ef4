#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cdb/error.hpp"
#include "cdb/numeric.hpp"

namespace cdb {

struct SpectrumPoint {
    Complex t;
    double mu = 0.0;
};

/// Argument of z mapped into [0, 2pi).
inline double canonical_arg(Complex z) {
    double a = std::atan2(z.imag(), z.real());
    if (a < 0.0) a += 2.0 * kPi;
    return a;
}

/// Canonical order: modulus nondecreasing, ties by argument in [0, 2pi).
inline bool canonical_less(Complex a, Complex b) {
    const double ma = std::abs(a);
    const double mb = std::abs(b);
    if (ma != mb) return ma < mb;
    return canonical_arg(a) < canonical_arg(b);
}

/// A validated finite truncation of (T, mu). Immutable once built.
class Spectrum {
public:
    /// Checks finiteness, then positivity of weights, then distinctness, and
    /// returns the canonically sorted spectrum. Error indices refer to the
    /// input order.
    static Spectrum validate(std::span<const SpectrumPoint> raw, std::string label = {}) {
        if (raw.empty()) throw Error(ErrorKind::EmptySpectrum, "spectrum has no points");
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (!is_finite(raw[i].t) || !std::isfinite(raw[i].mu))
                throw Error(ErrorKind::NonfiniteValue, "point " + std::to_string(i), {i});
        }
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (!(raw[i].mu > 0.0))
                throw Error(ErrorKind::NonpositiveWeight, "point " + std::to_string(i), {i});
        }
        std::vector<std::size_t> order(raw.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return canonical_less(raw[a].t, raw[b].t);
        });
        // Equal nodes share modulus and argument, so they end up adjacent.
        for (std::size_t k = 1; k < order.size(); ++k) {
            if (raw[order[k]].t == raw[order[k - 1]].t) {
                const std::size_t i = std::min(order[k], order[k - 1]);
                const std::size_t j = std::max(order[k], order[k - 1]);
                throw Error(ErrorKind::DuplicateNode,
                            "points " + std::to_string(i) + " and " + std::to_string(j), {i, j});
            }
        }
        Spectrum s;
        s.label_ = std::move(label);
        s.points_.reserve(raw.size());
        for (std::size_t k : order) s.points_.push_back(raw[k]);
        s.origin_excluded_ = std::none_of(s.points_.begin(), s.points_.end(),
                                          [](const SpectrumPoint& p) { return p.t == Complex{}; });
        return s;
    }

    static Spectrum from(std::span<const Complex> nodes, std::span<const double> weights,
                         std::string label = {}) {
        if (nodes.size() != weights.size())
            throw Error(ErrorKind::LengthMismatch, "nodes and weights differ in length");
        std::vector<SpectrumPoint> raw(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) raw[i] = {nodes[i], weights[i]};
        return validate(raw, std::move(label));
    }

    const std::vector<SpectrumPoint>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    Complex node(std::size_t i) const { return points_[i].t; }
    double weight(std::size_t i) const { return points_[i].mu; }
    const std::string& label() const { return label_; }
    /// True when 0 is not a node.
    bool origin_excluded() const { return origin_excluded_; }

    std::vector<Complex> nodes() const {
        std::vector<Complex> out(points_.size());
        for (std::size_t i = 0; i < points_.size(); ++i) out[i] = points_[i].t;
        return out;
    }
    std::vector<double> weights() const {
        std::vector<double> out(points_.size());
        for (std::size_t i = 0; i < points_.size(); ++i) out[i] = points_[i].mu;
        return out;
    }
    /// First `count` points in canonical order.
    Spectrum truncated(std::size_t count) const {
        if (count == 0) throw Error(ErrorKind::EmptySpectrum, "truncation to zero points");
        Spectrum s = *this;
        if (count < s.points_.size()) s.points_.resize(count);
        s.origin_excluded_ = std::none_of(s.points_.begin(), s.points_.end(),
                                          [](const SpectrumPoint& p) { return p.t == Complex{}; });
        return s;
    }

private:
    Spectrum() = default;

    std::vector<SpectrumPoint> points_;
    std::string label_;
    bool origin_excluded_ = true;
};

/// Declared asymptotics. power: mu_n ~ |t_n|^(-weight_exponent) with
/// |t_n| ~ n^node_growth. geometric: mu_n ~ exp(-weight_exponent |t_n|).
struct TailLaw {
    enum class Kind { power, geometric };
    Kind kind = Kind::power;
    double weight_exponent = 0.0;
    double node_growth = 1.0;
};

enum class Confidence { exact, fitted, unknown };

inline const char* confidence_name(Confidence c) {
    switch (c) {
        case Confidence::exact: return "exact";
        case Confidence::fitted: return "fitted";
        case Confidence::unknown: return "unknown";
    }
    return "unknown";
}

struct SpectrumClass {
    double normalized_sum = 0.0;
    double convergence_sum = 0.0;
    double total_mass = 0.0;
    bool is_small = false;
    bool is_convergence_class = false;
    std::optional<double> tail_exponent;
    std::optional<double> node_growth;
    Confidence confidence = Confidence::unknown;
    /// The declared law, or the fitted one when confidence = fitted.
    std::optional<TailLaw> law;
};

struct ClassifyOptions {
    double max_slope_stderr = 0.1;
    std::size_t min_fit_points = 4;
};

namespace detail {

inline void power_verdicts(SpectrumClass& c, double p, double rho) {
    c.is_small = p * rho > 1.0;
    c.is_convergence_class = (p + 1.0) * rho > 1.0;
}

}  // namespace detail

inline SpectrumClass classify(const Spectrum& s, std::optional<TailLaw> law = std::nullopt,
                              const ClassifyOptions& opt = {}) {
    SpectrumClass c;
    std::vector<double> norm_terms;
    std::vector<double> conv_terms;
    std::vector<double> mass_terms;
    for (const SpectrumPoint& p : s.points()) {
        const double r = std::abs(p.t);
        norm_terms.push_back(p.mu / (r * r + 1.0));
        conv_terms.push_back(p.mu / (r + 1.0));
        mass_terms.push_back(p.mu);
    }
    c.normalized_sum = sorted_sum(norm_terms);
    c.convergence_sum = sorted_sum(conv_terms);
    c.total_mass = sorted_sum(mass_terms);

    if (law) {
        c.confidence = Confidence::exact;
        if (law->kind == TailLaw::Kind::geometric && law->weight_exponent > 0.0) {
            c.is_small = true;
            c.is_convergence_class = true;
            c.node_growth = law->node_growth;
            c.law = law;
            return c;
        }
        if (!(law->node_growth > 0.0))
            throw Error(ErrorKind::InvalidArgument, "declared node growth must be positive");
        const double p = law->kind == TailLaw::Kind::power ? law->weight_exponent : 0.0;
        c.tail_exponent = -p;
        c.node_growth = law->node_growth;
        c.law = law;
        detail::power_verdicts(c, p, law->node_growth);
        return c;
    }

    // Outer half of the truncation, skipping a node at the origin.
    std::vector<double> log_r;
    std::vector<double> r_lin;
    std::vector<double> log_mu;
    std::vector<double> log_n;
    for (std::size_t i = s.size() / 2; i < s.size(); ++i) {
        const double r = std::abs(s.node(i));
        if (r == 0.0) continue;
        log_r.push_back(std::log(r));
        r_lin.push_back(r);
        log_mu.push_back(std::log(s.weight(i)));
        log_n.push_back(std::log(static_cast<double>(i + 1)));
    }
    if (log_r.size() < opt.min_fit_points) return c;

    const LineFit power_fit = fit_line(log_r, log_mu);
    const LineFit growth_fit = fit_line(log_n, log_r);
    const LineFit geometric_fit = fit_line(r_lin, log_mu);
    c.tail_exponent = power_fit.slope;
    c.node_growth = growth_fit.slope;
    if (!(growth_fit.slope > 0.0)) return c;

    const bool geometric = geometric_fit.slope < 0.0 &&
                           geometric_fit.rms_residual < power_fit.rms_residual &&
                           geometric_fit.slope_stderr <= opt.max_slope_stderr;
    if (geometric) {
        c.confidence = Confidence::fitted;
        c.is_small = true;
        c.is_convergence_class = true;
        c.law = TailLaw{TailLaw::Kind::geometric, -geometric_fit.slope, growth_fit.slope};
        return c;
    }
    if (power_fit.slope_stderr > opt.max_slope_stderr) return c;
    c.confidence = Confidence::fitted;
    c.law = TailLaw{TailLaw::Kind::power, -power_fit.slope, growth_fit.slope};
    detail::power_verdicts(c, -power_fit.slope, growth_fit.slope);
    return c;
}

struct SeparationFit {
    double exponent = 0.0;
    double constant = 0.0;
    std::vector<std::size_t> violations;
    std::vector<double> nearest_distance;
};

/// Nearest-neighbour distance for every node (brute force).
inline std::vector<double> nearest_distances(const Spectrum& s) {
    const std::size_t n = s.size();
    std::vector<double> d(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double r = std::abs(s.node(i) - s.node(j));
            d[i] = std::min(d[i], r);
            d[j] = std::min(d[j], r);
        }
    return d;
}

struct SeparationOptions {
    double slack = 0.1;            // violation when the scaled gap drops below slack * median
    std::size_t max_fit_points = 2000;
};

/// Fits d_n >= C (|t_n|+1)^(-N): N from the Theil-Sen slope of log d_n
/// against log(|t_n|+1) (clamped at 0), C as the tightest constant for that N.
inline SeparationFit power_separation(const Spectrum& s, const SeparationOptions& opt = {}) {
    if (s.size() < 2) throw Error(ErrorKind::InvalidArgument, "power separation needs two points");
    SeparationFit fit;
    fit.nearest_distance = nearest_distances(s);
    const std::size_t n = s.size();
    std::vector<double> x(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::log(std::abs(s.node(i)) + 1.0);
        y[i] = std::log(fit.nearest_distance[i]);
    }
    const std::size_t stride = (n + opt.max_fit_points - 1) / opt.max_fit_points;
    std::vector<double> slopes;
    for (std::size_t i = 0; i < n; i += stride)
        for (std::size_t j = i + stride; j < n; j += stride) {
            const double dx = x[j] - x[i];
            if (std::abs(dx) > 1e-12) slopes.push_back((y[j] - y[i]) / dx);
        }
    double slope = 0.0;
    if (!slopes.empty()) {
        auto mid = slopes.begin() + static_cast<std::ptrdiff_t>(slopes.size() / 2);
        std::nth_element(slopes.begin(), mid, slopes.end());
        slope = *mid;
        if (slopes.size() % 2 == 0) {
            const double lo = *std::max_element(slopes.begin(), mid);
            slope = 0.5 * (slope + lo);
        }
    }
    fit.exponent = std::max(0.0, -slope);
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i)
        scaled[i] = fit.nearest_distance[i] * std::pow(std::abs(s.node(i)) + 1.0, fit.exponent);
    fit.constant = *std::min_element(scaled.begin(), scaled.end());
    std::vector<double> sorted = scaled;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2),
                     sorted.end());
    const double median = sorted[n / 2];
    for (std::size_t i = 0; i < n; ++i)
        if (scaled[i] < opt.slack * median) fit.violations.push_back(i);
    return fit;
}

/// Whether sum |t_n|^(2j) mu_n converges under the law: always for
/// geometric tails, iff (p - 2j) rho > 1 for power tails.
inline bool moment_converges(const TailLaw& law, unsigned j) {
    if (law.kind == TailLaw::Kind::geometric) return law.weight_exponent > 0.0;
    return (law.weight_exponent - 2.0 * j) * law.node_growth > 1.0;
}

/// Sum of |t_n|^(2j) mu_n over the truncation, smallest terms first.
inline double moment_sum(const Spectrum& s, unsigned j) {
    std::vector<double> terms(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double r = std::abs(s.node(i));
        terms[i] = (j == 0 ? 1.0 : std::pow(r, 2.0 * j)) * s.weight(i);
        if (!std::isfinite(terms[i]))
            throw Error(ErrorKind::Overflow, "moment term " + std::to_string(i), {i});
    }
    const double total = sorted_sum(terms);
    if (!std::isfinite(total)) throw Error(ErrorKind::Overflow, "moment sum");
    return total;
}

}  // namespace cdb
