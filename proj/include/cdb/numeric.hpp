#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <thread>
#include <vector>

namespace cdb {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Sums terms in ascending order of magnitude. The input is reordered.
inline Complex sorted_sum(std::vector<Complex>& terms) {
    std::sort(terms.begin(), terms.end(),
              [](const Complex& a, const Complex& b) { return std::abs(a) < std::abs(b); });
    Complex acc{0.0, 0.0};
    for (const Complex& t : terms) acc += t;
    return acc;
}

inline double sorted_sum(std::vector<double>& terms) {
    std::sort(terms.begin(), terms.end(),
              [](double a, double b) { return std::abs(a) < std::abs(b); });
    double acc = 0.0;
    for (double t : terms) acc += t;
    return acc;
}

/// Value and first derivative of a holomorphic function at a point.
struct Jet {
    Complex value{0.0, 0.0};
    Complex derivative{0.0, 0.0};

    friend Jet operator+(const Jet& a, const Jet& b) {
        return {a.value + b.value, a.derivative + b.derivative};
    }
    friend Jet operator*(const Jet& a, const Jet& b) {
        return {a.value * b.value, a.value * b.derivative + a.derivative * b.value};
    }
    Jet& operator+=(const Jet& o) { return *this = *this + o; }
    Jet& operator*=(const Jet& o) { return *this = *this * o; }
};

/// Axis-aligned closed rectangle [x0, x1] x [y0, y1] in the complex plane.
struct Rect {
    double x0 = 0.0;
    double x1 = 0.0;
    double y0 = 0.0;
    double y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double min_side() const { return std::min(width(), height()); }
    Complex center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
    double half_diagonal() const { return 0.5 * std::hypot(width(), height()); }

    bool contains(Complex z, double margin = 0.0) const {
        return z.real() >= x0 - margin && z.real() <= x1 + margin && z.imag() >= y0 - margin &&
               z.imag() <= y1 + margin;
    }
    bool strictly_contains(Complex z) const {
        return z.real() > x0 && z.real() < x1 && z.imag() > y0 && z.imag() < y1;
    }
    /// Distance from z to the boundary curve (not to the filled rectangle).
    double boundary_distance(Complex z) const {
        const double x = z.real();
        const double y = z.imag();
        auto seg = [](double t, double lo, double hi) { return std::clamp(t, lo, hi); };
        const double d_left = std::hypot(x - x0, y - seg(y, y0, y1));
        const double d_right = std::hypot(x - x1, y - seg(y, y0, y1));
        const double d_bottom = std::hypot(y - y0, x - seg(x, x0, x1));
        const double d_top = std::hypot(y - y1, x - seg(x, x0, x1));
        return std::min({d_left, d_right, d_bottom, d_top});
    }
    Rect expanded(double d) const { return {x0 - d, x1 + d, y0 - d, y1 + d}; }
    bool valid() const { return x1 > x0 && y1 > y0; }
};

/// Runs fn(i) for i in [0, n) on at most `threads` workers. Each index is
/// handled exactly once; callers write to disjoint slots.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, n);
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
}

/// Least-squares line fit y = intercept + slope * x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double rms_residual = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    LineFit fit;
    if (n < 2) return fit;
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) {
        fit.intercept = my;
        return fit;
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / static_cast<double>(n));
    if (n > 2) fit.slope_stderr = std::sqrt(ss / static_cast<double>(n - 2) / sxx);
    return fit;
}

}  // namespace cdb
