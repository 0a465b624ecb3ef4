#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cdb/assignment.hpp"
#include "cdb/cauchy.hpp"
#include "cdb/error.hpp"
#include "cdb/numeric.hpp"
#include "cdb/spectra.hpp"

namespace cdb {

struct ZeroOptions {
    double tol = 1e-12;
    int quadrature_points = 32;  // base samples per rectangle edge
    unsigned threads = 1;
    int max_depth = 48;          // segment bisections per edge and subdivision levels
    int nudge_budget = 8;
    double guard_fraction = 1e-3;
    double min_cell = 0.0;       // 0 selects 1e-7 * max(1, longest side of the region)
    std::size_t max_evaluations = 200000;  // per contour
    int newton_iterations = 100;
    std::size_t max_local_poles = 64;
};

struct LocatedZero {
    Complex location;
    int multiplicity = 1;
    double residual = 0.0;
};

struct Certificate {
    Rect region;
    int count = 0;
    double confidence = 0.0;
};

enum class ZeroMethod { subdivision, oracle };

inline const char* method_name(ZeroMethod m) {
    return m == ZeroMethod::subdivision ? "subdivision" : "oracle";
}

struct ZeroReport {
    std::vector<LocatedZero> zeros;
    Rect region;
    std::vector<Certificate> certificates;
    ZeroMethod method = ZeroMethod::subdivision;
    /// Leaves whose zeros could not be isolated or polished.
    std::vector<Certificate> failures;

    std::vector<Complex> locations() const {
        std::vector<Complex> out;
        for (const LocatedZero& z : zeros)
            for (int k = 0; k < z.multiplicity; ++k) out.push_back(z.location);
        return out;
    }
    int total_multiplicity() const {
        int n = 0;
        for (const LocatedZero& z : zeros) n += z.multiplicity;
        return n;
    }
};

struct CountResult {
    int count = 0;
    double confidence = 0.0;
    Rect region;  // the rectangle actually integrated over, after nudging
};

namespace detail {

inline double frac(double x) { return x - std::floor(x); }

/// Zeros of A for the handle (nodes of a series, the pole lattice of a closed
/// form) within `margin` of the rectangle.
inline std::vector<Complex> a_zeros_near(const MeromorphicHandle& h, const Rect& r, double margin) {
    std::vector<Complex> out;
    if (h.is_series()) {
        const Spectrum& s = h.spectrum();
        for (std::size_t i = 0; i < s.size(); ++i)
            if (r.contains(s.node(i), margin)) out.push_back(s.node(i));
        return out;
    }
    auto arm = [&](double lo, double hi, double c_lo, double c_hi, bool imaginary) {
        if (c_lo - margin > 0.0 || c_hi + margin < 0.0) return;
        const double k0 = std::ceil(lo - margin - 0.5);
        const double k1 = std::floor(hi + margin - 0.5);
        if (k1 - k0 > 1e6) throw Error(ErrorKind::InvalidArgument, "region too large for closed form");
        for (double k = k0; k <= k1; k += 1.0)
            out.push_back(imaginary ? Complex{0.0, k + 0.5} : Complex{k + 0.5, 0.0});
    };
    arm(r.x0, r.x1, r.y0, r.y1, false);
    if (*h.closed_form_id() == ClosedForm::cross_tangent) arm(r.y0, r.y1, r.x0, r.x1, true);
    return out;
}

struct Contour {
    bool ok = false;
    int count = 0;
    double confidence = 0.0;
    Complex moment{0.0, 0.0};  // contour integral of z m'/m dz / (2 pi i), A-zeros excluded
    int a_zeros_inside = 0;
    Complex a_zero_sum{0.0, 0.0};
};

/// Winding of m around r plus the A-zeros inside, i.e. the zero count of
/// B = A m. Fails when an A-zero is within the guard distance of the
/// boundary or the adaptive sampling cannot resolve the argument.
inline Contour contour_count(const MeromorphicHandle& h, const Rect& r, const ZeroOptions& opt) {
    Contour c;
    if (!r.valid()) return c;
    const double guard = opt.guard_fraction * r.min_side();
    for (const Complex& p : a_zeros_near(h, r, guard)) {
        if (r.boundary_distance(p) < guard) return c;
        if (r.strictly_contains(p)) {
            ++c.a_zeros_inside;
            c.a_zero_sum += p;
        }
    }
    std::size_t evals = 0;
    bool failed = false;
    auto sample = [&](Complex z) {
        ++evals;
        const Jet j = eval_m_jet(h, z);
        if (!is_finite(j.value) || !is_finite(j.derivative) || j.value == Complex{}) failed = true;
        return j;
    };
    Complex total{0.0, 0.0};
    Complex moment{0.0, 0.0};
    const std::array<Complex, 5> corners{Complex{r.x0, r.y0}, Complex{r.x1, r.y0},
                                         Complex{r.x1, r.y1}, Complex{r.x0, r.y1},
                                         Complex{r.x0, r.y0}};
    struct Seg {
        Complex z0;
        Jet j0;
        Complex z1;
        Jet j1;
        int depth;
    };
    std::vector<Seg> stack;
    const int base = std::max(opt.quadrature_points, 2);
    for (int e = 0; e < 4 && !failed; ++e) {
        const Complex a = corners[e];
        const Complex b = corners[e + 1];
        std::vector<Complex> zs(static_cast<std::size_t>(base) + 1);
        std::vector<Jet> js(zs.size());
        for (int k = 0; k <= base; ++k) {
            zs[k] = a + (b - a) * (static_cast<double>(k) / base);
            js[k] = sample(zs[k]);
        }
        if (failed) break;
        for (int k = base - 1; k >= 0; --k) stack.push_back({zs[k], js[k], zs[k + 1], js[k + 1], 0});
        while (!stack.empty() && !failed) {
            const Seg s = stack.back();
            stack.pop_back();
            const Complex dlog = std::log(s.j1.value / s.j0.value);
            const Complex trap =
                0.5 * (s.z1 - s.z0) * (s.j0.derivative / s.j0.value + s.j1.derivative / s.j1.value);
            if (std::abs(dlog.imag()) <= kPi / 4.0 && std::abs(trap - dlog) <= 0.02) {
                total += dlog;
                moment += 0.5 * (s.z0 + s.z1) * dlog;
                continue;
            }
            if (s.depth >= opt.max_depth || evals >= opt.max_evaluations) {
                failed = true;
                break;
            }
            const Complex zm = 0.5 * (s.z0 + s.z1);
            const Jet jm = sample(zm);
            if (failed) break;
            stack.push_back({zm, jm, s.z1, s.j1, s.depth + 1});
            stack.push_back({s.z0, s.j0, zm, jm, s.depth + 1});
        }
        stack.clear();
    }
    if (failed) return c;
    const Complex raw = total / (2.0 * kPi * kI);
    const double winding = std::round(raw.real());
    c.confidence = std::abs(raw - Complex{winding, 0.0});
    if (c.confidence > 0.25) return c;
    c.count = static_cast<int>(winding) + c.a_zeros_inside;
    if (c.count < 0) return c;
    c.moment = moment / (2.0 * kPi * kI);
    c.ok = true;
    return c;
}

/// Outward expansion for the k-th retry; always beyond the guard distance.
inline Rect nudged(const Rect& r, int k) {
    const double f = 0.0037 * (k + 1) * (1.0 + frac((k + 1) * 0.6180339887498949));
    return r.expanded(f * r.min_side());
}

/// Poles removed locally: nodes (or lattice poles) near a point.
struct LocalModel {
    std::vector<std::size_t> indices;  // series nodes treated locally
    std::vector<char> mask;
    std::vector<Complex> poles;        // their locations
};

inline LocalModel local_model(const MeromorphicHandle& h, Complex center, double radius) {
    LocalModel lm;
    const Rect box{center.real() - radius, center.real() + radius, center.imag() - radius,
                   center.imag() + radius};
    if (h.is_series()) {
        const Spectrum& s = h.spectrum();
        lm.mask.assign(s.size(), 0);
        for (std::size_t i = 0; i < s.size(); ++i)
            if (std::abs(s.node(i) - center) <= radius) {
                lm.indices.push_back(i);
                lm.mask[i] = 1;
                lm.poles.push_back(s.node(i));
            }
        return lm;
    }
    for (const Complex& p : a_zeros_near(h, box, 0.0))
        if (std::abs(p - center) <= radius) lm.poles.push_back(p);
    return lm;
}

/// f = m * prod_{local}(t_j - z), holomorphic near the local poles. For
/// series the product is distributed so no local pole is evaluated.
inline Jet local_jet(const MeromorphicHandle& h, const LocalModel& lm, Complex z) {
    const std::size_t L = lm.poles.size();
    Jet P{Complex{1.0, 0.0}, Complex{0.0, 0.0}};
    for (const Complex& p : lm.poles) P *= Jet{p - z, Complex{-1.0, 0.0}};
    if (!h.is_series()) return eval_m_jet(h, z) * P;

    const Spectrum& s = h.spectrum();
    const bool reg = h.mode() == HandleMode::regularized;
    CompensatedSum value;
    CompensatedSum deriv;
    value.add(h.gamma());
    for (std::size_t k : lm.indices)
        if (reg) value.add(-h.coefficient(k) / s.node(k));
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (lm.mask[i]) continue;
        const Complex t = s.node(i);
        const Complex a = h.coefficient(i);
        const Complex inv = 1.0 / (t - z);
        value.add(reg ? a * z * inv / t : a * inv);
        deriv.add(a * inv * inv);
    }
    Jet f = Jet{value.result(), deriv.result()} * P;
    for (std::size_t k = 0; k < L; ++k) {
        Jet Q{Complex{1.0, 0.0}, Complex{0.0, 0.0}};
        for (std::size_t j = 0; j < L; ++j)
            if (j != k) Q *= Jet{lm.poles[j] - z, Complex{-1.0, 0.0}};
        f += Jet{h.coefficient(lm.indices[k]), Complex{0.0, 0.0}} * Q;
    }
    return f;
}

struct NewtonResult {
    bool ok = false;
    Complex z;
    double residual = 0.0;
};

/// Newton (multiplicity-weighted) on the local function; converged when the
/// step drops below tol (1 + |z|), followed by one polishing step.
inline NewtonResult newton(const MeromorphicHandle& h, const LocalModel& lm, Complex z0,
                           int multiplicity, const ZeroOptions& opt) {
    NewtonResult r;
    Complex z = z0;
    for (int it = 0; it < opt.newton_iterations; ++it) {
        const Jet f = local_jet(h, lm, z);
        if (f.value == Complex{}) {
            r.ok = true;
            r.z = z;
            r.residual = 0.0;
            return r;
        }
        if (f.derivative == Complex{} || !is_finite(f.value) || !is_finite(f.derivative)) return r;
        const Complex step = static_cast<double>(multiplicity) * f.value / f.derivative;
        if (!is_finite(step)) return r;
        z -= step;
        if (std::abs(step) <= opt.tol * (1.0 + std::abs(z))) {
            const Jet g = local_jet(h, lm, z);
            double last = 0.0;
            if (g.value != Complex{} && g.derivative != Complex{}) {
                const Complex polish = static_cast<double>(multiplicity) * g.value / g.derivative;
                if (is_finite(polish) && std::abs(polish) <= std::abs(step)) {
                    z -= polish;
                    last = std::abs(polish);
                } else {
                    last = std::abs(step);
                }
            }
            r.ok = true;
            r.z = z;
            r.residual = last;
            return r;
        }
    }
    return r;
}

struct Cell {
    Rect rect;
    int count = 0;
    double confidence = 0.0;
    Complex moment{0.0, 0.0};
    Complex a_zero_sum{0.0, 0.0};
    int depth = 0;
};

inline Cell make_cell(const Rect& r, const Contour& c, int depth) {
    return {r, c.count, c.confidence, c.moment, c.a_zero_sum, depth};
}

struct CellOutcome {
    std::vector<Cell> children;
    std::vector<LocatedZero> zeros;
    std::vector<Certificate> certificates;
    std::vector<Certificate> failures;
};

inline std::optional<std::array<Cell, 4>> split(const MeromorphicHandle& h, const Cell& cell,
                                                const ZeroOptions& opt) {
    const Rect& r = cell.rect;
    for (int j = 0; j <= opt.nudge_budget; ++j) {
        const double fx = 0.5 + 0.04 * (frac((j + 1) * 0.6180339887498949) - 0.5);
        const double fy = 0.5 + 0.04 * (frac((j + 1) * 0.41421356237309515) - 0.5);
        const double xm = r.x0 + fx * r.width();
        const double ym = r.y0 + fy * r.height();
        const std::array<Rect, 4> rects{Rect{r.x0, xm, r.y0, ym}, Rect{xm, r.x1, r.y0, ym},
                                        Rect{r.x0, xm, ym, r.y1}, Rect{xm, r.x1, ym, r.y1}};
        std::array<Cell, 4> out;
        int total = 0;
        bool ok = true;
        for (std::size_t k = 0; k < 4 && ok; ++k) {
            const Contour c = contour_count(h, rects[k], opt);
            if (!c.ok) {
                ok = false;
                break;
            }
            out[k] = make_cell(rects[k], c, cell.depth + 1);
            total += c.count;
        }
        if (ok && total == cell.count) return out;
    }
    return std::nullopt;
}

inline CellOutcome process_cell(const MeromorphicHandle& h, const Cell& cell, double min_cell,
                                const ZeroOptions& opt) {
    CellOutcome out;
    const Certificate cert{cell.rect, cell.count, cell.confidence};
    if (cell.count == 0) {
        out.certificates.push_back(cert);
        return out;
    }
    const bool at_min = cell.rect.width() <= min_cell || cell.rect.height() <= min_cell ||
                        cell.depth >= opt.max_depth;
    const Complex center = cell.rect.center();
    const double hd = cell.rect.half_diagonal();
    auto inside = [&](Complex z) {
        return cell.rect.contains(z, 1e-9 * hd + opt.tol * (1.0 + std::abs(z)));
    };
    if (cell.count == 1 || at_min) {
        const LocalModel lm = local_model(h, center, 2.0 * hd);
        if (lm.poles.size() <= opt.max_local_poles) {
            Complex seed = center;
            if (cell.count > 1)  // centroid of the cluster
                seed = (cell.moment + cell.a_zero_sum) / static_cast<double>(cell.count);
            const NewtonResult nr = newton(h, lm, seed, cell.count, opt);
            if (nr.ok && inside(nr.z)) {
                out.zeros.push_back({nr.z, cell.count, nr.residual});
                out.certificates.push_back(cert);
                return out;
            }
            // A cluster at the resolution floor: Newton stalls near eps^(1/count)
            // and the centroid can drift out of the cell, so fall back to the center.
            if (at_min && cell.count > 1) {
                out.zeros.push_back({is_finite(seed) && inside(seed) ? seed : center, cell.count, hd});
                out.certificates.push_back(cert);
                return out;
            }
        }
        if (at_min) {
            out.failures.push_back(cert);
            return out;
        }
    }
    if (auto children = split(h, cell, opt)) {
        for (const Cell& c : *children) out.children.push_back(c);
    } else if (cell.count > 1 && hd <= std::sqrt(opt.tol) * (1.0 + std::abs(center))) {
        // Contours this close to a cluster hit the rounding floor; the count is
        // certified and sqrt(tol) is the attainable accuracy for a double root.
        out.zeros.push_back({center, cell.count, hd});
        out.certificates.push_back(cert);
    } else {
        out.failures.push_back(cert);
    }
    return out;
}

inline Rect checked_region(const Rect& r) {
    if (!r.valid() || !std::isfinite(r.x0) || !std::isfinite(r.x1) || !std::isfinite(r.y0) ||
        !std::isfinite(r.y1))
        throw Error(ErrorKind::InvalidArgument, "region must be a nondegenerate finite rectangle");
    return r;
}

inline std::pair<Rect, Contour> stable_count(const MeromorphicHandle& h, const Rect& region,
                                             const ZeroOptions& opt) {
    for (int k = 0; k <= opt.nudge_budget; ++k) {
        const Rect r = k == 0 ? region : nudged(region, k - 1);
        const Contour c = contour_count(h, r, opt);
        if (c.ok) return {r, c};
    }
    throw Error(ErrorKind::BoundaryUnstable, "argument principle failed after nudging");
}

}  // namespace detail

/// Number of zeros of B = A m (with multiplicity) inside the region.
inline CountResult count_zeros(const MeromorphicHandle& h, const Rect& region,
                               const ZeroOptions& opt = {}) {
    const auto [r, c] = detail::stable_count(h, detail::checked_region(region), opt);
    return {c.count, c.confidence, r};
}

/// Locates every zero of B = A m in the region by quadrisection and Newton.
inline ZeroReport find_zeros(const MeromorphicHandle& h, const Rect& region,
                             const ZeroOptions& opt = {}) {
    if (!(opt.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
    const auto [root_rect, root] = detail::stable_count(h, detail::checked_region(region), opt);
    ZeroReport report;
    report.region = root_rect;
    report.method = ZeroMethod::subdivision;
    const double min_cell =
        opt.min_cell > 0.0
            ? opt.min_cell
            : 1e-7 * std::max(1.0, std::max(root_rect.width(), root_rect.height()));

    std::vector<detail::Cell> level{detail::make_cell(root_rect, root, 0)};
    while (!level.empty()) {
        std::vector<detail::CellOutcome> outcomes(level.size());
        parallel_for(level.size(), opt.threads, [&](std::size_t i) {
            outcomes[i] = detail::process_cell(h, level[i], min_cell, opt);
        });
        std::vector<detail::Cell> next;
        for (detail::CellOutcome& o : outcomes) {
            next.insert(next.end(), o.children.begin(), o.children.end());
            report.zeros.insert(report.zeros.end(), o.zeros.begin(), o.zeros.end());
            report.certificates.insert(report.certificates.end(), o.certificates.begin(),
                                       o.certificates.end());
            report.failures.insert(report.failures.end(), o.failures.begin(), o.failures.end());
        }
        level = std::move(next);
    }
    auto by_location = [](const LocatedZero& a, const LocatedZero& b) {
        if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
        return a.location.imag() < b.location.imag();
    };
    std::sort(report.zeros.begin(), report.zeros.end(), by_location);
    auto by_corner = [](const Certificate& a, const Certificate& b) {
        if (a.region.x0 != b.region.x0) return a.region.x0 < b.region.x0;
        return a.region.y0 < b.region.y0;
    };
    std::sort(report.certificates.begin(), report.certificates.end(), by_corner);
    std::sort(report.failures.begin(), report.failures.end(), by_corner);
    return report;
}

/// Polishes a seed by Newton on the pole-removed local function of h, with
/// poles within `radius` of the seed removed.
inline std::optional<LocatedZero> polish_zero(const MeromorphicHandle& h, Complex seed, double radius,
                                              const ZeroOptions& opt = {}) {
    const detail::LocalModel lm = detail::local_model(h, seed, radius);
    const detail::NewtonResult nr = detail::newton(h, lm, seed, 1, opt);
    if (!nr.ok || std::abs(nr.z - seed) > radius) return std::nullopt;
    return LocatedZero{nr.z, 1, nr.residual};
}

namespace detail {

/// Roots of g + sum c_k / (u_k - w), g != 0: the eigenvalues of
/// diag(u) + v v^T with v_k^2 = c_k / g.
inline std::vector<Complex> diagonal_plus_rank_one_roots(std::span<const Complex> u,
                                                         std::span<const Complex> c, Complex g) {
    const Eigen::Index n = static_cast<Eigen::Index>(u.size());
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXcd v(n);
    for (Eigen::Index k = 0; k < n; ++k) v(k) = std::sqrt(c[k] / g);
    M = v * v.transpose();
    for (Eigen::Index k = 0; k < n; ++k) M(k, k) += u[k];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::NonConvergence, "eigensolver failed");
    std::vector<Complex> roots(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) roots[k] = es.eigenvalues()(k);
    return roots;
}

}  // namespace detail

/// All zeros of the polynomial gamma prod(t_k - z) + sum a_k prod_{j != k}(t_j - z)
/// (n of them for gamma != 0, n - 1 for gamma = 0), each polished by Newton.
/// Regularized handles are reduced to plain ones with gamma - sum a_k / t_k.
inline std::vector<Complex> rational_zeros_oracle(const MeromorphicHandle& h) {
    if (!h.is_series())
        throw Error(ErrorKind::UnsupportedMode, "the rational oracle needs a series handle");
    const Spectrum& s = h.spectrum();
    const std::size_t n = s.size();
    std::vector<Complex> t = s.nodes();
    std::vector<Complex> a(n);
    for (std::size_t k = 0; k < n; ++k) a[k] = h.coefficient(k);
    Complex gamma = h.gamma();
    if (h.mode() == HandleMode::regularized) {
        std::vector<Complex> terms{gamma};
        for (std::size_t k = 0; k < n; ++k) terms.push_back(-a[k] / t[k]);
        gamma = sorted_sum(terms);
    }
    const MeromorphicHandle plain =
        MeromorphicHandle::with_coefficients(h.spectrum_ptr(), gamma, a, HandleMode::plain);

    std::vector<Complex> roots;
    double scale = 0.0;
    for (std::size_t k = 0; k < n; ++k) scale = std::max(scale, std::abs(t[k]));
    double asum = 0.0;
    for (const Complex& ak : a) asum += std::abs(ak);
    if (gamma != Complex{}) {
        roots = detail::diagonal_plus_rank_one_roots(t, a, gamma);
    } else {
        // Move infinity to a finite point: z = sigma + 1/w.
        Complex sigma;
        double best = -1.0;
        for (int j = 0; j < 16; ++j) {
            const double ang = 2.0 * kPi * detail::frac((j + 1) * 0.6180339887498949);
            const Complex cand = (scale + 1.0) * (0.37 + 0.11 * j) * std::polar(1.0, ang);
            Complex mv{0.0, 0.0};
            double dmin = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < n; ++k) {
                mv += a[k] / (t[k] - cand);
                dmin = std::min(dmin, std::abs(t[k] - cand));
            }
            const double q = std::abs(mv) * dmin;
            if (q > best) {
                best = q;
                sigma = cand;
            }
        }
        std::vector<Complex> u(n);
        std::vector<Complex> c(n);
        std::vector<Complex> b(n);
        for (std::size_t k = 0; k < n; ++k) {
            u[k] = 1.0 / (t[k] - sigma);
            b[k] = a[k] * u[k];
            c[k] = -b[k] * u[k];
        }
        const Complex g = sorted_sum(b);
        std::vector<Complex> w = detail::diagonal_plus_rank_one_roots(u, c, g);
        std::sort(w.begin(), w.end(),
                  [](const Complex& x, const Complex& y) { return std::abs(x) < std::abs(y); });
        Complex asum_signed{0.0, 0.0};
        for (const Complex& ak : a) asum_signed += ak;
        const std::size_t drop = std::abs(asum_signed) <= 1e-14 * asum ? 2 : 1;
        for (std::size_t k = std::min(drop, w.size()); k < w.size(); ++k)
            roots.push_back(sigma + 1.0 / w[k]);
    }

    ZeroOptions opt;
    opt.tol = 1e-15;
    opt.newton_iterations = 30;
    for (Complex& z : roots) {
        // Only the nearest node is removed; accept the polish if it stays close.
        std::size_t nearest = 0;
        double dn = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            const double d = std::abs(t[k] - z);
            if (d < dn) {
                dn = d;
                nearest = k;
            }
        }
        detail::LocalModel lm;
        lm.mask.assign(n, 0);
        lm.mask[nearest] = 1;
        lm.indices.push_back(nearest);
        lm.poles.push_back(t[nearest]);
        const detail::NewtonResult nr = detail::newton(plain, lm, z, 1, opt);
        if (nr.ok && std::abs(nr.z - z) <= 1e-6 * (1.0 + std::abs(z))) z = nr.z;
    }
    std::sort(roots.begin(), roots.end(), [](const Complex& x, const Complex& y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return roots;
}

inline ZeroReport oracle_report(const MeromorphicHandle& h) {
    ZeroReport r;
    r.method = ZeroMethod::oracle;
    double extent = 0.0;
    for (const Complex& z : rational_zeros_oracle(h)) {
        r.zeros.push_back({z, 1, 0.0});
        extent = std::max({extent, std::abs(z.real()), std::abs(z.imag())});
    }
    r.region = Rect{-extent, extent, -extent, extent};
    return r;
}

/// Square centered at 0 containing every zero of a series handle. For
/// gamma != 0 the bound sum |a| / (|z| - R) < |gamma| proves there is no zero
/// with |z| > R + sum|a| / |gamma| (R = max |t|); for gamma = 0 the oracle
/// roots are used.
inline Rect default_region(const MeromorphicHandle& h) {
    if (!h.is_series())
        throw Error(ErrorKind::UnsupportedMode, "closed forms have no finite zero set");
    const Spectrum& s = h.spectrum();
    double R = 0.0;
    double asum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        R = std::max(R, std::abs(s.node(i)));
        asum += std::abs(h.coefficient(i));
    }
    Complex gamma = h.gamma();
    if (h.mode() == HandleMode::regularized) {
        for (std::size_t i = 0; i < s.size(); ++i) gamma -= h.coefficient(i) / s.node(i);
    }
    double half = 0.0;
    if (gamma != Complex{}) {
        half = std::max(2.0 * R, R + asum / std::abs(gamma));
    } else {
        half = 2.0 * R + 1.0;
        for (const Complex& z : rational_zeros_oracle(h)) half = std::max(half, std::abs(z));
    }
    half = 1.05 * half + 1e-3;
    return Rect{-half, half, -half, half};
}

struct ZeroPair {
    std::size_t node_index = 0;
    std::size_t zero_index = 0;
    double distance = 0.0;
};

struct ZeroPairing {
    std::vector<ZeroPair> pairs;
    std::vector<std::size_t> unpaired_zeros;
    std::vector<std::size_t> unpaired_nodes;
    double disk_exponent = 0.0;
    double delta = 0.0;

    std::optional<ZeroPair> pair_for_node(std::size_t n) const {
        for (const ZeroPair& p : pairs)
            if (p.node_index == n) return p;
        return std::nullopt;
    }
};

/// Greedy nearest matching of zeros to nodes inside the disjoint disks
/// D(t_n, delta (|t_n| + 1)^(-N)).
inline ZeroPairing pair_zeros(const Spectrum& s, std::span<const Complex> zeros, double N,
                              double delta) {
    if (!(N >= 0.0) || !(delta > 0.0))
        throw Error(ErrorKind::InvalidArgument, "pairing needs N >= 0 and delta > 0");
    const std::size_t n = s.size();
    std::vector<double> radius(n);
    for (std::size_t i = 0; i < n; ++i) radius[i] = delta * std::pow(std::abs(s.node(i)) + 1.0, -N);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (radius[i] + radius[j] > std::abs(s.node(i) - s.node(j)))
                throw Error(ErrorKind::OverlappingDisks,
                            "disks " + std::to_string(i) + " and " + std::to_string(j), {i, j});
    std::vector<ZeroPair> candidates;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < zeros.size(); ++k) {
            const double d = std::abs(zeros[k] - s.node(i));
            if (d < radius[i]) candidates.push_back({i, k, d});
        }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const ZeroPair& a, const ZeroPair& b) { return a.distance < b.distance; });
    std::vector<char> node_used(n, 0);
    std::vector<char> zero_used(zeros.size(), 0);
    ZeroPairing out;
    out.disk_exponent = N;
    out.delta = delta;
    for (const ZeroPair& c : candidates) {
        if (node_used[c.node_index] || zero_used[c.zero_index]) continue;
        node_used[c.node_index] = 1;
        zero_used[c.zero_index] = 1;
        out.pairs.push_back(c);
    }
    std::sort(out.pairs.begin(), out.pairs.end(),
              [](const ZeroPair& a, const ZeroPair& b) { return a.node_index < b.node_index; });
    for (std::size_t i = 0; i < n; ++i)
        if (!node_used[i]) out.unpaired_nodes.push_back(i);
    for (std::size_t k = 0; k < zeros.size(); ++k)
        if (!zero_used[k]) out.unpaired_zeros.push_back(k);
    return out;
}

inline ZeroPairing pair_zeros(const Spectrum& s, const ZeroReport& report, double N, double delta) {
    std::vector<Complex> z;
    for (const LocatedZero& lz : report.zeros) z.push_back(lz.location);
    return pair_zeros(s, z, N, delta);
}

/// Leading-order zero near t_n: t_n + a_n / gamma.
inline Complex first_order_prediction(const MeromorphicHandle& h, std::size_t n) {
    if (h.gamma() == Complex{}) throw Error(ErrorKind::GammaZero, "prediction needs gamma != 0");
    if (!h.is_series()) throw Error(ErrorKind::UnsupportedMode, "prediction needs a series handle");
    if (n >= h.spectrum().size()) throw Error(ErrorKind::InvalidArgument, "index out of range");
    return h.spectrum().node(n) + h.coefficient(n) / h.gamma();
}

inline Complex first_order_prediction(const Spectrum& s, Complex gamma, std::size_t n) {
    if (gamma == Complex{}) throw Error(ErrorKind::GammaZero, "prediction needs gamma != 0");
    if (n >= s.size()) throw Error(ErrorKind::InvalidArgument, "index out of range");
    return s.node(n) + s.weight(n) / gamma;
}

}  // namespace cdb
