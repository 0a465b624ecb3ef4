// Runs the ten acceptance criteria; prints one PASS/FAIL line each and exits
// nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "cdb/cdb.hpp"

using namespace cdb;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

std::shared_ptr<const Spectrum> make_spectrum(const std::vector<Complex>& t, const std::vector<double>& mu) {
    std::vector<SpectrumPoint> pts;
    for (std::size_t i = 0; i < t.size(); ++i) pts.push_back({t[i], mu[i]});
    return std::make_shared<const Spectrum>(Spectrum::validate(pts));
}

std::vector<Complex> gaussian(std::mt19937_64& rng, std::size_t n, double norm) {
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<Complex> v(n);
    double ss = 0.0;
    for (Complex& x : v) {
        x = {nd(rng), nd(rng)};
        ss += std::norm(x);
    }
    for (Complex& x : v) x *= norm / std::sqrt(ss);
    return v;
}

double matched_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    if (a.empty()) return 0.0;
    return match_points(a, b).max_distance;
}

double rel_change(double a, double b) {
    if (std::isinf(a) && std::isinf(b)) return 0.0;
    return std::abs(b - a) / std::abs(a);
}

// 1. Subdivision zeros agree with the rational oracle on random plain handles.
Outcome oracle_equivalence() {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> box(0.0, 10.0);
    std::uniform_real_distribution<double> weight(0.0, 1.0);
    const Complex gammas[] = {{1.0, 0.0}, {1.0, 1.0}, {-2.0, 0.0}};
    double worst = 0.0;
    int failures = 0;
    for (int inst = 0; inst < 50; ++inst) {
        const std::size_t n = 1 + rng() % 50;
        std::vector<Complex> t(n);
        std::vector<double> mu(n);
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = {box(rng), box(rng)};
            do mu[i] = 1.0 - weight(rng);
            while (mu[i] <= 0.0);
        }
        const MeromorphicHandle h = MeromorphicHandle::plain(make_spectrum(t, mu), gammas[inst % 3]);
        const ZeroReport rep = find_zeros(h, default_region(h));
        const double d = matched_distance(rep.locations(), rational_zeros_oracle(h));
        worst = std::max(worst, d);
        if (!(d <= 1e-10)) ++failures;
    }
    return {failures == 0, "50 instances, worst matched distance " + fmt(worst) + ", failing " + std::to_string(failures)};
}

// 2. PW with gamma = 0 has zeros exactly at the integers; gamma = pi i has none.
Outcome paley_wiener() {
    const WorkedSpace pw = pw_spectrum(64);
    const Rect region{-20.5, 20.5, -1.0, 1.0};
    const ZeroReport rep = find_zeros(pw.closed_form(0.0), region);
    std::vector<Complex> expected;
    for (int k = -20; k <= 20; ++k) expected.push_back({double(k), 0.0});
    const double d = matched_distance(rep.locations(), expected);
    const CountResult none = count_zeros(pw.closed_form(kPi * kI), region);
    const bool pass = d <= 1e-10 && none.count == 0;
    return {pass, std::to_string(rep.total_multiplicity()) + " zeros, max error " + fmt(d) +
                      "; count at gamma = pi i: " + std::to_string(none.count)};
}

// 3. Characteristic zeros against a dense eigensolve.
Outcome forward_perturbation() {
    std::mt19937_64 rng(7);
    const std::size_t n = 200;
    std::vector<Complex> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = {double(i + 1), 0.0};
    auto s = make_spectrum(t, std::vector<double>(n, 1.0));
    auto a = gaussian(rng, n, 0.1);
    auto b = gaussian(rng, n, 0.1);
    const PerturbationSpectrumReport r = forward_spectrum(RankOnePerturbation::make(s, a, b));
    return {r.max_mismatch <= 1e-8 && r.char_zeros.size() == n, "max mismatch " + fmt(r.max_mismatch)};
}

// 4. Inverse design round trip and the size of the rank-one products.
Outcome inverse_round_trip() {
    const std::size_t n = 100;
    std::vector<Complex> t(n);
    std::vector<Complex> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = {double(i + 1), 0.0};
        z[i] = t[i] + std::ldexp(1.0, -int(i + 1)) * Complex{0.5, 0.5};
    }
    auto s = make_spectrum(t, std::vector<double>(n, 1.0));
    const RankOnePerturbation p = inverse_design(s, z);
    const PerturbationSpectrumReport r = forward_spectrum(p);
    const double mismatch = matched_distance(r.char_zeros, z);
    double lo = INFINITY;
    double hi = 0.0;
    std::size_t checked = 0;
    for (std::size_t i = 4; i < n; ++i) {
        const double ratio = std::abs(p.product(i)) / std::abs(z[i] - t[i]);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        ++checked;
    }
    const bool pass = mismatch <= 1e-8 && lo >= 0.5 && hi <= 2.0;
    return {pass, "round trip " + fmt(mismatch) + ", ratio in [" + fmt(lo) + ", " + fmt(hi) + "] over " +
                      std::to_string(checked) + " nodes"};
}

// 5. Reconstruction of (T, mu) from the zeros of B_alpha and B_beta.
Outcome two_spectra() {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> box(0.0, 10.0);
    std::uniform_real_distribution<double> weight(0.0, 1.0);
    const Complex alpha{1.0, 0.0};
    const Complex beta{1.0, 1.0};
    double node_err = 0.0;
    double weight_err = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
        const std::size_t n = 2 + rng() % 29;
        std::vector<Complex> t;
        while (t.size() < n) {
            const Complex c{box(rng), box(rng)};
            bool separated = true;
            for (const Complex& u : t) separated = separated && std::abs(u - c) >= 0.5;
            if (separated) t.push_back(c);
        }
        std::vector<double> mu(n);
        for (double& m : mu) {
            do m = weight(rng);
            while (m <= 0.0);
        }
        auto s = make_spectrum(t, mu);
        const auto za = rational_zeros_oracle(MeromorphicHandle::plain(s, alpha));
        const auto zb = rational_zeros_oracle(MeromorphicHandle::plain(s, beta));
        const TwoSpectraResult r = two_spectra_reconstruct(alpha, za, beta, zb);
        if (r.spectrum.size() != n) return {false, "instance " + std::to_string(inst) + " lost nodes"};
        const PointMatching m = match_points(r.spectrum.nodes(), s->nodes());
        node_err = std::max(node_err, m.max_distance);
        for (std::size_t i = 0; i < n; ++i)
            weight_err = std::max(weight_err, std::abs(r.spectrum.weight(i) - s->weight(m.partner[i])));
    }
    return {node_err <= 1e-8 && weight_err <= 1e-7,
            "node error " + fmt(node_err) + ", weight error " + fmt(weight_err)};
}

// 6. Closeness sums and Gram conditions over a truncation ladder.
Outcome quadratic_closeness_ladder() {
    const std::size_t ladder[] = {100, 200, 400};
    std::vector<double> totals;
    std::vector<double> conditions;
    for (std::size_t K : ladder) {
        std::vector<Complex> t(K);
        std::vector<double> mu(K);
        for (std::size_t i = 0; i < K; ++i) {
            t[i] = {double(i + 1), 0.0};
            mu[i] = std::pow(double(i + 1), -4.0);
        }
        auto s = make_spectrum(t, mu);
        const MeromorphicHandle h = MeromorphicHandle::plain(s, 1.0);
        const std::vector<Complex> z = find_zeros(h, default_region(h)).locations();
        const ZeroPairing pairing = pair_zeros(*s, z, 0.0, 1.0 / 3.0);
        const ClosenessReport c = quadratic_closeness(*s, pairing, z, 1.0);
        totals.push_back(c.partial_sums.empty() ? 0.0 : c.partial_sums.back());
        std::vector<Complex> paired;
        for (const ZeroPair& p : pairing.pairs) paired.push_back(z[p.zero_index]);
        conditions.push_back(gram(*s, paired).condition);
    }
    const double growth = (totals[2] - totals[1]) / totals[1];
    double spread = 0.0;
    for (double c : conditions) spread = std::max(spread, rel_change(conditions[0], c));
    return {growth < 0.01 && spread < 0.10,
            "sum growth 200->400 " + fmt(growth) + ", conditions " + fmt(conditions[0]) + "/" + fmt(conditions[1]) +
                "/" + fmt(conditions[2])};
}

// 7. Cross-PW zero series, the exceptional diagonal, and the analysis map.
Outcome cross_pw_series() {
    const WorkedSpace cross = cross_pw_spectrum(64);
    std::string detail;

    const SeriesOffsets off = cross_series_offsets(1.0);
    const ZeroReport rep1 = find_zeros(cross.closed_form(1.0), Rect{-20.25, 20.25, -20.25, 20.25});
    double worst_series = 0.0;
    std::size_t in_band = 0;
    for (const LocatedZero& z : rep1.zeros) {
        const double r = std::abs(z.location);
        if (r < 5.0 || r > 20.0) continue;
        ++in_band;
        double best = INFINITY;
        for (Arm a : {Arm::right, Arm::left, Arm::up, Arm::down})
            for (int k = 1; k <= 25; ++k) best = std::min(best, std::abs(z.location - off.point(a, k)));
        worst_series = std::max(worst_series, best);
    }
    const bool series_ok = in_band > 0 && worst_series <= 1e-4;

    const Complex ex_gamma{kPi, -kPi};
    const ZeroReport rep2 = find_zeros(cross.closed_form(ex_gamma), Rect{-15.25, 15.25, -15.25, 15.25});
    const std::vector<Complex> located = rep2.locations();
    auto nearest = [&](Complex w) {
        double best = INFINITY;
        Complex at = w;
        for (const Complex& z : located)
            if (std::abs(z - w) < best) {
                best = std::abs(z - w);
                at = z;
            }
        return std::pair{best, at};
    };
    double worst_diag = 0.0;
    for (int k = 10; k <= 30; ++k) worst_diag = std::max(worst_diag, nearest(ExceptionalData::diagonal(k)).first);
    const bool diag_ok = worst_diag <= 1e-6;

    // f = A(z) / (z - 1/2) is the basis vector at the node 1/2.
    const WorkedSpace big = cross_pw_spectrum(2000);
    std::vector<Complex> f(big.spectrum->size(), Complex{0.0, 0.0});
    for (std::size_t n = 0; n < big.spectrum->size(); ++n)
        if (big.spectrum->node(n) == Complex{0.5, 0.0}) f[n] = 1.0;
    std::vector<Complex> w;
    for (int k = 1; k <= 30; ++k) w.push_back(nearest(ExceptionalData::diagonal(k)).second);
    const std::vector<Complex> coef = analysis_coefficients(*big.spectrum, f, w);
    std::vector<double> logK;
    std::vector<double> partial;
    double acc = 0.0;
    for (std::size_t k = 0; k < coef.size(); ++k) {
        acc += std::norm(coef[k]);
        if (k + 1 >= 5) {
            logK.push_back(std::log(double(k + 1)));
            partial.push_back(acc);
        }
    }
    const LineFit fit = fit_line(logK, partial);
    const bool slope_ok = fit.slope >= 0.5 && fit.slope <= 2.0;
    // Informational only: the scale-free exponent of S against log K.
    std::vector<double> loglogK;
    std::vector<double> logS;
    for (std::size_t i = 0; i < logK.size(); ++i) {
        loglogK.push_back(std::log(logK[i]));
        logS.push_back(std::log(partial[i]));
    }
    const double exponent = fit_line(loglogK, logS).slope;

    detail = "series max distance " + fmt(worst_series) + " over " + std::to_string(in_band) +
             " zeros; diagonal max error " + fmt(worst_diag) + "; partial-sum slope vs log K " + fmt(fit.slope) +
             " (need [0.5, 2]); log-log exponent " + fmt(exponent) + " (info)";
    return {series_ok && diag_ok && slope_ok, detail};
}

std::vector<Complex> zeros_in_disk(const ZeroReport& rep, double radius) {
    std::vector<Complex> out;
    for (const LocatedZero& z : rep.zeros)
        if (std::abs(z.location) <= radius) out.push_back(z.location);
    return out;
}

// 8. Gram conditions at zeros: stable for gamma = 1, growing for pi(1 - i).
Outcome exceptional_contrast() {
    const Rect box{-20.25, 20.25, -20.25, 20.25};
    std::vector<double> stable;
    const ZeroReport rep1 = find_zeros(cross_pw_spectrum(8).closed_form(1.0), box);
    const std::vector<Complex> z1 = zeros_in_disk(rep1, 15.0);
    for (std::size_t K : {100, 200, 400}) stable.push_back(gram(*cross_pw_spectrum(K).spectrum, z1).condition);
    double spread = 0.0;
    for (std::size_t i = 1; i < stable.size(); ++i) spread = std::max(spread, rel_change(stable[i - 1], stable[i]));

    const WorkedSpace cross = cross_pw_spectrum(400);
    const ZeroReport rep2 = find_zeros(cross.closed_form(Complex{kPi, -kPi}), box);
    const double windows[] = {10.0, 12.5, 15.0, 17.5, 20.0};
    std::vector<double> growing;
    std::vector<double> lmax;
    for (double W : windows) {
        const KernelFrameReport r = gram(*cross.spectrum, zeros_in_disk(rep2, W));
        growing.push_back(r.condition);
        lmax.push_back(r.lambda_max);
    }
    bool monotone = true;
    for (std::size_t i = 1; i < growing.size(); ++i) monotone = monotone && growing[i] >= growing[i - 1];
    const bool doubled = growing.back() >= 2.0 * growing.front();
    return {spread < 0.10 && monotone && doubled,
            "gamma=1 conditions " + fmt(stable[0]) + "/" + fmt(stable[1]) + "/" + fmt(stable[2]) +
                "; gamma=pi(1-i) condition " + fmt(growing.front()) + " -> " + fmt(growing.back()) +
                " (lambda_max " + fmt(lmax.front()) + " -> " + fmt(lmax.back()) + ")"};
}

// 9. Finite-codimension domain: moments, idempotence, division invariance.
Outcome codimension_domain() {
    const std::size_t n = 200;
    const unsigned N = 2;
    std::vector<Complex> t(n);
    std::vector<double> mu(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = {double(i + 1), 0.0};
        mu[i] = std::pow(double(i + 1), -6.0);
    }
    auto s = make_spectrum(t, mu);
    const BVectors b = bvectors(*s, N);
    auto norm = [](const std::vector<Complex>& v) {
        double ss = 0.0;
        for (const Complex& c : v) ss += std::norm(c);
        return std::sqrt(ss);
    };
    auto worst_moment = [&](const std::vector<Complex>& g) {
        double worst = 0.0;
        for (const auto& bj : b.vectors) worst = std::max(worst, std::abs(inner(g, bj)) / (norm(g) * norm(bj)));
        return worst;
    };
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> re(0.0, 60.0);
    std::uniform_real_distribution<double> im(0.25, 5.0);
    double moment = 0.0;
    double idem = 0.0;
    double division = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::vector<Complex> f = gaussian(rng, n, 1.0);
        const std::vector<Complex> g = project_domain(*s, f, N);
        moment = std::max(moment, worst_moment(g));
        const std::vector<Complex> gg = project_domain(*s, g, N);
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) diff += std::norm(gg[i] - g[i]);
        idem = std::max(idem, std::sqrt(diff) / norm(g));

        const Complex lambda{re(rng), im(rng)};
        std::vector<std::vector<Complex>> constraints = b.vectors;
        constraints.push_back(evaluation_vector(*s, lambda));
        const std::vector<Complex> vanishing = project_out(constraints, f);
        division = std::max(division, worst_moment(divide_at(*s, vanishing, lambda)));
    }
    return {moment <= 1e-12 && idem <= 1e-12 && division <= 1e-12,
            "moments " + fmt(moment) + ", idempotence " + fmt(idem) + ", division " + fmt(division) +
                " (relative)"};
}

// 10. Carleson constants of a geometric sequence and of a colliding pair.
Outcome carleson() {
    std::vector<Complex> pts;
    for (int n = 0; n <= 40; ++n) pts.push_back({0.0, std::ldexp(1.0, n)});
    const double c20 = carleson_constant(std::span<const Complex>(pts.data(), 21));
    const double c40 = carleson_constant(pts);
    std::vector<Complex> collide(pts.begin(), pts.begin() + 21);
    collide.push_back(Complex{0.01, 32.0});
    const double cc = carleson_constant(collide);
    return {c20 >= 0.1 && rel_change(c20, c40) < 0.01 && cc < 1e-3,
            "C(20) " + fmt(c20) + ", C(40) " + fmt(c40) + ", colliding pair " + fmt(cc)};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double limit_seconds;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {"oracle equivalence", 60.0, oracle_equivalence},
        {"Paley-Wiener exactness", 5.0, paley_wiener},
        {"forward perturbation", 30.0, forward_perturbation},
        {"inverse design round trip", 10.0, inverse_round_trip},
        {"two-spectra reconstruction", 20.0, two_spectra},
        {"quadratic closeness", 60.0, quadratic_closeness_ladder},
        {"cross-PW series", 120.0, cross_pw_series},
        {"exceptional-gamma contrast", 120.0, exceptional_contrast},
        {"domain and codimension", 10.0, codimension_domain},
        {"Carleson constants", 1.0, carleson},
    };
    int failed = 0;
    int index = 0;
    for (const Criterion& c : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.limit_seconds;
        const bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::printf("criterion %2d %s: %s | %s | %.2fs (limit %.0fs)%s\n", index, pass ? "PASS" : "FAIL", c.name,
                    o.detail.c_str(), secs, c.limit_seconds, in_time ? "" : " over time");
        std::fflush(stdout);
    }
    std::printf("%d of 10 criteria passed\n", 10 - failed);
    return failed == 0 ? 0 : 1;
}
