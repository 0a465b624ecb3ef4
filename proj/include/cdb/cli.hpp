#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cdb/cdb.hpp"

namespace cdb::cli {

using io::json;

struct Globals {
    double tol = 1e-12;
    std::string out;
    std::string format = "json";
    unsigned threads = 1;
    std::uint64_t seed = 1;
};

namespace detail {

inline Rect parse_region(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) v.push_back(io::parse_double(part));
    if (v.size() != 4) throw Error(ErrorKind::InvalidArgument, "region needs x0,x1,y0,y1");
    return Rect{v[0], v[1], v[2], v[3]};
}

inline std::vector<std::size_t> parse_ladder(const std::string& text) {
    std::vector<std::size_t> v;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const double x = io::parse_double(part);
        if (!(x >= 1.0) || x != std::floor(x))
            throw Error(ErrorKind::InvalidArgument, "ladder entries must be positive integers");
        v.push_back(static_cast<std::size_t>(x));
    }
    if (v.empty()) throw Error(ErrorKind::InvalidArgument, "empty ladder");
    return v;
}

class Emitter {
public:
    Emitter(const Globals& g, std::ostream& out) : g_(g), out_(out) {}

    bool csv() const { return g_.format == "csv"; }

    /// Writes to --out when given, else to stdout.
    void single(const std::string& content) const {
        if (g_.out.empty()) {
            out_ << content;
        } else {
            io::write_file(g_.out, content);
        }
    }
    void single(const json& j) const { single(j.dump(2) + "\n"); }

    /// Multi-file output: --out is a directory.
    void file(const std::string& name, const std::string& content) const {
        std::filesystem::create_directories(g_.out);
        io::write_file((std::filesystem::path(g_.out) / name).string(), content);
    }
    bool to_directory() const { return !g_.out.empty(); }

private:
    const Globals& g_;
    std::ostream& out_;
};

inline ZeroOptions zero_options(const Globals& g) {
    ZeroOptions o;
    o.tol = g.tol;
    o.threads = g.threads;
    return o;
}

inline MeromorphicHandle series_handle(std::shared_ptr<const Spectrum> s, Complex gamma,
                                       const std::string& mode) {
    if (mode == "plain") return MeromorphicHandle::plain(std::move(s), gamma);
    if (mode == "regularized") return MeromorphicHandle::regularized(std::move(s), gamma);
    throw Error(ErrorKind::InvalidArgument, "mode must be plain or regularized");
}

inline double zero_mismatch(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    if (a.empty() || b.empty()) return a.size() == b.size() ? 0.0 : INFINITY;
    const PointMatching m = a.size() <= b.size() ? match_points(a, b) : match_points(b, a);
    return a.size() == b.size() ? m.max_distance : INFINITY;
}

inline std::string class_csv(const SpectrumClass& c) {
    std::string out = "key,value\n";
    for (const auto& [k, v] : io::class_json(c).items()) out += k + "," + (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
    return out;
}

inline std::string spectrum_csv(const Spectrum& s) {
    std::string out = "re,im,mu\n";
    for (const SpectrumPoint& p : s.points())
        out += io::format_double(p.t.real()) + "," + io::format_double(p.t.imag()) + "," +
               io::format_double(p.mu) + "\n";
    return out;
}

inline std::vector<Complex> random_gaussian(std::mt19937_64& rng, std::size_t n, double norm) {
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<Complex> v(n);
    double ss = 0.0;
    for (Complex& x : v) {
        x = {nd(rng), nd(rng)};
        ss += std::norm(x);
    }
    const double scale = ss > 0.0 ? norm / std::sqrt(ss) : 0.0;
    for (Complex& x : v) x *= scale;
    return v;
}

}  // namespace detail

/// Runs the command line; returns 0 on success, 1 on domain or I/O errors,
/// 2 on usage errors.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical laboratory for Cauchy-de Branges spaces", "cdb"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--tol", g.tol, "Zero tolerance")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "Output file (directory for multi-file reports)");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    app.add_option("--seed", g.seed, "Seed for randomized inputs");

    const detail::Emitter emit(g, out);

    // validate
    std::string spectrum_file;
    bool classify_flag = false;
    auto* validate = app.add_subcommand("validate", "Canonicalize a spectrum file");
    validate->add_option("spectrum", spectrum_file, "Spectrum JSON")->required();
    validate->add_flag("--classify", classify_flag, "Report growth classification instead");
    validate->callback([&] {
        const Spectrum s = io::read_spectrum(spectrum_file);
        if (classify_flag) {
            const SpectrumClass c = classify(s);
            emit.csv() ? emit.single(detail::class_csv(c)) : emit.single(io::class_json(c));
            return;
        }
        emit.csv() ? emit.single(detail::spectrum_csv(s)) : emit.single(io::spectrum_json(s));
    });

    // zeros
    std::string gamma_text;
    std::string region_text;
    std::string mode = "plain";
    bool oracle = false;
    auto* zeros = app.add_subcommand("zeros", "Locate zeros of B_gamma for a spectrum file");
    zeros->add_option("spectrum", spectrum_file, "Spectrum JSON")->required();
    zeros->add_option("--gamma", gamma_text, "gamma (e.g. 1, 1+2i, pi(1-1i))")->required();
    zeros->add_option("--region", region_text, "x0,x1,y0,y1 (default: all zeros)");
    zeros->add_option("--mode", mode, "plain or regularized");
    zeros->add_flag("--oracle", oracle, "Also run the rational oracle and compare");
    zeros->callback([&] {
        auto s = std::make_shared<const Spectrum>(io::read_spectrum(spectrum_file));
        const MeromorphicHandle h = detail::series_handle(s, io::parse_complex(gamma_text), mode);
        const Rect region = region_text.empty() ? default_region(h) : detail::parse_region(region_text);
        const ZeroReport rep = find_zeros(h, region, detail::zero_options(g));
        if (!oracle) {
            emit.csv() ? emit.single(io::zero_report_csv(rep)) : emit.single(io::zero_report_json(rep));
            return;
        }
        ZeroReport orc = oracle_report(h);
        if (!region_text.empty()) {
            std::erase_if(orc.zeros, [&](const LocatedZero& z) { return !rep.region.contains(z.location); });
            orc.region = rep.region;
        }
        const double mismatch = detail::zero_mismatch(rep.locations(), orc.locations());
        const json summary{{"subdivision_count", rep.total_multiplicity()},
                           {"oracle_count", orc.total_multiplicity()},
                           {"max_mismatch", io::number(mismatch)},
                           {"tol", g.tol},
                           {"failures", rep.failures.size()}};
        if (emit.to_directory()) {
            const std::string ext = emit.csv() ? ".csv" : ".json";
            emit.file("zeros" + ext, emit.csv() ? io::zero_report_csv(rep) : io::zero_report_json(rep).dump(2) + "\n");
            emit.file("oracle" + ext, emit.csv() ? io::zero_report_csv(orc) : io::zero_report_json(orc).dump(2) + "\n");
            emit.file("summary.json", summary.dump(2) + "\n");
            return;
        }
        if (emit.csv()) {
            emit.single(io::zero_report_csv(rep) + "\n" + io::zero_report_csv(orc) + "\nmax_mismatch," +
                        io::format_double(mismatch) + "\n");
        } else {
            emit.single(json{{"subdivision", io::zero_report_json(rep)},
                             {"oracle", io::zero_report_json(orc)},
                             {"summary", summary}});
        }
    });

    // gram
    std::string points_spec;
    auto* gram_cmd = app.add_subcommand("gram", "Gram matrix of normalized kernels");
    gram_cmd->add_option("spectrum", spectrum_file, "Spectrum JSON")->required();
    gram_cmd->add_option("--points", points_spec, "Point file or zeros-of:G")->required();
    gram_cmd->add_option("--region", region_text, "Region for zeros-of (default: all zeros)");
    gram_cmd->callback([&] {
        auto s = std::make_shared<const Spectrum>(io::read_spectrum(spectrum_file));
        std::vector<Complex> pts;
        if (points_spec.rfind("zeros-of:", 0) == 0) {
            const MeromorphicHandle h = MeromorphicHandle::plain(s, io::parse_complex(points_spec.substr(9)));
            const Rect region = region_text.empty() ? default_region(h) : detail::parse_region(region_text);
            pts = find_zeros(h, region, detail::zero_options(g)).locations();
        } else {
            pts = io::read_points(points_spec);
        }
        const KernelFrameReport r = gram(*s, pts, g.threads);
        emit.csv() ? emit.single(io::gram_csv(r)) : emit.single(io::frame_json(r));
    });

    // frame
    std::string ladder_text;
    double window = 0.0;
    auto* frame = app.add_subcommand("frame", "Frame bounds at zeros over a truncation ladder");
    frame->add_option("spectrum", spectrum_file, "Spectrum JSON")->required();
    frame->add_option("--gamma", gamma_text, "gamma")->required();
    frame->add_option("--ladder", ladder_text, "Truncation lengths, e.g. 100,200,400")->required();
    frame->add_option("--window", window, "Half-side of the zero window (default: a quarter of the smallest truncation extent)");
    frame->callback([&] {
        const Spectrum full = io::read_spectrum(spectrum_file);
        const Complex gamma = io::parse_complex(gamma_text);
        const std::vector<std::size_t> ladder = detail::parse_ladder(ladder_text);
        double w = window;
        if (!(w > 0.0)) {
            const std::size_t k0 = std::min(*std::min_element(ladder.begin(), ladder.end()), full.size());
            w = 0.25 * std::abs(full.node(k0 - 1)) + 0.5;
        }
        json rows = json::array();
        std::string csv = "truncation,zeros,lambda_min,lambda_max,condition\n";
        for (std::size_t K : ladder) {
            auto s = std::make_shared<const Spectrum>(full.truncated(K));
            const MeromorphicHandle h = MeromorphicHandle::plain(s, gamma);
            const std::vector<Complex> z =
                find_zeros(h, Rect{-w, w, -w, w}, detail::zero_options(g)).locations();
            const KernelFrameReport r = gram(*s, z, g.threads);
            rows.push_back(json{{"truncation", s->size()},
                                {"zeros", z.size()},
                                {"lambda_min", io::number(r.lambda_min)},
                                {"lambda_max", io::number(r.lambda_max)},
                                {"condition", io::number(r.condition)}});
            csv += std::to_string(s->size()) + "," + std::to_string(z.size()) + "," +
                   io::format_double(r.lambda_min) + "," + io::format_double(r.lambda_max) + "," +
                   io::format_double(r.condition) + "\n";
        }
        emit.csv() ? emit.single(csv) : emit.single(json{{"window", w}, {"ladder", rows}});
    });

    // closeness
    double disk_N = -1.0;
    double disk_delta = 0.0;
    auto* closeness = app.add_subcommand("closeness", "Quadratic closeness of kernels at zeros to the node basis");
    closeness->add_option("spectrum", spectrum_file, "Spectrum JSON")->required();
    closeness->add_option("--gamma", gamma_text, "gamma")->required();
    closeness->add_option("--N", disk_N, "Disk exponent (default: fitted separation exponent)");
    closeness->add_option("--delta", disk_delta, "Disk scale (default: fitted constant / 3)");
    closeness->callback([&] {
        auto s = std::make_shared<const Spectrum>(io::read_spectrum(spectrum_file));
        const Complex gamma = io::parse_complex(gamma_text);
        const MeromorphicHandle h = MeromorphicHandle::plain(s, gamma);
        const std::vector<Complex> z = find_zeros(h, default_region(h), detail::zero_options(g)).locations();
        double N = disk_N;
        double delta = disk_delta;
        if (N < 0.0 || !(delta > 0.0)) {
            const SeparationFit fit = s->size() >= 2 ? power_separation(*s) : SeparationFit{0.0, 1.0, {}, {}};
            if (N < 0.0) N = fit.exponent;
            if (!(delta > 0.0)) delta = fit.constant / 3.0;
        }
        const ZeroPairing pairing = pair_zeros(*s, z, N, delta);
        const ClosenessReport c = quadratic_closeness(*s, pairing, z, gamma);
        if (emit.csv()) {
            std::string csv = "node_index,term,partial_sum\n";
            for (std::size_t i = 0; i < c.indices.size(); ++i)
                csv += std::to_string(c.indices[i]) + "," + io::format_double(c.terms[i]) + "," +
                       io::format_double(c.partial_sums[i]) + "\n";
            emit.single(csv);
            return;
        }
        emit.single(json{{"pairing", io::pairing_json(pairing)},
                         {"partial_sums", c.partial_sums},
                         {"bound_ratio", io::number(c.bound_ratio)}});
    });

    // perturb
    auto* perturb = app.add_subcommand("perturb", "Rank-one perturbations");
    perturb->require_subcommand(1);
    std::string perturbation_file;
    std::size_t random_n = 0;
    double random_norm = 0.1;
    auto* forward = perturb->add_subcommand("forward", "Spectrum of diag(t) + a b*");
    forward->add_option("perturbation", perturbation_file, "Perturbation JSON");
    forward->add_option("--random", random_n, "Random instance with t_n = n, n = 1..N");
    forward->add_option("--norm", random_norm, "Norm of the random a and b");
    forward->callback([&] {
        std::optional<RankOnePerturbation> p;
        if (random_n > 0) {
            std::mt19937_64 rng(g.seed);
            std::vector<SpectrumPoint> pts;
            for (std::size_t n = 1; n <= random_n; ++n) pts.push_back({Complex{double(n), 0.0}, 1.0});
            auto s = std::make_shared<const Spectrum>(Spectrum::validate(pts, "diagonal"));
            auto a = detail::random_gaussian(rng, random_n, random_norm);
            auto b = detail::random_gaussian(rng, random_n, random_norm);
            p = RankOnePerturbation::make(s, std::move(a), std::move(b));
        } else if (!perturbation_file.empty()) {
            p = io::perturbation_from_json(io::parse_json(io::read_file(perturbation_file), perturbation_file));
        } else {
            throw CLI::RequiredError("perturbation file or --random");
        }
        const PerturbationSpectrumReport r = forward_spectrum(*p);
        emit.csv() ? emit.single(io::perturbation_report_csv(r)) : emit.single(io::perturbation_report_json(r));
    });
    std::string targets_file;
    auto* inverse = perturb->add_subcommand("inverse", "Rank-one data moving nodes to targets");
    inverse->add_option("spectrum", spectrum_file, "Spectrum JSON (weights ignored)")->required();
    inverse->add_option("--targets", targets_file, "Target points, one per node in canonical order")->required();
    inverse->callback([&] {
        auto s = std::make_shared<const Spectrum>(io::read_spectrum(spectrum_file));
        const std::vector<Complex> targets = io::read_points(targets_file);
        const RankOnePerturbation p = inverse_design(s, targets);
        const PerturbationSpectrumReport r = forward_spectrum(p);
        json j = io::perturbation_json(p);
        j["round_trip_mismatch"] = io::number(detail::zero_mismatch(r.char_zeros, targets));
        emit.single(j);
    });
    std::string alpha_text;
    std::string beta_text;
    std::string za_file;
    std::string zb_file;
    auto* two = perturb->add_subcommand("two-spectra", "Reconstruct (T, mu) from two zero sets");
    two->add_option("--alpha", alpha_text, "alpha")->required();
    two->add_option("--beta", beta_text, "beta")->required();
    two->add_option("--za", za_file, "Zeros of B_alpha")->required();
    two->add_option("--zb", zb_file, "Zeros of B_beta")->required();
    two->callback([&] {
        const std::vector<Complex> za = io::read_points(za_file);
        const std::vector<Complex> zb = io::read_points(zb_file);
        const TwoSpectraResult r =
            two_spectra_reconstruct(io::parse_complex(alpha_text), za, io::parse_complex(beta_text), zb);
        json j = io::spectrum_json(r.spectrum);
        j["residual"] = io::number(r.residual);
        emit.single(j);
    });

    // carleson
    std::string carleson_file;
    auto* carleson = app.add_subcommand("carleson", "Carleson constant of upper half-plane points");
    carleson->add_option("points", carleson_file, "Point file")->required();
    carleson->callback([&] {
        const std::vector<Complex> pts = io::read_points(carleson_file);
        const double c = carleson_constant(pts, g.threads);
        json ladder = json::array();
        std::string csv = "points,constant\n";
        for (std::size_t n = 2; n <= pts.size(); n *= 2) {
            const double cn = carleson_constant(std::span<const Complex>(pts.data(), n), g.threads);
            ladder.push_back(json{{"points", n}, {"constant", io::number(cn)}});
            csv += std::to_string(n) + "," + io::format_double(cn) + "\n";
        }
        csv += std::to_string(pts.size()) + "," + io::format_double(c) + "\n";
        emit.csv() ? emit.single(csv) : emit.single(json{{"constant", io::number(c)}, {"ladder", ladder}});
    });

    // example
    std::string example_name;
    std::size_t K = 0;
    std::string emit_kind = "spectrum";
    std::string example_gamma = "0";
    int kmax = 20;
    auto* example = app.add_subcommand("example", "Built-in worked spaces");
    example->add_option("name", example_name, "pw or cross-pw")->required()->check(CLI::IsMember({"pw", "cross-pw"}));
    example->add_option("--K", K, "Truncation index")->required()->check(CLI::PositiveNumber);
    example->add_option("--emit", emit_kind, "spectrum, zeros or series")->check(CLI::IsMember({"spectrum", "zeros", "series"}));
    example->add_option("--gamma", example_gamma, "gamma for zeros and series");
    example->add_option("--region", region_text, "Region for zeros (default: |x|, |y| <= min(K/2, 10))");
    example->add_option("--kmax", kmax, "Largest series index for series output");
    example->callback([&] {
        const WorkedSpace ws = *make_example(example_name, K);
        const Complex gamma = io::parse_complex(example_gamma);
        if (emit_kind == "spectrum") {
            emit.csv() ? emit.single(detail::spectrum_csv(*ws.spectrum)) : emit.single(io::spectrum_json(*ws.spectrum));
            return;
        }
        if (emit_kind == "zeros") {
            const double half = std::min(0.5 * static_cast<double>(K), 10.0) + 0.25;
            Rect region = region_text.empty() ? Rect{-half, half, -half, half} : detail::parse_region(region_text);
            if (region_text.empty() && ws.form == ClosedForm::pw_tangent) region = Rect{-half, half, -1.0, 1.0};
            const ZeroReport rep = find_zeros(ws.closed_form(gamma), region, detail::zero_options(g));
            emit.csv() ? emit.single(io::zero_report_csv(rep)) : emit.single(io::zero_report_json(rep));
            return;
        }
        json series = json::object();
        std::string csv = "series,k,re,im\n";
        auto add = [&](const std::string& name, Complex offset, auto point) {
            json pts = json::array();
            for (int k = 1; k <= kmax; ++k) {
                const Complex z = point(k);
                pts.push_back(io::complex_json(z));
                csv += name + "," + std::to_string(k) + "," + io::format_double(z.real()) + "," +
                       io::format_double(z.imag()) + "\n";
            }
            series[name] = json{{"offset", io::complex_json(offset)}, {"points", pts}};
        };
        if (ws.form == ClosedForm::pw_tangent) {
            if (!ws.zero_free(gamma)) {
                Complex off = std::atan(-gamma / kPi) / kPi;
                off = {off.real() - std::floor(off.real() + 0.5), off.imag()};
                add("real", off, [&](int k) { return Complex{double(k), 0.0} + off; });
            }
        } else if (is_exceptional(gamma)) {
            if (std::abs(gamma - Complex{kPi, -kPi}) > 1e-12 * kPi)
                throw Error(ErrorKind::ExceptionalGamma, "series are tabulated for gamma = pi(1-i) only");
            const ExceptionalData ex = exceptional_data();
            add("diagonal", ExceptionalData::diagonal(0.0), [&](int k) { return ExceptionalData::diagonal(k); });
            add("left", ex.left_offset, [&](int k) { return ex.left(k); });
            add("down", ex.down_offset, [&](int k) { return ex.down(k); });
        } else {
            const SeriesOffsets off = cross_series_offsets(gamma);
            for (Arm a : {Arm::right, Arm::left, Arm::up, Arm::down})
                add(arm_name(a), off.offset[static_cast<std::size_t>(a)],
                    [&](int k) { return off.point(a, k); });
        }
        emit.csv() ? emit.single(csv) : emit.single(json{{"gamma", io::complex_json(gamma)}, {"series", series}});
    });

    // bvectors
    unsigned bN = 1;
    auto* bvec = app.add_subcommand("bvectors", "Coefficient vectors B_0..B_{N-1} and moment sums");
    bvec->add_option("spectrum", spectrum_file, "Spectrum JSON")->required();
    bvec->add_option("--N", bN, "Number of vectors")->required()->check(CLI::PositiveNumber);
    bvec->callback([&] {
        const Spectrum s = io::read_spectrum(spectrum_file);
        const BVectors b = bvectors(s, bN);
        if (emit.csv()) {
            std::string csv = "j,n,re,im\n";
            for (std::size_t j = 0; j < b.vectors.size(); ++j)
                for (std::size_t n = 0; n < b.vectors[j].size(); ++n)
                    csv += std::to_string(j) + "," + std::to_string(n) + "," +
                           io::format_double(b.vectors[j][n].real()) + "," +
                           io::format_double(b.vectors[j][n].imag()) + "\n";
            emit.single(csv);
            return;
        }
        json vecs = json::array();
        for (const auto& v : b.vectors) {
            json row = json::array();
            for (const Complex& c : v) row.push_back(io::complex_json(c));
            vecs.push_back(row);
        }
        json j{{"vectors", vecs}, {"moment_check", b.moment_check}};
        j["moment_condition"] = b.moment_condition ? json(*b.moment_condition) : json(nullptr);
        emit.single(j);
    });

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: IoError: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(std::move(args), out, err);
}

}  // namespace cdb::cli
