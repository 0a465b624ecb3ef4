#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cdb/blaschke.hpp"
#include "cdb/error.hpp"
#include "cdb/kernels.hpp"
#include "cdb/numeric.hpp"
#include "cdb/perturb.hpp"
#include "cdb/rank_one.hpp"
#include "cdb/spectra.hpp"
#include "cdb/zeros.hpp"

namespace cdb::io {

using json = nlohmann::ordered_json;

/// Shortest representation that reads back to the same double.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

/// JSON number, or the strings "inf"/"-inf"/"nan" for non-finite values.
inline json number(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

inline json complex_json(Complex z) { return json{{"re", number(z.real())}, {"im", number(z.imag())}}; }

inline double parse_double(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw Error(ErrorKind::InvalidArgument, "not a number: '" + std::string(s) + "'");
    return v;
}

/// Accepts "a", "a+bi", "a-bi", "bi", "i", "-i", "re,im", and pi(...) which
/// multiplies the enclosed value by pi.
inline Complex parse_complex(std::string_view s) {
    std::string str;
    for (char c : s)
        if (c != ' ') str.push_back(c);
    if (str.empty()) throw Error(ErrorKind::InvalidArgument, "empty complex value");
    if (str.size() > 4 && str.rfind("pi(", 0) == 0 && str.back() == ')')
        return kPi * parse_complex(std::string_view(str).substr(3, str.size() - 4));
    if (const auto comma = str.find(','); comma != std::string::npos)
        return {parse_double(std::string_view(str).substr(0, comma)),
                parse_double(std::string_view(str).substr(comma + 1))};
    if (str.back() != 'i') return {parse_double(str), 0.0};
    str.pop_back();
    // Split at the last sign that is not part of an exponent.
    std::size_t split = std::string::npos;
    for (std::size_t k = str.size(); k-- > 1;) {
        if ((str[k] == '+' || str[k] == '-') && str[k - 1] != 'e' && str[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    auto imag_part = [](std::string_view t) {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        return parse_double(t);
    };
    if (split == std::string::npos) return {0.0, imag_part(str)};
    return {parse_double(std::string_view(str).substr(0, split)),
            imag_part(std::string_view(str).substr(split))};
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
    out << content;
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + path);
}

inline json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::IoError, what + ": " + e.what());
    }
}

inline double json_double(const json& j, const char* key) {
    if (!j.contains(key)) return 0.0;
    const json& v = j.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_double(v.get<std::string>());
    throw Error(ErrorKind::IoError, std::string("field '") + key + "' is not a number");
}

inline Complex json_complex(const json& j) {
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_string()) return parse_complex(j.get<std::string>());
    if (j.is_object()) return {json_double(j, "re"), json_double(j, "im")};
    throw Error(ErrorKind::IoError, "unrecognized complex value");
}

// ---- spectra ----

inline json spectrum_json(const Spectrum& s) {
    json pts = json::array();
    for (const SpectrumPoint& p : s.points())
        pts.push_back(json{{"re", p.t.real()}, {"im", p.t.imag()}, {"mu", p.mu}});
    return json{{"label", s.label()}, {"points", pts}};
}

inline Spectrum spectrum_from_json(const json& j) {
    if (!j.is_object() || !j.contains("points") || !j.at("points").is_array())
        throw Error(ErrorKind::IoError, "spectrum JSON needs a 'points' array");
    std::vector<SpectrumPoint> raw;
    for (const json& p : j.at("points")) {
        if (!p.is_object() || !p.contains("mu"))
            throw Error(ErrorKind::IoError, "spectrum point needs re, im, mu");
        raw.push_back({Complex{json_double(p, "re"), json_double(p, "im")}, json_double(p, "mu")});
    }
    const std::string label = j.contains("label") && j.at("label").is_string()
                                  ? j.at("label").get<std::string>()
                                  : std::string{};
    return Spectrum::validate(raw, label);
}

inline Spectrum read_spectrum(const std::string& path) {
    return spectrum_from_json(parse_json(read_file(path), path));
}

inline json class_json(const SpectrumClass& c) {
    json j{{"normalized_sum", number(c.normalized_sum)},
           {"convergence_sum", number(c.convergence_sum)},
           {"total_mass", number(c.total_mass)},
           {"is_small", c.is_small},
           {"is_convergence_class", c.is_convergence_class},
           {"confidence", confidence_name(c.confidence)}};
    j["tail_exponent"] = c.tail_exponent ? number(*c.tail_exponent) : json(nullptr);
    j["node_growth"] = c.node_growth ? number(*c.node_growth) : json(nullptr);
    return j;
}

// ---- point lists ----

/// Reads points from JSON ({"points": [...]}, {"zeros": [...]} or a bare array; entries as
/// {"re","im"}, [re, im] or strings) or from CSV with re,im columns.
inline std::vector<Complex> read_points(const std::string& path) {
    const std::string text = read_file(path);
    std::size_t first = text.find_first_not_of(" \t\r\n");
    std::vector<Complex> out;
    if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
        const json j = parse_json(text, path);
        // Zero reports store their points under "zeros".
        const char* key = j.is_object() && j.contains("zeros") ? "zeros" : "points";
        if (j.is_object() && !j.contains(key)) throw Error(ErrorKind::IoError, path + ": no point array");
        const json& arr = j.is_object() ? j.at(key) : j;
        if (!arr.is_array()) throw Error(ErrorKind::IoError, path + ": expected a point array");
        for (const json& p : arr) out.push_back(json_complex(p));
        return out;
    }
    std::istringstream in(text);
    std::string line;
    bool header_checked = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw Error(ErrorKind::IoError, path + ": expected re,im");
        if (!header_checked) {
            header_checked = true;
            if (line.substr(0, comma).find_first_of("0123456789") == std::string::npos) continue;
        }
        const auto second = line.find(',', comma + 1);
        const std::string im = line.substr(comma + 1, second == std::string::npos
                                                          ? std::string::npos
                                                          : second - comma - 1);
        out.push_back({parse_double(line.substr(0, comma)), parse_double(im)});
    }
    return out;
}

inline json points_json(std::span<const Complex> pts) {
    json arr = json::array();
    for (const Complex& z : pts) arr.push_back(complex_json(z));
    return json{{"points", arr}};
}

inline std::string points_csv(std::span<const Complex> pts) {
    std::string out = "re,im\n";
    for (const Complex& z : pts) out += format_double(z.real()) + "," + format_double(z.imag()) + "\n";
    return out;
}

// ---- zeros ----

inline json rect_json(const Rect& r) {
    return json{{"x0", number(r.x0)}, {"x1", number(r.x1)}, {"y0", number(r.y0)}, {"y1", number(r.y1)}};
}

inline json zero_report_json(const ZeroReport& r) {
    json zeros = json::array();
    for (const LocatedZero& z : r.zeros)
        zeros.push_back(json{{"re", number(z.location.real())},
                             {"im", number(z.location.imag())},
                             {"multiplicity", z.multiplicity},
                             {"residual", number(z.residual)}});
    auto certs = [](const std::vector<Certificate>& cs) {
        json arr = json::array();
        for (const Certificate& c : cs)
            arr.push_back(json{{"region", rect_json(c.region)},
                               {"count", c.count},
                               {"confidence", number(c.confidence)}});
        return arr;
    };
    return json{{"method", method_name(r.method)},
                {"region", rect_json(r.region)},
                {"zeros", zeros},
                {"certificates", certs(r.certificates)},
                {"failures", certs(r.failures)}};
}

inline std::string zero_report_csv(const ZeroReport& r) {
    std::string out = "re,im,multiplicity,residual\n";
    for (const LocatedZero& z : r.zeros)
        out += format_double(z.location.real()) + "," + format_double(z.location.imag()) + "," +
               std::to_string(z.multiplicity) + "," + format_double(z.residual) + "\n";
    return out;
}

inline json pairing_json(const ZeroPairing& p) {
    json pairs = json::array();
    for (const ZeroPair& q : p.pairs)
        pairs.push_back(json{{"node_index", q.node_index},
                             {"zero_index", q.zero_index},
                             {"distance", number(q.distance)}});
    return json{{"disk_exponent", number(p.disk_exponent)},
                {"delta", number(p.delta)},
                {"pairs", pairs},
                {"unpaired_zeros", p.unpaired_zeros},
                {"unpaired_nodes", p.unpaired_nodes}};
}

// ---- kernels ----

inline json frame_json(const KernelFrameReport& r) {
    json pts = json::array();
    for (const Complex& z : r.points) pts.push_back(complex_json(z));
    return json{{"truncation", r.truncation},
                {"size", r.points.size()},
                {"lambda_min", number(r.lambda_min)},
                {"lambda_max", number(r.lambda_max)},
                {"condition", number(r.condition)},
                {"points", pts}};
}

/// Gram matrix in row-major long form.
inline std::string gram_csv(const KernelFrameReport& r) {
    std::string out = "row,col,re,im\n";
    for (Eigen::Index i = 0; i < r.gram.rows(); ++i)
        for (Eigen::Index j = 0; j < r.gram.cols(); ++j)
            out += std::to_string(i) + "," + std::to_string(j) + "," +
                   format_double(r.gram(i, j).real()) + "," + format_double(r.gram(i, j).imag()) + "\n";
    return out;
}

// ---- perturbations ----

inline json perturbation_json(const RankOnePerturbation& p) {
    json nodes = json::array();
    json a = json::array();
    json b = json::array();
    for (std::size_t n = 0; n < p.size(); ++n) {
        nodes.push_back(complex_json(p.spectrum().node(n)));
        a.push_back(complex_json(p.a()[n]));
        b.push_back(complex_json(p.b()[n]));
    }
    return json{{"variant", variant_name(p.variant())}, {"nodes", nodes}, {"a", a}, {"b", b}};
}

/// Nodes are put in canonical order with a, b following them; diagonal weights are 1.
inline RankOnePerturbation perturbation_from_json(const json& j) {
    if (!j.is_object() || !j.contains("nodes") || !j.contains("a") || !j.contains("b"))
        throw Error(ErrorKind::IoError, "perturbation JSON needs nodes, a, b");
    const json& nodes = j.at("nodes");
    const json& ja = j.at("a");
    const json& jb = j.at("b");
    if (!nodes.is_array() || !ja.is_array() || !jb.is_array())
        throw Error(ErrorKind::IoError, "nodes, a, b must be arrays");
    if (ja.size() != nodes.size() || jb.size() != nodes.size())
        throw Error(ErrorKind::LengthMismatch, "a and b must match the node count");
    std::vector<SpectrumPoint> raw;
    for (const json& t : nodes) raw.push_back({json_complex(t), 1.0});
    auto s = std::make_shared<const Spectrum>(Spectrum::validate(raw, "diagonal"));
    // Reorder a, b to the canonical node order.
    std::vector<Complex> a(nodes.size());
    std::vector<Complex> b(nodes.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        for (std::size_t k = 0; k < s->size(); ++k)
            if (s->node(k) == raw[i].t) {
                a[k] = json_complex(ja[i]);
                b[k] = json_complex(jb[i]);
            }
    PerturbationVariant v = PerturbationVariant::unbounded;
    if (j.contains("variant")) {
        const std::string name = j.at("variant").get<std::string>();
        if (name == "compact")
            v = PerturbationVariant::compact;
        else if (name != "unbounded")
            throw Error(ErrorKind::IoError, "unknown variant '" + name + "'");
    }
    return RankOnePerturbation::make(s, std::move(a), std::move(b), v);
}

inline json perturbation_report_json(const PerturbationSpectrumReport& r) {
    json eig = json::array();
    for (const Complex& z : r.eigenvalues) eig.push_back(complex_json(z));
    json zs = json::array();
    for (const Complex& z : r.char_zeros) zs.push_back(complex_json(z));
    json j{{"eigenvalues", eig}, {"char_zeros", zs}, {"max_mismatch", number(r.max_mismatch)}};
    j["kappa"] = r.kappa ? complex_json(*r.kappa) : json(nullptr);
    return j;
}

/// One row per matched value (z, or 1/z for compact) and its eigenvalue.
inline std::string perturbation_report_csv(const PerturbationSpectrumReport& r) {
    std::string out = "value_re,value_im,eigen_re,eigen_im,mismatch\n";
    for (std::size_t i = 0; i < r.compared.size(); ++i) {
        const Complex z = r.compared[i];
        const Complex e = r.eigenvalues[r.partner[i]];
        out += format_double(z.real()) + "," + format_double(z.imag()) + "," +
               format_double(e.real()) + "," + format_double(e.imag()) + "," +
               format_double(std::abs(z - e)) + "\n";
    }
    return out;
}

}  // namespace cdb::io
