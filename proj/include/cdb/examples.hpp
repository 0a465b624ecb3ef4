#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cdb/cauchy.hpp"
#include "cdb/error.hpp"
#include "cdb/numeric.hpp"
#include "cdb/spectra.hpp"

namespace cdb {

/// A built-in space: a symmetric node window of the infinite spectrum plus
/// closed-form handles for m_gamma.
struct WorkedSpace {
    std::string name;
    std::shared_ptr<const Spectrum> spectrum;
    ClosedForm form = ClosedForm::pw_tangent;

    MeromorphicHandle closed_form(Complex gamma) const {
        return MeromorphicHandle::closed(form, gamma, spectrum);
    }
    MeromorphicHandle truncated(Complex gamma) const {
        return MeromorphicHandle::plain(spectrum, gamma);
    }
    /// PW with gamma = +-pi i: B_gamma = +-i exp(-+i pi z) has no zeros.
    bool zero_free(Complex gamma) const {
        if (form != ClosedForm::pw_tangent) return false;
        const double eps = 1e-12 * kPi;
        return std::abs(gamma - kPi * kI) <= eps || std::abs(gamma + kPi * kI) <= eps;
    }
};

/// Nodes +-(n + 1/2), 0 <= n <= K, unit weights; m = gamma + pi tan(pi z).
inline WorkedSpace pw_spectrum(std::size_t K) {
    if (K < 1) throw Error(ErrorKind::InvalidArgument, "K must be at least 1");
    std::vector<SpectrumPoint> pts;
    for (std::size_t n = 0; n <= K; ++n) {
        const double x = static_cast<double>(n) + 0.5;
        pts.push_back({Complex{x, 0.0}, 1.0});
        pts.push_back({Complex{-x, 0.0}, 1.0});
    }
    return {"pw", std::make_shared<const Spectrum>(Spectrum::validate(pts, "pw")),
            ClosedForm::pw_tangent};
}

/// Nodes +-(n + 1/2) and +-i(n + 1/2), 0 <= n <= K, unit weights;
/// m = gamma + pi tan(pi z) - pi tanh(pi z).
inline WorkedSpace cross_pw_spectrum(std::size_t K) {
    if (K < 1) throw Error(ErrorKind::InvalidArgument, "K must be at least 1");
    std::vector<SpectrumPoint> pts;
    for (std::size_t n = 0; n <= K; ++n) {
        const double x = static_cast<double>(n) + 0.5;
        pts.push_back({Complex{x, 0.0}, 1.0});
        pts.push_back({Complex{-x, 0.0}, 1.0});
        pts.push_back({Complex{0.0, x}, 1.0});
        pts.push_back({Complex{0.0, -x}, 1.0});
    }
    return {"cross-pw", std::make_shared<const Spectrum>(Spectrum::validate(pts, "cross-pw")),
            ClosedForm::cross_tangent};
}

inline std::optional<WorkedSpace> make_example(std::string_view name, std::size_t K) {
    if (name == "pw") return pw_spectrum(K);
    if (name == "cross-pw") return cross_pw_spectrum(K);
    return std::nullopt;
}

inline std::array<Complex, 4> exceptional_gammas() {
    return {Complex{kPi, kPi}, Complex{-kPi, -kPi}, Complex{kPi, -kPi}, Complex{-kPi, kPi}};
}

inline bool is_exceptional(Complex gamma, double tol = 1e-12) {
    for (const Complex& g : exceptional_gammas())
        if (std::abs(gamma - g) <= tol * kPi) return true;
    return false;
}

enum class Arm { right, left, up, down };

inline const char* arm_name(Arm a) {
    switch (a) {
        case Arm::right: return "right";
        case Arm::left: return "left";
        case Arm::up: return "up";
        case Arm::down: return "down";
    }
    return "right";
}

/// Offsets of the four cross-PW zero series: zeros approach k d + offset
/// along each direction d in {1, -1, i, -i}. Along the real arms tanh(pi z)
/// tends to +-1, leaving tan(pi w) = +-1 - gamma / pi; along the imaginary
/// arms pi tan(pi z) tends to +-i pi, leaving tanh(pi w) = (gamma +- i pi) / pi.
/// The component along the arm is reduced into [-1/2, 1/2).
struct SeriesOffsets {
    std::array<Complex, 4> offset;  // indexed by Arm

    Complex point(Arm arm, double k) const {
        const Complex o = offset[static_cast<std::size_t>(arm)];
        switch (arm) {
            case Arm::right: return Complex{k, 0.0} + o;
            case Arm::left: return Complex{-k, 0.0} + o;
            case Arm::up: return Complex{0.0, k} + o;
            case Arm::down: return Complex{0.0, -k} + o;
        }
        return o;
    }
};

inline SeriesOffsets cross_series_offsets(Complex gamma) {
    if (is_exceptional(gamma)) throw Error(ErrorKind::ExceptionalGamma, "gamma is exceptional");
    auto reduce = [](double x) { return x - std::floor(x + 0.5); };
    SeriesOffsets s;
    const Complex g = gamma / kPi;
    Complex right = std::atan(1.0 - g) / kPi;
    Complex left = std::atan(-1.0 - g) / kPi;
    Complex up = std::atanh(g + kI) / kPi;
    Complex down = std::atanh(g - kI) / kPi;
    right = {reduce(right.real()), right.imag()};
    left = {reduce(left.real()), left.imag()};
    up = {up.real(), reduce(up.imag())};
    down = {down.real(), reduce(down.imag())};
    s.offset = {right, left, up, down};
    return s;
}

/// Zero series for gamma = pi (1 - i): the diagonal (k/2 - 1/8)(1 + i) and the
/// two surviving side series -k + 5/8 + i log2 / (4 pi), -ik + 5i/8 + log2 / (4 pi).
struct ExceptionalData {
    std::array<Complex, 4> gammas;
    Complex reference_gamma;
    Complex left_offset;
    Complex down_offset;

    static Complex diagonal(double k) { return (k / 2.0 - 0.125) * Complex{1.0, 1.0}; }
    Complex left(double k) const { return Complex{-k, 0.0} + left_offset; }
    Complex down(double k) const { return Complex{0.0, -k} + down_offset; }
};

inline ExceptionalData exceptional_data() {
    const double l = std::log(2.0) / (4.0 * kPi);
    return {exceptional_gammas(), Complex{kPi, -kPi}, Complex{0.625, l}, Complex{l, 0.625}};
}

}  // namespace cdb
