#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cdb {

/// Every domain failure the library can report. The CLI echoes `error_name`
/// of the kind and exits with status 1.
enum class ErrorKind {
    DuplicateNode,
    NonpositiveWeight,
    NonfiniteValue,
    EmptySpectrum,
    Overflow,
    PoleHit,
    RegularizedAtOrigin,
    KappaZero,
    DegeneratePole,
    UnsupportedMode,
    BoundaryUnstable,
    NonConvergence,
    OverlappingDisks,
    GammaZero,
    DuplicatePoint,
    MissingPair,
    OriginInSpectrum,
    RankDeficient,
    ZeroNode,
    SolverCapExceeded,
    LengthMismatch,
    InconsistentSpectra,
    PointOnRealLine,
    MapPole,
    ExceptionalGamma,
    InvalidArgument,
    IoError,
};

constexpr std::string_view error_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DuplicateNode: return "DuplicateNode";
        case ErrorKind::NonpositiveWeight: return "NonpositiveWeight";
        case ErrorKind::NonfiniteValue: return "NonfiniteValue";
        case ErrorKind::EmptySpectrum: return "EmptySpectrum";
        case ErrorKind::Overflow: return "Overflow";
        case ErrorKind::PoleHit: return "PoleHit";
        case ErrorKind::RegularizedAtOrigin: return "RegularizedAtOrigin";
        case ErrorKind::KappaZero: return "KappaZero";
        case ErrorKind::DegeneratePole: return "DegeneratePole";
        case ErrorKind::UnsupportedMode: return "UnsupportedMode";
        case ErrorKind::BoundaryUnstable: return "BoundaryUnstable";
        case ErrorKind::NonConvergence: return "NonConvergence";
        case ErrorKind::OverlappingDisks: return "OverlappingDisks";
        case ErrorKind::GammaZero: return "GammaZero";
        case ErrorKind::DuplicatePoint: return "DuplicatePoint";
        case ErrorKind::MissingPair: return "MissingPair";
        case ErrorKind::OriginInSpectrum: return "OriginInSpectrum";
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::ZeroNode: return "ZeroNode";
        case ErrorKind::SolverCapExceeded: return "SolverCapExceeded";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::InconsistentSpectra: return "InconsistentSpectra";
        case ErrorKind::PointOnRealLine: return "PointOnRealLine";
        case ErrorKind::MapPole: return "MapPole";
        case ErrorKind::ExceptionalGamma: return "ExceptionalGamma";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

/// Domain error carrying its kind and the offending indices (if any).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail, std::vector<std::size_t> indices = {})
        : std::runtime_error(std::string(error_name(kind)) + ": " + detail),
          kind_(kind),
          indices_(std::move(indices)) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::string_view name() const noexcept { return error_name(kind_); }
    const std::vector<std::size_t>& indices() const noexcept { return indices_; }

private:
    ErrorKind kind_;
    std::vector<std::size_t> indices_;
};

}  // namespace cdb
