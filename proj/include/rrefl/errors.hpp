#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rrefl {

/// Every failure the library can report. The CLI maps these onto exit codes.
enum class ErrorKind {
  InvalidParameter,
  VacuumReached,
  NonpositiveDensity,
  NoCompression,
  DetachedWedgeAngle,
  RootSeparationFailure,
  BracketingFailure,
  DegenerateSonicArc,
  AttachedShockDetected,
  ZeroVector,
  FoldedMesh,
  EmptyOverlap,
  EllipticityLost,
  NoConvergence,
  GraphPropertyLost,
  TooFewSamples,
  ArchiveError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::VacuumReached: return "VacuumReached";
    case ErrorKind::NonpositiveDensity: return "NonpositiveDensity";
    case ErrorKind::NoCompression: return "NoCompression";
    case ErrorKind::DetachedWedgeAngle: return "DetachedWedgeAngle";
    case ErrorKind::RootSeparationFailure: return "RootSeparationFailure";
    case ErrorKind::BracketingFailure: return "BracketingFailure";
    case ErrorKind::DegenerateSonicArc: return "DegenerateSonicArc";
    case ErrorKind::AttachedShockDetected: return "AttachedShockDetected";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::FoldedMesh: return "FoldedMesh";
    case ErrorKind::EmptyOverlap: return "EmptyOverlap";
    case ErrorKind::EllipticityLost: return "EllipticityLost";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::GraphPropertyLost: return "GraphPropertyLost";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::ArchiveError: return "ArchiveError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace rrefl
