#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kfbem {

enum class ErrorCode {
  DegenerateDomain,
  DegenerateInterface,
  PanelOutsideDomain,
  InterfaceNotResolved,
  NonHermitian,
  UnsupportedDegree,
  QuadratureOverflow,
  SingularMatrix,
  NoConvergence,
  SingularPoint,
  NonSPD,
  ResourceLimit,
  Schema,
  Parse,
  Io,
  CacheCorrupt,
  CacheMismatch,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateDomain: return "DegenerateDomain";
    case ErrorCode::DegenerateInterface: return "DegenerateInterface";
    case ErrorCode::PanelOutsideDomain: return "PanelOutsideDomain";
    case ErrorCode::InterfaceNotResolved: return "InterfaceNotResolved";
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::UnsupportedDegree: return "UnsupportedDegree";
    case ErrorCode::QuadratureOverflow: return "QuadratureOverflow";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::NonSPD: return "NonSPD";
    case ErrorCode::ResourceLimit: return "ResourceLimit";
    case ErrorCode::Schema: return "Schema";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
    case ErrorCode::CacheCorrupt: return "CacheCorrupt";
    case ErrorCode::CacheMismatch: return "CacheMismatch";
  }
  return "Unknown";
}

}  // namespace kfbem
