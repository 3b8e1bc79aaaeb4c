#pragma once

#include <stdexcept>
#include <string>

namespace balnet {

enum class ErrorCode {
  InvalidInput,
  NotPositiveDefinite,
  SingularBlock,
  UnsupportedSize,
  NoEdges,
  InsufficientData,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception carrying one of the library error codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::SingularBlock: return "SingularBlock";
    case ErrorCode::UnsupportedSize: return "UnsupportedSize";
    case ErrorCode::NoEdges: return "NoEdges";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace balnet
