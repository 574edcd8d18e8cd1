#pragma once

#include <stdexcept>
#include <string>

namespace regedge {

struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RejectionLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SizeLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a spectral parameter sits on (or numerically at) the spectrum.
struct ResonanceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require_degree(int d) {
  if (d < 3) throw std::invalid_argument("degree d must be >= 3, got " + std::to_string(d));
}

}  // namespace regedge
