#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace regedge {

/// Spectral parameter z in the open upper half-plane.
///
/// eta and kappa are derived on every call so they can never drift from z.
template <typename Real = double>
class SpectralPoint {
 public:
  using Complex = std::complex<Real>;

  explicit SpectralPoint(Complex z) : z_(z) {
    if (!(z.imag() > Real(0)) || !std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw std::domain_error("spectral point must lie in the open upper half-plane");
    }
  }
  SpectralPoint(Real re, Real im) : SpectralPoint(Complex(re, im)) {}

  Complex z() const { return z_; }
  Real eta() const { return z_.imag(); }
  Real kappa() const {
    return std::min(std::abs(z_.real() - Real(2)), std::abs(z_.real() + Real(2)));
  }

 private:
  Complex z_;
};

}  // namespace regedge
