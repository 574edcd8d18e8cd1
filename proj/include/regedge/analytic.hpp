#pragma once

// Closed-form spectral kernels of the d-regular tree and the semicircle law.
// Everything here is pure and templated on the real scalar type.

#include <cmath>
#include <complex>
#include <numbers>

#include "regedge/errors.hpp"
#include "regedge/spectral_point.hpp"

namespace regedge {

/// Stieltjes transform of the semicircle law: the root of m^2 + z m + 1 = 0
/// with Im m > 0. The two roots multiply to 1, so exactly one lies in C+.
template <typename Real>
std::complex<Real> stieltjes_semicircle(const SpectralPoint<Real>& p) {
  using C = std::complex<Real>;
  const C z = p.z();
  const C disc = std::sqrt(z * z - C(4));
  // Pick the larger-modulus root first to avoid cancellation, then invert.
  C big = (-z - disc) / Real(2);
  if (std::abs((-z + disc) / Real(2)) > std::abs(big)) big = (-z + disc) / Real(2);
  C m = C(1) / big;
  if (m.imag() <= Real(0)) m = big;
  return m;
}

/// Stieltjes transform of the Kesten-McKay law, m_d = 1 / (-z - d/(d-1) m_sc).
template <typename Real>
std::complex<Real> stieltjes_kesten_mckay(const SpectralPoint<Real>& p, int d) {
  require_degree(d);
  const Real ratio = Real(d) / Real(d - 1);
  return Real(1) / (-p.z() - ratio * stieltjes_semicircle(p));
}

/// Kesten-McKay density on [-2, 2] (zero outside).
template <typename Real>
Real km_density(Real x, int d) {
  require_degree(d);
  if (x <= Real(-2) || x >= Real(2)) return Real(0);
  const Real denom = Real(1) + Real(1) / Real(d - 1) - x * x / Real(d);
  return std::sqrt(Real(4) - x * x) / (Real(2) * std::numbers::pi_v<Real> * denom);
}

/// Kesten-McKay CDF. Substituting x = 2 cos(theta) removes the square-root
/// endpoint singularity, so composite Simpson converges spectrally fast.
template <typename Real>
Real km_cdf(Real x, int d) {
  require_degree(d);
  if (x <= Real(-2)) return Real(0);
  if (x >= Real(2)) return Real(1);
  const Real pi = std::numbers::pi_v<Real>;
  const Real lo = std::acos(x / Real(2));
  const Real c1 = Real(1) + Real(1) / Real(d - 1);
  auto integrand = [&](Real t) {
    const Real s = std::sin(t);
    const Real c = std::cos(t);
    return Real(2) * s * s / (pi * (c1 - Real(4) * c * c / Real(d)));
  };
  int panels = 2 * static_cast<int>(std::ceil(256.0 * static_cast<double>((pi - lo) / pi)));
  if (panels < 2) panels = 2;
  const Real h = (pi - lo) / Real(panels);
  Real sum = integrand(lo) + integrand(pi);
  for (int k = 1; k < panels; ++k) sum += Real(k % 2 ? 4 : 2) * integrand(lo + Real(k) * h);
  return sum * h / Real(3);
}

/// Square-root edge constant A = d(d-1)/(d-2)^2 of the Kesten-McKay law.
template <typename Real = double>
Real edge_constant(int d) {
  require_degree(d);
  return Real(d) * Real(d - 1) / (Real(d - 2) * Real(d - 2));
}

namespace detail {
template <typename Real>
std::complex<Real> tree_decay(const SpectralPoint<Real>& p, int d) {
  return -stieltjes_semicircle(p) / std::sqrt(Real(d - 1));
}
}  // namespace detail

/// Green's function entry of the infinite d-regular tree between two
/// vertices at graph distance `dist`.
template <typename Real>
std::complex<Real> tree_green_regular(int dist, const SpectralPoint<Real>& p, int d) {
  require_degree(d);
  if (dist < 0) throw std::invalid_argument("distance must be non-negative");
  return stieltjes_kesten_mckay(p, d) * std::pow(detail::tree_decay(p, d), dist);
}

/// Green's function entry of the infinite rooted (d-1)-ary tree; `anc` is
/// the depth of the common ancestor of the two vertices.
template <typename Real>
std::complex<Real> tree_green_ary(int dist, int anc, const SpectralPoint<Real>& p, int d) {
  require_degree(d);
  if (dist < 0 || anc < 0) throw std::invalid_argument("distance and ancestor depth must be non-negative");
  const auto q = detail::tree_decay(p, d);
  return stieltjes_kesten_mckay(p, d) * (Real(1) - std::pow(q, 2 * anc + 2)) * std::pow(q, dist);
}

/// Root entry of the weighted truncated (d-1)-ary tree of depth ell, by
/// eliminating one generation at a time from the leaves up.
template <typename Real>
std::complex<Real> y_ell_recursive(std::complex<Real> delta, const SpectralPoint<Real>& p, int ell,
                                   int d) {
  require_degree(d);
  if (ell < 1) throw std::invalid_argument("ell must be >= 1");
  const auto z = p.z();
  std::complex<Real> g = delta;
  // Each vertex below the root has d-1 children, each contributing
  // g_child / (d-1) to the Schur complement; leaves see the weight Delta.
  for (int level = 0; level <= ell; ++level) {
    g = Real(1) / (-z - g);
    if (!std::isfinite(g.real()) || !std::isfinite(g.imag())) {
      throw SingularMatrixError("tree recursion hit a resonance");
    }
  }
  return g;
}

/// Root entry of the weighted truncated d-regular tree of depth ell.
template <typename Real>
std::complex<Real> x_ell_recursive(std::complex<Real> delta, const SpectralPoint<Real>& p, int ell,
                                   int d) {
  require_degree(d);
  if (ell < 1) throw std::invalid_argument("ell must be >= 1");
  const auto z = p.z();
  std::complex<Real> g = delta;
  for (int level = 1; level <= ell; ++level) g = Real(1) / (-z - g);
  const auto root = Real(1) / (-z - Real(d) / Real(d - 1) * g);
  if (!std::isfinite(root.real()) || !std::isfinite(root.imag())) {
    throw SingularMatrixError("tree recursion hit a resonance");
  }
  return root;
}

template <typename Real = double>
struct ExpansionCoefficients {
  std::complex<Real> linear;
  std::complex<Real> quadratic;
};

/// Taylor coefficients of Y_ell(Delta, z) around Delta = m_sc(z).
template <typename Real>
ExpansionCoefficients<Real> y_expansion_coeffs(const SpectralPoint<Real>& p, int ell, int d) {
  require_degree(d);
  if (ell < 1) throw std::invalid_argument("ell must be >= 1");
  const auto msc = stieltjes_semicircle(p);
  const auto md = stieltjes_kesten_mckay(p, d);
  const auto power = std::pow(msc, 2 * ell + 2);
  const Real dm1 = Real(d - 1);
  const auto bracket = (Real(1) - power) / dm1 +
                       (Real(d - 2) / dm1) * (Real(1) - power) / (Real(1) - msc * msc);
  return {power, power * md * bracket};
}

}  // namespace regedge
