#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "regedge/graph.hpp"
#include "regedge/rng.hpp"
#include "regedge/spectral_point.hpp"

namespace regedge {

using Complex = std::complex<double>;

/// H = A / sqrt(d-1).
class NormalizedAdjacency {
 public:
  explicit NormalizedAdjacency(RegularGraph g);

  const RegularGraph& graph() const { return graph_; }
  int n() const { return graph_.n(); }
  double scale() const { return scale_; }
  /// Largest (trivial) eigenvalue d / sqrt(d-1).
  double trivial_eigenvalue() const;
  Eigen::MatrixXd dense() const;
  /// Dense H with the rows/columns in `removed` deleted; `kept` receives the
  /// surviving vertex ids in row order.
  Eigen::MatrixXd dense_minor(std::span<const Vertex> removed, std::vector<Vertex>* kept) const;

 private:
  RegularGraph graph_;
  double scale_;
};

inline constexpr int kDenseEigenLimit = 4096;
inline constexpr int kFullInverseLimit = 2048;

/// Full spectrum, sorted descending. Throws SizeLimitError above `limit`.
Eigen::VectorXd eigenvalues(const NormalizedAdjacency& h, int limit = kDenseEigenLimit);

/// G(z) = (H - z)^{-1}. Stores the dense inverse for N <= kFullInverseLimit,
/// otherwise keeps the LU factorization and solves columns on demand.
/// Immutable after construction.
class ResolventCache {
 public:
  ResolventCache(const NormalizedAdjacency& h, const SpectralPoint<>& p,
                 std::optional<Eigen::VectorXd> spectrum = std::nullopt);

  const SpectralPoint<>& point() const { return point_; }
  int n() const { return n_; }
  bool dense() const { return full_.size() > 0; }
  const Eigen::MatrixXcd& matrix() const;

  Complex entry(Vertex i, Vertex j) const;
  Eigen::VectorXcd column(Vertex j) const;
  Eigen::VectorXcd diagonal() const;

  /// (1/N) Tr G.
  Complex m_n() const { return m_n_; }
  /// (1/N) Tr G^2, i.e. the z-derivative of m_N.
  Complex trace_square_over_n() const;

  bool has_spectrum() const { return spectrum_.has_value(); }
  const Eigen::VectorXd& spectrum() const;
  /// (1/N) sum 1/(lambda_i - z); requires the spectrum.
  Complex m_n_spectral() const;

 private:
  int n_;
  SpectralPoint<> point_;
  Eigen::MatrixXcd full_;
  std::optional<Eigen::PartialPivLU<Eigen::MatrixXcd>> lu_;
  std::optional<Eigen::VectorXd> spectrum_;
  Complex m_n_;
};

/// Direct resolvent of H with the vertex set X deleted (dense solve).
struct DirectMinor {
  std::vector<Vertex> kept;
  Eigen::MatrixXcd matrix;
  Complex entry(Vertex x, Vertex y) const;
};
DirectMinor direct_minor(const NormalizedAdjacency& h, const SpectralPoint<>& p,
                         std::span<const Vertex> removed);

/// Minor entries G^{(X)}_{xy} = G_xy - G_{xX} (G|_X)^{-1} G_{Xy}.
class GreenMinor {
 public:
  GreenMinor(const ResolventCache& cache, std::span<const Vertex> removed);
  Complex entry(Vertex x, Vertex y) const;
  std::span<const Vertex> removed() const { return removed_; }

 private:
  const ResolventCache* cache_;
  std::vector<Vertex> removed_;
  std::optional<Eigen::PartialPivLU<Eigen::MatrixXcd>> block_lu_;
};

inline GreenMinor green_minor(const ResolventCache& cache, std::span<const Vertex> removed) {
  return GreenMinor(cache, removed);
}

/// Q(z) = (1/(Nd)) sum over oriented edges (i, j) of G^{(i)}_{jj}.
Complex q_of(const ResolventCache& cache, const RegularGraph& g);

/// Q by removing each edge endpoint explicitly; O(N^4), test oracle only.
Complex q_of_direct(const NormalizedAdjacency& h, const SpectralPoint<>& p);

/// (1/N) sum (lambda_i - z)^{-2}.
Complex dz_m_n(const Eigen::VectorXd& spectrum, Complex z);

struct LocalLawReport {
  double max_err = 0.0;
  double median_err = 0.0;
  std::vector<double> errors;
};

/// Compares G_ij with the weighted-ball Green's function P_ij(B_r({i,j}), z, m_sc)
/// on `samples` random pairs.
LocalLawReport local_law_error(const ResolventCache& cache, const RegularGraph& g, int radius, int samples,
                               Rng& rng);

/// Single-pair local-law error.
double local_law_error_pair(const ResolventCache& cache, const RegularGraph& g, int radius, Vertex i, Vertex j);

struct IdentityReport {
  double max_residual = 0.0;
  int rows_checked = 0;
};

/// max_i | sum_j |G_ij|^2 - Im G_ii / eta | over the given rows.
IdentityReport ward_check(const ResolventCache& cache, std::span<const Vertex> rows);
/// max_i | sum_j G_ij - 1/(d/sqrt(d-1) - z) | over the given rows.
IdentityReport rowsum_check(const ResolventCache& cache, const RegularGraph& g, std::span<const Vertex> rows);

}  // namespace regedge
