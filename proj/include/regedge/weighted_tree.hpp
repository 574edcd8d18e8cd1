#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "regedge/analytic.hpp"
#include "regedge/errors.hpp"
#include "regedge/local_graph.hpp"
#include "regedge/spectral_point.hpp"

namespace regedge {

/// Green's function of a finite graph with boundary weight Delta attached to
/// every missing half-edge, optionally with a vertex set removed:
///
///   P^{(X)} = ( -z + A^{(X)}/sqrt(d-1) - (t - D^{(X)}) Delta/(d-1) )^{-1}
///
/// where t is the per-vertex target degree (d unless the graph says
/// otherwise). Degrees are those of the full graph; removing X does not
/// change the weight of the remaining vertices.
template <typename Real = double>
class WeightedTreeOperator {
 public:
  using Complex = std::complex<Real>;
  using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

  static constexpr Real kMaxCondition = Real(1e12);

  WeightedTreeOperator(const LocalGraph& graph, int d, const SpectralPoint<Real>& point, Complex delta,
                       std::span<const Vertex> removed_labels = {})
      : d_(d), point_(point), delta_(delta) {
    require_degree(d);
    const int n = graph.size();
    std::vector<char> removed(n, 0);
    for (Vertex label : removed_labels) {
      if (auto idx = graph.index_of(label)) removed[*idx] = 1;
    }
    row_of_.assign(n, -1);
    for (int i = 0; i < n; ++i) {
      if (graph.degree(i) > graph.target_degree(i, d)) {
        throw std::invalid_argument("local graph vertex exceeds its target degree");
      }
      if (!removed[i]) {
        row_of_[i] = static_cast<int>(labels_.size());
        labels_.push_back(graph.label(i));
      }
    }
    const int m = static_cast<int>(labels_.size());
    const Real scale = Real(1) / std::sqrt(Real(d - 1));
    Matrix op = Matrix::Zero(m, m);
    for (int i = 0; i < n; ++i) {
      const int r = row_of_[i];
      if (r < 0) continue;
      const int missing = graph.target_degree(i, d) - graph.degree(i);
      op(r, r) = -point.z() - Real(missing) * delta / Real(d - 1);
      for (int j : graph.neighbors(i)) {
        if (row_of_[j] >= 0) op(r, row_of_[j]) = Complex(scale);
      }
    }
    index_ = graph;
    if (m == 0) return;
    Eigen::PartialPivLU<Matrix> lu(op);
    if (!(lu.rcond() * kMaxCondition >= Real(1))) {
      throw SingularMatrixError("weighted tree operator is numerically singular (resonant z or Delta)");
    }
    matrix_ = lu.inverse();
  }

  const Matrix& matrix() const { return matrix_; }
  int size() const { return static_cast<int>(labels_.size()); }
  std::span<const Vertex> labels() const { return labels_; }
  int d() const { return d_; }
  const SpectralPoint<Real>& point() const { return point_; }
  Complex delta() const { return delta_; }

  bool contains(Vertex label) const {
    auto idx = index_.index_of(label);
    return idx && row_of_[*idx] >= 0;
  }

  /// Matrix row of a vertex label; throws if absent or removed.
  int row(Vertex label) const {
    auto idx = index_.index_of(label);
    if (!idx || row_of_[*idx] < 0) throw std::out_of_range("vertex not present in weighted operator");
    return row_of_[*idx];
  }

  Complex entry(Vertex a, Vertex b) const { return matrix_(row(a), row(b)); }

 private:
  int d_;
  SpectralPoint<Real> point_;
  Complex delta_;
  LocalGraph index_;
  std::vector<int> row_of_;
  std::vector<Vertex> labels_;
  Matrix matrix_;
};

namespace detail {
template <typename Real>
std::complex<Real> root_entry_sparse(const LocalGraph& g, int d, const SpectralPoint<Real>& p,
                                     std::complex<Real> delta) {
  using C = std::complex<Real>;
  const int n = g.size();
  const Real scale = Real(1) / std::sqrt(Real(d - 1));
  std::vector<Eigen::Triplet<C>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 3);
  for (int i = 0; i < n; ++i) {
    const int missing = g.target_degree(i, d) - g.degree(i);
    trip.emplace_back(i, i, -p.z() - Real(missing) * delta / Real(d - 1));
    for (int j : g.neighbors(i)) trip.emplace_back(i, j, C(scale));
  }
  Eigen::SparseMatrix<C> op(n, n);
  op.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<C>> lu;
  lu.compute(op);
  if (lu.info() != Eigen::Success) throw SingularMatrixError("sparse tree factorization failed");
  Eigen::Matrix<C, Eigen::Dynamic, 1> rhs = Eigen::Matrix<C, Eigen::Dynamic, 1>::Zero(n);
  rhs(0) = C(1);
  Eigen::Matrix<C, Eigen::Dynamic, 1> col = lu.solve(rhs);
  if (!std::isfinite(col(0).real()) || !std::isfinite(col(0).imag())) {
    throw SingularMatrixError("sparse tree solve produced a non-finite root entry");
  }
  return col(0);
}
}  // namespace detail

/// X_ell by explicit (sparse) matrix build of the truncated d-regular tree.
template <typename Real>
std::complex<Real> x_ell_matrix(std::complex<Real> delta, const SpectralPoint<Real>& p, int ell, int d) {
  require_degree(d);
  if (ell < 1) throw std::invalid_argument("ell must be >= 1");
  return detail::root_entry_sparse(truncated_regular_tree(d, ell).graph, d, p, delta);
}

/// Y_ell by explicit (sparse) matrix build of the truncated (d-1)-ary tree.
template <typename Real>
std::complex<Real> y_ell_matrix(std::complex<Real> delta, const SpectralPoint<Real>& p, int ell, int d) {
  require_degree(d);
  if (ell < 1) throw std::invalid_argument("ell must be >= 1");
  return detail::root_entry_sparse(truncated_ary_tree(d, ell).graph, d, p, delta);
}

/// Default routes used by the rest of the library.
template <typename Real>
std::complex<Real> y_ell(std::complex<Real> delta, const SpectralPoint<Real>& p, int ell, int d) {
  return y_ell_recursive(delta, p, ell, d);
}
template <typename Real>
std::complex<Real> x_ell(std::complex<Real> delta, const SpectralPoint<Real>& p, int ell, int d) {
  return x_ell_recursive(delta, p, ell, d);
}

}  // namespace regedge
