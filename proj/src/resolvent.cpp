#include "regedge/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "regedge/analytic.hpp"
#include "regedge/errors.hpp"
#include "regedge/weighted_tree.hpp"

namespace regedge {

namespace {
constexpr double kMinEta = 1e-12;
constexpr double kResonanceGap = 1e-10;
}  // namespace

NormalizedAdjacency::NormalizedAdjacency(RegularGraph g)
    : graph_(std::move(g)), scale_(1.0 / std::sqrt(static_cast<double>(graph_.d() - 1))) {}

double NormalizedAdjacency::trivial_eigenvalue() const { return graph_.d() * scale_; }

Eigen::MatrixXd NormalizedAdjacency::dense() const {
  const int n = graph_.n();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v : graph_.neighbors(u)) h(u, v) = scale_;
  }
  return h;
}

Eigen::MatrixXd NormalizedAdjacency::dense_minor(std::span<const Vertex> removed, std::vector<Vertex>* kept) const {
  const int n = graph_.n();
  std::vector<int> row(static_cast<std::size_t>(n), 0);
  for (Vertex x : removed) row.at(static_cast<std::size_t>(x)) = -1;
  std::vector<Vertex> keep;
  for (Vertex v = 0; v < n; ++v) {
    if (row[static_cast<std::size_t>(v)] == 0) {
      row[static_cast<std::size_t>(v)] = static_cast<int>(keep.size());
      keep.push_back(v);
    }
  }
  const int m = static_cast<int>(keep.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
  for (int r = 0; r < m; ++r) {
    for (Vertex w : graph_.neighbors(keep[static_cast<std::size_t>(r)])) {
      const int c = row[static_cast<std::size_t>(w)];
      if (c >= 0) h(r, c) = scale_;
    }
  }
  if (kept) *kept = std::move(keep);
  return h;
}

Eigen::VectorXd eigenvalues(const NormalizedAdjacency& h, int limit) {
  if (h.n() > limit) {
    throw SizeLimitError("dense eigen-decomposition limited to N <= " + std::to_string(limit));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.dense(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalue iteration did not converge");
  Eigen::VectorXd ev = es.eigenvalues().reverse();
  return ev;
}

ResolventCache::ResolventCache(const NormalizedAdjacency& h, const SpectralPoint<>& p,
                               std::optional<Eigen::VectorXd> spectrum)
    : n_(h.n()), point_(p), spectrum_(std::move(spectrum)) {
  if (p.eta() < kMinEta) throw ResonanceError("Im z below 1e-12 is rejected");
  if (h.n() > kDenseEigenLimit) throw SizeLimitError("resolvent limited to N <= 4096");
  if (spectrum_) {
    if (spectrum_->size() != n_) throw std::invalid_argument("spectrum size mismatch");
    const double gap = (spectrum_->array() - p.z().real()).abs().minCoeff();
    if (std::hypot(gap, p.eta()) < kResonanceGap) throw ResonanceError("z is within 1e-10 of an eigenvalue");
  }
  Eigen::MatrixXcd a = h.dense().cast<Complex>();
  a.diagonal().array() -= p.z();
  if (n_ <= kFullInverseLimit) {
    full_ = Eigen::PartialPivLU<Eigen::MatrixXcd>(a).inverse();
    m_n_ = full_.trace() / static_cast<double>(n_);
  } else {
    lu_.emplace(a);
    Complex tr = 0.0;
    for (Vertex j = 0; j < n_; ++j) tr += column(j)(j);
    m_n_ = tr / static_cast<double>(n_);
  }
}

const Eigen::MatrixXcd& ResolventCache::matrix() const {
  if (!dense()) throw std::logic_error("resolvent is held in factorized form");
  return full_;
}

Eigen::VectorXcd ResolventCache::column(Vertex j) const {
  if (dense()) return full_.col(j);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n_);
  e(j) = 1.0;
  return lu_->solve(e);
}

Complex ResolventCache::entry(Vertex i, Vertex j) const {
  if (dense()) return full_(i, j);
  return column(j)(i);
}

Eigen::VectorXcd ResolventCache::diagonal() const {
  if (dense()) return full_.diagonal();
  Eigen::VectorXcd out(n_);
  for (Vertex j = 0; j < n_; ++j) out(j) = column(j)(j);
  return out;
}

Complex ResolventCache::trace_square_over_n() const {
  // G is complex symmetric, so Tr G^2 = sum_ij G_ij^2.
  Complex acc = 0.0;
  if (dense()) {
    acc = full_.array().square().sum();
  } else {
    for (Vertex j = 0; j < n_; ++j) acc += column(j).array().square().sum();
  }
  return acc / static_cast<double>(n_);
}

const Eigen::VectorXd& ResolventCache::spectrum() const {
  if (!spectrum_) throw std::logic_error("resolvent cache built without a spectrum");
  return *spectrum_;
}

Complex ResolventCache::m_n_spectral() const {
  const auto& ev = spectrum();
  Complex acc = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) acc += 1.0 / (ev(i) - point_.z());
  return acc / static_cast<double>(ev.size());
}

Complex DirectMinor::entry(Vertex x, Vertex y) const {
  auto rx = std::lower_bound(kept.begin(), kept.end(), x);
  auto ry = std::lower_bound(kept.begin(), kept.end(), y);
  if (rx == kept.end() || *rx != x || ry == kept.end() || *ry != y) {
    throw std::out_of_range("minor entry requested for a removed vertex");
  }
  return matrix(rx - kept.begin(), ry - kept.begin());
}

DirectMinor direct_minor(const NormalizedAdjacency& h, const SpectralPoint<>& p, std::span<const Vertex> removed) {
  DirectMinor out;
  Eigen::MatrixXcd a = h.dense_minor(removed, &out.kept).cast<Complex>();
  a.diagonal().array() -= p.z();
  out.matrix = Eigen::PartialPivLU<Eigen::MatrixXcd>(a).inverse();
  return out;
}

GreenMinor::GreenMinor(const ResolventCache& cache, std::span<const Vertex> removed)
    : cache_(&cache), removed_(removed.begin(), removed.end()) {
  std::sort(removed_.begin(), removed_.end());
  removed_.erase(std::unique(removed_.begin(), removed_.end()), removed_.end());
  if (removed_.empty()) return;
  const auto k = static_cast<Eigen::Index>(removed_.size());
  Eigen::MatrixXcd block(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) block(a, b) = cache.entry(removed_[a], removed_[b]);
  }
  block_lu_.emplace(block);
  if (!(block_lu_->rcond() > 1e-12)) {
    throw SingularMatrixError("G restricted to the removed set is singular; resample z");
  }
}

Complex GreenMinor::entry(Vertex x, Vertex y) const {
  if (std::binary_search(removed_.begin(), removed_.end(), x) ||
      std::binary_search(removed_.begin(), removed_.end(), y)) {
    throw std::out_of_range("minor entry requested for a removed vertex");
  }
  const Complex gxy = cache_->entry(x, y);
  if (removed_.empty()) return gxy;
  const auto k = static_cast<Eigen::Index>(removed_.size());
  Eigen::VectorXcd right(k);
  Eigen::RowVectorXcd left(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    left(a) = cache_->entry(x, removed_[a]);
    right(a) = cache_->entry(removed_[a], y);
  }
  const Eigen::VectorXcd solved = block_lu_->solve(right);
  return gxy - (left * solved)(0, 0);
}

Complex q_of(const ResolventCache& cache, const RegularGraph& g) {
  const int n = g.n();
  Eigen::VectorXcd diag(n);
  // G_ij on each edge, indexed like the adjacency lists of g.
  std::vector<Complex> edge_vals(static_cast<std::size_t>(n) * g.d());
  for (Vertex i = 0; i < n; ++i) {
    const Eigen::VectorXcd col = cache.column(i);
    diag(i) = col(i);
    const auto nb = g.neighbors(i);
    for (std::size_t k = 0; k < nb.size(); ++k) edge_vals[static_cast<std::size_t>(i) * g.d() + k] = col(nb[k]);
  }
  Complex acc = 0.0;
  for (Vertex i = 0; i < n; ++i) {
    if (std::abs(diag(i)) < 1e-10) throw ResonanceError("|G_ii| < 1e-10; Schur shortcut unstable");
    const auto nb = g.neighbors(i);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const Complex gji = edge_vals[static_cast<std::size_t>(i) * g.d() + k];
      acc += diag(nb[k]) - gji * gji / diag(i);
    }
  }
  return acc / (static_cast<double>(n) * g.d());
}

Complex q_of_direct(const NormalizedAdjacency& h, const SpectralPoint<>& p) {
  const auto& g = h.graph();
  Complex acc = 0.0;
  for (Vertex i = 0; i < g.n(); ++i) {
    const Vertex rem[1] = {i};
    const DirectMinor minor = direct_minor(h, p, rem);
    for (Vertex j : g.neighbors(i)) acc += minor.entry(j, j);
  }
  return acc / (static_cast<double>(g.n()) * g.d());
}

Complex dz_m_n(const Eigen::VectorXd& spectrum, Complex z) {
  Complex acc = 0.0;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    const Complex r = 1.0 / (spectrum(i) - z);
    acc += r * r;
  }
  return acc / static_cast<double>(spectrum.size());
}

double local_law_error_pair(const ResolventCache& cache, const RegularGraph& g, int radius, Vertex i, Vertex j) {
  const Vertex centers[2] = {i, j};
  const Ball b = ball(g, std::span<const Vertex>(centers, i == j ? 1 : 2), radius);
  const LocalGraph lg = b.to_local();
  const auto msc = stieltjes_semicircle(cache.point());
  const WeightedTreeOperator<double> p(lg, g.d(), cache.point(), msc);
  return std::abs(cache.entry(i, j) - p.entry(i, j));
}

LocalLawReport local_law_error(const ResolventCache& cache, const RegularGraph& g, int radius, int samples,
                               Rng& rng) {
  if (radius < 1) throw std::invalid_argument("local-law radius must be >= 1");
  LocalLawReport rep;
  rep.errors.reserve(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    const auto i = static_cast<Vertex>(uniform_index(rng, static_cast<std::uint64_t>(g.n())));
    const auto j = static_cast<Vertex>(uniform_index(rng, static_cast<std::uint64_t>(g.n())));
    rep.errors.push_back(local_law_error_pair(cache, g, radius, i, j));
  }
  if (!rep.errors.empty()) {
    std::vector<double> sorted = rep.errors;
    std::sort(sorted.begin(), sorted.end());
    rep.max_err = sorted.back();
    const std::size_t m = sorted.size();
    rep.median_err = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  }
  return rep;
}

IdentityReport ward_check(const ResolventCache& cache, std::span<const Vertex> rows) {
  IdentityReport rep;
  for (Vertex i : rows) {
    const Eigen::VectorXcd col = cache.column(i);  // column i == row i by symmetry
    const double lhs = col.squaredNorm();
    const double rhs = col(i).imag() / cache.point().eta();
    rep.max_residual = std::max(rep.max_residual, std::abs(lhs - rhs));
    ++rep.rows_checked;
  }
  return rep;
}

IdentityReport rowsum_check(const ResolventCache& cache, const RegularGraph& g, std::span<const Vertex> rows) {
  IdentityReport rep;
  const Complex expected = 1.0 / (g.d() / std::sqrt(static_cast<double>(g.d() - 1)) - cache.point().z());
  for (Vertex i : rows) {
    const Complex sum = cache.column(i).sum();
    rep.max_residual = std::max(rep.max_residual, std::abs(sum - expected));
    ++rep.rows_checked;
  }
  return rep;
}

}  // namespace regedge
