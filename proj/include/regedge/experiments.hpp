#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "regedge/graph.hpp"
#include "regedge/resolvent.hpp"
#include "regedge/samplers.hpp"
#include "regedge/spectral_point.hpp"
#include "regedge/stats.hpp"

namespace regedge {

/// Spectral parameter recipe z = re + i * coef * base^exponent with base one
/// of 1, N or A*N (A the edge constant), so one grid serves every N.
struct ZRecipe {
  enum class Base { One, N, AN };
  double re = 0.0;
  double coef = 1.0;
  Base base = Base::One;
  double exponent = 0.0;

  SpectralPoint<> at(int n, int d) const;
  std::string to_string() const;
  /// Parses "<re>+<coef>i", "<re>+<coef>i*N^<p>" or "<re>+<coef>i*AN^<p>";
  /// <p> may be a fraction such as -2/3.
  static ZRecipe parse(std::string_view text);
};

struct Aggregate {
  int count = 0;
  double mean = 0.0;
  double median = 0.0;
  stats::Interval ci;  // 95% percentile bootstrap of the median
};

/// Summary statistics with a bootstrap stream fixed by `seed`.
Aggregate aggregate(std::span<const double> values, std::uint64_t seed);

struct DiagnosticRecord {
  Complex z;
  int n = 0, d = 0, ell = 0;
  std::uint64_t seed = 0;
  int sample = 0;
  Complex q, m_n, y, x, m_sc, m_d, dz_m_n;
  double phi = 0.0;
  Complex residual_qy, residual_mx, loop_lhs, micro_loop;
};

/// Diagnostics of one graph at one z for each requested ell; all share Q,
/// m_N and the z-derivative, which come from a single resolvent.
std::vector<DiagnosticRecord> diagnose(const RegularGraph& g, const SpectralPoint<>& p, std::span<const int> ells,
                                       double frak_c);
std::vector<DiagnosticRecord> diagnose(const ResolventCache& cache, const RegularGraph& g,
                                       std::span<const int> ells, double frak_c);

struct EsdResult {
  int n = 0, d = 0, samples = 0;
  double ks = 0.0;
  double outside_mass = 0.0;  // fraction of pooled eigenvalues outside [-2.2, 2.2]
  std::vector<double> bin_edges;
  std::vector<std::int64_t> counts;
  std::vector<double> per_sample_ks;
};

EsdResult esd_experiment(int n, int d, int samples, std::uint64_t seed, Model model = Model::UniformPairing,
                         int bins = 60);

struct SceSummary {
  int n = 0, ell = 0;
  Complex z;
  Aggregate qy, mx, q_msc, mn_md;
};

struct SceResult {
  std::vector<DiagnosticRecord> records;
  std::vector<SceSummary> summary;
};

SceResult self_consistent_scan(std::span<const int> n_list, int d, std::span<const int> ells,
                               std::span<const ZRecipe> grid, int samples, std::uint64_t seed,
                               Model model = Model::UniformPairing, double frak_c = 0.5);

struct AveragingSample {
  double core1_residual = 0.0;
  Complex core21_lhs, core21_rhs;
  double gap = 0.0;
  double phi = 0.0;
  double ward_average = 0.0;
};

struct AveragingReport {
  std::vector<AveragingSample> samples;
  double max_core1 = 0.0;
  Aggregate gap_over_phi, ward_over_phi;
};

/// One graph: the edge average of G^{(b)}_cc - Q, both sides of the two-edge
/// factorisation, and the averaged squared two-vertex minor.
AveragingSample averaging_identities(const ResolventCache& cache, const RegularGraph& g, double frak_c);

AveragingReport averaging_identity_probe(int n, int d, const ZRecipe& z, int samples, std::uint64_t seed,
                                         Model model = Model::UniformPairing, double frak_c = 0.5);

struct LoopSummary {
  int n = 0, ell = 0;
  Complex z;
  int samples = 0;
  Complex mean_loop, mean_micro, mean_scaled_qy, mean_dz_over_n;
  double mean_abs_dz_over_n = 0.0;
  double mean_abs_scaled_qy = 0.0;
  double cancellation_ratio = 0.0;  // |E loop_lhs| / E|dz m_N / N|
};

struct LoopResult {
  std::vector<DiagnosticRecord> records;
  std::vector<LoopSummary> summary;
};

LoopResult loop_equation_probe(std::span<const int> n_list, int d, std::span<const int> ells, const ZRecipe& z,
                               int samples, std::uint64_t seed, Model model = Model::UniformPairing,
                               double frak_c = 0.5);

struct EdgeSample {
  int n = 0, d = 0;
  std::uint64_t seed = 0;
  int sample = 0;
  double lambda2 = 0.0, lambda_n = 0.0, scaled = 0.0;
  bool ramanujan = false;
};

struct EdgeResult {
  std::vector<EdgeSample> samples;
  double frac_below_2 = 0.0;
  double frac_ramanujan = 0.0;
  double correlation = 0.0;  // corr(lambda2, -lambda_N)
  Aggregate scaled, scaled_min;
};

EdgeResult edge_fluctuations(int n, int d, int samples, std::uint64_t seed, Model model = Model::UniformPairing);

}  // namespace regedge
