#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "regedge/graph.hpp"
#include "regedge/resolvent.hpp"
#include "regedge/rng.hpp"
#include "regedge/samplers.hpp"
#include "regedge/spectral_point.hpp"

namespace regedge {

/// Boundary edges (l_a, a_a) of T = B_ell(o) paired with oriented edges
/// (b_a, c_a) of the graph with T deleted, plus the admissibility flags.
struct ResamplingData {
  Vertex center = 0;
  int ell = 0;
  int iso_radius = 2;
  std::vector<Vertex> ball;             // vertex set of T, BFS order
  std::vector<OrientedEdge> boundary;   // (l, a), l in T
  std::vector<OrientedEdge> sampled;    // (b, c), not incident to T
  std::vector<char> admissible;

  int mu() const { return static_cast<int>(boundary.size()); }
  int admissible_count() const;
};

/// Draws (b_a, c_a) iid uniformly from the oriented edges avoiding T and
/// evaluates the admissibility indicators.
ResamplingData propose(const RegularGraph& g, Vertex o, const Parameters& params, Rng& rng);

/// Same as propose() but with caller-supplied sampled edges.
ResamplingData propose_with(const RegularGraph& g, Vertex o, const Parameters& params,
                            std::vector<OrientedEdge> sampled);

/// Re-evaluates the admissibility flags of `s` on `g` in place.
void evaluate_admissibility(const RegularGraph& g, ResamplingData& s);

struct SwitchResult {
  RegularGraph graph;
  std::vector<int> applied;  // admissible indices actually switched
  std::vector<int> skipped;  // admissible indices that failed a defensive check
};

/// Performs the simple switching {l,a},{b,c} -> {l,c},{a,b} for each
/// admissible index; inadmissible indices are left in place.
SwitchResult apply(const RegularGraph& g, const ResamplingData& s);

/// Data that undoes `applied` switchings of `s`: the boundary becomes (l, c)
/// and the sampled edge (b, a) for each switched index.
ResamplingData reverse(const ResamplingData& s, const std::vector<int>& applied);

/// One admissible switching as an operator perturbation:
/// xi = (D_la + D_bc - D_lc - D_ab)/sqrt(d-1) with D_xy = e_x e_y^T + e_y e_x^T.
struct Switching {
  Vertex l, a, b, c;
};

/// Sum of xi over `switchings`, as a dense matrix on `rows` (sorted labels).
Eigen::MatrixXcd xi_sum(const std::vector<Switching>& switchings, const std::vector<Vertex>& rows, int d);

struct SwitchOperator {
  std::vector<Switching> switchings;
  std::vector<Vertex> forest;   // vertex set of F+, sorted; all matrices use this order
  std::vector<Vertex> support;  // {l, a, b, c} over switchings, sorted
  Eigen::MatrixXcd L;           // P(F+, z, m_sc)
  Eigen::MatrixXcd L_tilde;     // P(switched F+, z, m_sc)
  Eigen::MatrixXcd F;           // sum xi + sum xi L~ xi
  Eigen::MatrixXcd F_woodbury;  // -U (I + V^T L U)^{-1} V^T
  double identity_residual = 0.0;
  double support_leak = 0.0;    // max |F_xy| with x or y outside the support

  int index_of(Vertex v) const;
};

struct WoodburyResult {
  std::optional<SwitchOperator> op;
  std::string skip_reason;
};

/// Builds F both from its defining sum and by Woodbury, or reports why the
/// local forest condition fails.
WoodburyResult woodbury_f(const RegularGraph& g, const ResamplingData& s, const SpectralPoint<>& p);

struct ExpansionReport {
  std::vector<double> max_error;   // per K = 0..K_max, over the sampled entries
  std::vector<double> increment;   // max |term_K| per K
  bool diverging = false;
  double exact_norm = 0.0;         // max |G~ - G| over sampled entries
};

/// Partial sums of G F (G° F)^k G for k <= K, with G° = G - L, compared with
/// G~ - G on the given entries.
ExpansionReport resolvent_update_expansion(const ResolventCache& g, const ResolventCache& g_tilde,
                                           const SwitchOperator& op, int k_max,
                                           const std::vector<std::pair<Vertex, Vertex>>& entries);

using GraphStatistic = std::function<double(const RegularGraph&)>;

/// Named statistics: lambda2, triangles, degree0, edge01.
GraphStatistic statistic_by_name(const std::string& name);
double second_eigenvalue(const RegularGraph& g);
double triangle_count(const RegularGraph& g);

struct ExchangeabilityReport {
  int samples = 0;
  double ks_statistic = 0.0;
  double ks_p_value = 1.0;
  double sign_p_value = 1.0;
  double mean_diff_sigma = 0.0;  // |mean(f~ - f)| in units of its standard error
  double mean_admissible = 0.0;
  int degree_violations = 0;
  std::vector<double> f_original;
  std::vector<double> f_switched;
};

/// Monte-Carlo comparison of f(G) and f(T_S(G)); sample k uses streams
/// (seed, k, *) so the result does not depend on the worker count.
ExchangeabilityReport exchangeability_test(const SamplerConfig& cfg, int ell, const GraphStatistic& f, int samples,
                                           std::optional<Parameters> params = std::nullopt);

}  // namespace regedge
