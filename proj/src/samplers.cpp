#include "regedge/samplers.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "regedge/errors.hpp"

namespace regedge {

std::string_view to_string(Model m) {
  switch (m) {
    case Model::UniformPairing: return "uniform_pairing";
    case Model::Permutation: return "permutation";
    case Model::Matching: return "matching";
  }
  return "unknown";
}

Model parse_model(std::string_view s) {
  if (s == "uniform_pairing" || s == "uniform" || s == "pairing") return Model::UniformPairing;
  if (s == "permutation") return Model::Permutation;
  if (s == "matching") return Model::Matching;
  throw std::invalid_argument("unknown model '" + std::string(s) + "'");
}

void SamplerConfig::validate() const {
  require_degree(d);
  if (n <= d) throw std::invalid_argument("n must exceed d");
  if ((static_cast<long long>(n) * d) % 2 != 0) throw std::invalid_argument("n*d must be even");
  if (model == Model::Permutation && d % 2 != 0) {
    throw std::invalid_argument("permutation model requires d to be even");
  }
  if (model == Model::Matching && n % 2 != 0) {
    throw std::invalid_argument("matching model requires n to be even");
  }
  if (max_rejections < 1) throw std::invalid_argument("max_rejections must be positive");
}

namespace {

// Collects half-edge pairs and reports failure on the first loop or repeat.
class SimpleBuilder {
 public:
  SimpleBuilder(int n, int d) : adj_(static_cast<std::size_t>(n)) {
    for (auto& a : adj_) a.reserve(static_cast<std::size_t>(d));
  }
  bool add(Vertex u, Vertex v) {
    if (u == v) return false;
    auto& au = adj_[static_cast<std::size_t>(u)];
    if (std::find(au.begin(), au.end(), v) != au.end()) return false;
    au.push_back(v);
    adj_[static_cast<std::size_t>(v)].push_back(u);
    return true;
  }
  std::vector<std::vector<Vertex>> take() { return std::move(adj_); }

 private:
  std::vector<std::vector<Vertex>> adj_;
};

std::optional<std::vector<std::vector<Vertex>>> try_pairing(int n, int d, Rng& rng) {
  std::vector<Vertex> points(static_cast<std::size_t>(n) * d);
  for (std::size_t i = 0; i < points.size(); ++i) points[i] = static_cast<Vertex>(i / d);
  shuffle_range(points.begin(), points.end(), rng);
  SimpleBuilder b(n, d);
  for (std::size_t i = 0; i < points.size(); i += 2) {
    if (!b.add(points[i], points[i + 1])) return std::nullopt;
  }
  return b.take();
}

std::optional<std::vector<std::vector<Vertex>>> try_permutation(int n, int d, Rng& rng) {
  SimpleBuilder b(n, d);
  std::vector<Vertex> sigma(static_cast<std::size_t>(n));
  for (int j = 0; j < d / 2; ++j) {
    std::iota(sigma.begin(), sigma.end(), 0);
    shuffle_range(sigma.begin(), sigma.end(), rng);
    for (Vertex i = 0; i < n; ++i) {
      if (!b.add(i, sigma[static_cast<std::size_t>(i)])) return std::nullopt;
    }
  }
  return b.take();
}

std::optional<std::vector<std::vector<Vertex>>> try_matching(int n, int d, Rng& rng) {
  SimpleBuilder b(n, d);
  std::vector<Vertex> order(static_cast<std::size_t>(n));
  for (int j = 0; j < d; ++j) {
    std::iota(order.begin(), order.end(), 0);
    shuffle_range(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < order.size(); i += 2) {
      if (!b.add(order[i], order[i + 1])) return std::nullopt;
    }
  }
  return b.take();
}

}  // namespace

RegularGraph sample(const SamplerConfig& cfg, Rng& rng, SampleStats* stats) {
  cfg.validate();
  for (int attempt = 1; attempt <= cfg.max_rejections; ++attempt) {
    std::optional<std::vector<std::vector<Vertex>>> adj;
    switch (cfg.model) {
      case Model::UniformPairing: adj = try_pairing(cfg.n, cfg.d, rng); break;
      case Model::Permutation: adj = try_permutation(cfg.n, cfg.d, rng); break;
      case Model::Matching: adj = try_matching(cfg.n, cfg.d, rng); break;
    }
    if (adj) {
      if (stats) stats->attempts = attempt;
      return RegularGraph(cfg.n, cfg.d, std::move(*adj));
    }
  }
  throw RejectionLimitError("no simple graph after " + std::to_string(cfg.max_rejections) +
                            " attempts (d too large relative to n?)");
}

RegularGraph sample_indexed(const SamplerConfig& cfg, std::uint64_t index) {
  Rng rng = make_stream(cfg.seed, index, 0);
  return sample(cfg, rng);
}

}  // namespace regedge
