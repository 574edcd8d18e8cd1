#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "regedge/graph.hpp"
#include "regedge/rng.hpp"

namespace regedge {

enum class Model { UniformPairing, Permutation, Matching };

std::string_view to_string(Model m);
Model parse_model(std::string_view s);

struct SamplerConfig {
  int n = 0;
  int d = 3;
  Model model = Model::UniformPairing;
  std::uint64_t seed = 0;
  int max_rejections = 100000;

  /// Parity constraints of the chosen model; throws std::invalid_argument.
  void validate() const;
};

struct SampleStats {
  int attempts = 0;  // multigraphs drawn, including the accepted one
};

/// Draws a simple d-regular graph. The pairing model conditioned on
/// simplicity is exactly uniform; the permutation and matching models are
/// conditioned on simplicity as well. Throws RejectionLimitError.
RegularGraph sample(const SamplerConfig& cfg, Rng& rng, SampleStats* stats = nullptr);

/// sample() on stream (cfg.seed, index).
RegularGraph sample_indexed(const SamplerConfig& cfg, std::uint64_t index);

}  // namespace regedge
