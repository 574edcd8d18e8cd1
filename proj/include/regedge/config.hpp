#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "regedge/errors.hpp"
#include "regedge/experiments.hpp"
#include "regedge/samplers.hpp"

namespace regedge {

enum class ExperimentKind { Esd, Sce, Loop, Edge, Exch, Averaging };

std::string_view to_string(ExperimentKind k);
ExperimentKind parse_experiment(std::string_view s);

/// Pass/fail bands evaluated by run(); keys live under [check].
struct CheckThresholds {
  double ks_max = 0.05;
  double outside_max = 0.01;
  double trend_min = 0.8;
  double loop_ratio_max = 0.5;
  double below2_lo = 0.65, below2_hi = 0.95;
  double ramanujan_lo = 0.50, ramanujan_hi = 0.85;
  double corr_max = 0.2;
  double p_min = 0.01;
  double sigma_max = 3.0;
  double core1_max = 1e-12;
  double gap_phi_max = 10.0;
  double ward_phi_max = 10.0;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Esd;
  std::vector<int> n_list{1000};
  int d = 3;
  Model model = Model::UniformPairing;
  std::uint64_t seed = 1;
  int samples = 10;
  std::vector<int> ells{2};
  std::vector<ZRecipe> z_grid{ZRecipe{2.0, 1.0, ZRecipe::Base::N, -2.0 / 3.0}};
  double frak_c = 0.5;
  double frak_g = 0.1;
  int R = -1;           // -1: derived from n
  int iso_radius = -1;  // -1: derived from R
  int bins = 60;
  std::string statistic = "lambda2";
  std::string output;  // path prefix; defaults to the experiment name
  CheckThresholds check;

  /// Throws ConfigError naming every violated invariant.
  void validate() const;
  std::filesystem::path csv_path() const;
  std::filesystem::path manifest_path() const;
};

/// Parses "[section]" headers and "key = value" lines; '#' starts a comment.
/// Lists are comma separated, optionally bracketed; strings may be quoted.
/// Throws ConfigError listing every problem with its line number.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::filesystem::path& path);

/// Applies "section.key" = value assignments on top of `cfg` (used by the CLI).
void apply_settings(ExperimentConfig& cfg, const std::vector<std::pair<std::string, std::string>>& settings);

/// Every effective setting, one "section.key = value" per line in fixed order.
std::string canonical_text(const ExperimentConfig& cfg);

/// Git blob hash (SHA-1 over "blob <len>\0" + content), lower-case hex.
std::string git_blob_hash(const std::string& content);

}  // namespace regedge
