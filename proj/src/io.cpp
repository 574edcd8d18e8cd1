#include "regedge/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "regedge/analytic.hpp"

namespace regedge {

namespace {

using nlohmann::json;

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string_view> header) {
    for (auto h : header) field(std::string(h));
    end_row();
  }
  Csv& field(const std::string& s) {
    if (!first_) out_ += ',';
    out_ += s;
    first_ = false;
    return *this;
  }
  Csv& num(double v) { return field(format_double(v)); }
  Csv& num(long long v) { return field(std::to_string(v)); }
  Csv& num(int v) { return field(std::to_string(v)); }
  Csv& num(std::uint64_t v) { return field(std::to_string(v)); }
  Csv& cplx(Complex v) { return num(v.real()).num(v.imag()); }
  void end_row() {
    out_ += '\n';
    first_ = true;
  }
  const std::string& str() const { return out_; }

 private:
  std::string out_;
  bool first_ = true;
};

json cplx(Complex v) { return json::array({v.real(), v.imag()}); }

json aggregate_json(const Aggregate& a) {
  return {{"count", a.count}, {"mean", a.mean}, {"median", a.median}, {"ci95", json::array({a.ci.lo, a.ci.hi})}};
}

Check band_check(std::string name, double value, double lo, double hi) {
  return {std::move(name), value, "[" + format_double(lo) + ", " + format_double(hi) + "]", value >= lo && value <= hi};
}
Check max_check(std::string name, double value, double hi) {
  return {std::move(name), value, "< " + format_double(hi), value < hi};
}
Check min_check(std::string name, double value, double lo) {
  return {std::move(name), value, "> " + format_double(lo), value > lo};
}

std::vector<int> sorted_ns(const ExperimentConfig& cfg) {
  std::vector<int> ns = cfg.n_list;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  return ns;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path partial = path;
  partial += ".partial";
  {
    std::ofstream out(partial, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + partial.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + partial.string());
  }
  std::error_code ec;
  std::filesystem::rename(partial, path, ec);
  if (ec) throw std::runtime_error("cannot rename " + partial.string() + " to " + path.string() + ": " + ec.message());
}

std::string diagnostics_csv(const std::vector<DiagnosticRecord>& records) {
  Csv csv{"n", "d", "ell", "seed", "sample", "z_re", "z_im", "q_re", "q_im", "m_n_re", "m_n_im", "y_re", "y_im",
          "x_re", "x_im", "m_sc_re", "m_sc_im", "m_d_re", "m_d_im", "dz_m_n_re", "dz_m_n_im", "phi",
          "residual_qy_re", "residual_qy_im", "residual_mx_re", "residual_mx_im", "loop_lhs_re", "loop_lhs_im",
          "micro_loop_re", "micro_loop_im"};
  for (const auto& r : records) {
    csv.num(r.n).num(r.d).num(r.ell).num(r.seed).num(r.sample);
    csv.cplx(r.z).cplx(r.q).cplx(r.m_n).cplx(r.y).cplx(r.x).cplx(r.m_sc).cplx(r.m_d).cplx(r.dz_m_n);
    csv.num(r.phi).cplx(r.residual_qy).cplx(r.residual_mx).cplx(r.loop_lhs).cplx(r.micro_loop);
    csv.end_row();
  }
  return csv.str();
}

std::string edge_csv(const std::vector<EdgeSample>& samples) {
  Csv csv{"n", "d", "seed", "sample", "lambda2", "lambda_n", "scaled", "ramanujan"};
  for (const auto& s : samples) {
    csv.num(s.n).num(s.d).num(s.seed).num(s.sample).num(s.lambda2).num(s.lambda_n).num(s.scaled);
    csv.num(s.ramanujan ? 1 : 0).end_row();
  }
  return csv.str();
}

std::string esd_csv(const EsdResult& r) {
  Csv csv{"n", "d", "bin_lo", "bin_hi", "count", "density", "km_mass"};
  std::int64_t total = 0;
  for (auto c : r.counts) total += c;
  for (std::size_t b = 0; b < r.counts.size(); ++b) {
    const double lo = r.bin_edges[b], hi = r.bin_edges[b + 1];
    csv.num(r.n).num(r.d).num(lo).num(hi).num(static_cast<long long>(r.counts[b]));
    csv.num(static_cast<double>(r.counts[b]) / static_cast<double>(total) / (hi - lo));
    csv.num(km_cdf(hi, r.d) - km_cdf(lo, r.d)).end_row();
  }
  return csv.str();
}

std::string averaging_csv(const AveragingReport& r) {
  Csv csv{"sample", "core1_residual", "core21_lhs_re", "core21_lhs_im", "core21_rhs_re", "core21_rhs_im", "gap",
          "phi", "ward_average"};
  for (std::size_t k = 0; k < r.samples.size(); ++k) {
    const auto& s = r.samples[k];
    csv.num(static_cast<int>(k)).num(s.core1_residual).cplx(s.core21_lhs).cplx(s.core21_rhs).num(s.gap);
    csv.num(s.phi).num(s.ward_average).end_row();
  }
  return csv.str();
}

std::string exchangeability_csv(const ExchangeabilityReport& r) {
  Csv csv{"sample", "f", "f_switched"};
  for (std::size_t k = 0; k < r.f_original.size(); ++k) {
    csv.num(static_cast<int>(k)).num(r.f_original[k]).num(r.f_switched[k]).end_row();
  }
  return csv.str();
}

bool RunOutcome::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

RunOutcome run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  RunOutcome out;
  out.csv = cfg.csv_path();
  out.manifest = cfg.manifest_path();
  const auto ns = sorted_ns(cfg);
  const auto& th = cfg.check;
  std::string csv;
  json summary = json::object();

  switch (cfg.kind) {
    case ExperimentKind::Esd: {
      std::vector<double> ks;
      for (int n : ns) {
        const EsdResult r = esd_experiment(n, cfg.d, cfg.samples, cfg.seed, cfg.model, cfg.bins);
        const std::string part = esd_csv(r);
        csv += csv.empty() ? part : part.substr(part.find('\n') + 1);
        summary[std::to_string(n)] = {{"ks", r.ks}, {"outside_mass", r.outside_mass}, {"per_sample_ks", r.per_sample_ks}};
        ks.push_back(r.ks);
        if (n == ns.back()) {
          out.checks.push_back(max_check("ks(n=" + std::to_string(n) + ")", r.ks, th.ks_max));
          out.checks.push_back(max_check("outside_mass(n=" + std::to_string(n) + ")", r.outside_mass, th.outside_max));
        }
      }
      if (ks.size() >= 2) out.checks.push_back(max_check("ks(n_max) - ks(n_min)", ks.back() - ks.front(), 0.0));
      break;
    }
    case ExperimentKind::Sce: {
      const SceResult r = self_consistent_scan(ns, cfg.d, cfg.ells, cfg.z_grid, cfg.samples, cfg.seed, cfg.model,
                                               cfg.frak_c);
      csv = diagnostics_csv(r.records);
      json rows = json::array();
      for (const auto& s : r.summary) {
        rows.push_back({{"n", s.n}, {"ell", s.ell}, {"z", cplx(s.z)}, {"abs_q_minus_y", aggregate_json(s.qy)},
                        {"abs_m_minus_x", aggregate_json(s.mx)}, {"abs_q_minus_msc", aggregate_json(s.q_msc)},
                        {"abs_m_minus_md", aggregate_json(s.mn_md)}});
      }
      summary["grid"] = rows;
      if (ns.size() >= 2) {
        int points = 0, decreasing = 0;
        for (std::size_t zi = 0; zi < cfg.z_grid.size(); ++zi) {
          for (std::size_t e = 0; e < cfg.ells.size(); ++e) {
            bool mono = true;
            for (std::size_t k = 1; k < ns.size(); ++k) {
              const auto idx = [&](std::size_t nk) { return (nk * cfg.z_grid.size() + zi) * cfg.ells.size() + e; };
              mono = mono && r.summary[idx(k)].qy.median < r.summary[idx(k - 1)].qy.median;
            }
            ++points;
            decreasing += mono;
          }
        }
        const double frac = static_cast<double>(decreasing) / points;
        summary["trend_fraction"] = frac;
        out.checks.push_back(band_check("fraction of grid points with decreasing median |Q-Y|", frac, th.trend_min, 1.0));
      }
      break;
    }
    case ExperimentKind::Loop: {
      for (const auto& z : cfg.z_grid) {
        const LoopResult r = loop_equation_probe(ns, cfg.d, cfg.ells, z, cfg.samples, cfg.seed, cfg.model, cfg.frak_c);
        const std::string part = diagnostics_csv(r.records);
        csv += csv.empty() ? part : part.substr(part.find('\n') + 1);
        for (const auto& s : r.summary) {
          summary["rows"].push_back({{"n", s.n}, {"ell", s.ell}, {"z", cplx(s.z)}, {"samples", s.samples},
                                     {"mean_loop_lhs", cplx(s.mean_loop)}, {"mean_micro_loop", cplx(s.mean_micro)},
                                     {"mean_scaled_q_minus_y", cplx(s.mean_scaled_qy)},
                                     {"mean_dz_m_n_over_n", cplx(s.mean_dz_over_n)},
                                     {"mean_abs_dz_m_n_over_n", s.mean_abs_dz_over_n},
                                     {"mean_abs_scaled_q_minus_y", s.mean_abs_scaled_qy},
                                     {"cancellation_ratio", s.cancellation_ratio}});
          if (s.n == ns.back() && z.base != ZRecipe::Base::One) {
            out.checks.push_back(max_check("loop cancellation ratio (n=" + std::to_string(s.n) +
                                               ", ell=" + std::to_string(s.ell) + ", z=" + z.to_string() + ")",
                                           s.cancellation_ratio, th.loop_ratio_max));
          }
        }
      }
      break;
    }
    case ExperimentKind::Edge: {
      for (int n : ns) {
        const EdgeResult r = edge_fluctuations(n, cfg.d, cfg.samples, cfg.seed, cfg.model);
        const std::string part = edge_csv(r.samples);
        csv += csv.empty() ? part : part.substr(part.find('\n') + 1);
        summary[std::to_string(n)] = {{"frac_below_2", r.frac_below_2}, {"frac_ramanujan", r.frac_ramanujan},
                                      {"corr_lambda2_minus_lambdaN", r.correlation},
                                      {"scaled_lambda2", aggregate_json(r.scaled)},
                                      {"scaled_minus_lambdaN", aggregate_json(r.scaled_min)}};
        const std::string tag = "(n=" + std::to_string(n) + ")";
        out.checks.push_back(band_check("frac lambda2 < 2 " + tag, r.frac_below_2, th.below2_lo, th.below2_hi));
        out.checks.push_back(band_check("frac Ramanujan " + tag, r.frac_ramanujan, th.ramanujan_lo, th.ramanujan_hi));
        out.checks.push_back(max_check("|corr(lambda2, -lambdaN)| " + tag, std::abs(r.correlation), th.corr_max));
      }
      break;
    }
    case ExperimentKind::Exch: {
      for (int n : ns) {
        SamplerConfig sc;
        sc.n = n;
        sc.d = cfg.d;
        sc.model = cfg.model;
        sc.seed = cfg.seed;
        for (int ell : cfg.ells) {
          const Parameters prm = Parameters::for_graph(n, cfg.d, ell, cfg.frak_c, cfg.R, cfg.iso_radius);
          const auto r = exchangeability_test(sc, ell, statistic_by_name(cfg.statistic), cfg.samples, prm);
          const std::string part = exchangeability_csv(r);
          csv += csv.empty() ? part : part.substr(part.find('\n') + 1);
          const std::string tag = "(n=" + std::to_string(n) + ", ell=" + std::to_string(ell) + ")";
          summary[tag] = {{"ks_statistic", r.ks_statistic}, {"ks_p_value", r.ks_p_value},
                          {"sign_p_value", r.sign_p_value}, {"mean_diff_sigma", r.mean_diff_sigma},
                          {"mean_admissible_fraction", r.mean_admissible},
                          {"degree_violations", r.degree_violations}};
          out.checks.push_back(min_check("KS p-value " + tag, r.ks_p_value, th.p_min));
          out.checks.push_back(max_check("mean difference in sigma " + tag, r.mean_diff_sigma, th.sigma_max));
          out.checks.push_back(max_check("degree violations " + tag, r.degree_violations, 0.5));
        }
      }
      break;
    }
    case ExperimentKind::Averaging: {
      for (int n : ns) {
        for (const auto& z : cfg.z_grid) {
          const AveragingReport r = averaging_identity_probe(n, cfg.d, z, cfg.samples, cfg.seed, cfg.model, cfg.frak_c);
          const std::string part = averaging_csv(r);
          csv += csv.empty() ? part : part.substr(part.find('\n') + 1);
          const std::string tag = "(n=" + std::to_string(n) + ", z=" + z.to_string() + ")";
          summary[tag] = {{"max_core1_residual", r.max_core1}, {"gap_over_phi", aggregate_json(r.gap_over_phi)},
                          {"ward_over_phi", aggregate_json(r.ward_over_phi)}};
          out.checks.push_back(max_check("edge-average residual " + tag, r.max_core1, th.core1_max));
          out.checks.push_back(max_check("median two-edge gap / Phi " + tag, r.gap_over_phi.median, th.gap_phi_max));
          out.checks.push_back(max_check("median Ward average / Phi " + tag, r.ward_over_phi.median, th.ward_phi_max));
        }
      }
      break;
    }
  }

  const std::string canonical = canonical_text(cfg);
  json checks = json::array();
  for (const auto& c : out.checks) {
    checks.push_back({{"name", c.name}, {"value", c.value}, {"band", c.band}, {"pass", c.pass}});
  }
  json manifest = {{"experiment", std::string(to_string(cfg.kind))},
                   {"config_hash", git_blob_hash(canonical)},
                   {"config", canonical},
                   {"csv", out.csv.filename().string()},
                   {"csv_hash", git_blob_hash(csv)},
                   {"summary", summary},
                   {"checks", checks}};
  atomic_write(out.csv, csv);
  atomic_write(out.manifest, manifest.dump(2) + "\n");
  return out;
}

int run(const ExperimentConfig& cfg, std::ostream& log) {
  const RunOutcome out = run_experiment(cfg);
  for (const auto& c : out.checks) {
    log << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << format_double(c.value) << " (want " << c.band << ")\n";
  }
  log << "wrote " << out.csv.string() << " and " << out.manifest.string() << '\n';
  return out.ok() ? 0 : 1;
}

}  // namespace regedge
