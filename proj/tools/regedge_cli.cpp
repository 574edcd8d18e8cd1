#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <numeric>

#include "regedge/analytic.hpp"
#include "regedge/config.hpp"
#include "regedge/io.hpp"
#include "regedge/resampling.hpp"
#include "regedge/resolvent.hpp"
#include "regedge/samplers.hpp"

using namespace regedge;
using nlohmann::json;

namespace {

RegularGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file " + path);
  return read_edge_list(in);
}

json cplx(Complex v) { return json::array({v.real(), v.imag()}); }

std::vector<Vertex> sampled_rows(int n, int count, Rng& rng) {
  std::vector<Vertex> rows;
  for (int k = 0; k < count; ++k) rows.push_back(static_cast<Vertex>(uniform_index(rng, static_cast<std::uint64_t>(n))));
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral experiments on random regular graphs"};
  app.require_subcommand(1);

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "Draw random d-regular graphs as edge lists");
  int s_n = 0, s_d = 3, s_count = 1;
  std::string s_model = "uniform_pairing", s_out;
  std::uint64_t s_seed = 1;
  sample_cmd->add_option("--n", s_n, "Number of vertices")->required();
  sample_cmd->add_option("--d", s_d, "Degree");
  sample_cmd->add_option("--model", s_model, "uniform_pairing | permutation | matching");
  sample_cmd->add_option("--seed", s_seed, "Master seed");
  sample_cmd->add_option("--count", s_count, "Number of graphs");
  sample_cmd->add_option("--out", s_out, "Output prefix; graph k goes to <out>_<k>.edges (stdout if empty)");

  // resolvent
  auto* res_cmd = app.add_subcommand("resolvent", "Resolvent identities and observables of a graph");
  std::string r_graph, r_report = "ward";
  double r_re = 2.0, r_im = 0.05;
  int r_radius = 3, r_pairs = 50;
  std::uint64_t r_seed = 1;
  res_cmd->add_option("--graph", r_graph, "Edge-list file")->required();
  res_cmd->add_option("--z-re", r_re, "Re z");
  res_cmd->add_option("--z-im", r_im, "Im z");
  res_cmd->add_option("--report", r_report, "ward | rowsum | q | locallaw")
      ->check(CLI::IsMember({"ward", "rowsum", "q", "locallaw"}));
  res_cmd->add_option("--radius", r_radius, "Ball radius for locallaw");
  res_cmd->add_option("--pairs", r_pairs, "Sampled rows or pairs");
  res_cmd->add_option("--seed", r_seed, "Seed for sampled rows or pairs");

  // resample
  auto* rs_cmd = app.add_subcommand("resample", "Local resampling around a vertex");
  std::string rs_graph, rs_emit = "report";
  int rs_o = 0, rs_ell = 1, rs_R = -1, rs_iso = -1;
  std::uint64_t rs_seed = 1;
  double rs_zre = 0.0, rs_zim = 2.0;
  rs_cmd->add_option("--graph", rs_graph, "Edge-list file")->required();
  rs_cmd->add_option("--o", rs_o, "Center vertex");
  rs_cmd->add_option("--ell", rs_ell, "Ball radius");
  rs_cmd->add_option("--R", rs_R, "Tree radius override");
  rs_cmd->add_option("--iso-radius", rs_iso, "Admissibility radius override");
  rs_cmd->add_option("--seed", rs_seed, "Seed");
  rs_cmd->add_option("--z-re", rs_zre, "Re z for the identity residuals");
  rs_cmd->add_option("--z-im", rs_zim, "Im z for the identity residuals");
  rs_cmd->add_option("--emit", rs_emit, "graph | report")->check(CLI::IsMember({"graph", "report"}));

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "Run one experiment from flags");
  std::string e_kind;
  std::vector<std::string> e_n, e_z, e_ell;
  std::string e_d, e_model, e_seed, e_samples, e_R, e_iso, e_c, e_g, e_bins, e_stat, e_out;
  exp_cmd->add_option("kind", e_kind, "esd | sce | loop | edge | exch | averaging")
      ->required()
      ->check(CLI::IsMember({"esd", "sce", "loop", "edge", "exch", "averaging"}));
  exp_cmd->add_option("--n", e_n, "Graph sizes")->delimiter(',');
  exp_cmd->add_option("--d", e_d, "Degree");
  exp_cmd->add_option("--model", e_model, "Sampler model");
  exp_cmd->add_option("--seed", e_seed, "Master seed");
  exp_cmd->add_option("--samples", e_samples, "Samples per size");
  exp_cmd->add_option("--z", e_z, "z recipes such as 2+1i*N^-2/3")->delimiter(',');
  exp_cmd->add_option("--ell", e_ell, "Resampling radii")->delimiter(',');
  exp_cmd->add_option("--R", e_R, "Tree radius override");
  exp_cmd->add_option("--iso-radius", e_iso, "Admissibility radius override");
  exp_cmd->add_option("--frak-c", e_c, "Parameter c");
  exp_cmd->add_option("--frak-g", e_g, "Parameter g");
  exp_cmd->add_option("--bins", e_bins, "Histogram bins");
  exp_cmd->add_option("--statistic", e_stat, "lambda2 | triangles | degree0 | edge01");
  exp_cmd->add_option("--out", e_out, "Output prefix");

  // run
  auto* run_cmd = app.add_subcommand("run", "Run an experiment config file");
  std::string run_path;
  run_cmd->add_option("config", run_path, "Config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sample_cmd) {
      SamplerConfig cfg;
      cfg.n = s_n;
      cfg.d = s_d;
      cfg.model = parse_model(s_model);
      cfg.seed = s_seed;
      for (int k = 0; k < s_count; ++k) {
        const RegularGraph g = sample_indexed(cfg, static_cast<std::uint64_t>(k));
        if (s_out.empty()) {
          write_edge_list(std::cout, g);
        } else {
          atomic_write(s_out + "_" + std::to_string(k) + ".edges", to_edge_list(g));
        }
      }
      return 0;
    }

    if (*res_cmd) {
      const RegularGraph g = load_graph(r_graph);
      const NormalizedAdjacency h(g);
      const SpectralPoint<> p(Complex(r_re, r_im));
      const ResolventCache cache(h, p);
      Rng rng = make_stream(r_seed, 0, 0);
      json out = {{"n", g.n()}, {"d", g.d()}, {"z", cplx(p.z())}, {"report", r_report}};
      if (r_report == "ward" || r_report == "rowsum") {
        const auto rows = sampled_rows(g.n(), r_pairs, rng);
        const IdentityReport rep = r_report == "ward" ? ward_check(cache, rows) : rowsum_check(cache, g, rows);
        out["max_residual"] = rep.max_residual;
        out["rows_checked"] = rep.rows_checked;
      } else if (r_report == "q") {
        out["q"] = cplx(q_of(cache, g));
        out["m_n"] = cplx(cache.m_n());
        out["m_sc"] = cplx(stieltjes_semicircle(p));
        out["m_d"] = cplx(stieltjes_kesten_mckay(p, g.d()));
        out["dz_m_n"] = cplx(cache.trace_square_over_n());
      } else {
        const LocalLawReport rep = local_law_error(cache, g, r_radius, r_pairs, rng);
        out["radius"] = r_radius;
        out["pairs"] = r_pairs;
        out["max_err"] = rep.max_err;
        out["median_err"] = rep.median_err;
      }
      std::cout << out.dump(2) << '\n';
      return 0;
    }

    if (*rs_cmd) {
      const RegularGraph g = load_graph(rs_graph);
      const Parameters prm = Parameters::for_graph(g.n(), g.d(), rs_ell, 0.5, rs_R, rs_iso);
      Rng rng = make_stream(rs_seed, 0, 1);
      const ResamplingData s = propose(g, rs_o, prm, rng);
      const SwitchResult res = apply(g, s);
      if (rs_emit == "graph") {
        write_edge_list(std::cout, res.graph);
        return 0;
      }
      json out = {{"n", g.n()}, {"d", g.d()}, {"o", rs_o}, {"ell", rs_ell}, {"R", prm.R},
                  {"iso_radius", prm.iso_radius}, {"mu", s.mu()}, {"admissible", s.admissible_count()},
                  {"applied", res.applied.size()}, {"skipped", res.skipped.size()}};
      const SpectralPoint<> p(Complex(rs_zre, rs_zim));
      const WoodburyResult wb = woodbury_f(g, s, p);
      if (!wb.op) {
        out["woodbury_skipped"] = wb.skip_reason;
      } else {
        out["woodbury_residual"] = wb.op->identity_residual;
        out["support_leak"] = wb.op->support_leak;
        if (g.n() <= kFullInverseLimit) {
          const ResolventCache gc(NormalizedAdjacency(g), p);
          const ResolventCache gt(NormalizedAdjacency(res.graph), p);
          std::vector<std::pair<Vertex, Vertex>> entries;
          for (Vertex x : wb.op->support) {
            for (Vertex y : wb.op->support) entries.emplace_back(x, y);
          }
          const ExpansionReport ex = resolvent_update_expansion(gc, gt, *wb.op, 8, entries);
          out["expansion_error"] = ex.max_error;
          out["m_n_change"] = std::abs(gt.m_n() - gc.m_n());
        }
      }
      std::cout << out.dump(2) << '\n';
      return 0;
    }

    if (*exp_cmd) {
      std::vector<std::pair<std::string, std::string>> kv{{"experiment.name", e_kind}};
      auto join = [](const std::vector<std::string>& v) {
        return std::accumulate(v.begin(), v.end(), std::string(),
                               [](const std::string& a, const std::string& b) { return a.empty() ? b : a + "," + b; });
      };
      if (!e_n.empty()) kv.emplace_back("graph.n", join(e_n));
      if (!e_z.empty()) kv.emplace_back("spectral.z_grid", join(e_z));
      if (!e_ell.empty()) kv.emplace_back("resampling.ell", join(e_ell));
      const std::pair<const char*, std::string*> scalars[] = {
          {"graph.d", &e_d},          {"graph.model", &e_model},         {"sampling.seed", &e_seed},
          {"sampling.samples", &e_samples}, {"resampling.R", &e_R},   {"resampling.iso_radius", &e_iso},
          {"parameters.frak_c", &e_c}, {"parameters.frak_g", &e_g},      {"esd.bins", &e_bins},
          {"resampling.statistic", &e_stat}, {"experiment.output", &e_out}};
      for (const auto& [key, value] : scalars) {
        if (!value->empty()) kv.emplace_back(key, *value);
      }
      ExperimentConfig cfg;
      apply_settings(cfg, kv);
      return run(cfg, std::cout);
    }

    if (*run_cmd) return run(parse_config(run_path), std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
