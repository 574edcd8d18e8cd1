#include "regedge/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "regedge/analytic.hpp"
#include "regedge/errors.hpp"
#include "regedge/parallel.hpp"
#include "regedge/weighted_tree.hpp"

namespace regedge {

namespace {

constexpr std::uint32_t kBootstrapChannel = 0xB007;
constexpr int kBootstrapResamples = 1000;

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw std::invalid_argument("malformed number '" + std::string(s) + "'");
  }
  return v;
}

double parse_fraction(std::string_view s) {
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return parse_double(s);
  const double den = parse_double(s.substr(slash + 1));
  if (den == 0.0) throw std::invalid_argument("zero denominator in exponent");
  return parse_double(s.substr(0, slash)) / den;
}

SamplerConfig sampler(int n, int d, Model model, std::uint64_t seed) {
  SamplerConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.model = model;
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

Aggregate aggregate_abs(const std::vector<DiagnosticRecord>& recs, Complex DiagnosticRecord::*field,
                        std::uint64_t seed) {
  std::vector<double> v;
  v.reserve(recs.size());
  for (const auto& r : recs) v.push_back(std::abs(r.*field));
  return aggregate(v, seed);
}

Complex complex_mean(std::span<const Complex> v) {
  std::vector<double> re(v.size()), im(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    re[i] = v[i].real();
    im[i] = v[i].imag();
  }
  return {stats::mean(re), stats::mean(im)};
}

}  // namespace

SpectralPoint<> ZRecipe::at(int n, int d) const {
  double scale = 1.0;
  switch (base) {
    case Base::One: break;
    case Base::N: scale = std::pow(static_cast<double>(n), exponent); break;
    case Base::AN: scale = std::pow(edge_constant(d) * n, exponent); break;
  }
  return SpectralPoint<>(Complex(re, coef * scale));
}

std::string ZRecipe::to_string() const {
  std::string s = format_double(re) + "+" + format_double(coef) + "i";
  if (base == Base::N) s += "*N^" + format_double(exponent);
  if (base == Base::AN) s += "*AN^" + format_double(exponent);
  return s;
}

ZRecipe ZRecipe::parse(std::string_view text) {
  std::string t;
  for (char ch : text) {
    if (ch != ' ' && ch != '\t') t.push_back(ch);
  }
  const auto ipos = t.find('i');
  if (ipos == std::string::npos) throw std::invalid_argument("z recipe needs an imaginary part: '" + t + "'");
  std::size_t split = std::string::npos;
  for (std::size_t k = ipos; k-- > 1;) {
    if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  ZRecipe r;
  if (split == std::string::npos) {
    r.re = 0.0;
    r.coef = parse_double(std::string_view(t).substr(0, ipos));
  } else {
    r.re = parse_double(std::string_view(t).substr(0, split));
    r.coef = parse_double(std::string_view(t).substr(split, ipos - split));
  }
  std::string_view rest = std::string_view(t).substr(ipos + 1);
  if (!rest.empty()) {
    if (rest.substr(0, 4) == "*AN^") {
      r.base = Base::AN;
      rest.remove_prefix(4);
    } else if (rest.substr(0, 3) == "*N^") {
      r.base = Base::N;
      rest.remove_prefix(3);
    } else {
      throw std::invalid_argument("z recipe scale must be *N^p or *AN^p: '" + t + "'");
    }
    r.exponent = parse_fraction(rest);
  }
  if (!(r.coef > 0.0)) throw std::invalid_argument("z recipe needs a positive imaginary coefficient");
  return r;
}

Aggregate aggregate(std::span<const double> values, std::uint64_t seed) {
  Aggregate a;
  a.count = static_cast<int>(values.size());
  if (values.empty()) return a;
  a.mean = stats::mean(values);
  a.median = stats::median(values);
  Rng rng = make_stream(seed, 0, kBootstrapChannel);
  a.ci = stats::bootstrap_ci(
      values, [](std::span<const double> x) { return stats::median(x); }, kBootstrapResamples, 0.95, rng);
  return a;
}

std::vector<DiagnosticRecord> diagnose(const ResolventCache& cache, const RegularGraph& g,
                                       std::span<const int> ells, double frak_c) {
  const auto& p = cache.point();
  const int n = g.n(), d = g.d();
  const Complex q = q_of(cache, g);
  const Complex m = cache.m_n();
  const Complex dz = cache.trace_square_over_n();
  const Complex msc = stieltjes_semicircle(p);
  const Complex md = stieltjes_kesten_mckay(p, d);
  const double a = edge_constant(d);
  const double phi = m.imag() / (n * p.eta()) + std::pow(static_cast<double>(n), -1.0 + 2.0 * frak_c);
  std::vector<DiagnosticRecord> out;
  for (int ell : ells) {
    DiagnosticRecord r;
    r.z = p.z();
    r.n = n;
    r.d = d;
    r.ell = ell;
    r.q = q;
    r.m_n = m;
    r.dz_m_n = dz;
    r.m_sc = msc;
    r.m_d = md;
    r.y = y_ell(q, p, ell, d);
    r.x = x_ell(q, p, ell, d);
    r.phi = phi;
    r.residual_qy = q - r.y;
    r.residual_mx = m - r.x;
    r.loop_lhs = a * a / (ell + 1) * r.residual_qy + dz / static_cast<double>(n);
    r.micro_loop = (m - md) * (m - md) + 2.0 * a * std::sqrt(p.z() - 2.0) * (m - md) + dz / static_cast<double>(n);
    out.push_back(r);
  }
  return out;
}

std::vector<DiagnosticRecord> diagnose(const RegularGraph& g, const SpectralPoint<>& p, std::span<const int> ells,
                                       double frak_c) {
  const ResolventCache cache(NormalizedAdjacency(g), p);
  return diagnose(cache, g, ells, frak_c);
}

EsdResult esd_experiment(int n, int d, int samples, std::uint64_t seed, Model model, int bins) {
  if (samples < 1) throw std::invalid_argument("sample count must be positive");
  if (bins < 1) throw std::invalid_argument("bin count must be positive");
  const auto cfg = sampler(n, d, model, seed);
  std::vector<Eigen::VectorXd> spectra(static_cast<std::size_t>(samples));
  parallel_for(samples, [&](int k) {
    spectra[k] = eigenvalues(NormalizedAdjacency(sample_indexed(cfg, static_cast<std::uint64_t>(k))));
  });
  EsdResult r;
  r.n = n;
  r.d = d;
  r.samples = samples;
  const auto cdf = [d](double x) { return km_cdf(x, d); };
  std::vector<double> pooled;
  pooled.reserve(static_cast<std::size_t>(samples) * (n - 1));
  for (const auto& ev : spectra) {
    std::vector<double> own(ev.data() + 1, ev.data() + ev.size());
    r.per_sample_ks.push_back(stats::ks_one_sample(own, cdf).statistic);
    pooled.insert(pooled.end(), own.begin(), own.end());
  }
  r.ks = stats::ks_one_sample(pooled, cdf).statistic;
  const double lo = -2.5, hi = 2.5, width = (hi - lo) / bins;
  r.counts.assign(static_cast<std::size_t>(bins), 0);
  for (int b = 0; b <= bins; ++b) r.bin_edges.push_back(lo + b * width);
  std::int64_t outside = 0;
  for (double x : pooled) {
    if (std::abs(x) > 2.2) ++outside;
    const int b = static_cast<int>(std::floor((x - lo) / width));
    if (b >= 0 && b < bins) ++r.counts[b];
  }
  r.outside_mass = static_cast<double>(outside) / static_cast<double>(pooled.size());
  return r;
}

SceResult self_consistent_scan(std::span<const int> n_list, int d, std::span<const int> ells,
                               std::span<const ZRecipe> grid, int samples, std::uint64_t seed, Model model,
                               double frak_c) {
  if (samples < 1) throw std::invalid_argument("sample count must be positive");
  SceResult out;
  for (int n : n_list) {
    const auto cfg = sampler(n, d, model, seed);
    std::vector<std::vector<DiagnosticRecord>> per(static_cast<std::size_t>(samples));
    parallel_for(samples, [&](int k) {
      const RegularGraph g = sample_indexed(cfg, static_cast<std::uint64_t>(k));
      const NormalizedAdjacency h(g);
      for (const auto& z : grid) {
        for (auto r : diagnose(ResolventCache(h, z.at(n, d)), g, ells, frak_c)) {
          r.seed = seed;
          r.sample = k;
          per[k].push_back(r);
        }
      }
    });
    std::vector<DiagnosticRecord> flat;
    for (auto& v : per) flat.insert(flat.end(), v.begin(), v.end());
    for (const auto& z : grid) {
      const Complex zz = z.at(n, d).z();
      for (int ell : ells) {
        std::vector<DiagnosticRecord> sel;
        for (const auto& r : flat) {
          if (r.z == zz && r.ell == ell) sel.push_back(r);
        }
        SceSummary s;
        s.n = n;
        s.ell = ell;
        s.z = zz;
        s.qy = aggregate_abs(sel, &DiagnosticRecord::residual_qy, seed);
        s.mx = aggregate_abs(sel, &DiagnosticRecord::residual_mx, seed);
        std::vector<double> qm, md;
        for (const auto& r : sel) {
          qm.push_back(std::abs(r.q - r.m_sc));
          md.push_back(std::abs(r.m_n - r.m_d));
        }
        s.q_msc = aggregate(qm, seed);
        s.mn_md = aggregate(md, seed);
        out.summary.push_back(s);
      }
    }
    out.records.insert(out.records.end(), flat.begin(), flat.end());
  }
  return out;
}

AveragingSample averaging_identities(const ResolventCache& cache, const RegularGraph& g, double frak_c) {
  if (!cache.dense()) throw SizeLimitError("averaging identities need the dense resolvent");
  const Eigen::MatrixXcd& G = cache.matrix();
  const int n = g.n(), d = g.d();
  const double nd = static_cast<double>(n) * d;
  const Complex q = q_of(cache, g);
  AveragingSample s;

  // w_b = sum_{c ~ b} (G^{(b)}_cc - Q).
  std::vector<Complex> w(static_cast<std::size_t>(n));
  std::vector<double> re, im;
  for (Vertex b = 0; b < n; ++b) {
    Complex acc = 0.0;
    for (Vertex c : g.neighbors(b)) {
      const Complex v = G(c, c) - G(c, b) * G(b, c) / G(b, b) - q;
      acc += v;
      re.push_back(v.real());
      im.push_back(v.imag());
    }
    w[b] = acc;
  }
  s.core1_residual = std::hypot(stats::pairwise_sum(re), stats::pairwise_sum(im)) / nd;

  Complex lhs = 0.0, rhs = 0.0;
  double ward = 0.0;
  for (Vertex b = 0; b < n; ++b) {
    const auto nb = g.neighbors(b);
    Complex row_lhs = 0.0, row_rhs = 0.0;
    double row_ward = 0.0;
    for (Vertex bp = 0; bp < n; ++bp) {
      const auto nbp = g.neighbors(bp);
      row_rhs += G(b, bp) / static_cast<double>(d - 1) * w[b] * w[bp];
      if (b == bp) {
        for (Vertex c : nb) {
          for (Vertex cp : nbp) {
            const Complex v = G(c, cp) - G(c, b) * G(b, cp) / G(b, b);
            row_lhs += v;
            row_ward += std::norm(v);
          }
        }
        continue;
      }
      // Inverse of the 2x2 block G restricted to {b, b'}.
      const Complex g11 = G(b, b), g12 = G(b, bp), g21 = G(bp, b), g22 = G(bp, bp);
      const Complex det = g11 * g22 - g12 * g21;
      const Complex i11 = g22 / det, i12 = -g12 / det, i21 = -g21 / det, i22 = g11 / det;
      for (Vertex c : nb) {
        if (c == bp) continue;
        const Complex lb = G(c, b), lbp = G(c, bp);
        const Complex u1 = lb * i11 + lbp * i21, u2 = lb * i12 + lbp * i22;
        for (Vertex cp : nbp) {
          if (cp == b) continue;
          const Complex v = G(c, cp) - (u1 * G(b, cp) + u2 * G(bp, cp));
          row_lhs += v;
          row_ward += std::norm(v);
        }
      }
    }
    lhs += row_lhs;
    rhs += row_rhs;
    ward += row_ward;
  }
  s.core21_lhs = lhs / (nd * nd);
  s.core21_rhs = rhs / (nd * nd);
  s.gap = std::abs(s.core21_lhs - s.core21_rhs);
  s.ward_average = ward / (nd * nd);
  s.phi = cache.m_n().imag() / (n * cache.point().eta()) + std::pow(static_cast<double>(n), -1.0 + 2.0 * frak_c);
  return s;
}

AveragingReport averaging_identity_probe(int n, int d, const ZRecipe& z, int samples, std::uint64_t seed,
                                         Model model, double frak_c) {
  if (samples < 1) throw std::invalid_argument("sample count must be positive");
  const auto cfg = sampler(n, d, model, seed);
  AveragingReport rep;
  rep.samples.resize(static_cast<std::size_t>(samples));
  parallel_for(samples, [&](int k) {
    const RegularGraph g = sample_indexed(cfg, static_cast<std::uint64_t>(k));
    const ResolventCache cache(NormalizedAdjacency(g), z.at(n, d));
    rep.samples[k] = averaging_identities(cache, g, frak_c);
  });
  std::vector<double> gap, ward;
  for (const auto& s : rep.samples) {
    rep.max_core1 = std::max(rep.max_core1, s.core1_residual);
    gap.push_back(s.gap / s.phi);
    ward.push_back(s.ward_average / s.phi);
  }
  rep.gap_over_phi = aggregate(gap, seed);
  rep.ward_over_phi = aggregate(ward, seed);
  return rep;
}

LoopResult loop_equation_probe(std::span<const int> n_list, int d, std::span<const int> ells, const ZRecipe& z,
                               int samples, std::uint64_t seed, Model model, double frak_c) {
  if (samples < 1) throw std::invalid_argument("sample count must be positive");
  LoopResult out;
  const double a = edge_constant(d);
  for (int n : n_list) {
    const auto cfg = sampler(n, d, model, seed);
    const SpectralPoint<> p = z.at(n, d);
    std::vector<std::vector<DiagnosticRecord>> per(static_cast<std::size_t>(samples));
    parallel_for(samples, [&](int k) {
      const RegularGraph g = sample_indexed(cfg, static_cast<std::uint64_t>(k));
      per[k] = diagnose(g, p, ells, frak_c);
      for (auto& r : per[k]) {
        r.seed = seed;
        r.sample = k;
      }
    });
    for (std::size_t e = 0; e < ells.size(); ++e) {
      const int ell = ells[e];
      std::vector<Complex> loop, micro, scaled, dzn;
      std::vector<double> abs_dzn, abs_scaled;
      for (const auto& v : per) {
        const auto& r = v[e];
        loop.push_back(r.loop_lhs);
        micro.push_back(r.micro_loop);
        scaled.push_back(a * a / (ell + 1) * r.residual_qy);
        dzn.push_back(r.dz_m_n / static_cast<double>(n));
        abs_dzn.push_back(std::abs(dzn.back()));
        abs_scaled.push_back(std::abs(scaled.back()));
      }
      LoopSummary s;
      s.n = n;
      s.ell = ell;
      s.z = p.z();
      s.samples = samples;
      s.mean_loop = complex_mean(loop);
      s.mean_micro = complex_mean(micro);
      s.mean_scaled_qy = complex_mean(scaled);
      s.mean_dz_over_n = complex_mean(dzn);
      s.mean_abs_dz_over_n = stats::mean(abs_dzn);
      s.mean_abs_scaled_qy = stats::mean(abs_scaled);
      s.cancellation_ratio = std::abs(s.mean_loop) / s.mean_abs_dz_over_n;
      out.summary.push_back(s);
    }
    for (auto& v : per) out.records.insert(out.records.end(), v.begin(), v.end());
  }
  return out;
}

EdgeResult edge_fluctuations(int n, int d, int samples, std::uint64_t seed, Model model) {
  if (samples < 2) throw std::invalid_argument("edge statistics need at least two samples");
  const auto cfg = sampler(n, d, model, seed);
  const double scale = std::pow(edge_constant(d) * n, 2.0 / 3.0);
  EdgeResult r;
  r.samples.resize(static_cast<std::size_t>(samples));
  parallel_for(samples, [&](int k) {
    const Eigen::VectorXd ev = eigenvalues(NormalizedAdjacency(sample_indexed(cfg, static_cast<std::uint64_t>(k))));
    EdgeSample& s = r.samples[k];
    s.n = n;
    s.d = d;
    s.seed = seed;
    s.sample = k;
    s.lambda2 = ev(1);
    s.lambda_n = ev(ev.size() - 1);
    s.scaled = scale * (s.lambda2 - 2.0);
    s.ramanujan = std::max(s.lambda2, std::abs(s.lambda_n)) <= 2.0;
  });
  std::vector<double> l2, neg_ln, scaled, scaled_min;
  int below = 0, raman = 0;
  for (const auto& s : r.samples) {
    l2.push_back(s.lambda2);
    neg_ln.push_back(-s.lambda_n);
    scaled.push_back(s.scaled);
    scaled_min.push_back(scale * (-s.lambda_n - 2.0));
    below += s.lambda2 < 2.0;
    raman += s.ramanujan;
  }
  r.frac_below_2 = static_cast<double>(below) / samples;
  r.frac_ramanujan = static_cast<double>(raman) / samples;
  r.correlation = stats::correlation(l2, neg_ln);
  r.scaled = aggregate(scaled, seed);
  r.scaled_min = aggregate(scaled_min, seed);
  return r;
}

}  // namespace regedge
