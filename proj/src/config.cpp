#include "regedge/config.hpp"

#include <openssl/evp.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "regedge/errors.hpp"
#include "regedge/resampling.hpp"

namespace regedge {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    s = s.substr(1, s.size() - 2);
  }
  return std::string(s);
}

std::vector<std::string> split_list(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece = unquote(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_number(const std::string& s) {
  T v{};
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) throw std::invalid_argument("'" + s + "' is not a valid number");
  return v;
}

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <typename T>
std::string join(const std::vector<T>& v, const std::function<std::string(const T&)>& f) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + f(v[i]);
  return s;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

Setter scalar(double ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, const std::string& v) { c.*field = parse_number<double>(unquote(v)); };
}
Setter scalar(int ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, const std::string& v) { c.*field = parse_number<int>(unquote(v)); };
}
Setter check(double CheckThresholds::*field) {
  return [field](ExperimentConfig& c, const std::string& v) { c.check.*field = parse_number<double>(unquote(v)); };
}
Setter int_list(std::vector<int> ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, const std::string& v) {
    std::vector<int> out;
    for (const auto& s : split_list(v)) out.push_back(parse_number<int>(s));
    if (out.empty()) throw std::invalid_argument("empty list");
    c.*field = std::move(out);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"experiment.name", [](ExperimentConfig& c, const std::string& v) { c.kind = parse_experiment(unquote(v)); }},
      {"experiment.output", [](ExperimentConfig& c, const std::string& v) { c.output = unquote(v); }},
      {"graph.n", int_list(&ExperimentConfig::n_list)},
      {"graph.d", scalar(&ExperimentConfig::d)},
      {"graph.model", [](ExperimentConfig& c, const std::string& v) { c.model = parse_model(unquote(v)); }},
      {"sampling.seed",
       [](ExperimentConfig& c, const std::string& v) { c.seed = parse_number<std::uint64_t>(unquote(v)); }},
      {"sampling.samples", scalar(&ExperimentConfig::samples)},
      {"spectral.z_grid",
       [](ExperimentConfig& c, const std::string& v) {
         std::vector<ZRecipe> grid;
         for (const auto& s : split_list(v)) grid.push_back(ZRecipe::parse(s));
         if (grid.empty()) throw std::invalid_argument("empty z grid");
         c.z_grid = std::move(grid);
       }},
      {"resampling.ell", int_list(&ExperimentConfig::ells)},
      {"resampling.R", scalar(&ExperimentConfig::R)},
      {"resampling.iso_radius", scalar(&ExperimentConfig::iso_radius)},
      {"resampling.statistic", [](ExperimentConfig& c, const std::string& v) { c.statistic = unquote(v); }},
      {"parameters.frak_c", scalar(&ExperimentConfig::frak_c)},
      {"parameters.frak_g", scalar(&ExperimentConfig::frak_g)},
      {"esd.bins", scalar(&ExperimentConfig::bins)},
      {"check.ks_max", check(&CheckThresholds::ks_max)},
      {"check.outside_max", check(&CheckThresholds::outside_max)},
      {"check.trend_min", check(&CheckThresholds::trend_min)},
      {"check.loop_ratio_max", check(&CheckThresholds::loop_ratio_max)},
      {"check.below2_lo", check(&CheckThresholds::below2_lo)},
      {"check.below2_hi", check(&CheckThresholds::below2_hi)},
      {"check.ramanujan_lo", check(&CheckThresholds::ramanujan_lo)},
      {"check.ramanujan_hi", check(&CheckThresholds::ramanujan_hi)},
      {"check.corr_max", check(&CheckThresholds::corr_max)},
      {"check.p_min", check(&CheckThresholds::p_min)},
      {"check.sigma_max", check(&CheckThresholds::sigma_max)},
      {"check.core1_max", check(&CheckThresholds::core1_max)},
      {"check.gap_phi_max", check(&CheckThresholds::gap_phi_max)},
      {"check.ward_phi_max", check(&CheckThresholds::ward_phi_max)},
  };
  return table;
}

std::string join_errors(const std::vector<std::string>& errors) {
  std::string msg;
  for (const auto& e : errors) msg += (msg.empty() ? "" : "\n") + e;
  return msg;
}

}  // namespace

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Esd: return "esd";
    case ExperimentKind::Sce: return "sce";
    case ExperimentKind::Loop: return "loop";
    case ExperimentKind::Edge: return "edge";
    case ExperimentKind::Exch: return "exch";
    case ExperimentKind::Averaging: return "averaging";
  }
  return "unknown";
}

ExperimentKind parse_experiment(std::string_view s) {
  for (auto k : {ExperimentKind::Esd, ExperimentKind::Sce, ExperimentKind::Loop, ExperimentKind::Edge,
                 ExperimentKind::Exch, ExperimentKind::Averaging}) {
    if (s == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown experiment '" + std::string(s) + "'");
}

void ExperimentConfig::validate() const {
  std::vector<std::string> errors;
  if (samples < 1) errors.push_back("sampling.samples must be positive");
  if (kind == ExperimentKind::Edge && samples < 2) errors.push_back("edge statistics need at least two samples");
  if (kind == ExperimentKind::Exch && samples < 2) errors.push_back("exchangeability needs at least two samples");
  if (bins < 1) errors.push_back("esd.bins must be positive");
  if (!(frak_c > 0.0 && frak_c < 1.0)) errors.push_back("parameters.frak_c must lie in (0,1)");
  if (!(frak_g > 0.0 && frak_g < 1.0)) errors.push_back("parameters.frak_g must lie in (0,1)");
  if (d < 3) errors.push_back("graph.d must be at least 3");
  for (int ell : ells) {
    if (ell < 1) errors.push_back("resampling.ell entries must be >= 1");
  }
  try {
    statistic_by_name(statistic);
  } catch (const std::invalid_argument& e) {
    errors.push_back(std::string("resampling.statistic: ") + e.what());
  }
  for (int n : n_list) {
    SamplerConfig sc;
    sc.n = n;
    sc.d = d;
    sc.model = model;
    try {
      sc.validate();
    } catch (const std::invalid_argument& e) {
      errors.push_back("graph (n=" + std::to_string(n) + ", d=" + std::to_string(d) + ", model=" +
                       std::string(regedge::to_string(model)) + "): " + e.what());
      continue;
    }
    const bool uses_z = kind == ExperimentKind::Sce || kind == ExperimentKind::Loop ||
                        kind == ExperimentKind::Averaging;
    if (!uses_z || d < 3) continue;
    const double floor_eta = std::pow(static_cast<double>(n), -1.0 + frak_g);
    for (const auto& z : z_grid) {
      const double eta = z.at(n, d).eta();
      if (eta < floor_eta) {
        errors.push_back("z = " + z.to_string() + " at n=" + std::to_string(n) + " has Im z = " + fmt(eta) +
                         " below N^(-1+g) = " + fmt(floor_eta) + " (outside the spectral domain D)");
      }
    }
  }
  if (!errors.empty()) throw ConfigError(join_errors(errors));
}

std::filesystem::path ExperimentConfig::csv_path() const {
  return (output.empty() ? std::string(to_string(kind)) : output) + ".csv";
}

std::filesystem::path ExperimentConfig::manifest_path() const {
  return (output.empty() ? std::string(to_string(kind)) : output) + ".manifest.json";
}

void apply_settings(ExperimentConfig& cfg, const std::vector<std::pair<std::string, std::string>>& settings) {
  std::vector<std::string> errors;
  for (const auto& [key, value] : settings) {
    auto it = setters().find(key);
    if (it == setters().end()) {
      errors.push_back("unknown key '" + key + "'");
      continue;
    }
    try {
      it->second(cfg, value);
    } catch (const std::exception& e) {
      errors.push_back(key + ": " + e.what());
    }
  }
  if (!errors.empty()) throw ConfigError(join_errors(errors));
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::vector<std::string> errors;
  std::istringstream in(text);
  std::string raw, section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back(where + "unterminated section header");
        continue;
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back(where + "expected 'key = value'");
      continue;
    }
    const std::string key = std::string(trim(line.substr(0, eq)));
    const std::string full = section.empty() ? key : section + "." + key;
    const std::string value = std::string(trim(line.substr(eq + 1)));
    auto it = setters().find(full);
    if (it == setters().end()) {
      errors.push_back(where + "unknown key '" + full + "'");
      continue;
    }
    try {
      it->second(cfg, value);
    } catch (const std::exception& e) {
      errors.push_back(where + full + ": " + e.what());
    }
  }
  if (!errors.empty()) throw ConfigError(join_errors(errors));
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  ExperimentConfig cfg = parse_config_text(ss.str());
  if (cfg.output.empty()) {
    cfg.output = (path.parent_path() / path.stem()).string();
  }
  return cfg;
}

std::string canonical_text(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "experiment.name = " << to_string(c.kind) << '\n';
  os << "graph.n = " << join<int>(c.n_list, [](const int& v) { return std::to_string(v); }) << '\n';
  os << "graph.d = " << c.d << '\n';
  os << "graph.model = " << to_string(c.model) << '\n';
  os << "sampling.seed = " << c.seed << '\n';
  os << "sampling.samples = " << c.samples << '\n';
  os << "spectral.z_grid = " << join<ZRecipe>(c.z_grid, [](const ZRecipe& z) { return z.to_string(); }) << '\n';
  os << "resampling.ell = " << join<int>(c.ells, [](const int& v) { return std::to_string(v); }) << '\n';
  os << "resampling.R = " << c.R << '\n';
  os << "resampling.iso_radius = " << c.iso_radius << '\n';
  os << "resampling.statistic = " << c.statistic << '\n';
  os << "parameters.frak_c = " << fmt(c.frak_c) << '\n';
  os << "parameters.frak_g = " << fmt(c.frak_g) << '\n';
  os << "esd.bins = " << c.bins << '\n';
  const auto& k = c.check;
  os << "check.ks_max = " << fmt(k.ks_max) << '\n';
  os << "check.outside_max = " << fmt(k.outside_max) << '\n';
  os << "check.trend_min = " << fmt(k.trend_min) << '\n';
  os << "check.loop_ratio_max = " << fmt(k.loop_ratio_max) << '\n';
  os << "check.below2_lo = " << fmt(k.below2_lo) << '\n';
  os << "check.below2_hi = " << fmt(k.below2_hi) << '\n';
  os << "check.ramanujan_lo = " << fmt(k.ramanujan_lo) << '\n';
  os << "check.ramanujan_hi = " << fmt(k.ramanujan_hi) << '\n';
  os << "check.corr_max = " << fmt(k.corr_max) << '\n';
  os << "check.p_min = " << fmt(k.p_min) << '\n';
  os << "check.sigma_max = " << fmt(k.sigma_max) << '\n';
  os << "check.core1_max = " << fmt(k.core1_max) << '\n';
  os << "check.gap_phi_max = " << fmt(k.gap_phi_max) << '\n';
  os << "check.ward_phi_max = " << fmt(k.ward_phi_max) << '\n';
  return os.str();
}

std::string git_blob_hash(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("cannot allocate digest context");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

}  // namespace regedge
