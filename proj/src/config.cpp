#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "fmab/harness.hpp"

namespace fmab {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "experiment", "repeats", "seed", "out", "threads", "write_traces", "K", "dim", "T", "T_max", "budgets",
      "eps", "delta", "noise", "sigma", "noise_scale", "value_sigma", "samples_per_step", "optimizer", "schedule",
      "rate_scale", "gamma", "lipschitz", "minima", "minima_step", "pieces", "bound", "far", "heuristic",
      "check_invariants", "allocators", "eta", "C", "block_size", "step_power", "class", "M", "L", "mu", "R",
      "kappa", "constant_scale", "gaps", "A", "alpha", "stochastic_sigma", "T_grid"};
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kConfiguration, "key '" + key + "': not a number: '" + text + "'");
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kConfiguration, "line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (cfg.has(key)) throw Error(ErrorCode::kConfiguration, "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    cfg.set(key, trim(line.substr(eq + 1)));
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (!known_keys().count(key)) throw Error(ErrorCode::kConfiguration, "unknown key '" + key + "'");
  values_[key] = value;
}

std::string ExperimentConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_double(key, it->second);
}

std::int64_t ExperimentConfig::get_int(const std::string& key, std::int64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const double v = parse_double(key, it->second);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) {
    throw Error(ErrorCode::kConfiguration, "key '" + key + "': not an integer: '" + it->second + "'");
  }
  return static_cast<std::int64_t>(v);
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(ErrorCode::kConfiguration, "key '" + key + "': not a boolean: '" + v + "'");
}

std::vector<double> ExperimentConfig::get_list(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(it->second)) out.push_back(parse_double(key, item));
  if (out.empty()) throw Error(ErrorCode::kConfiguration, "key '" + key + "': empty list");
  return out;
}

std::vector<std::string> ExperimentConfig::get_names(const std::string& key,
                                                     const std::vector<std::string>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  auto out = split_list(it->second);
  if (out.empty()) throw Error(ErrorCode::kConfiguration, "key '" + key + "': empty list");
  return out;
}

std::string ExperimentConfig::experiment() const {
  const std::string name = get_string("experiment", "");
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw Error(ErrorCode::kConfiguration, "unknown or missing experiment '" + name + "'");
  }
  return name;
}

int ExperimentConfig::repeats() const {
  const auto r = get_int("repeats", 10);
  if (r < 1) throw Error(ErrorCode::kConfiguration, "repeats must be >= 1");
  return static_cast<int>(r);
}

std::uint64_t ExperimentConfig::base_seed() const {
  const auto s = get_int("seed", 1);
  if (s < 0) throw Error(ErrorCode::kConfiguration, "seed must be >= 0");
  return static_cast<std::uint64_t>(s);
}

nlohmann::json ExperimentConfig::echo() const {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [k, v] : values_) doc[k] = v;
  return doc;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"smooth_det",       "nonsmooth_det", "smooth_stoch", "bfi_synthetic",
                                                 "baseline_compare", "mab_reduction", "bounds_report"};
  return names;
}

// ---------------------------------------------------------------------------

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw Error(ErrorCode::kInvalidArgument, "quantile of an empty sample");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

MetricSummary summarize(const std::vector<double>& xs) {
  if (xs.empty()) throw Error(ErrorCode::kInvalidArgument, "summary of an empty sample");
  MetricSummary m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  m.q10 = quantile(xs, 0.1);
  m.q90 = quantile(xs, 0.9);
  return m;
}

void SummaryStats::finalize() {
  metrics.clear();
  for (const auto& [name, xs] : per_repeat) {
    if (static_cast<int>(xs.size()) != repeats) {
      throw Error(ErrorCode::kInvalidArgument, "metric '" + name + "' does not have one value per repeat");
    }
    metrics[name] = summarize(xs);
  }
}

nlohmann::json SummaryStats::to_json() const {
  nlohmann::json doc;
  doc["experiment"] = experiment;
  doc["repeats"] = repeats;
  nlohmann::json ms = nlohmann::json::object();
  for (const auto& [name, m] : metrics) {
    ms[name] = {{"mean", m.mean}, {"std", m.std}, {"q10", m.q10}, {"q90", m.q90}, {"values", per_repeat.at(name)}};
  }
  doc["metrics"] = ms;
  doc["extra"] = extra;
  return doc;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIo, "sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

void write_artifact(const std::filesystem::path& out_dir, const std::string& rel, const std::string& bytes,
                    std::vector<Artifact>& artifacts) {
  const auto path = out_dir / rel;
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create '" + path.parent_path().string() + "': " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << bytes;
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path.string() + "'");
  artifacts.push_back({rel, sha256_hex(bytes)});
}

}  // namespace fmab
