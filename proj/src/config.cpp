#include "robust_pr/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

namespace robust_pr {

ConfigError::ConfigError(const std::string& source_, int line_, const std::string& message_)
    : std::runtime_error(line_ > 0 ? source_ + ":" + std::to_string(line_) + ": " + message_
                                   : source_ + ": " + message_),
      source(source_),
      line(line_),
      message(message_) {}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw std::invalid_argument("empty list entry");
    out.push_back(item);
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

double to_double(const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw std::invalid_argument("'" + text + "' is not a finite number");
  return v;
}

template <typename Int>
Int to_int(const std::string& text) {
  Int v{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("'" + text + "' is not an integer");
  return v;
}

bool to_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw std::invalid_argument("'" + text + "' is not a boolean");
}

std::vector<double> parse_grid(const std::string& value) {
  if (value.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(trim(item));
    if (parts.size() != 3) throw std::invalid_argument("range must be start:step:stop");
    const double start = to_double(parts[0]);
    const double step = to_double(parts[1]);
    const double stop = to_double(parts[2]);
    if (!(step > 0.0) || stop < start) throw std::invalid_argument("range needs step > 0 and stop >= start");
    std::vector<double> grid;
    const long count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) grid.push_back(start + static_cast<double>(i) * step);
    return grid;
  }
  std::vector<double> grid;
  for (const auto& item : split_list(value)) grid.push_back(to_double(item));
  return grid;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "n", "m_over_n", "model", "algorithms", "snr_grid_db", "trials", "master_seed", "noise", "noise.c2",
      "noise.variance_ratio", "solver_options.rho", "solver_options.max_outer_iters", "solver_options.outer_tol",
      "solver_options.inner_iters", "solver_options.wf_tau0", "solver_options.wf_mu_max", "record_traces"};
  return keys;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  std::map<std::string, std::pair<std::string, int>> entries;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line_no, "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError(source, line_no, "missing key");
    if (!known_keys().contains(key)) throw ConfigError(source, line_no, "unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(source, line_no, "missing value for '" + key + "'");
    if (auto it = entries.find(key); it != entries.end())
      throw ConfigError(source, line_no,
                        "duplicate key '" + key + "' (first set on line " + std::to_string(it->second.second) + ")");
    entries.emplace(key, std::make_pair(value, line_no));
  }

  for (const char* required : {"model", "algorithms", "snr_grid_db"})
    if (!entries.contains(required)) throw ConfigError(source, 0, std::string("missing required key '") + required + "'");

  ExperimentConfig cfg;
  const auto line_of = [&](const std::string& key) { return entries.at(key).second; };
  const auto with = [&](const std::string& key, auto&& apply) {
    auto it = entries.find(key);
    if (it == entries.end()) return;
    try {
      apply(it->second.first);
    } catch (const std::exception& e) {
      throw ConfigError(source, it->second.second, key + ": " + e.what());
    }
  };

  with("model", [&](const std::string& v) { cfg.model = parse_observation_kind(v); });
  cfg.solver_options = SolverOptions::defaults_for(cfg.model);
  with("n", [&](const std::string& v) { cfg.n = to_int<int>(v); });
  with("m_over_n", [&](const std::string& v) { cfg.m_over_n = to_double(v); });
  with("algorithms", [&](const std::string& v) {
    for (const auto& item : split_list(v)) cfg.algorithms.push_back(parse_algorithm(item));
  });
  with("snr_grid_db", [&](const std::string& v) { cfg.snr_grid_db = parse_grid(v); });
  with("trials", [&](const std::string& v) { cfg.trials = to_int<int>(v); });
  with("master_seed", [&](const std::string& v) { cfg.master_seed = to_int<std::uint64_t>(v); });
  with("noise", [&](const std::string& v) {
    if (v == "none") cfg.noise.reset();
    else if (v == "gmm") cfg.noise = NoiseSpec{};
    else throw std::invalid_argument("expected 'gmm' or 'none'");
  });
  const auto noise_field = [&](double NoiseSpec::*field) {
    return [&cfg, field](const std::string& v) {
      if (!cfg.noise) throw std::invalid_argument("set while noise = none");
      (*cfg.noise).*field = to_double(v);
    };
  };
  with("noise.c2", noise_field(&NoiseSpec::c2));
  with("noise.variance_ratio", noise_field(&NoiseSpec::variance_ratio));
  auto& so = cfg.solver_options;
  with("solver_options.rho", [&](const std::string& v) { so.rho = to_double(v); });
  with("solver_options.max_outer_iters", [&](const std::string& v) { so.max_outer_iters = to_int<int>(v); });
  with("solver_options.outer_tol", [&](const std::string& v) { so.outer_tol = to_double(v); });
  with("solver_options.inner_iters", [&](const std::string& v) { so.inner_iters = to_int<int>(v); });
  with("solver_options.wf_tau0", [&](const std::string& v) { so.wf_step_params.tau0 = to_double(v); });
  with("solver_options.wf_mu_max", [&](const std::string& v) { so.wf_step_params.mu_max = to_double(v); });
  with("record_traces", [&](const std::string& v) { cfg.record_traces = to_bool(v); });

  // Map semantic checks back to the line of the key they concern.
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    int line = 0;
    for (const auto& [key, entry] : entries) {
      const std::string field = key.substr(key.find('.') + 1);
      if (msg.rfind(key, 0) == 0 || msg.rfind(field + " ", 0) == 0) {
        line = entry.second;
        break;
      }
    }
    if (line == 0 && (msg.find("WF") != std::string::npos || msg.find("GS") != std::string::npos ||
                      msg.find("solver twice") != std::string::npos))
      line = line_of("algorithms");
    throw ConfigError(source, line, msg);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open config file");
  return parse_config(in, path.string());
}

}  // namespace robust_pr
