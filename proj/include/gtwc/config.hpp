// Experiment configuration: plain-text `key = value` files plus
// command-line overrides (flags win).

#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtwc/baselines.hpp"
#include "gtwc/optimizer.hpp"
#include "gtwc/simulator.hpp"
#include "gtwc/types.hpp"

namespace gtwc {

struct ExperimentConfig {
  ChannelParams params{7, 1.0, 0.5};
  Targets targets{10.0, 10.0, 0.8};
  OptimizerConfig optimizer;
  SimConfig sim;
  std::string baseline = "two-way";  // open-loop | one-way | two-way
  FeedbackParity one_way_parity = FeedbackParity::even;
  std::vector<double> sweep_alpha_values;  // defaults to 0.35 : 0.05 : 0.95
  std::vector<int> sweep_n_values;         // defaults to 2..9
  std::uint64_t conjecture_samples = 1000;
  std::string out;  // CSV path; empty = stdout

  ExperimentConfig() {
    for (int k = 0; k <= 12; ++k) sweep_alpha_values.push_back(0.35 + 0.05 * k);
    for (int n = 2; n <= 9; ++n) sweep_n_values.push_back(n);
  }

  void validate() const {
    params.validate();
    targets.validate();
    optimizer.validate();
    sim.validate();
    if (baseline != "open-loop" && baseline != "one-way" && baseline != "two-way")
      throw std::invalid_argument("config: baseline must be open-loop, one-way or two-way");
    for (double a : sweep_alpha_values)
      if (!(a > 0.0) || !(a < 1.0)) throw std::invalid_argument("config: sweep alpha values must lie in (0,1)");
    for (int n : sweep_n_values)
      if (n < 2) throw std::invalid_argument("config: sweep n values must be >= 2");
    if (conjecture_samples < 1) throw std::invalid_argument("config: samples must be >= 1");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (...) {
    throw std::invalid_argument("config: bad numeric value for '" + key + "': " + v);
  }
}

inline long long parse_int(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (...) {
    throw std::invalid_argument("config: bad integer value for '" + key + "': " + v);
  }
}

inline std::uint64_t parse_u64(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const unsigned long long i = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (...) {
    throw std::invalid_argument("config: bad unsigned value for '" + key + "': " + v);
  }
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& v, const std::string& key, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse(item, key));
  }
  if (out.empty()) throw std::invalid_argument("config: empty list for '" + key + "'");
  return out;
}

}  // namespace detail

// Apply one key/value pair; shared by the config-file reader and the CLI.
inline void apply_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  using detail::parse_double;
  using detail::parse_int;
  using detail::parse_u64;
  if (key == "n") cfg.params.n = static_cast<int>(parse_int(value, key));
  else if (key == "sigma1_sq") cfg.params.sigma1_sq = parse_double(value, key);
  else if (key == "sigma2_sq") cfg.params.sigma2_sq = parse_double(value, key);
  else if (key == "eta1") cfg.targets.eta1 = parse_double(value, key);
  else if (key == "eta2") cfg.targets.eta2 = parse_double(value, key);
  else if (key == "alpha") cfg.targets.alpha = parse_double(value, key);
  else if (key == "restarts") cfg.optimizer.restarts = static_cast<int>(parse_int(value, key));
  else if (key == "seed") { cfg.optimizer.seed = parse_u64(value, key); cfg.sim.seed = cfg.optimizer.seed; }
  else if (key == "eps") cfg.optimizer.eps = parse_double(value, key);
  else if (key == "max_outer") cfg.optimizer.max_outer = static_cast<int>(parse_int(value, key));
  else if (key == "max_inner") cfg.optimizer.max_inner = static_cast<int>(parse_int(value, key));
  else if (key == "fp_random_starts") cfg.optimizer.fp.random_starts = static_cast<int>(parse_int(value, key));
  else if (key == "structured_inits") cfg.optimizer.structured_inits = parse_int(value, key) != 0;
  else if (key == "trials") cfg.sim.trials = parse_u64(value, key);
  else if (key == "batch_size") cfg.sim.batch_size = parse_u64(value, key);
  else if (key == "message_model") {
    if (value == "gaussian") cfg.sim.message_model = MessageModel::gaussian;
    else if (value == "binary") cfg.sim.message_model = MessageModel::binary;
    else throw std::invalid_argument("config: message_model must be gaussian or binary");
  } else if (key == "baseline") cfg.baseline = value;
  else if (key == "one_way_parity") {
    if (value == "even") cfg.one_way_parity = FeedbackParity::even;
    else if (value == "odd") cfg.one_way_parity = FeedbackParity::odd;
    else throw std::invalid_argument("config: one_way_parity must be even or odd");
  } else if (key == "samples") cfg.conjecture_samples = parse_u64(value, key);
  else if (key == "out") cfg.out = value;
  else if (key == "sweep_alpha_values")
    cfg.sweep_alpha_values = detail::parse_list<double>(value, key, parse_double);
  else if (key == "sweep_n_values")
    cfg.sweep_n_values = detail::parse_list<int>(
        value, key, [](const std::string& v, const std::string& k) { return static_cast<int>(parse_int(v, k)); });
  else
    throw std::invalid_argument("config: unknown key '" + key + "'");
}

inline void load_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) + " is not 'key = value'");
    apply_config_key(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
}

}  // namespace gtwc
