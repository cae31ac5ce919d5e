// gtwc command-line front end.
//
// Subcommands: optimize | sweep-alpha | sweep-n | profile | simulate |
// check-conjecture. Settings come from built-in defaults, then an optional
// `--config key=value` file, then command-line flags (flags win). The
// GTWC_THREADS environment variable caps worker parallelism.

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include "gtwc/gtwc.hpp"

namespace {

int run_with_output(const gtwc::ExperimentConfig& cfg,
                    const std::function<int(const gtwc::ExperimentConfig&, std::ostream&)>& cmd) {
  if (cfg.out.empty()) return cmd(cfg, std::cout);
  std::ofstream out(cfg.out);
  if (!out) {
    std::cerr << "error: cannot open output file " << cfg.out << "\n";
    return 1;
  }
  return cmd(cfg, out);
}

}  // namespace

int main(int argc, char** argv) {
  gtwc::ExperimentConfig cfg;

  // The config file is applied before flag overrides, so find it first.
  std::string config_path;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) config_path = argv[i + 1];
    else if (a.rfind("--config=", 0) == 0) config_path = a.substr(9);
  }
  if (!config_path.empty()) {
    try {
      gtwc::load_config_file(cfg, config_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }

  CLI::App app{"Linear coding for Gaussian two-way channels: optimization, baselines, simulation"};
  app.require_subcommand(1);

  std::function<int(const gtwc::ExperimentConfig&, std::ostream&)> selected;

  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--config", "key = value settings file (applied before flags)")
        ->expected(1)
        ->each([](const std::string&) {});  // value consumed by the pre-scan
    auto bind = [&cfg, sub](const std::string& flag, const std::string& key, const std::string& desc) {
      sub->add_option(flag, desc)->expected(1)->each([&cfg, key](const std::string& v) {
        gtwc::apply_config_key(cfg, key, v);
      });
    };
    bind("--n", "n", "blocklength (channel uses)");
    bind("--sigma1-sq", "sigma1_sq", "noise variance, User1 -> User2 link");
    bind("--sigma2-sq", "sigma2_sq", "noise variance, User2 -> User1 link");
    bind("--eta1", "eta1", "target SNR for User 1's message");
    bind("--eta2", "eta2", "target SNR for User 2's message");
    bind("--alpha", "alpha", "weight on User 1's power in the objective");
    bind("--restarts", "restarts", "random optimizer initializations");
    bind("--seed", "seed", "base seed for optimizer and simulator streams");
    bind("--eps", "eps", "stopping threshold for the alternating loops");
    bind("--trials", "trials", "Monte-Carlo trials");
    bind("--baseline", "baseline", "scheme: open-loop | one-way | two-way");
    bind("--out", "out", "CSV output path (default: stdout)");
    bind("--samples", "samples", "sample count for check-conjecture");
    bind("--batch-size", "batch_size", "Monte-Carlo batch size");
    bind("--message-model", "message_model", "gaussian | binary");
    bind("--one-way-parity", "one_way_parity", "relay slots of the one-way baseline: even | odd");
  };

  struct Cmd {
    const char* name;
    const char* desc;
    int (*fn)(const gtwc::ExperimentConfig&, std::ostream&);
  };
  const Cmd cmds[] = {
      {"optimize", "optimize one scheme and emit its coefficients and powers", gtwc::cmd_optimize},
      {"sweep-alpha", "objective of every scheme over the alpha grid", gtwc::cmd_sweep_alpha},
      {"sweep-n", "objective of every scheme over the blocklength grid", gtwc::cmd_sweep_n},
      {"profile", "per-channel-use power breakdown of the winning scheme", gtwc::cmd_profile},
      {"simulate", "Monte-Carlo validation run of the selected scheme", gtwc::cmd_simulate},
      {"check-conjecture", "sample the eigenvalue bounds over random feedback pairs", gtwc::cmd_check_conjecture},
  };
  for (const Cmd& c : cmds) {
    CLI::App* sub = app.add_subcommand(c.name, c.desc);
    add_common(sub);
    sub->callback([&selected, fn = c.fn] { selected = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    return run_with_output(cfg, selected);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
