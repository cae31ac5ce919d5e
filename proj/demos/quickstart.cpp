// Minimal library walkthrough: optimize the default configuration, then
// cross-check the analytic powers and SNRs against a Monte-Carlo run.

#include <cstdio>

#include "gtwc/gtwc.hpp"

int main() {
  const gtwc::ChannelParams params{7, 1.0, 0.5};
  const gtwc::Targets targets{10.0, 10.0, 0.8};

  gtwc::OptimizerConfig opt;
  opt.restarts = 30;
  opt.seed = 1;

  const gtwc::OptimReport rep = gtwc::two_way_optimize(params, targets, opt);
  const double open = gtwc::open_loop_objective(params, targets);
  std::printf("weighted objective : %.6f (open loop %.3f, %.1f%% lower)\n", rep.report.weighted, open,
              100.0 * (open - rep.report.weighted) / open);
  std::printf("analytic SNRs      : %.9f / %.9f\n", rep.report.snr1, rep.report.snr2);

  gtwc::SimConfig sim;
  sim.trials = 200000;
  sim.seed = 7;
  const gtwc::SimulationReport mc = gtwc::run_exchange(rep.enc, params, sim);
  std::printf("Monte-Carlo powers : p1 %.4f (analytic %.4f), p2 %.4f (analytic %.4f)\n", mc.emp_p1,
              rep.report.p1, mc.emp_p2, rep.report.p2);
  std::printf("Monte-Carlo SNRs   : %.3f / %.3f\n", mc.emp_snr1, mc.emp_snr2);
  return 0;
}
