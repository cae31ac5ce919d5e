// Reference schemes the two-way optimizer is compared against.

#pragma once

#include <stdexcept>

#include "gtwc/core_model.hpp"
#include "gtwc/optimizer.hpp"
#include "gtwc/types.hpp"

namespace gtwc {

enum class BaselineKind { open_loop, one_way };

// Which channel uses carry User 2's relayed samples in the one-way scheme.
enum class FeedbackParity { even, odd };

// No feedback at all: each user sends its own message with the energy that
// meets its SNR target. User 1's energy goes on the first use, User 2's on
// the last (any placement is equivalent when F1 = F2 = 0; this one is the
// canonical deterministic choice).
inline EncoderPair open_loop(const ChannelParams& params, const Targets& targets) {
  params.validate();
  targets.validate();
  EncoderPair enc;
  enc.g1 = Vector::Zero(params.n);
  enc.g1(0) = std::sqrt(targets.eta1 * params.sigma1_sq);
  enc.g2 = Vector::Zero(params.n);
  enc.g2(params.n - 1) = std::sqrt(targets.eta2 * params.sigma2_sq);
  enc.f1 = Matrix::Zero(params.n, params.n);
  enc.f2 = Matrix::Zero(params.n, params.n);
  enc.f2_structured = true;
  return enc;
}

inline double open_loop_objective(const ChannelParams& params, const Targets& targets) {
  return targets.alpha * targets.eta1 * params.sigma1_sq +
         (1.0 - targets.alpha) * targets.eta2 * params.sigma2_sq;
}

struct OneWayResult {
  EncoderPair enc;
  PowerReport report;
  bool used_feedback = false;   // false when the no-feedback member won
  bool fell_back_small_n = false;  // N < 3 leaves no relay slot at all
};

// One-way-optimization baseline: User 2 relays its latest reception on
// every use of the chosen parity without scaling (unit relay weights) and
// sends its message on the last use; User 1's code is then optimized for
// its own transmit power alone, with its message energy restricted to the
// uses that enjoy a relay slot (plus the last use). The scheme family
// includes the no-feedback member, so the weighted objective is compared
// against open loop and the better of the two is returned.
inline OneWayResult one_way_baseline(const ChannelParams& params, const Targets& targets,
                                     const OptimizerConfig& cfg, FeedbackParity parity = FeedbackParity::even) {
  params.validate();
  targets.validate();
  OneWayResult res;
  if (params.n < 3) {
    res.enc = open_loop(params, targets);
    res.report = transmit_powers(res.enc, params, targets.alpha);
    res.fell_back_small_n = true;
    return res;
  }
  if (!targets.prop2_applicable(params))
    throw std::invalid_argument("one_way_baseline: alpha below the last-use message-placement threshold");

  const auto n = static_cast<Eigen::Index>(params.n);
  const int want = parity == FeedbackParity::even ? 0 : 1;
  Vector sub = Vector::Zero(n - 1);
  for (Eigen::Index i = 2; i <= n - 1; ++i)
    if (i % 2 == want) sub(i - 2) = 1.0;
  const Matrix f2 = f2_from_subdiag(sub);

  // message slots: every use followed by a relay slot, plus the last use
  std::vector<int> support;
  for (int p = 1; p < params.n; ++p)
    if (sub(p - 1) != 0.0) support.push_back(p - 1);
  support.push_back(params.n - 1);

  const FractionalProgram fp = build_fractional_program(f2, params, targets);
  const FractionalSolution sol = solve_fractional(fp, cfg.fp, cfg.seed ^ 0x6F6E6577ULL, &support);
  const Vector q1 = q1_from_x(sol.x, targets.eta1);
  const Matrix f1 = solve_f1(q1, f2, params);

  EncoderPair enc;
  enc.f1 = f1;
  enc.f2 = f2;
  enc.f2_structured = true;
  enc.g2 = canonical_g2(params, targets);
  const Matrix l = Matrix::Identity(n, n) + f1 * f2;
  Matrix q1m = params.sigma1_sq * (l * l.transpose()) + params.sigma2_sq * (f1 * f1.transpose());
  enc.g1 = g1_from_q1(q1, 0.5 * (q1m + q1m.transpose()));
  enc.validate(params);
  PowerReport rep = transmit_powers(enc, params, targets.alpha);

  if (rep.weighted <= open_loop_objective(params, targets)) {
    res.enc = enc;
    res.report = rep;
    res.used_feedback = true;
  } else {
    res.enc = open_loop(params, targets);
    res.report = transmit_powers(res.enc, params, targets.alpha);
  }
  return res;
}

}  // namespace gtwc
