// Alternating two-way power optimizer.
//
// Structural facts used throughout (valid for alpha >= s2/(s1+s2)):
//  * User 2 never relays on the last use: f_{2,N} = 0.
//  * User 2 sends its message on the last use only: g2 = sqrt(eta2*s2) e_N,
//    which meets SNR2 = eta2 exactly for any structured F2 with f_{2,N} = 0.
// The remaining variables (q1, F1, F2-subdiagonal) are optimized by
// alternating two sub-problems:
//  1. F2 fixed: F1 has a closed column-wise form in q1, and q1 reduces to
//     a sum-of-fractional program on the SNR simplex (fractional.hpp).
//  2. q1, F1 fixed: each subdiagonal entry of F2 has a closed stationary
//     point for a surrogate in which p = Q1^{1/2} q1 is frozen per sweep;
//     entries are updated sequentially (Gauss-Seidel) until the objective
//     stalls.
// The true weighted objective can fluctuate across iterations (both
// sub-problems optimize surrogates), so the best iterate seen is tracked
// and returned.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gtwc/core_model.hpp"
#include "gtwc/fractional.hpp"
#include "gtwc/linalg.hpp"
#include "gtwc/parallel.hpp"
#include "gtwc/rng.hpp"
#include "gtwc/types.hpp"

namespace gtwc {

struct OptimizerConfig {
  double eps = 1e-3;   // stopping threshold for outer and inner loops
  int max_outer = 200;
  int max_inner = 200;
  int restarts = 30;   // random initializations of the F2 subdiagonal
  std::uint64_t seed = 0;
  FractionalSolverConfig fp;
  // Also try two deterministic initializations (all-zero and the
  // ones-on-even-uses relay pattern) so the returned solution never loses
  // to the no-feedback or fixed-relay schemes.
  bool structured_inits = true;

  void validate() const {
    if (!(eps > 0.0)) throw std::invalid_argument("OptimizerConfig: eps must be positive");
    if (max_outer < 1 || max_inner < 1 || restarts < 1)
      throw std::invalid_argument("OptimizerConfig: iteration caps and restarts must be >= 1");
  }
};

struct OptimReport {
  EncoderPair enc;
  DecoderPair decoders;
  std::vector<double> objective_trace;  // weighted objective after each outer iteration
  PowerReport report;
  int restart_index = -1;
  std::uint64_t seed = 0;
  bool converged = false;
};

struct ConjectureCheck {
  double nu_min = 0.0;
  bool lower_ok = false;
  bool upper_ok = false;
};

// Message vector for User 2 under the last-use-only placement.
inline Vector canonical_g2(const ChannelParams& params, const Targets& targets) {
  params.validate();
  targets.validate();
  if (!targets.prop2_applicable(params))
    throw std::invalid_argument(
        "canonical_g2: alpha = " + std::to_string(targets.alpha) +
        " is below the applicability threshold sigma2^2/(sigma1^2+sigma2^2) = " +
        std::to_string(targets.prop2_threshold(params)));
  Vector g2 = Vector::Zero(params.n);
  g2(params.n - 1) = std::sqrt(targets.eta2 * params.sigma2_sq);
  return g2;
}

// Zero the relay weight on the last channel use (always optimal).
inline Matrix enforce_prop1(Matrix f2) {
  if (!is_single_subdiagonal(f2)) throw std::invalid_argument("enforce_prop1: f2 must be structured");
  f2(f2.rows() - 1, f2.cols() - 2) = 0.0;
  return f2;
}

// Closed-form minimizer of E||x1||^2 over F1 for fixed (q1, F2): column 1
// is zero, and column i (1-based, i = 2..N-1) is
//   f_{1,i} = -(f_{2,i} s1 / (f_{2,i}^2 s1 + s2)) * q_{1,i-1}/(1+||h_i||^2) * h_i,
// where h_i = (q_{1,i+1}, ..., q_{1,N}). Each column is the exact
// stationary point of its decoupled convex cost.
inline Matrix solve_f1(const Vector& q1, const Matrix& f2, const ChannelParams& params) {
  params.validate();
  const auto n = static_cast<Eigen::Index>(params.n);
  if (q1.size() != n || f2.rows() != n) throw std::invalid_argument("solve_f1: shape mismatch");
  if (!is_single_subdiagonal(f2)) throw std::invalid_argument("solve_f1: f2 must be structured");
  if (f2(n - 1, n - 2) != 0.0) throw std::invalid_argument("solve_f1: last subdiagonal entry of f2 must be zero");
  const double s1 = params.sigma1_sq;
  const double s2 = params.sigma2_sq;
  Matrix f1 = Matrix::Zero(n, n);
  for (Eigen::Index i = 2; i <= n - 1; ++i) {  // 1-based column index
    const double f = f2(i - 1, i - 2);
    if (f == 0.0) continue;
    const auto h = q1.segment(i, n - i);  // q_{1,i+1}..q_{1,N}
    const double coef = -(f * s1 / (f * f * s1 + s2)) * q1(i - 2) / (1.0 + h.squaredNorm());
    f1.col(i - 1).segment(i, n - i) = coef * h;
  }
  return f1;
}

// q_{1,i} = sqrt(x_i), rescaled so ||q1||^2 equals the budget exactly.
inline Vector q1_from_x(const Vector& x, double eta1) {
  if ((x.array() < 0.0).any()) throw std::invalid_argument("q1_from_x: x must be nonnegative");
  const double sum = x.sum();
  if (!(sum > 0.0)) throw std::invalid_argument("q1_from_x: x must carry positive mass");
  return (x * (eta1 / sum)).cwiseSqrt();
}

// g1 = Q1^{1/2} q1 (whitened weights back to the physical encoder).
inline Vector g1_from_q1(const Vector& q1, const Matrix& q1_mat) {
  return matrix_sqrt_psd(q1_mat) * q1;
}

namespace detail {

// c_i: positive curvature of the weighted objective in f_{2,i} under the
// frozen-p surrogate, including the chain contributions of entries j != i.
inline double f2_curvature(int i, const Vector& q1, const Matrix& f1, const Vector& f2sub, const Vector& p,
                           const ChannelParams& params, double alpha) {
  const auto n = static_cast<Eigen::Index>(params.n);
  const double s1 = params.sigma1_sq;
  const double s2 = params.sigma2_sq;
  const auto h = q1.segment(i, n - i);
  const auto f1i = f1.col(i - 1).segment(i, n - i);
  const double hf = h.dot(f1i);
  double c = 2.0 * alpha * s1 * (hf * hf + f1i.squaredNorm()) +
             2.0 * (1.0 - alpha) * p(i - 2) * p(i - 2) + 2.0 * (1.0 - alpha) * s1;
  double chain = 0.0;
  for (Eigen::Index j = i + 1; j <= n - 1; ++j)  // f_{1,j,i}^2 f_{2,j+1}^2
    chain += f1(j - 1, i - 1) * f1(j - 1, i - 1) * f2sub(j - 1) * f2sub(j - 1);
  if (i >= 4)
    for (Eigen::Index k = 2; k <= i - 2; ++k)  // f_{1,i-1,k}^2 f_{2,k}^2
      chain += f1(i - 2, k - 1) * f1(i - 2, k - 1) * f2sub(k - 2) * f2sub(k - 2);
  c += 2.0 * (1.0 - alpha) * s1 * chain;
  if (i >= 3) {
    double relay = 0.0;
    for (Eigen::Index j = 1; j <= i - 2; ++j) relay += f1(i - 2, j - 1) * f1(i - 2, j - 1);
    c += 2.0 * (1.0 - alpha) * s2 * relay;
  }
  return c;
}

}  // namespace detail

// Derivative of the frozen-p surrogate objective with respect to f_{2,i}
// (1-based, i in 2..N-1), evaluated at the current f2sub:
//   2*alpha*s1*q_{1,i-1} h_i^T f_{1,i} + c_i f_{2,i}.
inline double f2_derivative_residual(int i, const Vector& q1, const Matrix& f1, const Vector& f2sub,
                                     const Vector& p, const ChannelParams& params, double alpha) {
  const auto n = static_cast<Eigen::Index>(params.n);
  if (i < 2 || i > n - 1) throw std::invalid_argument("f2_derivative_residual: index out of range");
  const auto h = q1.segment(i, n - i);
  const auto f1i = f1.col(i - 1).segment(i, n - i);
  const double grad0 = 2.0 * alpha * params.sigma1_sq * q1(i - 2) * h.dot(f1i);
  return grad0 + detail::f2_curvature(i, q1, f1, f2sub, p, params, alpha) * f2sub(i - 2);
}

// Stationary value of f_{2,i} given the other entries (c_i > 0 always).
inline double f2_entry_update(int i, const Vector& q1, const Matrix& f1, const Vector& f2sub, const Vector& p,
                              const ChannelParams& params, double alpha) {
  const auto n = static_cast<Eigen::Index>(params.n);
  if (i < 2 || i > n - 1) throw std::invalid_argument("f2_entry_update: index out of range");
  const auto h = q1.segment(i, n - i);
  const auto f1i = f1.col(i - 1).segment(i, n - i);
  const double num = 2.0 * alpha * params.sigma1_sq * q1(i - 2) * h.dot(f1i);
  return -num / detail::f2_curvature(i, q1, f1, f2sub, p, params, alpha);
}

// One sequential sweep over i = 2..N-1 with p frozen; later entries see
// the already-updated earlier ones.
inline Vector sweep_f2(const Vector& q1, const Matrix& f1, Vector f2sub, const Vector& p,
                       const ChannelParams& params, double alpha) {
  for (int i = 2; i <= params.n - 1; ++i)
    f2sub(i - 2) = f2_entry_update(i, q1, f1, f2sub, p, params, alpha);
  return f2sub;
}

namespace detail {

inline Vector current_p(const Vector& q1, const Matrix& f1, const Vector& f2sub, const ChannelParams& params) {
  const auto n = static_cast<Eigen::Index>(params.n);
  const Matrix f2 = f2_from_subdiag(f2sub);
  const Matrix l = Matrix::Identity(n, n) + f1 * f2;
  Matrix q1m = params.sigma1_sq * (l * l.transpose()) + params.sigma2_sq * (f1 * f1.transpose());
  return matrix_sqrt_psd(0.5 * (q1m + q1m.transpose())) * q1;
}

}  // namespace detail

// Inner loop of the second sub-problem: sweep the F2 subdiagonal until the
// weighted objective stalls (|change| <= eps) or the sweep cap is reached.
// p is refreshed from the current (F1, F2) at the start of every sweep.
inline Vector update_f2(const Vector& q1, const Matrix& f1, Vector f2sub, const ChannelParams& params,
                        const Targets& targets, const OptimizerConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(params.n);
  if (f2sub.size() != n - 1) throw std::invalid_argument("update_f2: f2 subdiagonal shape mismatch");
  if (f2sub(n - 2) != 0.0) throw std::invalid_argument("update_f2: last subdiagonal entry must be zero");
  if (n <= 2) return f2sub;  // no adjustable relay weights
  double nu_new = reduced_powers(q1, f1, f2_from_subdiag(f2sub), params, targets).weighted;
  for (int sweep = 0; sweep < cfg.max_inner; ++sweep) {
    const Vector p = detail::current_p(q1, f1, f2sub, params);
    f2sub = sweep_f2(q1, f1, std::move(f2sub), p, params, targets.alpha);
    const double nu_old = nu_new;
    nu_new = reduced_powers(q1, f1, f2_from_subdiag(f2sub), params, targets).weighted;
    if (std::abs(nu_new - nu_old) <= cfg.eps) break;
  }
  return f2sub;
}

namespace detail {

struct RestartState {
  Vector q1;
  Matrix f1;
  Vector f2sub;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> trace;
  bool converged = false;
};

inline RestartState run_restart(Vector f2sub, const ChannelParams& params, const Targets& targets,
                                const OptimizerConfig& cfg, std::uint64_t fp_seed_base) {
  RestartState best;
  Vector q1;
  Matrix f1;
  auto consider = [&](const Vector& q, const Matrix& f, const Vector& sub) {
    const double obj = reduced_powers(q, f, f2_from_subdiag(sub), params, targets).weighted;
    if (obj < best.objective) {
      best.objective = obj;
      best.q1 = q;
      best.f1 = f;
      best.f2sub = sub;
    }
    return obj;
  };

  double s_new = std::numeric_limits<double>::infinity();
  for (int outer = 0; outer < cfg.max_outer; ++outer) {
    // sub-problem 1: q1 via the fractional program, then closed-form F1
    const Matrix f2 = f2_from_subdiag(f2sub);
    const FractionalProgram fp = build_fractional_program(f2, params, targets);
    const FractionalSolution sol =
        solve_fractional(fp, cfg.fp, fp_seed_base + static_cast<std::uint64_t>(outer));
    q1 = q1_from_x(sol.x, targets.eta1);
    f1 = solve_f1(q1, f2, params);
    consider(q1, f1, f2sub);

    // sub-problem 2: relay weights
    f2sub = update_f2(q1, f1, std::move(f2sub), params, targets, cfg);

    const double s_old = s_new;
    s_new = consider(q1, f1, f2sub);
    best.trace.push_back(s_new);
    if (std::abs(s_new - s_old) <= cfg.eps) {
      best.converged = true;
      break;
    }
  }
  return best;
}

}  // namespace detail

// Bounds check on the smallest eigenvalue of
//   B = alpha S F1^T F1 S + (1-alpha) S (I + F2 F1)^T (I + F2 F1) S,
// S = Q2^{1/2}, which governs User 2's message placement:
//   min(alpha*s1, (1-alpha)*s2) <= nu_min(B) <= (1-alpha)*s2.
// The bounds are exercised for structured F2 with a zero last subdiagonal
// entry (the regime the optimizer operates in); the upper bound does not
// survive a nonzero f_{2,N}.
inline ConjectureCheck check_conjecture(const Matrix& f1, const Matrix& f2, const ChannelParams& params,
                                        double alpha, double tol = 1e-9) {
  params.validate();
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw std::invalid_argument("check_conjecture: alpha must lie in (0,1)");
  const auto n = static_cast<Eigen::Index>(params.n);
  if (f1.rows() != n || f2.rows() != n) throw std::invalid_argument("check_conjecture: shape mismatch");
  if (!is_strictly_lower(f1) || !is_strictly_lower(f2))
    throw std::invalid_argument("check_conjecture: feedback matrices must be strictly lower triangular");
  Matrix q2 = params.sigma1_sq * (f2 * f2.transpose());
  q2.diagonal().array() += params.sigma2_sq;
  const Matrix s = matrix_sqrt_psd(0.5 * (q2 + q2.transpose()));
  const Matrix l = Matrix::Identity(n, n) + f2 * f1;
  const Matrix b = alpha * (s * f1.transpose() * f1 * s) + (1.0 - alpha) * (s * l.transpose() * l * s);
  ConjectureCheck chk;
  chk.nu_min = smallest_eigenvalue(b);
  const double lower = std::min(alpha * params.sigma1_sq, (1.0 - alpha) * params.sigma2_sq);
  const double upper = (1.0 - alpha) * params.sigma2_sq;
  chk.lower_ok = chk.nu_min >= lower - tol;
  chk.upper_ok = chk.nu_min <= upper + tol;
  return chk;
}

// Full multi-start optimization. Restart r draws its F2 subdiagonal
// entries from U(0,1) on the substream (seed, r); with structured_inits
// two deterministic starts (all-zero, ones-on-even-uses) are appended.
// Returns the best feasible iterate seen across all restarts.
inline OptimReport two_way_optimize(const ChannelParams& params, const Targets& targets,
                                    const OptimizerConfig& cfg) {
  params.validate();
  targets.validate();
  cfg.validate();
  if (!targets.prop2_applicable(params))
    throw std::invalid_argument(
        "two_way_optimize: alpha = " + std::to_string(targets.alpha) +
        " is below the applicability threshold sigma2^2/(sigma1^2+sigma2^2) = " +
        std::to_string(targets.prop2_threshold(params)));
  const auto n = static_cast<Eigen::Index>(params.n);

  std::vector<Vector> inits;
  for (int r = 0; r < cfg.restarts; ++r) {
    RandomStream rs = RandomStream::derive(cfg.seed, static_cast<std::uint64_t>(r));
    Vector sub = Vector::Zero(n - 1);
    for (Eigen::Index i = 2; i <= n - 1; ++i) sub(i - 2) = rs.uniform01();
    inits.push_back(std::move(sub));
  }
  if (cfg.structured_inits) {
    inits.push_back(Vector::Zero(n - 1));
    Vector evens = Vector::Zero(n - 1);
    for (Eigen::Index i = 2; i <= n - 1; ++i)
      if (i % 2 == 0) evens(i - 2) = 1.0;
    inits.push_back(std::move(evens));
  }

  std::vector<detail::RestartState> results(inits.size());
  parallel_for(inits.size(), [&](std::size_t r) {
    // distinct deterministic seed base per restart for the fractional solver
    const std::uint64_t fp_seed = cfg.seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(r) + 1));
    results[r] = detail::run_restart(inits[r], params, targets, cfg, fp_seed);
  });

  std::size_t win = 0;
  for (std::size_t r = 1; r < results.size(); ++r)
    if (results[r].objective < results[win].objective) win = r;
  const detail::RestartState& w = results[win];

  OptimReport rep;
  rep.restart_index = static_cast<int>(win);
  rep.seed = cfg.seed;
  rep.converged = w.converged;
  rep.objective_trace = w.trace;

  EncoderPair enc;
  enc.f2 = f2_from_subdiag(w.f2sub);
  enc.f2_structured = true;
  enc.f1 = w.f1;
  enc.g2 = canonical_g2(params, targets);
  const Matrix l = Matrix::Identity(n, n) + enc.f1 * enc.f2;
  Matrix q1m = params.sigma1_sq * (l * l.transpose()) + params.sigma2_sq * (enc.f1 * enc.f1.transpose());
  enc.g1 = g1_from_q1(w.q1, 0.5 * (q1m + q1m.transpose()));
  enc.validate(params);
  rep.enc = enc;
  rep.decoders = optimal_combiners(enc, params);
  rep.report = transmit_powers(enc, params, targets.alpha);
  return rep;
}

}  // namespace gtwc
