// Sum-of-linear-fractional program for the whitened message energies of
// User 1.
//
// With x_i = q_{1,i}^2, minimizing E||x1||^2 over the SNR sphere
// ||q1||^2 = eta1 (after substituting the closed-form optimal F1) becomes
//
//     min  sum_i  u_i^T x / (1 + m_i^T x)
//     s.t. 1^T x = eta1,  x >= 0.
//
// For i <= N-2, u_i has a single nonzero at position i (1-based) with the
// feedback-assisted coefficient f_{2,i+1}^2 s1^2 / (f_{2,i+1}^2 s1 + s2),
// and m_i indicates positions i+2..N (the later energies that dilute the
// fraction). The last group collects the non-fractional residual costs:
// u_{N-1} = [s1*s2/(f_{2,2}^2 s1 + s2), ..., s1, s1], m_{N-1} = 0.
//
// Every denominator is >= 1 on the feasible set, so the objective is
// smooth there; it is nonconvex in general. The solver runs projected
// gradient descent with Armijo backtracking from several starts and keeps
// the best, which is enough at these dimensions (N <= ~10).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gtwc/rng.hpp"
#include "gtwc/types.hpp"

namespace gtwc {

struct FractionalProgram {
  std::vector<Vector> u;  // N-1 nonnegative vectors
  std::vector<Vector> m;  // N-1 {0,1} vectors
  double budget = 0.0;    // eta1

  Eigen::Index dim() const { return u.empty() ? 0 : u.front().size(); }

  void validate() const {
    if (u.size() != m.size() || u.empty()) throw std::invalid_argument("FractionalProgram: u/m size mismatch");
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (u[i].size() != dim() || m[i].size() != dim())
        throw std::invalid_argument("FractionalProgram: inconsistent dimensions");
      if ((u[i].array() < 0.0).any()) throw std::invalid_argument("FractionalProgram: u must be nonnegative");
      for (Eigen::Index k = 0; k < m[i].size(); ++k)
        if (m[i](k) != 0.0 && m[i](k) != 1.0)
          throw std::invalid_argument("FractionalProgram: m must be 0/1 valued");
    }
    if (!(budget > 0.0)) throw std::invalid_argument("FractionalProgram: budget must be positive");
  }
};

struct FractionalSolverConfig {
  int max_iters = 5000;
  double tol = 1e-9;      // projected-gradient norm declared stationary
  int random_starts = 8;  // interior starts in addition to the deterministic ones
};

struct FractionalSolution {
  Vector x;
  double objective = 0.0;
  double stationarity = 0.0;  // ||x - P(x - grad)|| at the returned point
  bool converged = false;
};

inline double fp_objective(const FractionalProgram& fp, const Vector& x) {
  double v = 0.0;
  for (std::size_t i = 0; i < fp.u.size(); ++i) v += fp.u[i].dot(x) / (1.0 + fp.m[i].dot(x));
  return v;
}

inline Vector fp_gradient(const FractionalProgram& fp, const Vector& x) {
  Vector g = Vector::Zero(x.size());
  for (std::size_t i = 0; i < fp.u.size(); ++i) {
    const double d = 1.0 + fp.m[i].dot(x);
    g += fp.u[i] / d - (fp.u[i].dot(x) / (d * d)) * fp.m[i];
  }
  return g;
}

// Euclidean projection onto {x >= 0, 1^T x = budget}.
inline Vector project_simplex(const Vector& v, double budget) {
  const Eigen::Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, tau = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    css += u[k];
    const double t = (css - budget) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) tau = t;  // deepest feasible water line
  }
  return (v.array() - tau).max(0.0).matrix();
}

// Build the program from a structured F2 whose last subdiagonal entry is
// zero. f2 is the full matrix; only its first subdiagonal is read.
inline FractionalProgram build_fractional_program(const Matrix& f2, const ChannelParams& params,
                                                  const Targets& targets) {
  params.validate();
  targets.validate();
  const auto n = static_cast<Eigen::Index>(params.n);
  if (f2.rows() != n || f2.cols() != n) throw std::invalid_argument("build_fractional_program: f2 shape mismatch");
  if (!is_single_subdiagonal(f2))
    throw std::invalid_argument("build_fractional_program: f2 must be single-subdiagonal structured");
  if (f2(n - 1, n - 2) != 0.0)
    throw std::invalid_argument("build_fractional_program: last subdiagonal entry of f2 must be zero");
  const double s1 = params.sigma1_sq;
  const double s2 = params.sigma2_sq;

  FractionalProgram fp;
  fp.budget = targets.eta1;
  for (Eigen::Index i = 1; i <= n - 2; ++i) {  // 1-based group index
    const double f = f2(i, i - 1);             // subdiagonal weight applied to reception i
    Vector u = Vector::Zero(n);
    u(i - 1) = f * f * s1 * s1 / (f * f * s1 + s2);
    Vector mm = Vector::Zero(n);
    for (Eigen::Index k = i + 1; k < n; ++k) mm(k) = 1.0;  // positions i+2..N, 1-based
    fp.u.push_back(std::move(u));
    fp.m.push_back(std::move(mm));
  }
  Vector last(n);
  for (Eigen::Index j = 1; j <= n - 2; ++j) {
    const double f = f2(j, j - 1);
    last(j - 1) = s1 * s2 / (f * f * s1 + s2);
  }
  last(n - 2) = s1;
  last(n - 1) = s1;
  fp.u.push_back(std::move(last));
  fp.m.push_back(Vector::Zero(n));
  return fp;
}

namespace detail {

struct PgResult {
  Vector x;
  double f;
  double pg_norm;
};

inline PgResult projected_gradient(const FractionalProgram& fp, Vector x, double budget,
                                   const FractionalSolverConfig& cfg) {
  x = project_simplex(x, budget);
  double f = fp_objective(fp, x);
  double step = 1.0;
  double pg_norm = 0.0;
  for (int it = 0; it < cfg.max_iters; ++it) {
    const Vector g = fp_gradient(fp, x);
    pg_norm = (x - project_simplex(x - g, budget)).norm();
    if (pg_norm <= cfg.tol) break;
    Vector xn;
    double fn = f;
    for (;;) {
      xn = project_simplex(x - step * g, budget);
      fn = fp_objective(fp, xn);
      if (fn <= f + 1e-4 * g.dot(xn - x) || step < 1e-14) break;
      step *= 0.5;
    }
    if (fn < f) {
      x = std::move(xn);
      f = fn;
      step = std::min(step * 1.3, 1e6);
    } else {
      step *= 0.5;
      if (step < 1e-14) break;
    }
  }
  return {std::move(x), f, pg_norm};
}

}  // namespace detail

// Minimize the program over the scaled simplex. `support` optionally
// restricts the optimization to a subset of coordinates (all others pinned
// to zero); indices are 0-based and must include the last coordinate of
// any budget-bearing start. Deterministic for a fixed seed.
inline FractionalSolution solve_fractional(const FractionalProgram& fp, const FractionalSolverConfig& cfg,
                                           std::uint64_t seed, const std::vector<int>* support = nullptr) {
  fp.validate();
  const Eigen::Index n = fp.dim();

  std::vector<int> idx;
  if (support) {
    idx = *support;
    if (idx.empty()) throw std::invalid_argument("solve_fractional: empty support");
    for (int k : idx)
      if (k < 0 || k >= n) throw std::invalid_argument("solve_fractional: support index out of range");
  } else {
    idx.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) idx[k] = static_cast<int>(k);
  }
  const auto r = static_cast<Eigen::Index>(idx.size());

  FractionalProgram red;
  red.budget = fp.budget;
  for (std::size_t i = 0; i < fp.u.size(); ++i) {
    Vector u(r), m(r);
    for (Eigen::Index k = 0; k < r; ++k) {
      u(k) = fp.u[i](idx[k]);
      m(k) = fp.m[i](idx[k]);
    }
    red.u.push_back(std::move(u));
    red.m.push_back(std::move(m));
  }

  std::vector<Vector> starts;
  starts.push_back(Vector::Constant(r, fp.budget / static_cast<double>(r)));
  Vector last = Vector::Zero(r);
  last(r - 1) = fp.budget;  // all mass on the latest use: known upper-bound certificate
  starts.push_back(std::move(last));
  RandomStream rs = RandomStream::derive(seed, 0x66726163);
  for (int s = 0; s < cfg.random_starts; ++s) {
    Vector w(r);
    for (Eigen::Index k = 0; k < r; ++k) w(k) = -std::log(std::max(rs.uniform01(), 1e-300));
    starts.push_back(fp.budget * w / w.sum());
  }

  detail::PgResult best{Vector(), std::numeric_limits<double>::infinity(), 0.0};
  for (auto& x0 : starts) {
    detail::PgResult res = detail::projected_gradient(red, std::move(x0), fp.budget, cfg);
    if (res.f < best.f) best = std::move(res);
  }

  FractionalSolution sol;
  sol.x = Vector::Zero(n);
  for (Eigen::Index k = 0; k < r; ++k) sol.x(idx[k]) = best.x(k);
  sol.objective = best.f;
  sol.stationarity = best.pg_norm;
  sol.converged = best.pg_norm <= 1e-6;
  return sol;
}

}  // namespace gtwc
