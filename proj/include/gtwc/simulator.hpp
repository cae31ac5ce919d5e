// Time-stepped Monte-Carlo simulation of the two-way exchange.
//
// Each trial draws messages and noises, steps the coupled transmit
// recursions one channel use at a time (both users transmit at use k from
// receptions up to k-1, which is exactly what strict lower-triangularity
// encodes), decodes with the optimal combiners, and aggregates empirical
// powers, SNRs and error rates.
//
// Reproducibility: trial t uses the substream derived from (seed, t), so
// the set of random numbers is independent of threading; partial sums are
// reduced per batch and folded in batch order, so a report depends only on
// (seed, trials, batch_size).

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gtwc/core_model.hpp"
#include "gtwc/parallel.hpp"
#include "gtwc/rng.hpp"
#include "gtwc/types.hpp"

namespace gtwc {

enum class MessageModel {
  gaussian,  // m ~ N(0,1)
  binary,    // m in {-1,+1} equiprobable
};

struct SimConfig {
  std::uint64_t trials = 1000000;
  std::uint64_t seed = 0;
  MessageModel message_model = MessageModel::gaussian;
  std::uint64_t batch_size = 65536;

  void validate() const {
    if (trials < 1) throw std::invalid_argument("SimConfig: trials must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("SimConfig: batch_size must be >= 1");
  }
};

struct SimulationReport {
  double emp_p1 = 0.0, se_p1 = 0.0;
  double emp_p2 = 0.0, se_p2 = 0.0;
  double emp_snr1 = 0.0, se_snr1 = 0.0;
  double emp_snr2 = 0.0, se_snr2 = 0.0;
  double bias1 = 0.0, se_bias1 = 0.0;  // mean of (m1_hat - m1)
  double bias2 = 0.0, se_bias2 = 0.0;
  double err1 = 0.0, se_err1 = 0.0;  // symbol error rates, binary model only
  double err2 = 0.0, se_err2 = 0.0;
  double max_abs_err1 = 0.0;  // max |m_hat - m| over all trials
  double max_abs_err2 = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  bool binary = false;
};

struct Trajectory {
  Vector x1, x2, y1, y2;
};

// Single-realization trajectory under the effective encoders with caller
// supplied noise and message values. At use k (0-based):
//   x1[k] = g1[k] m1 + sum_{j<k} F1(k,j) (y1[j] - (F2 x1)[j])
//   x2[k] = g2[k] m2 + sum_{j<k} F2(k,j) y2[j]
//   y2[k] = x1[k] + n1[k],  y1[k] = x2[k] + n2[k]
inline Trajectory trajectory(const EncoderPair& enc, const ChannelParams& params, const Vector& n1,
                             const Vector& n2, double m1, double m2) {
  params.validate();
  enc.validate(params);
  const auto n = static_cast<Eigen::Index>(params.n);
  if (n1.size() != n || n2.size() != n) throw std::invalid_argument("trajectory: noise vector shape mismatch");
  Trajectory tr{Vector::Zero(n), Vector::Zero(n), Vector::Zero(n), Vector::Zero(n)};
  Vector f2x1 = Vector::Zero(n);  // running F2 * x1
  for (Eigen::Index k = 0; k < n; ++k) {
    double a = enc.g1(k) * m1;
    for (Eigen::Index j = 0; j < k; ++j) a += enc.f1(k, j) * (tr.y1(j) - f2x1(j));
    double b = enc.g2(k) * m2;
    for (Eigen::Index j = 0; j < k; ++j) b += enc.f2(k, j) * tr.y2(j);
    tr.x1(k) = a;
    tr.x2(k) = b;
    tr.y2(k) = a + n1(k);
    tr.y1(k) = b + n2(k);
    for (Eigen::Index i = k + 1; i < n; ++i) f2x1(i) += enc.f2(i, k) * a;
  }
  return tr;
}

// Same exchange under the native encoders: both users subtract their own
// echoed contribution before re-encoding,
//   x1[k] = g1t[k] m1 + sum_{j<k} F1t(k,j) (y1[j] - (F2t x1)[j])
//   x2[k] = g2t[k] m2 + sum_{j<k} F2t(k,j) (y2[j] - (F1t x2)[j])
inline Trajectory trajectory(const NativeEncoderPair& nat, const ChannelParams& params, const Vector& n1,
                             const Vector& n2, double m1, double m2) {
  params.validate();
  nat.validate(params);
  const auto n = static_cast<Eigen::Index>(params.n);
  if (n1.size() != n || n2.size() != n) throw std::invalid_argument("trajectory: noise vector shape mismatch");
  Trajectory tr{Vector::Zero(n), Vector::Zero(n), Vector::Zero(n), Vector::Zero(n)};
  Vector f2x1 = Vector::Zero(n);
  Vector f1x2 = Vector::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double a = nat.g1_t(k) * m1;
    for (Eigen::Index j = 0; j < k; ++j) a += nat.f1_t(k, j) * (tr.y1(j) - f2x1(j));
    double b = nat.g2_t(k) * m2;
    for (Eigen::Index j = 0; j < k; ++j) b += nat.f2_t(k, j) * (tr.y2(j) - f1x2(j));
    tr.x1(k) = a;
    tr.x2(k) = b;
    tr.y2(k) = a + n1(k);
    tr.y1(k) = b + n2(k);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      f2x1(i) += nat.f2_t(i, k) * a;
      f1x2(i) += nat.f1_t(i, k) * b;
    }
  }
  return tr;
}

namespace detail {

struct BatchSums {
  double p1 = 0, p1_sq = 0, p2 = 0, p2_sq = 0;
  double e1 = 0, e1_sq = 0, e1_q4 = 0;
  double e2 = 0, e2_sq = 0, e2_q4 = 0;
  double max_abs_e1 = 0, max_abs_e2 = 0;
  std::uint64_t nerr1 = 0, nerr2 = 0;
};

}  // namespace detail

// Run cfg.trials independent exchanges and report empirical statistics.
// Decoding follows the optimal-combiner rule: User 2 forms
// m1_hat = w1^T (y2 - F1 g2 m2); User 1 removes its own message echo and
// unwinds the feedback coupling, m2_hat = w2^T (I + F2 F1)^{-1} (y1 - F2 g1 m1).
inline SimulationReport run_exchange(const EncoderPair& enc, const ChannelParams& params, const SimConfig& cfg) {
  params.validate();
  enc.validate(params);
  cfg.validate();
  const int n = params.n;
  const DecoderPair dec = optimal_combiners(enc, params);

  // hot loop works on row-major copies of everything it touches
  std::vector<double> f1r(n * n), f2r(n * n), cpl(n * n);
  const Matrix coupling = Matrix::Identity(n, n) + enc.f2 * enc.f1;  // unit lower triangular
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      f1r[i * n + j] = enc.f1(i, j);
      f2r[i * n + j] = enc.f2(i, j);
      cpl[i * n + j] = coupling(i, j);
    }
  const Vector f1g2 = enc.f1 * enc.g2;
  const Vector f2g1 = enc.f2 * enc.g1;
  const bool binary = cfg.message_model == MessageModel::binary;
  const double sd1 = std::sqrt(params.sigma1_sq);
  const double sd2 = std::sqrt(params.sigma2_sq);

  const std::uint64_t batches = (cfg.trials + cfg.batch_size - 1) / cfg.batch_size;
  std::vector<detail::BatchSums> partial(batches);

  parallel_for(batches, [&](std::size_t b) {
    detail::BatchSums acc;
    std::vector<double> x1(n), x2(n), y1(n), y2(n), f2x1(n), ytil(n);
    const std::uint64_t lo = b * cfg.batch_size;
    const std::uint64_t hi = std::min<std::uint64_t>(cfg.trials, lo + cfg.batch_size);
    for (std::uint64_t t = lo; t < hi; ++t) {
      RandomStream rs = RandomStream::derive(cfg.seed, t);
      // fixed draw order: m1, m2, then n1[k], n2[k] per use
      const double m1 = binary ? rs.binary_pm1() : rs.gaussian();
      const double m2 = binary ? rs.binary_pm1() : rs.gaussian();
      std::fill(f2x1.begin(), f2x1.end(), 0.0);
      for (int k = 0; k < n; ++k) {
        const double noise1 = sd1 * rs.gaussian();
        const double noise2 = sd2 * rs.gaussian();
        double a = enc.g1(k) * m1;
        double bb = enc.g2(k) * m2;
        for (int j = 0; j < k; ++j) {
          a += f1r[k * n + j] * (y1[j] - f2x1[j]);
          bb += f2r[k * n + j] * y2[j];
        }
        x1[k] = a;
        x2[k] = bb;
        y2[k] = a + noise1;
        y1[k] = bb + noise2;
        for (int i = k + 1; i < n; ++i) f2x1[i] += f2r[i * n + k] * a;
      }

      double p1 = 0, p2 = 0;
      for (int k = 0; k < n; ++k) {
        p1 += x1[k] * x1[k];
        p2 += x2[k] * x2[k];
      }
      // m1_hat at User 2
      double m1_hat = 0;
      for (int k = 0; k < n; ++k) m1_hat += dec.w1(k) * (y2[k] - f1g2(k) * m2);
      // m2_hat at User 1: forward-substitute (I + F2 F1) ytil = y1 - F2 g1 m1
      for (int k = 0; k < n; ++k) {
        double v = y1[k] - f2g1(k) * m1;
        for (int j = 0; j < k; ++j) v -= cpl[k * n + j] * ytil[j];
        ytil[k] = v;
      }
      double m2_hat = 0;
      for (int k = 0; k < n; ++k) m2_hat += dec.w2(k) * ytil[k];

      const double e1 = m1_hat - m1;
      const double e2 = m2_hat - m2;
      acc.p1 += p1;
      acc.p1_sq += p1 * p1;
      acc.p2 += p2;
      acc.p2_sq += p2 * p2;
      acc.e1 += e1;
      acc.e1_sq += e1 * e1;
      acc.e1_q4 += e1 * e1 * e1 * e1;
      acc.e2 += e2;
      acc.e2_sq += e2 * e2;
      acc.e2_q4 += e2 * e2 * e2 * e2;
      acc.max_abs_e1 = std::max(acc.max_abs_e1, std::abs(e1));
      acc.max_abs_e2 = std::max(acc.max_abs_e2, std::abs(e2));
      if (binary) {
        if ((m1_hat >= 0 ? 1.0 : -1.0) != m1) ++acc.nerr1;
        if ((m2_hat >= 0 ? 1.0 : -1.0) != m2) ++acc.nerr2;
      }
    }
    partial[b] = acc;
  });

  detail::BatchSums s;
  for (const auto& a : partial) {  // fixed fold order
    s.p1 += a.p1;
    s.p1_sq += a.p1_sq;
    s.p2 += a.p2;
    s.p2_sq += a.p2_sq;
    s.e1 += a.e1;
    s.e1_sq += a.e1_sq;
    s.e1_q4 += a.e1_q4;
    s.e2 += a.e2;
    s.e2_sq += a.e2_sq;
    s.e2_q4 += a.e2_q4;
    s.max_abs_e1 = std::max(s.max_abs_e1, a.max_abs_e1);
    s.max_abs_e2 = std::max(s.max_abs_e2, a.max_abs_e2);
    s.nerr1 += a.nerr1;
    s.nerr2 += a.nerr2;
  }

  const double t = static_cast<double>(cfg.trials);
  SimulationReport rep;
  rep.trials = cfg.trials;
  rep.seed = cfg.seed;
  rep.binary = binary;
  rep.emp_p1 = s.p1 / t;
  rep.emp_p2 = s.p2 / t;
  rep.se_p1 = std::sqrt(std::max(s.p1_sq / t - rep.emp_p1 * rep.emp_p1, 0.0) / t);
  rep.se_p2 = std::sqrt(std::max(s.p2_sq / t - rep.emp_p2 * rep.emp_p2, 0.0) / t);

  const double mean_e1 = s.e1 / t, mean_e2 = s.e2 / t;
  const double var1 = std::max(s.e1_sq / t - mean_e1 * mean_e1, 0.0);
  const double var2 = std::max(s.e2_sq / t - mean_e2 * mean_e2, 0.0);
  rep.bias1 = mean_e1;
  rep.bias2 = mean_e2;
  rep.se_bias1 = std::sqrt(var1 / t);
  rep.se_bias2 = std::sqrt(var2 / t);
  rep.emp_snr1 = var1 > 0 ? 1.0 / var1 : std::numeric_limits<double>::infinity();
  rep.emp_snr2 = var2 > 0 ? 1.0 / var2 : std::numeric_limits<double>::infinity();
  // delta method: se(1/var) = se(var) / var^2, se(var) ~ sqrt((m4 - m2^2)/T)
  const double m2_1 = s.e1_sq / t, m4_1 = s.e1_q4 / t;
  const double m2_2 = s.e2_sq / t, m4_2 = s.e2_q4 / t;
  rep.se_snr1 = var1 > 0 ? std::sqrt(std::max(m4_1 - m2_1 * m2_1, 0.0) / t) / (var1 * var1) : 0.0;
  rep.se_snr2 = var2 > 0 ? std::sqrt(std::max(m4_2 - m2_2 * m2_2, 0.0) / t) / (var2 * var2) : 0.0;
  rep.max_abs_err1 = s.max_abs_e1;
  rep.max_abs_err2 = s.max_abs_e2;
  if (binary) {
    rep.err1 = static_cast<double>(s.nerr1) / t;
    rep.err2 = static_cast<double>(s.nerr2) / t;
    rep.se_err1 = std::sqrt(rep.err1 * (1.0 - rep.err1) / t);
    rep.se_err2 = std::sqrt(rep.err2 * (1.0 - rep.err2) / t);
  } else {
    rep.err1 = rep.err2 = rep.se_err1 = rep.se_err2 = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

}  // namespace gtwc
