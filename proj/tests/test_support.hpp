// Shared helpers for the test suites: random problem instances and the
// independent oracles (Monte-Carlo covariance, the scalar per-column cost
// used for finite differences, simplex grid search). Everything here stays
// independent of the implementation paths it checks.

#pragma once

#include <cmath>
#include <vector>

#include "gtwc/gtwc.hpp"

namespace testsup {

using gtwc::ChannelParams;
using gtwc::EncoderPair;
using gtwc::Matrix;
using gtwc::RandomStream;
using gtwc::Targets;
using gtwc::Vector;

inline Vector random_vector(RandomStream& rs, int n, double scale = 1.0) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = scale * rs.gaussian();
  return v;
}

inline Matrix random_strictly_lower(RandomStream& rs, int n, double scale = 0.5) {
  Matrix m = Matrix::Zero(n, n);
  for (int r = 1; r < n; ++r)
    for (int c = 0; c < r; ++c) m(r, c) = scale * rs.gaussian();
  return m;
}

// subdiagonal entries for uses 2..N-1; the last entry stays zero unless
// with_last is set
inline Vector random_subdiag(RandomStream& rs, int n, double scale = 0.7, bool with_last = false) {
  Vector sub = Vector::Zero(n - 1);
  for (int i = 2; i <= n - 1; ++i) sub(i - 2) = scale * rs.gaussian();
  if (with_last && n >= 2) sub(n - 2) = scale * rs.gaussian();
  return sub;
}

inline EncoderPair random_encoder(RandomStream& rs, int n, double fscale = 0.4, bool structured_f2 = false,
                                  bool zero_last_relay = false) {
  EncoderPair enc;
  enc.g1 = random_vector(rs, n);
  enc.g2 = random_vector(rs, n);
  enc.f1 = random_strictly_lower(rs, n, fscale);
  if (structured_f2) {
    enc.f2 = gtwc::f2_from_subdiag(random_subdiag(rs, n, fscale, !zero_last_relay));
    enc.f2_structured = true;
  } else {
    enc.f2 = random_strictly_lower(rs, n, fscale);
  }
  return enc;
}

// Rescale the message vectors so both SNR constraints hold with equality.
inline void make_feasible(EncoderPair& enc, const ChannelParams& params, const Targets& targets) {
  const auto [snr1, snr2] = gtwc::snr_pair(enc, params);
  enc.g1 *= std::sqrt(targets.eta1 / snr1);
  enc.g2 *= std::sqrt(targets.eta2 / snr2);
}

// Monte-Carlo estimate of the covariance of a*n1 + b*n2 with
// n1 ~ N(0, s1 I), n2 ~ N(0, s2 I).
inline Matrix mc_noise_covariance(const Matrix& a, const Matrix& b, double s1, double s2,
                                  std::uint64_t trials, std::uint64_t seed) {
  const auto n = a.rows();
  const double sd1 = std::sqrt(s1), sd2 = std::sqrt(s2);
  Matrix acc = Matrix::Zero(n, n);
  Vector n1(n), n2(n), z(n);
  for (std::uint64_t t = 0; t < trials; ++t) {
    RandomStream rs = RandomStream::derive(seed, t);
    for (Eigen::Index i = 0; i < n; ++i) n1(i) = sd1 * rs.gaussian();
    for (Eigen::Index i = 0; i < n; ++i) n2(i) = sd2 * rs.gaussian();
    z = a * n1 + b * n2;
    acc += z * z.transpose();
  }
  return acc / static_cast<double>(trials);
}

// Decoupled per-column cost of User 1's block energy: for column i
// (1-based) of F1 and h_i = (q_{1,i+1},...,q_{1,N}),
//   i = 1:      |h_1^T v|^2 s2 + ||v||^2 s2
//   2..N-1:     (q_{1,i-1} + f_{2,i} h_i^T v)^2 s1 + |h_i^T v|^2 s2
//               + ||v||^2 (f_{2,i}^2 s1 + s2)
inline double phi_column_cost(int i, const Vector& v, const Vector& q1, const Vector& f2sub,
                              const ChannelParams& params) {
  const auto n = static_cast<Eigen::Index>(params.n);
  const double s1 = params.sigma1_sq, s2 = params.sigma2_sq;
  const auto h = q1.segment(i, n - i);
  const double hv = h.dot(v);
  if (i == 1) return hv * hv * s2 + v.squaredNorm() * s2;
  const double f = f2sub(i - 2);
  const double lin = q1(i - 2) + f * hv;
  return lin * lin * s1 + hv * hv * s2 + v.squaredNorm() * (f * f * s1 + s2);
}

// E||x1||^2 assembled from the per-column costs (independent route used to
// cross-check the closed-form powers).
inline double block_energy_user1(const Vector& q1, const Matrix& f1, const Vector& f2sub,
                                 const ChannelParams& params) {
  const auto n = static_cast<Eigen::Index>(params.n);
  double total = params.sigma1_sq * (q1(n - 2) * q1(n - 2) + q1(n - 1) * q1(n - 1));
  for (int i = 1; i <= params.n - 1; ++i) {
    const Vector v = f1.col(i - 1).segment(i, n - i);
    total += phi_column_cost(i, v, q1, f2sub, params);
  }
  return total;
}

// Exhaustive minimum of a 3-variable fractional program over the scaled
// simplex at the given per-axis resolution.
inline double grid_min_n3(const gtwc::FractionalProgram& fp, int resolution) {
  const double b = fp.budget;
  double best = std::numeric_limits<double>::infinity();
  Vector x(3);
  for (int i = 0; i <= resolution; ++i) {
    for (int j = 0; j + i <= resolution; ++j) {
      x(0) = b * static_cast<double>(i) / resolution;
      x(1) = b * static_cast<double>(j) / resolution;
      x(2) = b - x(0) - x(1);
      if (x(2) < 0) x(2) = 0;
      best = std::min(best, gtwc::fp_objective(fp, x));
    }
  }
  return best;
}

inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace testsup
