// Closed-form quantities of the linear two-way coding model: estimation
// noise covariances, optimal combiners, SNRs, transmit powers, and the
// native <-> effective encoder transforms.

#pragma once

#include <stdexcept>

#include "gtwc/linalg.hpp"
#include "gtwc/types.hpp"

namespace gtwc {

// Covariance of the effective noise seen by User 2 when estimating m1:
// Q1 = (I + F1 F2)(I + F1 F2)^T sigma1^2 + F1 F1^T sigma2^2.
inline Matrix q1_matrix(const EncoderPair& enc, const ChannelParams& params) {
  params.validate();
  enc.validate(params);
  const Matrix g = Matrix::Identity(params.n, params.n) + enc.f1 * enc.f2;
  Matrix q = params.sigma1_sq * (g * g.transpose()) + params.sigma2_sq * (enc.f1 * enc.f1.transpose());
  return 0.5 * (q + q.transpose());
}

// Covariance of the effective noise seen by User 1 when estimating m2:
// Q2 = F2 F2^T sigma1^2 + sigma2^2 I.
inline Matrix q2_matrix(const EncoderPair& enc, const ChannelParams& params) {
  params.validate();
  enc.validate(params);
  Matrix q = params.sigma1_sq * (enc.f2 * enc.f2.transpose());
  q.diagonal().array() += params.sigma2_sq;
  return 0.5 * (q + q.transpose());
}

namespace detail {

inline Vector whitened_solve(const Matrix& q, const Vector& g, const char* who) {
  Eigen::LLT<Matrix> llt(q);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(std::string("internal: noise covariance not positive definite in ") + who);
  return llt.solve(g);
}

}  // namespace detail

// Maximum-SNR unbiased combiners: w_i = Q_i^{-1} g_i / (g_i^T Q_i^{-1} g_i),
// normalized so w_i^T g_i = 1.
inline DecoderPair optimal_combiners(const EncoderPair& enc, const ChannelParams& params) {
  const Matrix q1 = q1_matrix(enc, params);
  const Matrix q2 = q2_matrix(enc, params);
  const Vector s1 = detail::whitened_solve(q1, enc.g1, "optimal_combiners");
  const Vector s2 = detail::whitened_solve(q2, enc.g2, "optimal_combiners");
  const double d1 = enc.g1.dot(s1);
  const double d2 = enc.g2.dot(s2);
  if (!(d1 > 0.0))
    throw std::invalid_argument("optimal_combiners: degenerate encoder, g1 carries no message energy");
  if (!(d2 > 0.0))
    throw std::invalid_argument("optimal_combiners: degenerate encoder, g2 carries no message energy");
  return DecoderPair{s1 / d1, s2 / d2};
}

// Achievable estimation SNRs at the optimal combiners: snr_i = g_i^T Q_i^{-1} g_i.
inline std::pair<double, double> snr_pair(const EncoderPair& enc, const ChannelParams& params) {
  const Matrix q1 = q1_matrix(enc, params);
  const Matrix q2 = q2_matrix(enc, params);
  const double snr1 = enc.g1.dot(detail::whitened_solve(q1, enc.g1, "snr_pair"));
  const double snr2 = enc.g2.dot(detail::whitened_solve(q2, enc.g2, "snr_pair"));
  return {snr1, snr2};
}

// Average block transmit energies:
//   E||x1||^2 = ||g1||^2 + ||F1 g2||^2 + ||F1 F2||_F^2 s1 + ||F1||_F^2 s2
//   E||x2||^2 = ||(I+F2 F1) g2||^2 + ||F2 g1||^2 + ||F2 (I+F1 F2)||_F^2 s1
//               + ||F2 F1||_F^2 s2
inline PowerReport transmit_powers(const EncoderPair& enc, const ChannelParams& params, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw std::invalid_argument("transmit_powers: alpha must lie in (0,1)");
  params.validate();
  enc.validate(params);
  const double s1 = params.sigma1_sq;
  const double s2 = params.sigma2_sq;
  const Matrix f1f2 = enc.f1 * enc.f2;
  const Matrix f2f1 = enc.f2 * enc.f1;
  const Matrix l = Matrix::Identity(params.n, params.n) + f1f2;

  PowerReport rep;
  rep.p1 = enc.g1.squaredNorm() + (enc.f1 * enc.g2).squaredNorm() + f1f2.squaredNorm() * s1 +
           enc.f1.squaredNorm() * s2;
  rep.p2 = (enc.g2 + f2f1 * enc.g2).squaredNorm() + (enc.f2 * enc.g1).squaredNorm() +
           (enc.f2 * l).squaredNorm() * s1 + f2f1.squaredNorm() * s2;
  rep.weighted = alpha * rep.p1 + (1.0 - alpha) * rep.p2;
  const auto [snr1, snr2] = snr_pair(enc, params);
  rep.snr1 = snr1;
  rep.snr2 = snr2;
  return rep;
}

// Powers of the reduced problem, parameterized by the whitened message
// weights q1 (g1 = Q1^{1/2} q1) with User 2's message pinned to the last
// use (g2 = sqrt(eta2*sigma2^2) e_N) and a structured F2 whose last
// subdiagonal entry is zero:
//   E||x1||^2 = ||q1^T (I+F1 F2)||^2 s1 + ||q1^T F1||^2 s2
//               + ||F1 F2||_F^2 s1 + ||F1||_F^2 s2
//   E||x2||^2 = ||g2||^2 + ||F2 Q1^{1/2} q1||^2 + ||F2 (I+F1 F2)||_F^2 s1
//               + ||F2 F1||_F^2 s2
inline PowerReport reduced_powers(const Vector& q1, const Matrix& f1, const Matrix& f2,
                                  const ChannelParams& params, const Targets& targets) {
  params.validate();
  targets.validate();
  const auto n = static_cast<Eigen::Index>(params.n);
  if (q1.size() != n || f1.rows() != n || f2.rows() != n)
    throw std::invalid_argument("reduced_powers: shape mismatch");
  if (!is_single_subdiagonal(f2) || f2(n - 1, n - 2) != 0.0)
    throw std::invalid_argument("reduced_powers: f2 must be structured with a zero last subdiagonal entry");
  if (!is_strictly_lower(f1)) throw std::invalid_argument("reduced_powers: f1 not strictly lower triangular");

  const double s1 = params.sigma1_sq;
  const double s2 = params.sigma2_sq;
  const Matrix f1f2 = f1 * f2;
  const Matrix l = Matrix::Identity(n, n) + f1f2;

  PowerReport rep;
  rep.p1 = (l.transpose() * q1).squaredNorm() * s1 + (f1.transpose() * q1).squaredNorm() * s2 +
           f1f2.squaredNorm() * s1 + f1.squaredNorm() * s2;

  Matrix q1m = s1 * (l * l.transpose()) + s2 * (f1 * f1.transpose());
  const Vector p = matrix_sqrt_psd(0.5 * (q1m + q1m.transpose())) * q1;
  rep.p2 = targets.eta2 * params.sigma2_sq + (f2 * p).squaredNorm() + (f2 * l).squaredNorm() * s1 +
           (f2 * f1).squaredNorm() * s2;
  rep.weighted = targets.alpha * rep.p1 + (1.0 - targets.alpha) * rep.p2;
  rep.snr1 = q1.squaredNorm();  // = g1^T Q1^{-1} g1 for g1 = Q1^{1/2} q1
  rep.snr2 = targets.eta2;     // exact for last-use g2 with f2(N,N-1) = 0
  return rep;
}

// Untangle the cross-user coupling:
//   g2 = (I + F2t F1t)^{-1} g2t,  F2 = (I + F2t F1t)^{-1} F2t,
//   A  = I - F1t (F2 - F2t),      g1 = A^{-1} g1t,  F1 = A^{-1} F1t.
// All system matrices are unit lower triangular, so the solves are exact
// forward substitutions and strict lower-triangularity is preserved.
inline EncoderPair native_to_effective(const NativeEncoderPair& nat, const ChannelParams& params) {
  params.validate();
  nat.validate(params);
  const Matrix t = nat.f2_t * nat.f1_t;
  EncoderPair eff;
  eff.g2 = unit_lower_solve(t, nat.g2_t);
  eff.f2 = unit_lower_solve(t, nat.f2_t);
  const Matrix a_strict = -nat.f1_t * (eff.f2 - nat.f2_t);
  eff.g1 = unit_lower_solve(a_strict, nat.g1_t);
  eff.f1 = unit_lower_solve(a_strict, nat.f1_t);
  eff.f2_structured = is_single_subdiagonal(eff.f2);
  return eff;
}

namespace detail {

// Copy subdiagonal band k (entries (i, i-k)) from src into dst.
inline void assign_band(Matrix& dst, const Matrix& src, Eigen::Index k) {
  for (Eigen::Index i = k; i < dst.rows(); ++i) dst(i, i - k) = src(i, i - k);
}

}  // namespace detail

// Inverse of native_to_effective. The defining fixed-point equations
//   F2t = F2 + F2t F1t F2,   F1t = F1 - F1t (F2 - F2t) F1
// are solved band by band: products of strictly lower matrices only ever
// push content to deeper bands, so band k of the right-hand sides depends
// on bands < k of the unknowns. N-1 passes give the exact solution.
inline NativeEncoderPair effective_to_native(const EncoderPair& eff, const ChannelParams& params) {
  params.validate();
  eff.validate(params);
  const auto n = static_cast<Eigen::Index>(params.n);
  Matrix f2t = Matrix::Zero(n, n);
  Matrix f1t = Matrix::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) {
    const Matrix rhs2 = eff.f2 + f2t * f1t * eff.f2;
    detail::assign_band(f2t, rhs2, k);
    const Matrix rhs1 = eff.f1 - f1t * (eff.f2 - f2t) * eff.f1;
    detail::assign_band(f1t, rhs1, k);
  }
  NativeEncoderPair nat;
  nat.f1_t = f1t;
  nat.f2_t = f2t;
  nat.g2_t = (Matrix::Identity(n, n) + f2t * f1t) * eff.g2;
  nat.g1_t = (Matrix::Identity(n, n) - f1t * (eff.f2 - f2t)) * eff.g1;

  // the recursion is exact; a mismatch here means a bug, not bad input
  const EncoderPair back = native_to_effective(nat, params);
  const double scale = std::max({1.0, eff.f1.cwiseAbs().maxCoeff(), eff.f2.cwiseAbs().maxCoeff(),
                                 eff.g1.cwiseAbs().maxCoeff(), eff.g2.cwiseAbs().maxCoeff()});
  const double err = std::max({(back.f1 - eff.f1).cwiseAbs().maxCoeff(), (back.f2 - eff.f2).cwiseAbs().maxCoeff(),
                               (back.g1 - eff.g1).cwiseAbs().maxCoeff(), (back.g2 - eff.g2).cwiseAbs().maxCoeff()});
  if (err > 1e-8 * scale)
    throw std::runtime_error("effective_to_native: band recursion failed to reproduce the input");
  return nat;
}

}  // namespace gtwc
