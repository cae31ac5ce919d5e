// Domain types for linear coding over a Gaussian two-way channel.
//
// Conventions used throughout the library:
//  * Blocklength-N block codes; vectors are length N, matrices N x N.
//  * Feedback encoding matrices are strictly lower triangular (entries on
//    and above the diagonal are exactly zero); this is what makes the
//    per-channel-use recursion causal.
//  * "Structured" F2 means User 2 relays only its most recent reception:
//    the matrix is nonzero on the first subdiagonal only, entries
//    (i, i-1) for i = 2..N in 1-based indexing.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace gtwc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline bool all_finite(const Matrix& m) { return m.allFinite(); }
inline bool all_finite(const Vector& v) { return v.allFinite(); }

// Exact test: every entry on or above the diagonal is zero.
inline bool is_strictly_lower(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i <= j; ++i)
      if (m(i, j) != 0.0) return false;
  return true;
}

// Exact test: nonzero entries may appear on the first subdiagonal only.
inline bool is_single_subdiagonal(const Matrix& m) {
  if (!is_strictly_lower(m)) return false;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = j + 2; i < m.rows(); ++i)
      if (m(i, j) != 0.0) return false;
  return true;
}

// sub[k] holds the subdiagonal entry at (k+1, k) 0-based, i.e. the weight
// applied to reception k+1 when transmitting at use k+2 (1-based).
inline Matrix f2_from_subdiag(const Vector& sub) {
  const Eigen::Index n = sub.size() + 1;
  Matrix f2 = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < sub.size(); ++k) f2(k + 1, k) = sub(k);
  return f2;
}

inline Vector subdiag_of(const Matrix& f2) {
  const Eigen::Index n = f2.rows();
  Vector sub(n - 1);
  for (Eigen::Index k = 0; k + 1 < n; ++k) sub(k) = f2(k + 1, k);
  return sub;
}

struct ChannelParams {
  int n = 2;               // blocklength (channel uses per message)
  double sigma1_sq = 1.0;  // noise variance on the User1 -> User2 link
  double sigma2_sq = 1.0;  // noise variance on the User2 -> User1 link

  void validate() const {
    if (n < 2) throw std::invalid_argument("ChannelParams: blocklength n must be >= 2");
    if (!(sigma1_sq > 0.0) || !std::isfinite(sigma1_sq) ||
        !(sigma2_sq > 0.0) || !std::isfinite(sigma2_sq))
      throw std::invalid_argument("ChannelParams: noise variances must be positive and finite");
  }
};

struct Targets {
  double eta1 = 1.0;   // required estimation SNR for User 1's message
  double eta2 = 1.0;   // required estimation SNR for User 2's message
  double alpha = 0.5;  // weight on User 1's transmit power in the objective

  void validate() const {
    if (!(eta1 > 0.0) || !std::isfinite(eta1) || !(eta2 > 0.0) || !std::isfinite(eta2))
      throw std::invalid_argument("Targets: SNR targets must be positive and finite");
    if (!(alpha > 0.0) || !(alpha < 1.0))
      throw std::invalid_argument("Targets: alpha must lie in (0,1)");
  }

  // The last-use-only message placement for User 2 is provably optimal
  // only from this weight upward.
  double prop2_threshold(const ChannelParams& p) const {
    return p.sigma2_sq / (p.sigma1_sq + p.sigma2_sq);
  }
  bool prop2_applicable(const ChannelParams& p) const {
    return alpha >= prop2_threshold(p);
  }
};

// Effective encoders: the decoupled representation in which User 2's
// transmit rule is x2 = g2*m2 + F2*y2 and User 1's is
// x1 = g1*m1 + F1*(y1 - F2*x1).
struct EncoderPair {
  Vector g1;
  Matrix f1;
  Vector g2;
  Matrix f2;
  bool f2_structured = false;

  void validate(const ChannelParams& p) const {
    const auto n = static_cast<Eigen::Index>(p.n);
    if (g1.size() != n || g2.size() != n || f1.rows() != n || f1.cols() != n ||
        f2.rows() != n || f2.cols() != n)
      throw std::invalid_argument("EncoderPair: shape mismatch with blocklength");
    if (!all_finite(g1) || !all_finite(g2) || !all_finite(f1) || !all_finite(f2))
      throw std::invalid_argument("EncoderPair: non-finite entry");
    if (!is_strictly_lower(f1)) throw std::invalid_argument("EncoderPair: f1 not strictly lower triangular");
    if (!is_strictly_lower(f2)) throw std::invalid_argument("EncoderPair: f2 not strictly lower triangular");
    if (f2_structured && !is_single_subdiagonal(f2))
      throw std::invalid_argument("EncoderPair: f2 marked structured but has entries off the first subdiagonal");
  }
};

// Native encoders: the rule each user actually applies to its own received
// samples before the cross-user coupling is untangled,
// x1 = g1t*m1 + F1t*(y1 - F2t*x1) and x2 = g2t*m2 + F2t*(y2 - F1t*x2).
struct NativeEncoderPair {
  Vector g1_t;
  Matrix f1_t;
  Vector g2_t;
  Matrix f2_t;

  void validate(const ChannelParams& p) const {
    const auto n = static_cast<Eigen::Index>(p.n);
    if (g1_t.size() != n || g2_t.size() != n || f1_t.rows() != n || f1_t.cols() != n ||
        f2_t.rows() != n || f2_t.cols() != n)
      throw std::invalid_argument("NativeEncoderPair: shape mismatch with blocklength");
    if (!all_finite(g1_t) || !all_finite(g2_t) || !all_finite(f1_t) || !all_finite(f2_t))
      throw std::invalid_argument("NativeEncoderPair: non-finite entry");
    if (!is_strictly_lower(f1_t) || !is_strictly_lower(f2_t))
      throw std::invalid_argument("NativeEncoderPair: feedback matrices must be strictly lower triangular");
  }
};

// Linear combining vectors used for message estimation after N uses.
struct DecoderPair {
  Vector w1;  // User 2's combiner for estimating m1
  Vector w2;  // User 1's combiner for estimating m2
};

struct PowerReport {
  double p1 = 0.0;        // E ||x1||^2
  double p2 = 0.0;        // E ||x2||^2
  double weighted = 0.0;  // alpha*p1 + (1-alpha)*p2
  double snr1 = 0.0;
  double snr2 = 0.0;
};

}  // namespace gtwc
