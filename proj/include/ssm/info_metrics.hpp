#pragma once

// Finite-alphabet mutual information (Monte Carlo), instantaneous secrecy
// rate, cut-off rates and the high-SNR eavesdropper surrogate used by the
// iterative power-allocation method.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "ssm/channel_model.hpp"
#include "ssm/errors.hpp"
#include "ssm/numeric.hpp"
#include "ssm/rng.hpp"

namespace ssm {

/// Default number of whitened-noise draws per MI estimate.
inline constexpr int kDefaultMiSamples = 500;

struct MiEstimate {
  double value = 0.0;      // bits / channel use
  double std_error = 0.0;  // bits
  int n_samp = 0;
};

namespace detail {

/// Columns are sqrt(beta P) W^{-1/2} H x_k for every alphabet vector x_k.
inline CMatrix whitened_constellation(const CMatrix& h, const AnProjector& t, double beta,
                                      const SystemConfig& cfg, const TransmitAlphabet& alphabet,
                                      Side side) {
  const Whitener wh = build_whitener(h, t, beta, cfg, side);
  const double amp = std::sqrt(beta * cfg.p);
  CMatrix y = amp * (wh.w_inv_sqrt * (h * alphabet.as_matrix()));
  if (!y.allFinite()) throw NumericError("non-finite whitened constellation");
  return y;
}

/// Pairwise squared distances ||y_i - y_j||^2 between columns.
inline Eigen::MatrixXd pairwise_sq_distances(const CMatrix& y) {
  const Eigen::Index k = y.cols();
  Eigen::MatrixXd d(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < k; ++j) {
      const double v = (y.col(i) - y.col(j)).squaredNorm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

}  // namespace detail

/// Monte Carlo estimate of I(x; y') for the whitened link through h:
///
///   log2 K - (1/K) sum_i E[ log2 sum_j exp(-||a_ij + n||^2 + ||n||^2) ]
///
/// with a_ij = sqrt(beta P) W^{-1/2} h (x_i - x_j) and n ~ CN(0, I). The
/// exponent is evaluated in the expanded form -||a_ij||^2 - 2 Re(a_ij^H n)
/// and each inner sum is reduced by log-sum-exp. One noise draw is shared by
/// all K transmitted indices; the standard error is taken over the draws.
/// The reported value is floored at zero (the true MI is nonnegative; the
/// estimator is already bounded above by log2 K).
inline MiEstimate mutual_information_mc(const CMatrix& h, const AnProjector& t, double beta,
                                        const SystemConfig& cfg, const TransmitAlphabet& alphabet,
                                        int n_samp, RngStream& rng, Side side) {
  check_beta(beta);
  if (n_samp < 1) throw ConfigError("n_samp must be >= 1");
  const CMatrix y = detail::whitened_constellation(h, t, beta, cfg, alphabet, side);
  const Eigen::MatrixXd dist = detail::pairwise_sq_distances(y);
  const Eigen::Index k = y.cols();
  const Eigen::Index n_rx = y.rows();
  const double log2_k = std::log2(static_cast<double>(k));

  CVector noise(n_rx);
  Eigen::VectorXd proj(k);
  std::vector<double> exponents(static_cast<std::size_t>(k));
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int s = 0; s < n_samp; ++s) {
    for (Eigen::Index r = 0; r < n_rx; ++r) noise(r) = rng.complex_normal();
    // proj_k = Re(y_k^H n)
    proj = (y.adjoint() * noise).real();
    double inner = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j)
        exponents[static_cast<std::size_t>(j)] = -dist(i, j) - 2.0 * (proj(i) - proj(j));
      inner += log2_sum_exp(exponents);
    }
    const double sample = log2_k - inner / static_cast<double>(k);
    if (!std::isfinite(sample)) throw NumericError("non-finite MI sample");
    sum += sample;
    sum_sq += sample * sample;
  }
  const double n = static_cast<double>(n_samp);
  const double mean = sum / n;
  double se = 0.0;
  if (n_samp > 1) {
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    se = std::sqrt(var / n);
  }
  return {std::max(0.0, mean), se, n_samp};
}

struct SecrecyRate {
  double value = 0.0;  // max(I_B - I_E, 0)
  MiEstimate bob;
  MiEstimate eve;
};

/// Instantaneous secrecy rate for one channel realization. Bob's and Eve's
/// expectations use substreams 0 and 1 of `rng`, so repeated calls with the
/// same stream share their noise draws across beta.
inline SecrecyRate instantaneous_secrecy_rate(const ChannelPair& ch, const AnProjector& t, double beta,
                                              const SystemConfig& cfg, const TransmitAlphabet& alphabet,
                                              int n_samp, const RngStream& rng) {
  RngStream bob_rng = rng.substream(0);
  RngStream eve_rng = rng.substream(1);
  SecrecyRate sr;
  sr.bob = mutual_information_mc(ch.h_b, t, beta, cfg, alphabet, n_samp, bob_rng, Side::bob);
  sr.eve = mutual_information_mc(ch.h_e, t, beta, cfg, alphabet, n_samp, eve_rng, Side::eve);
  sr.value = std::max(sr.bob.value - sr.eve.value, 0.0);
  return sr;
}

/// log2 sum_ij exp(-(beta P / 4) d_ij^H H^H W^{-1} H d_ij) for the given side.
inline double cutoff_log_sum(const CMatrix& h, const AnProjector& t, double beta, const SystemConfig& cfg,
                             const TransmitAlphabet& alphabet, Side side) {
  const CMatrix y = detail::whitened_constellation(h, t, beta, cfg, alphabet, side);
  const Eigen::MatrixXd dist = detail::pairwise_sq_distances(y);
  std::vector<double> exponents;
  exponents.reserve(static_cast<std::size_t>(dist.size()));
  for (Eigen::Index j = 0; j < dist.cols(); ++j)
    for (Eigen::Index i = 0; i < dist.rows(); ++i) exponents.push_back(-0.25 * dist(i, j));
  return log2_sum_exp(exponents);
}

/// Cut-off rate 2 log2 K - cutoff_log_sum.
inline double cutoff_rate(const CMatrix& h, const AnProjector& t, double beta, const SystemConfig& cfg,
                          const TransmitAlphabet& alphabet, Side side) {
  const double zeta = 2.0 * std::log2(static_cast<double>(alphabet.size()));
  return zeta - cutoff_log_sum(h, t, beta, cfg, alphabet, side);
}

struct CutoffPair {
  double i0_b = 0.0;
  double i0_e = 0.0;
  double r_s_approx = 0.0;  // unclamped i0_b - i0_e
};

inline CutoffPair approx_secrecy_rate(const ChannelPair& ch, const AnProjector& t, double beta,
                                      const SystemConfig& cfg, const TransmitAlphabet& alphabet) {
  CutoffPair c;
  c.i0_b = cutoff_rate(ch.h_b, t, beta, cfg, alphabet, Side::bob);
  c.i0_e = cutoff_rate(ch.h_e, t, beta, cfg, alphabet, Side::eve);
  c.r_s_approx = c.i0_b - c.i0_e;
  return c;
}

/// Bob's log-sum term of the cut-off rate, as a function of beta.
inline double kappa_tilde_b(double beta, const ChannelPair& ch, const AnProjector& t, const SystemConfig& cfg,
                            const TransmitAlphabet& alphabet) {
  return cutoff_log_sum(ch.h_b, t, beta, cfg, alphabet, Side::bob);
}

/// Q_mk = d_mk^H H_E^H C_E^{-1} H_E d_mk over all alphabet pairs.
struct QSet {
  Eigen::MatrixXd q;
  double condition_number = 1.0;
  bool pseudo_inverse_used = false;
};

/// Condition-number threshold above which C_E is pseudo-inverted.
inline constexpr double kMaxConditionNumber = 1e12;

inline QSet build_qset(const CMatrix& h_e, const AnProjector& t, const TransmitAlphabet& alphabet) {
  CMatrix c = an_covariance(h_e, t);
  c = (0.5 * (c + c.adjoint())).eval();
  if (!c.allFinite()) throw NumericError("non-finite eavesdropper AN covariance");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(c);
  if (eig.info() != Eigen::Success) throw NumericError("eavesdropper AN covariance eigensolve failed");

  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double lmax = lambda.maxCoeff();
  const double lmin = lambda.minCoeff();
  QSet out;
  out.condition_number = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  out.pseudo_inverse_used = !(out.condition_number <= kMaxConditionNumber);

  Eigen::VectorXd inv_sqrt(lambda.size());
  const double cutoff = lmax / kMaxConditionNumber;
  for (Eigen::Index k = 0; k < lambda.size(); ++k)
    inv_sqrt(k) = (out.pseudo_inverse_used && lambda(k) <= cutoff) ? 0.0 : 1.0 / std::sqrt(lambda(k));
  const CMatrix c_inv_sqrt = eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().adjoint();

  const CMatrix u = c_inv_sqrt * (h_e * alphabet.as_matrix());
  out.q = detail::pairwise_sq_distances(u);
  if (!out.q.allFinite()) throw NumericError("non-finite Q set");
  return out;
}

namespace detail {

inline void check_open_beta(double beta) {
  if (!(beta >= 0.0 && beta < 1.0))
    throw DomainError("surrogate is defined for beta in [0, 1), got " + std::to_string(beta));
}

inline std::vector<double> kappa_e_exponents(double beta, const QSet& qs) {
  const double scale = beta / (4.0 * (1.0 - beta));
  std::vector<double> e;
  e.reserve(static_cast<std::size_t>(qs.q.size()));
  for (Eigen::Index j = 0; j < qs.q.cols(); ++j)
    for (Eigen::Index i = 0; i < qs.q.rows(); ++i) e.push_back(-scale * qs.q(i, j));
  return e;
}

}  // namespace detail

/// High-SNR eavesdropper surrogate log2 sum_mk exp(-beta Q_mk / (4 (1 - beta))).
inline double kappa_tilde_e(double beta, const QSet& qs) {
  detail::check_open_beta(beta);
  return log2_sum_exp(detail::kappa_e_exponents(beta, qs));
}

/// Exact derivative of kappa_tilde_e with respect to beta. This is a
/// softmax-weighted average of -Q_mk / (4 (1 - beta)^2), divided by ln 2.
inline double kappa_tilde_e_prime(double beta, const QSet& qs) {
  detail::check_open_beta(beta);
  const std::vector<double> e = detail::kappa_e_exponents(beta, qs);
  const double shift = *std::max_element(e.begin(), e.end());
  const double denom = 4.0 * (1.0 - beta) * (1.0 - beta);
  double weight_sum = 0.0;
  double weighted = 0.0;
  std::size_t idx = 0;
  for (Eigen::Index j = 0; j < qs.q.cols(); ++j) {
    for (Eigen::Index i = 0; i < qs.q.rows(); ++i, ++idx) {
      const double w = std::exp(e[idx] - shift);
      weight_sum += w;
      weighted += w * (-qs.q(i, j) / denom);
    }
  }
  return weighted / (weight_sum * std::numbers::ln2);
}

}  // namespace ssm
