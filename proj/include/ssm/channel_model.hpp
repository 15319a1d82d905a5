#pragma once

// Signal model for secure spatial modulation: constellations, the
// spatial-modulation transmit alphabet, Rayleigh channel draws, the
// artificial-noise (AN) shaping matrix and the AN-plus-noise whitener.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "ssm/errors.hpp"
#include "ssm/rng.hpp"

namespace ssm {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct SystemConfig {
  int n_t = 4;
  int n_r = 2;
  int n_e = 2;
  int m = 4;
  double p = 1.0;
  double sigma2_b = 1.0;
  double sigma2_e = 1.0;

  /// Size of the transmit alphabet, n_t * m.
  int alphabet_size() const { return n_t * m; }

  double log2_alphabet_size() const { return std::log2(static_cast<double>(alphabet_size())); }

  void validate() const {
    if (n_t < 1 || n_r < 1 || n_e < 1 || m < 1)
      throw ConfigError("antenna counts and constellation size must be >= 1");
    if (!std::has_single_bit(static_cast<unsigned>(n_t)))
      throw ConfigError("n_t must be a power of two, got " + std::to_string(n_t));
    if (!std::has_single_bit(static_cast<unsigned>(m)))
      throw ConfigError("constellation size must be a power of two, got " + std::to_string(m));
    if (!(p > 0.0) || !(sigma2_b > 0.0) || !(sigma2_e > 0.0) || !std::isfinite(p) ||
        !std::isfinite(sigma2_b) || !std::isfinite(sigma2_e))
      throw ConfigError("power and noise variances must be positive and finite");
  }
};

enum class Modulation { psk, qam };

struct Constellation {
  std::vector<Complex> symbols;

  std::size_t size() const { return symbols.size(); }

  double mean_energy() const {
    double e = 0.0;
    for (const auto& s : symbols) e += std::norm(s);
    return symbols.empty() ? 0.0 : e / static_cast<double>(symbols.size());
  }
};

namespace detail {

inline unsigned gray_to_binary(unsigned g) {
  unsigned b = g;
  while (g >>= 1) b ^= g;
  return b;
}

}  // namespace detail

/// Unit-mean-energy PSK or square QAM constellation. PSK points sit at
/// angles 2*pi*k/m + pi/m (so QPSK starts at pi/4), except BPSK = {+1, -1}.
/// QAM points are laid out on a Gray-labelled grid.
inline Constellation build_constellation(Modulation scheme, int m) {
  if (m < 2 || !std::has_single_bit(static_cast<unsigned>(m)))
    throw ConfigError("constellation size must be a power of two >= 2, got " + std::to_string(m));
  Constellation c;
  c.symbols.reserve(static_cast<std::size_t>(m));
  if (scheme == Modulation::psk) {
    const double offset = (m == 2) ? 0.0 : std::numbers::pi / m;
    for (int k = 0; k < m; ++k) {
      const double angle = 2.0 * std::numbers::pi * k / m + offset;
      c.symbols.push_back(std::polar(1.0, angle));
    }
    if (m == 2) c.symbols = {Complex(1.0, 0.0), Complex(-1.0, 0.0)};
    return c;
  }

  const int bits = std::countr_zero(static_cast<unsigned>(m));
  if (bits % 2 != 0) throw ConfigError("QAM size must be a perfect square, got " + std::to_string(m));
  const int side = 1 << (bits / 2);
  const unsigned half_mask = static_cast<unsigned>(side - 1);
  const double scale = std::sqrt(2.0 * (m - 1) / 3.0);
  for (int k = 0; k < m; ++k) {
    const unsigned row_bits = static_cast<unsigned>(k) >> (bits / 2);
    const unsigned col_bits = static_cast<unsigned>(k) & half_mask;
    const double re = 2.0 * detail::gray_to_binary(col_bits) - (side - 1);
    const double im = 2.0 * detail::gray_to_binary(row_bits) - (side - 1);
    c.symbols.emplace_back(re / scale, im / scale);
  }
  return c;
}

/// The n_t * m spatial-modulation vectors e_i * b_j, antenna-major.
struct TransmitAlphabet {
  int n_t = 0;
  int m = 0;
  std::vector<CVector> vectors;

  std::size_t size() const { return vectors.size(); }

  CVector difference(std::size_t i, std::size_t j) const { return vectors[i] - vectors[j]; }

  /// Stacks the vectors as columns of an n_t x (n_t*m) matrix.
  CMatrix as_matrix() const {
    CMatrix x(n_t, static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t k = 0; k < vectors.size(); ++k) x.col(static_cast<Eigen::Index>(k)) = vectors[k];
    return x;
  }
};

inline TransmitAlphabet build_alphabet(const SystemConfig& cfg, const Constellation& c) {
  cfg.validate();
  if (static_cast<int>(c.size()) != cfg.m)
    throw ConfigError("constellation size does not match configuration");
  TransmitAlphabet a;
  a.n_t = cfg.n_t;
  a.m = cfg.m;
  a.vectors.reserve(static_cast<std::size_t>(cfg.alphabet_size()));
  for (int i = 0; i < cfg.n_t; ++i) {
    for (const auto& b : c.symbols) {
      CVector x = CVector::Zero(cfg.n_t);
      x(i) = b;
      a.vectors.push_back(std::move(x));
    }
  }
  return a;
}

struct ChannelPair {
  CMatrix h_b;  // n_r x n_t
  CMatrix h_e;  // n_e x n_t
};

/// i.i.d. CN(0, 1) entries; Bob's matrix is drawn first, row-major.
inline ChannelPair generate_channel(RngStream& rng, const SystemConfig& cfg) {
  ChannelPair ch{CMatrix(cfg.n_r, cfg.n_t), CMatrix(cfg.n_e, cfg.n_t)};
  for (Eigen::Index r = 0; r < ch.h_b.rows(); ++r)
    for (Eigen::Index c = 0; c < ch.h_b.cols(); ++c) ch.h_b(r, c) = rng.complex_normal();
  for (Eigen::Index r = 0; r < ch.h_e.rows(); ++r)
    for (Eigen::Index c = 0; c < ch.h_e.cols(); ++c) ch.h_e(r, c) = rng.complex_normal();
  return ch;
}

enum class AnMode { null_space, isotropic };

struct AnProjector {
  CMatrix t;
  AnMode mode = AnMode::null_space;

  double trace_energy() const { return (t * t.adjoint()).trace().real(); }
};

/// Null-space mode: T = V V^H / sqrt(dim), V an orthonormal basis of null(H_B),
/// so that H_B T = 0 and tr(T T^H) = 1. Isotropic mode: T = I / sqrt(n_t).
inline AnProjector build_an_projector(const CMatrix& h_b, AnMode mode) {
  const Eigen::Index n_t = h_b.cols();
  if (mode == AnMode::isotropic) {
    return {CMatrix::Identity(n_t, n_t) / std::sqrt(static_cast<double>(n_t)), mode};
  }
  if (n_t <= h_b.rows())
    throw CapabilityError("null-space AN needs more transmit than receive antennas (n_t=" +
                          std::to_string(n_t) + ", n_r=" + std::to_string(h_b.rows()) + ")");
  if (!h_b.allFinite()) throw NumericError("non-finite channel entries");

  Eigen::JacobiSVD<CMatrix> svd(h_b, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = std::max(h_b.rows(), n_t) * std::numeric_limits<double>::epsilon() *
                     (sv.size() > 0 ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > tol) ++rank;
  const Eigen::Index dim = n_t - rank;
  const CMatrix v = svd.matrixV().rightCols(dim);
  return {v * v.adjoint() / std::sqrt(static_cast<double>(dim)), mode};
}

enum class Side { bob, eve };

struct Whitener {
  CMatrix w;
  CMatrix w_inv_sqrt;
  Side side = Side::bob;
};

inline double noise_variance(const SystemConfig& cfg, Side side) {
  return side == Side::bob ? cfg.sigma2_b : cfg.sigma2_e;
}

/// AN covariance seen through channel h: C = H T T^H H^H.
inline CMatrix an_covariance(const CMatrix& h, const AnProjector& t) {
  const CMatrix ht = h * t.t;
  return ht * ht.adjoint();
}

inline void check_beta(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0))
    throw ConfigError("power-allocation factor must lie in [0, 1], got " + std::to_string(beta));
}

/// W = (1 - beta) P C + sigma^2 I and its inverse principal square root.
/// Eigenvalues are floored at 1e-12 * sigma^2 before inversion.
inline Whitener build_whitener(const CMatrix& h, const AnProjector& t, double beta,
                               const SystemConfig& cfg, Side side) {
  check_beta(beta);
  const double sigma2 = noise_variance(cfg, side);
  const Eigen::Index n = h.rows();
  Whitener out;
  out.side = side;
  out.w = (1.0 - beta) * cfg.p * an_covariance(h, t) + sigma2 * CMatrix::Identity(n, n);
  if (!out.w.allFinite()) throw NumericError("non-finite AN-plus-noise covariance");
  // enforce exact Hermitian symmetry before the eigensolve
  out.w = (0.5 * (out.w + out.w.adjoint())).eval();

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(out.w);
  if (eig.info() != Eigen::Success) throw NumericError("whitener eigendecomposition failed");
  const double floor = 1e-12 * sigma2;
  Eigen::VectorXd inv_sqrt = eig.eigenvalues().cwiseMax(floor).cwiseSqrt().cwiseInverse();
  out.w_inv_sqrt = eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().adjoint();
  return out;
}

}  // namespace ssm
