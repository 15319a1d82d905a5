#pragma once

// Power-allocation strategies: exhaustive search on the Monte Carlo secrecy
// rate, the iterative difference-of-convex method on the cut-off-rate
// surrogate, the closed-form leakage-product (Max-P-SAN) rule, fixed-beta
// baselines and the FLOP-count models used to compare them.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ssm/channel_model.hpp"
#include "ssm/errors.hpp"
#include "ssm/info_metrics.hpp"
#include "ssm/numeric.hpp"
#include "ssm/rng.hpp"

namespace ssm {

struct PaResult {
  double beta = 0.0;
  double objective = 0.0;
  std::string objective_label;
  int iterations = 0;
  bool converged = true;
  bool fallback_used = false;
  std::vector<std::pair<int, double>> diagnostics;  // (iteration, objective)
};

/// Index of the largest value; ties go to the lowest index.
inline std::size_t first_argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] > values[best]) best = k;
  return best;
}

// ---------------------------------------------------------------------------
// Exhaustive search

struct EsSettings {
  int grid_points = 99;
  int n_samp = kDefaultMiSamples;

  void validate() const {
    if (grid_points < 2) throw ConfigError("exhaustive-search grid needs at least 2 points");
    if (n_samp < 1) throw ConfigError("n_samp must be >= 1");
  }
};

/// Open uniform grid k / (l + 1), k = 1..l.
inline std::vector<double> es_grid(int grid_points) {
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(grid_points));
  for (int k = 1; k <= grid_points; ++k) g.push_back(static_cast<double>(k) / (grid_points + 1));
  return g;
}

/// Grid search on the Monte Carlo secrecy rate. Every grid point reuses the
/// noise draws derived from `rng` (common random numbers).
inline PaResult es_optimize(const ChannelPair& ch, const AnProjector& t, const SystemConfig& cfg,
                            const TransmitAlphabet& alphabet, const EsSettings& es, const RngStream& rng) {
  es.validate();
  const std::vector<double> grid = es_grid(es.grid_points);
  std::vector<double> sr(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    sr[k] = instantaneous_secrecy_rate(ch, t, grid[k], cfg, alphabet, es.n_samp, rng).value;
  const std::size_t best = first_argmax(sr);
  PaResult r;
  r.beta = grid[best];
  r.objective = sr[best];
  r.objective_label = "secrecy_rate_bits";
  r.iterations = es.grid_points;
  r.converged = true;
  return r;
}

// ---------------------------------------------------------------------------
// Iterative difference-of-convex (CO) method

/// Shape of the tangent minorant of kappa_tilde_e used by the CO method.
/// `odds` is affine in u = beta / (1 - beta); kappa_tilde_e is a log-sum-exp
/// of functions affine in u, hence convex in u, so this tangent minorizes it
/// on all of [0, 1). `linear` is affine in beta; kappa_tilde_e is generally
/// not convex in beta, so that line can overshoot away from its anchor.
enum class Minorant { odds, linear };

struct CoSettings {
  double epsilon = 1e-4;
  int max_outer_iterations = 50;
  double inner_tolerance = 1e-6;
  double beta_0 = 0.5;
  Minorant minorant = Minorant::odds;

  void validate() const {
    if (!(epsilon > 0.0)) throw ConfigError("CO epsilon must be > 0");
    if (max_outer_iterations < 1) throw ConfigError("CO needs at least one outer iteration");
    if (!(inner_tolerance > 0.0)) throw ConfigError("CO inner tolerance must be > 0");
    if (!(beta_0 > 0.0 && beta_0 < 1.0)) throw ConfigError("CO initial point must lie in (0, 1)");
  }
};

/// Tangent of kappa_tilde_e at `anchor`: same value and same beta-derivative.
struct TangentMinorant {
  double anchor = 0.0;
  double value = 0.0;
  double slope = 0.0;  // d kappa_tilde_e / d beta at the anchor
  Minorant shape = Minorant::odds;

  double operator()(double beta) const {
    if (shape == Minorant::linear) return value + slope * (beta - anchor);
    if (slope == 0.0) return value;
    if (beta >= 1.0) return slope < 0.0 ? -std::numeric_limits<double>::infinity() : value;
    // d u / d beta = 1 / (1 - beta)^2, so the u-slope is slope * (1 - anchor)^2
    const double odds_slope = slope * (1.0 - anchor) * (1.0 - anchor);
    return value + odds_slope * (beta / (1.0 - beta) - anchor / (1.0 - anchor));
  }
};

inline TangentMinorant linearize_kappa_e(double anchor, const QSet& qs, Minorant shape = Minorant::odds) {
  return {anchor, kappa_tilde_e(anchor, qs), kappa_tilde_e_prime(anchor, qs), shape};
}

/// Maximizes the cut-off-rate surrogate kappa_tilde_e(beta) - kappa_tilde_b(beta)
/// by successive convex approximation: each outer step replaces
/// kappa_tilde_e with its tangent minorant g_E at the current iterate and
/// maximizes the concave model G = g_E - kappa_tilde_b by golden-section
/// search on (0, 1). A step that would lower G below its value at the
/// current iterate is rejected. Stops once |G_k - G_{k-1}| <= epsilon.
/// Diagnostics hold G after every outer step; iteration 0 is the surrogate
/// at beta_0.
inline PaResult co_optimize(const ChannelPair& ch, const AnProjector& t, const SystemConfig& cfg,
                            const TransmitAlphabet& alphabet, const CoSettings& co = {}) {
  co.validate();
  const QSet qs = build_qset(ch.h_e, t, alphabet);
  auto kappa_b = [&](double beta) { return kappa_tilde_b(beta, ch, t, cfg, alphabet); };

  PaResult r;
  r.objective_label = "cutoff_surrogate_G";
  r.fallback_used = qs.pseudo_inverse_used;
  r.converged = false;

  double beta = co.beta_0;
  double previous = kappa_tilde_e(beta, qs) - kappa_b(beta);
  r.diagnostics.emplace_back(0, previous);

  for (int k = 1; k <= co.max_outer_iterations; ++k) {
    const TangentMinorant g_e = linearize_kappa_e(beta, qs, co.minorant);
    auto model = [&](double b) { return g_e(b) - kappa_b(b); };
    const ScalarOptimum opt = golden_section_maximize(model, 0.0, 1.0, co.inner_tolerance);
    const double at_anchor = model(beta);
    double value = opt.value;
    if (opt.value >= at_anchor) {
      beta = opt.x;
    } else {
      value = at_anchor;
    }
    if (!std::isfinite(value)) throw NumericError("non-finite CO model value");
    r.diagnostics.emplace_back(k, value);
    r.iterations = k;
    if (std::abs(value - previous) <= co.epsilon) {
      r.converged = true;
      previous = value;
      break;
    }
    previous = value;
  }
  r.beta = beta;
  r.objective = previous;
  return r;
}

// ---------------------------------------------------------------------------
// Leakage-product (Max-P-SAN) closed form

struct LeakageStats {
  double kappa_b = 0.0;  // (P / n_t) tr(H_B^H H_B)
  double kappa_e = 0.0;  // (P / n_t) tr(H_E^H H_E)
  double omega_b = 0.0;  // P tr(C_B)
  double omega_e = 0.0;  // P tr(C_E)
};

inline LeakageStats compute_leakage_stats(const ChannelPair& ch, const AnProjector& t, const SystemConfig& cfg) {
  LeakageStats s;
  s.kappa_b = cfg.p / cfg.n_t * ch.h_b.squaredNorm();
  s.kappa_e = cfg.p / cfg.n_t * ch.h_e.squaredNorm();
  s.omega_b = cfg.p * an_covariance(ch.h_b, t).trace().real();
  s.omega_e = cfg.p * an_covariance(ch.h_e, t).trace().real();
  return s;
}

/// Product of SLNR and ANLNR as a function of beta:
///   F = kappa_B beta / (kappa_E beta + sigma_B^2 n_t n_r)
///     * (1 - beta) omega_E / ((1 - beta) omega_B + sigma_E^2 n_e)
inline double leakage_product(double beta, const LeakageStats& s, const SystemConfig& cfg) {
  const double a = cfg.sigma2_b * cfg.n_t * cfg.n_r;
  const double b = cfg.sigma2_e * cfg.n_e;
  return s.kappa_b * beta / (s.kappa_e * beta + a) * (1.0 - beta) * s.omega_e / ((1.0 - beta) * s.omega_b + b);
}

/// Which algebraic form of phi_c and phi_d to use. `derived` expands the
/// leakage-product denominator exactly; `printed` reproduces the published
/// coefficients for side-by-side comparison only.
enum class PhiForm { derived, printed };

struct PhiCoefficients {
  double phi_a = 0.0;
  double phi_b = 0.0;
  double phi_c = 0.0;
  double phi_d = 0.0;
  double phi_o = 0.0;  // phi_b - phi_c
  double delta = 0.0;  // phi_d^2 - phi_o phi_d
};

inline PhiCoefficients compute_phi(const LeakageStats& s, const SystemConfig& cfg,
                                   PhiForm form = PhiForm::derived) {
  const double a = cfg.sigma2_b * cfg.n_t * cfg.n_r;
  const double b = cfg.sigma2_e * cfg.n_e;
  PhiCoefficients phi;
  phi.phi_a = s.kappa_b * s.omega_e;
  phi.phi_b = s.kappa_e * s.omega_b;
  if (form == PhiForm::derived) {
    phi.phi_c = s.kappa_e * s.omega_b + s.kappa_e * b - a * s.omega_b;
    phi.phi_d = a * (s.omega_b + b);
  } else {
    phi.phi_c = s.kappa_e * s.omega_b + cfg.sigma2_b * s.kappa_e * cfg.n_e;
    phi.phi_d = cfg.sigma2_b * s.omega_b * cfg.n_r + cfg.sigma2_b * cfg.sigma2_e * cfg.n_r * cfg.n_e;
  }
  phi.phi_o = phi.phi_b - phi.phi_c;
  phi.delta = phi.phi_d * phi.phi_d - phi.phi_o * phi.phi_d;
  return phi;
}

/// F'(beta) = phi_a (phi_o beta^2 - 2 phi_d beta + phi_d) / (-phi_b beta^2 + phi_c beta + phi_d)^2
inline double leakage_product_derivative(double beta, const PhiCoefficients& phi) {
  const double denom = -phi.phi_b * beta * beta + phi.phi_c * beta + phi.phi_d;
  return phi.phi_a * (phi.phi_o * beta * beta - 2.0 * phi.phi_d * beta + phi.phi_d) / (denom * denom);
}

/// Points in the leakage-product fallback grid over [0.001, 0.999].
inline constexpr int kLeakageFallbackGrid = 100000;

/// Closed-form stationary point from given coefficients, with a dense-grid
/// fallback on F when the coefficient signs do not single out a root in (0, 1).
inline PaResult max_p_san_solve(const LeakageStats& s, const PhiCoefficients& phi, const SystemConfig& cfg) {
  PaResult r;
  r.objective_label = "leakage_product_F";
  r.iterations = 0;
  r.converged = true;

  if (phi.phi_o < 0.0 && phi.delta > 0.0) {
    const double root = std::sqrt(phi.delta);
    // (phi_d - sqrt(delta)) / phi_o, rationalized to avoid cancellation
    const double beta = phi.phi_d > 0.0 ? phi.phi_d / (phi.phi_d + root) : (phi.phi_d - root) / phi.phi_o;
    if (beta > 0.0 && beta < 1.0) {
      r.beta = beta;
      r.objective = leakage_product(beta, s, cfg);
      return r;
    }
  }

  r.fallback_used = true;
  const double lo = 0.001;
  const double hi = 0.999;
  double best_beta = lo;
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < kLeakageFallbackGrid; ++k) {
    const double beta = lo + (hi - lo) * k / (kLeakageFallbackGrid - 1);
    const double f = leakage_product(beta, s, cfg);
    if (f > best) {
      best = f;
      best_beta = beta;
    }
  }
  r.beta = best_beta;
  r.objective = best;
  return r;
}

inline PaResult max_p_san_optimize(const ChannelPair& ch, const AnProjector& t, const SystemConfig& cfg,
                                   PhiForm form = PhiForm::derived) {
  const LeakageStats s = compute_leakage_stats(ch, t, cfg);
  return max_p_san_solve(s, compute_phi(s, cfg, form), cfg);
}

// ---------------------------------------------------------------------------
// Fixed baselines and complexity model

inline PaResult fixed_beta(double beta0) {
  check_beta(beta0);
  PaResult r;
  r.beta = beta0;
  r.objective = std::numeric_limits<double>::quiet_NaN();
  r.objective_label = "none";
  return r;
}

struct FlopCounts {
  std::uint64_t c_es = 0;
  std::uint64_t c_co = 0;
  std::uint64_t c_mpsan = 0;
};

inline FlopCounts flop_estimates(const SystemConfig& cfg, std::uint64_t l, std::uint64_t n_samp,
                                 std::uint64_t d_ite) {
  if (l == 0 || n_samp == 0 || d_ite == 0) throw ConfigError("FLOP model arguments must be positive");
  const std::uint64_t nt = static_cast<std::uint64_t>(cfg.n_t);
  const std::uint64_t m = static_cast<std::uint64_t>(cfg.m);
  const std::uint64_t nr = static_cast<std::uint64_t>(cfg.n_r);
  const std::uint64_t ne = static_cast<std::uint64_t>(cfg.n_e);
  FlopCounts c;
  c.c_es = 2 * nt * nt * m * m * l * n_samp * (2 * (nr + ne) * nt * nt + nr + ne);
  c.c_co = 3 * nt * nt * m * m * d_ite * (2 * nt * nt + 2 * nt);
  c.c_mpsan = 2 * nt * nt * (2 * nr + 3 * ne) + 2 * nr * nr * nt + 2 * ne * ne * nt + nt + nr + ne;
  return c;
}

}  // namespace ssm
