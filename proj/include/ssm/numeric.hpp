#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>

namespace ssm {

/// log(sum_k exp(x_k)) with max-shift stabilization. Empty input gives -inf.
inline double log_sum_exp(std::span<const double> x) {
  if (x.empty()) return -std::numeric_limits<double>::infinity();
  const double shift = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(shift)) return shift;
  double sum = 0.0;
  for (double v : x) sum += std::exp(v - shift);
  return shift + std::log(sum);
}

/// Base-2 variant of log_sum_exp; log2 of an integral sum is exact.
inline double log2_sum_exp(std::span<const double> x) {
  if (x.empty()) return -std::numeric_limits<double>::infinity();
  const double shift = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(shift)) return shift;
  double sum = 0.0;
  for (double v : x) sum += std::exp(v - shift);
  return shift / std::numbers::ln2 + std::log2(sum);
}

struct ScalarOptimum {
  double x;
  double value;
  int evaluations;
};

/// Golden-section maximization of a unimodal function on [lo, hi], stopping
/// once the bracket is narrower than tol. Only interior points are sampled.
template <class F>
ScalarOptimum golden_section_maximize(F&& f, double lo, double hi, double tol) {
  constexpr double inv_phi = 0.6180339887498948482;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int evals = 2;
  while (b - a > tol) {
    // ties move the bracket toward the smaller abscissa
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  if (fc >= fd) return {c, fc, evals};
  return {d, fd, evals};
}

}  // namespace ssm
