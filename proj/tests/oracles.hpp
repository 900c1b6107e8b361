#pragma once

// Test-side reference numerics, kept deliberately independent of the library
// implementation: plain adaptive Simpson instead of Gauss-Legendre panels,
// closed-form laws instead of grid projections.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>

#include "cesarolab/hybrid_measure.hpp"

namespace oracles {

inline double simpson_rec(const std::function<double(double)>& f, double a,
                          double b, double fa, double fm, double fb,
                          double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate_simpson(const std::function<double(double)>& f,
                                double a, double b, double tol = 1e-13) {
  if (!(b > a)) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

// Pairing <f, mu> recomputed from scratch with Simpson panels per bin.
inline double integrate_oracle(const cesarolab::HybridMeasure& mu,
                               const std::function<double(double)>& f) {
  const cesarolab::Grid& g = *mu.grid();
  double s = mu.near_zero_mass() * f(0.0);
  for (const cesarolab::Atom& a : mu.atoms()) s += a.w * f(a.x);
  for (std::size_t i = 0; i < g.bin_count(); ++i) {
    const double m = mu.bin_masses()[i];
    if (m != 0.0) {
      s += m / g.width(i) * integrate_simpson(f, g.edge(i), g.edge(i + 1));
    }
  }
  return s;
}

// Law of a product of k independent uniforms (equivalently, the k-step image
// of a point mass at 1 under the shrinking-uniform chain).
inline double product_uniform_cdf(std::size_t k, double t) {
  if (k == 0) throw std::invalid_argument("product_uniform_cdf: k >= 1");
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double x = -std::log(t);
  double term = 1.0, sum = 1.0;
  for (std::size_t j = 1; j < k; ++j) {
    term *= x / static_cast<double>(j);
    sum += term;
  }
  return t * sum;
}

inline double product_uniform_density(std::size_t k, double y) {
  if (k == 0 || y <= 0.0 || y > 1.0) return 0.0;
  double d = 1.0;
  for (std::size_t j = 1; j < k; ++j) {
    d *= -std::log(y) / static_cast<double>(j);
  }
  return d;
}

inline double product_uniform_moment(std::size_t k, int m) {
  return std::pow(static_cast<double>(m + 1), -static_cast<double>(k));
}

// Two-sided Kolmogorov-Smirnov critical value at level alpha (asymptotic).
inline double ks_critical(double alpha, std::size_t n) {
  return std::sqrt(-std::log(alpha / 2.0) / 2.0) /
         std::sqrt(static_cast<double>(n));
}

}  // namespace oracles
