#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cesarolab/kernel.hpp"
#include "cesarolab/test_functions.hpp"

namespace cesarolab {

// One application of the operator on measures: mu -> integral of p(x, .) dmu.
// Exact image atoms stay atoms; the continuous part is re-expressed on the
// grid from its cdf at the grid edges.
HybridMeasure apply_A(const Kernel& k, const HybridMeasure& mu);

// (T f)(x) = integral of f against p(x, .), in closed form per kernel.
double apply_T(const Kernel& k, const TestFunction& f, double x);

// Limit of (T f)(x) as x decreases to 0. Comparing against apply_T(k, f, 0)
// exposes kernels whose operator does not preserve continuity at 0.
double apply_T_limit_at_zero(const Kernel& k, const TestFunction& f);

// The two sides of the duality pairing <T f, mu> = <f, A mu>, computed along
// genuinely different routes (no shared intermediate), and their gap.
double integrate_T(const Kernel& k, const TestFunction& f, const HybridMeasure& mu);
double integrate_pushforward(const Kernel& k, const TestFunction& f,
                             const HybridMeasure& mu);
double duality_gap(const Kernel& k, const TestFunction& f, const HybridMeasure& mu);

// Drives mu_n = A^n mu_0 together with the running average
// lambda_n = (1/n) (A mu_0 + ... + A^n mu_0).
class IterationState {
 public:
  IterationState(Kernel kernel, HybridMeasure initial);

  void step();
  std::size_t n() const { return n_; }
  const Kernel& kernel() const { return kernel_; }
  const HybridMeasure& eta() const { return eta_; }
  const HybridMeasure& current() const { return current_; }
  const HybridMeasure& cesaro() const;  // requires n() >= 1

 private:
  Kernel kernel_;
  HybridMeasure eta_;  // the starting measure, kept for reference
  HybridMeasure current_;
  std::optional<HybridMeasure> cesaro_;
  std::size_t n_ = 0;
};

struct CesaroRow {
  std::size_t n;
  std::string function_name;
  double value;  // integral of the function against lambda_n
};

std::vector<CesaroRow> cesaro_integrals(const Kernel& k,
                                        const HybridMeasure& initial,
                                        std::size_t n_max,
                                        const TestFamily& family);

// Damped fixed-point iteration mu <- (1 - damping) mu + damping * A mu.
HybridMeasure damped_power_iterate(const Kernel& k, HybridMeasure state,
                                   std::size_t steps, double damping = 0.5);

}  // namespace cesarolab
