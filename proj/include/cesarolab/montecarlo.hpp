#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cesarolab/markov_operator.hpp"
#include "cesarolab/rng.hpp"

namespace cesarolab {

struct StepSample {
  double x;
  bool deterministic;  // true when the step had no randomness
};

// One step of the chain from x.  Multiplicative steps are clamped away from
// exact zero so rounding cannot silently move mass onto the absorbing point;
// genuinely deterministic arrivals at 0 are kept exact.
StepSample sample_step(const Kernel& k, double x, CounterRng& rng);

// Draw from a hybrid measure: atoms by weight, bins uniformly inside the bin,
// the near-zero bucket uniformly on (0, epsilon_min).
double sample_from(const HybridMeasure& mu, CounterRng& rng);

struct SimConfig {
  Kernel kernel;
  HybridMeasure initial;
  std::size_t horizon = 100;   // steps per trajectory
  std::size_t replicas = 1000;
  std::uint64_t seed = 1;
};

// Visits every post-step state: visit(replica, step, state, deterministic),
// step = 1..horizon.  Replicas use independent counter streams, so any subset
// can be reproduced in isolation.
void for_each_trajectory(
    const SimConfig& cfg,
    const std::function<void(std::size_t, std::size_t, double, bool)>& visit);

// Occupation average of all visited states as a hybrid measure: exact
// deterministic arrivals become atoms, random visits land in their bin, and
// visits at or below epsilon_min land in the near-zero bucket.  Counts are
// integers until the final scaling.
HybridMeasure empirical_cesaro(const SimConfig& cfg);

struct McCompareRow {
  std::string function_name;
  double mc_estimate;
  double operator_value;
  double std_error;
  double z;
};

// Integrals of the family against the empirical occupation measure, compared
// with the operator-side Cesaro integrals at n = horizon; z-scores use the
// standard error of the per-replica trajectory means.
std::vector<McCompareRow> mc_vs_operator(const SimConfig& cfg,
                                         const TestFamily& family);

// Kolmogorov-Smirnov statistic of samples against a reference cdf.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);

// A reproducible, loosely structured probability measure: up to three atoms
// (sometimes exactly at 0 or 1), a rough bin profile, and some bucket mass.
HybridMeasure random_probability_measure(std::shared_ptr<const Grid> grid,
                                         CounterRng& rng);

}  // namespace cesarolab
