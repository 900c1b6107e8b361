#include "cesarolab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace cesarolab {

StepSample sample_step(const Kernel& k, double x, CounterRng& rng) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument("sample_step: state outside [0, 1]");
  }
  struct Visitor {
    double x;
    CounterRng& rng;

    StepSample operator()(const ShrinkingUniform&) const {
      if (x == 0.0) return {1.0, true};
      double y = x * rng.uniform_open01();
      if (y == 0.0) y = std::numeric_limits<double>::denorm_min();
      return {y, false};
    }
    StepSample operator()(const SquaringMap&) const {
      return {x < 1.0 ? x * x : 0.0, true};
    }
    StepSample operator()(const DeterministicMap& dm) const {
      return {dm.value(x), true};
    }
    StepSample operator()(const GridStochastic& gs) const {
      const Grid& g = *gs.grid();
      const auto row = gs.row_for(x);
      const double u = rng.uniform_open01();
      double cum = 0.0;
      std::size_t target = row.size() - 1;
      for (std::size_t i = 0; i < row.size(); ++i) {
        cum += row[i];
        if (u <= cum) {
          target = i;
          break;
        }
      }
      const double y = g.edge(target) + rng.uniform_open01() * g.width(target);
      return {std::min(y, 1.0), false};
    }
  };
  return std::visit(Visitor{x, rng}, k);
}

double sample_from(const HybridMeasure& mu, CounterRng& rng) {
  const double total = mu.total_mass();
  if (!(total > 0.0)) {
    throw std::invalid_argument("sample_from: measure has no mass");
  }
  const double u = rng.uniform_open01() * total;
  double cum = 0.0;
  for (const Atom& a : mu.atoms()) {
    cum += a.w;
    if (u <= cum) return a.x;
  }
  const Grid& g = *mu.grid();
  for (std::size_t i = 0; i < g.bin_count(); ++i) {
    cum += mu.bin_masses()[i];
    if (u <= cum) return g.edge(i) + rng.uniform_open01() * g.width(i);
  }
  return rng.uniform_open01() * g.epsilon_min();
}

void for_each_trajectory(
    const SimConfig& cfg,
    const std::function<void(std::size_t, std::size_t, double, bool)>& visit) {
  for (std::size_t r = 0; r < cfg.replicas; ++r) {
    CounterRng rng(cfg.seed, r);
    double x = sample_from(cfg.initial, rng);
    for (std::size_t k = 1; k <= cfg.horizon; ++k) {
      const StepSample s = sample_step(cfg.kernel, x, rng);
      visit(r, k, s.x, s.deterministic);
      x = s.x;
    }
  }
}

HybridMeasure empirical_cesaro(const SimConfig& cfg) {
  const auto grid = cfg.initial.grid();
  const double eps = grid->epsilon_min();
  std::map<double, std::uint64_t> atom_counts;
  std::vector<std::uint64_t> bin_counts(grid->bin_count(), 0);
  std::uint64_t near_zero = 0;

  for_each_trajectory(cfg, [&](std::size_t, std::size_t, double x, bool det) {
    if (x == 0.0) {
      ++atom_counts[0.0];
    } else if (x <= eps) {
      ++near_zero;
    } else if (det) {
      ++atom_counts[x];
    } else {
      ++bin_counts[grid->bin_index(x)];
    }
  });

  const double scale =
      1.0 / (static_cast<double>(cfg.replicas) * static_cast<double>(cfg.horizon));
  std::vector<Atom> atoms;
  atoms.reserve(atom_counts.size());
  for (const auto& [x, c] : atom_counts) {
    atoms.push_back({x, static_cast<double>(c) * scale});
  }
  std::vector<double> bins(bin_counts.size());
  for (std::size_t i = 0; i < bins.size(); ++i) {
    bins[i] = static_cast<double>(bin_counts[i]) * scale;
  }
  return HybridMeasure(grid, std::move(atoms), std::move(bins),
                       static_cast<double>(near_zero) * scale);
}

std::vector<McCompareRow> mc_vs_operator(const SimConfig& cfg,
                                         const TestFamily& family) {
  if (cfg.replicas == 0 || cfg.horizon == 0) {
    throw std::invalid_argument("mc_vs_operator: needs replicas and horizon >= 1");
  }
  // Per-replica trajectory means, accumulated in one pass.
  std::vector<std::vector<double>> sums(cfg.replicas,
                                        std::vector<double>(family.size(), 0.0));
  for_each_trajectory(cfg, [&](std::size_t r, std::size_t, double x, bool) {
    auto& row = sums[r];
    for (std::size_t i = 0; i < family.size(); ++i) row[i] += family[i](x);
  });

  const HybridMeasure emp = empirical_cesaro(cfg);
  const auto rows = cesaro_integrals(cfg.kernel, cfg.initial, cfg.horizon, family);
  const std::size_t off = (cfg.horizon - 1) * family.size();

  std::vector<McCompareRow> out;
  out.reserve(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    // Spread of the per-replica trajectory means, via Welford.
    double mean = 0.0, m2 = 0.0;
    for (std::size_t r = 0; r < cfg.replicas; ++r) {
      const double v = sums[r][i] / static_cast<double>(cfg.horizon);
      const double d = v - mean;
      mean += d / static_cast<double>(r + 1);
      m2 += d * (v - mean);
    }
    const double var =
        cfg.replicas > 1 ? m2 / static_cast<double>(cfg.replicas - 1) : 0.0;
    const double se = std::sqrt(std::max(var, 0.0) /
                                static_cast<double>(cfg.replicas));
    const double mc = integrate(emp, family[i]);
    const double op = rows[off + i].value;
    const double diff = mc - op;
    double z;
    if (se == 0.0) {
      z = std::abs(diff) <= 1e-12
              ? 0.0
              : std::copysign(std::numeric_limits<double>::infinity(), diff);
    } else {
      z = diff / se;
    }
    out.push_back({family[i].name(), mc, op, se, z});
  }
  return out;
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  if (samples.empty()) {
    throw std::invalid_argument("ks_statistic: no samples");
  }
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double F = cdf(samples[i]);
    d = std::max(d, std::max(F - static_cast<double>(i) / n,
                             static_cast<double>(i + 1) / n - F));
  }
  return d;
}

HybridMeasure random_probability_measure(std::shared_ptr<const Grid> grid,
                                         CounterRng& rng) {
  std::vector<Atom> atoms;
  const std::size_t atom_count = rng.next_u64() % 4;
  for (std::size_t i = 0; i < atom_count; ++i) {
    const double roll = rng.uniform_open01();
    double x;
    if (roll < 0.15) {
      x = 0.0;
    } else if (roll < 0.3) {
      x = 1.0;
    } else {
      x = rng.uniform_open01();
    }
    atoms.push_back({x, 0.05 + rng.uniform_open01()});
  }
  std::vector<double> bins(grid->bin_count());
  for (double& b : bins) {
    const double u = rng.uniform_open01();
    b = u * u;
  }
  const double near_zero = 0.25 * rng.uniform_open01();

  double total = near_zero;
  for (const Atom& a : atoms) total += a.w;
  for (double b : bins) total += b;
  for (Atom& a : atoms) a.w /= total;
  for (double& b : bins) b /= total;
  return HybridMeasure(std::move(grid), std::move(atoms), std::move(bins),
                       near_zero / total);
}

}  // namespace cesarolab
