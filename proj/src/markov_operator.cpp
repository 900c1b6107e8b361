#include "cesarolab/markov_operator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "cesarolab/quadrature.hpp"

namespace cesarolab {
namespace {

// Integrate g over [lo, hi] with Gauss-Legendre panels split at the given
// interior cut points, so every panel sees a smooth integrand.
template <typename G>
double integrate_with_cuts(const G& g, double lo, double hi,
                           std::vector<double> cuts) {
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(),
                            [&](double c) { return !(c > lo && c < hi); }),
             cuts.end());
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) s += gl8(g, cuts[i], cuts[i + 1]);
  }
  return s;
}

// Average of f against p(., grid bin i) for every bin, exact via the
// antiderivative.
std::vector<double> bin_averages(const Grid& g, const TestFunction& f) {
  std::vector<double> avg(g.bin_count());
  for (std::size_t i = 0; i < avg.size(); ++i) {
    avg[i] = (f.antiderivative(g.edge(i + 1)) - f.antiderivative(g.edge(i))) /
             g.width(i);
  }
  return avg;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Integral of 1/x against atoms and density over (t, 1], evaluated many times
// against the same measure: suffix sums once, then O(log) per query.
class HarmonicTail {
 public:
  explicit HarmonicTail(const HybridMeasure& mu) : mu_(mu) {
    const Grid& g = *mu.grid();
    const std::size_t n = g.bin_count();
    bin_tail_.assign(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) {
      bin_tail_[i] = bin_tail_[i + 1] + mu.bin_masses()[i] / g.width(i) *
                                            (g.log_edge(i + 1) - g.log_edge(i));
    }
    for (const Atom& a : mu.atoms()) {
      if (a.x > 0.0) atom_x_.push_back(a.x);
    }
    atom_suffix_.assign(atom_x_.size() + 1, 0.0);
    for (std::size_t i = atom_x_.size(); i-- > 0;) {
      atom_suffix_[i] = atom_suffix_[i + 1] + mu.atom_mass_at(atom_x_[i]) / atom_x_[i];
    }
  }

  double operator()(double t) const {
    const Grid& g = *mu_.grid();
    double h = 0.0;
    if (t < 1.0) {
      const auto& edges = g.edges();
      if (t <= edges.front()) {
        h = bin_tail_[0];
      } else {
        const std::size_t j = g.bin_index(t);
        h = bin_tail_[j + 1];
        if (t < g.edge(j + 1)) {
          h += mu_.bin_masses()[j] / g.width(j) *
               (g.log_edge(j + 1) - std::log(t));
        }
      }
    }
    const auto it = std::upper_bound(atom_x_.begin(), atom_x_.end(), t);
    h += atom_suffix_[static_cast<std::size_t>(it - atom_x_.begin())];
    return h;
  }

  const std::vector<double>& atom_locations() const { return atom_x_; }

 private:
  const HybridMeasure& mu_;
  std::vector<double> bin_tail_;
  std::vector<double> atom_x_;
  std::vector<double> atom_suffix_;
};

}  // namespace

HybridMeasure apply_A(const Kernel& k, const HybridMeasure& mu) {
  PushforwardParts parts = pushforward_parts(k, mu);
  return project_edge_cdf(parts.edge_cdf, parts.atoms, mu.grid());
}

double apply_T(const Kernel& k, const TestFunction& f, double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument("apply_T: state outside [0, 1]");
  }
  struct Visitor {
    const TestFunction& f;
    double x;

    double operator()(const ShrinkingUniform&) const {
      if (x == 0.0) return f.at_one();
      return f.antiderivative(x) / x;
    }
    double operator()(const SquaringMap&) const {
      return x < 1.0 ? f(x * x) : f.at_zero();
    }
    double operator()(const DeterministicMap& dm) const { return f(dm.value(x)); }
    double operator()(const GridStochastic& gs) const {
      return dot(gs.row_for(x), bin_averages(*gs.grid(), f));
    }
  };
  return std::visit(Visitor{f, x}, k);
}

double apply_T_limit_at_zero(const Kernel& k, const TestFunction& f) {
  struct Visitor {
    const TestFunction& f;

    double operator()(const ShrinkingUniform&) const { return f.at_zero(); }
    double operator()(const SquaringMap&) const { return f.at_zero(); }
    double operator()(const DeterministicMap& dm) const {
      return f(dm.limit_from_right_at_zero());
    }
    double operator()(const GridStochastic& gs) const {
      return dot(gs.row(0), bin_averages(*gs.grid(), f));
    }
  };
  return std::visit(Visitor{f}, k);
}

double integrate_T(const Kernel& k, const TestFunction& f,
                   const HybridMeasure& mu) {
  const Grid& g = *mu.grid();
  struct Visitor {
    const Kernel& k;
    const TestFunction& f;
    const HybridMeasure& mu;
    const Grid& g;

    double atoms_and_bucket() const {
      double s = 0.0;
      for (const Atom& a : mu.atoms()) s += a.w * apply_T(k, f, a.x);
      s += mu.near_zero_mass() * apply_T_limit_at_zero(k, f);
      return s;
    }

    double density_via(const std::function<double(double)>& tf,
                       const std::vector<double>& cuts) const {
      double s = 0.0;
      for (std::size_t i = 0; i < g.bin_count(); ++i) {
        const double m = mu.bin_masses()[i];
        if (m == 0.0) continue;
        s += m / g.width(i) *
             integrate_with_cuts(tf, g.edge(i), g.edge(i + 1), cuts);
      }
      return s;
    }

    double operator()(const ShrinkingUniform&) const {
      auto tf = [&](double x) { return f.antiderivative(x) / x; };
      return atoms_and_bucket() + density_via(tf, f.breakpoints());
    }
    double operator()(const SquaringMap&) const {
      auto tf = [&](double x) { return f(x * x); };
      std::vector<double> cuts;
      for (double b : f.breakpoints()) {
        if (b > 0.0) cuts.push_back(std::sqrt(b));
      }
      return atoms_and_bucket() + density_via(tf, cuts);
    }
    double operator()(const DeterministicMap& dm) const {
      auto tf = [&](double x) { return f(dm.value(x)); };
      std::vector<double> cuts;
      for (const MapPiece& p : dm.pieces()) {
        cuts.push_back(p.lo);
        for (double b : f.breakpoints()) {
          if (b > p.image_lo() && b < p.image_hi()) {
            cuts.push_back(std::clamp(p.inverse(b), p.lo, p.hi));
          }
        }
      }
      return atoms_and_bucket() + density_via(tf, cuts);
    }
    double operator()(const GridStochastic& gs) const {
      const auto avg = bin_averages(g, f);
      double s = 0.0;
      for (const Atom& a : mu.atoms()) s += a.w * dot(gs.row_for(a.x), avg);
      s += mu.near_zero_mass() * dot(gs.row(0), avg);
      for (std::size_t i = 0; i < g.bin_count(); ++i) {
        if (mu.bin_masses()[i] != 0.0) {
          s += mu.bin_masses()[i] * dot(gs.row(i), avg);
        }
      }
      return s;
    }
  };
  return std::visit(Visitor{k, f, mu, g}, k);
}

double integrate_pushforward(const Kernel& k, const TestFunction& f,
                             const HybridMeasure& mu) {
  const Grid& g = *mu.grid();
  struct Visitor {
    const TestFunction& f;
    const HybridMeasure& mu;
    const Grid& g;

    // Image density of the uniform-shrinking kernel is the harmonic tail, so
    // the continuous part pairs as an integral of f(t) H(t) over (0, 1].
    double operator()(const ShrinkingUniform&) const {
      const HarmonicTail tail(mu);
      double s = mu.atom_mass_at(0.0) * f.at_one() +
                 mu.near_zero_mass() * f.at_zero();
      std::vector<double> cuts(g.edges().begin(), g.edges().end());
      cuts.insert(cuts.end(), tail.atom_locations().begin(),
                  tail.atom_locations().end());
      const auto& bp = f.breakpoints();
      cuts.insert(cuts.end(), bp.begin(), bp.end());
      auto integrand = [&](double t) { return f(t) * tail(t); };
      s += integrate_with_cuts(integrand, 0.0, 1.0, std::move(cuts));
      return s;
    }
    // Squaring pushes the density of each source bin onto (lo^2, hi^2] with
    // image density rho / (2 sqrt t).
    double operator()(const SquaringMap&) const {
      double s = mu.near_zero_mass() * f.at_zero();
      for (const Atom& a : mu.atoms()) {
        s += a.w * (a.x < 1.0 ? f(a.x * a.x) : f.at_zero());
      }
      for (std::size_t i = 0; i < g.bin_count(); ++i) {
        const double m = mu.bin_masses()[i];
        if (m == 0.0) continue;
        const double rho = m / g.width(i);
        auto integrand = [&](double t) { return f(t) * rho / (2.0 * std::sqrt(t)); };
        s += integrate_with_cuts(integrand, g.edge(i) * g.edge(i),
                                 g.edge(i + 1) * g.edge(i + 1), f.breakpoints());
      }
      return s;
    }
    // Each monotone piece maps a source sub-interval with constant density to
    // an image interval; substitute t = piece(x).
    double operator()(const DeterministicMap& dm) const {
      double s = 0.0;
      for (const Atom& a : mu.atoms()) s += a.w * f(dm.value(a.x));
      const double limit = dm.limit_from_right_at_zero();
      s += mu.near_zero_mass() * (limit == 0.0 ? f.at_zero() : f(limit));
      for (const MapPiece& p : dm.pieces()) {
        for (std::size_t i = 0; i < g.bin_count(); ++i) {
          const double m = mu.bin_masses()[i];
          if (m == 0.0) continue;
          const double slo = std::max(p.lo, g.edge(i));
          const double shi = std::min(p.hi, g.edge(i + 1));
          if (slo >= shi) continue;
          const double rho = m / g.width(i);
          const double ta = p.value(slo), tb = p.value(shi);
          auto jacobian = [&](double t) {
            return p.kind == MapPiece::Kind::kAffine
                       ? 1.0 / std::abs(p.b)
                       : std::pow(t, 1.0 / p.exponent - 1.0) / p.exponent;
          };
          auto integrand = [&](double t) { return f(t) * rho * jacobian(t); };
          s += integrate_with_cuts(integrand, std::min(ta, tb), std::max(ta, tb),
                                   f.breakpoints());
        }
      }
      return s;
    }
    // The image of a grid-stochastic step lives on the bins, so the pairing
    // is a plain dot product with the exact per-bin averages.
    double operator()(const GridStochastic& gs) const {
      const PushforwardParts parts = pushforward_parts(Kernel{gs}, mu);
      const auto avg = bin_averages(g, f);
      double s = 0.0;
      for (std::size_t i = 0; i < g.bin_count(); ++i) {
        s += (parts.edge_cdf[i + 1] - parts.edge_cdf[i]) * avg[i];
      }
      return s;
    }
  };
  return std::visit(Visitor{f, mu, g}, k);
}

double duality_gap(const Kernel& k, const TestFunction& f,
                   const HybridMeasure& mu) {
  return std::abs(integrate_T(k, f, mu) - integrate_pushforward(k, f, mu));
}

IterationState::IterationState(Kernel kernel, HybridMeasure initial)
    : kernel_(std::move(kernel)), eta_(initial), current_(std::move(initial)) {}

void IterationState::step() {
  current_ = apply_A(kernel_, current_);
  ++n_;
  if (n_ == 1) {
    cesaro_ = current_;
  } else {
    const double n = static_cast<double>(n_);
    cesaro_ = mix2((n - 1.0) / n, *cesaro_, 1.0 / n, current_);
  }
}

const HybridMeasure& IterationState::cesaro() const {
  if (!cesaro_) throw std::logic_error("cesaro average needs at least one step");
  return *cesaro_;
}

std::vector<CesaroRow> cesaro_integrals(const Kernel& k,
                                        const HybridMeasure& initial,
                                        std::size_t n_max,
                                        const TestFamily& family) {
  std::vector<CesaroRow> rows;
  rows.reserve(n_max * family.size());
  IterationState state(k, initial);
  for (std::size_t n = 1; n <= n_max; ++n) {
    state.step();
    for (const TestFunction& f : family) {
      rows.push_back({n, f.name(), integrate(state.cesaro(), f)});
    }
  }
  return rows;
}

HybridMeasure damped_power_iterate(const Kernel& k, HybridMeasure state,
                                   std::size_t steps, double damping) {
  if (!(damping > 0.0 && damping <= 1.0)) {
    throw std::invalid_argument("damped_power_iterate: damping must be in (0, 1]");
  }
  for (std::size_t s = 0; s < steps; ++s) {
    HybridMeasure next = apply_A(k, state);
    state = damping == 1.0 ? std::move(next)
                           : mix2(1.0 - damping, state, damping, next);
  }
  return state;
}

}  // namespace cesarolab
