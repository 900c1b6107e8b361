#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cesarolab/grid.hpp"
#include "cesarolab/test_functions.hpp"

namespace cesarolab {

struct Atom {
  double x;
  double w;
};

// Nonnegative finite measure on [0, 1]: exact atoms, a piecewise-constant
// density over the grid bins, and an unresolved bucket for mass inside
// (0, epsilon_min].  Atoms are never smeared into bins; the bucket integrates
// test functions at their value in 0.  Immutable once built.
class HybridMeasure {
 public:
  HybridMeasure(std::shared_ptr<const Grid> grid, std::vector<Atom> atoms,
                std::vector<double> bin_masses, double near_zero_mass);

  static HybridMeasure zero(std::shared_ptr<const Grid> grid);
  static HybridMeasure point_mass(std::shared_ptr<const Grid> grid, double x,
                                  double w = 1.0);
  // Lebesgue measure on (0, 1]: bin widths plus epsilon_min in the bucket.
  static HybridMeasure lebesgue(std::shared_ptr<const Grid> grid);

  const std::shared_ptr<const Grid>& grid() const { return grid_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<double>& bin_masses() const { return bin_masses_; }
  double near_zero_mass() const { return near_zero_mass_; }

  double total_mass() const { return total_mass_; }
  double atom_mass() const { return atom_mass_; }
  double atom_mass_at(double x) const;
  bool is_probability(double tol = 1e-12) const;

  // Mass of the density part in (0, x]; ignores atoms and the bucket.
  double density_mass_below(double x) const;

  std::string to_json_string(int indent = -1) const;
  static HybridMeasure from_json_string(const std::string& text);
  static HybridMeasure from_json_string(const std::string& text,
                                        std::shared_ptr<const Grid> grid);

 private:
  std::shared_ptr<const Grid> grid_;
  std::vector<Atom> atoms_;  // sorted by location, distinct, positive weight
  std::vector<double> bin_masses_;
  double near_zero_mass_ = 0.0;
  double atom_mass_ = 0.0;
  double total_mass_ = 0.0;
  std::vector<double> bin_prefix_;  // bin_prefix_[i] = sum of bin_masses_[0..i)
};

double integrate(const HybridMeasure& mu, const TestFunction& f);

// Measure of the interval between a and b with selectable endpoint inclusion.
// The bucket counts only when the interval covers all of (0, epsilon_min].
double mass_of_interval(const HybridMeasure& mu, double a, double b,
                        bool include_a, bool include_b);

struct WeightedTerm {
  double weight;
  const HybridMeasure* measure;
};

// Nonnegative linear combination; all terms must share the grid layout.
HybridMeasure mix(std::span<const WeightedTerm> terms);
HybridMeasure mix2(double wa, const HybridMeasure& a, double wb,
                   const HybridMeasure& b);

// Rebuild a measure from cdf(t) = measure([0, t]) sampled on the grid edges.
// Atoms must be listed explicitly so their jumps are subtracted from the bins
// and kept exact; cdf(edge[0]) minus atoms at or below epsilon_min feeds the
// bucket.  Decreasing samples beyond rounding noise are rejected.
HybridMeasure project_cdf_to_grid(const std::function<double(double)>& cdf,
                                  std::span<const Atom> atoms,
                                  std::shared_ptr<const Grid> grid);
HybridMeasure project_edge_cdf(std::span<const double> cdf_at_edges,
                               std::span<const Atom> atoms,
                               std::shared_ptr<const Grid> grid);

}  // namespace cesarolab
