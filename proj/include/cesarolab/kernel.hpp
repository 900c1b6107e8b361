#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "cesarolab/hybrid_measure.hpp"

namespace cesarolab {

// p(x, .) is uniform on (0, x) for x in (0, 1]; the state 0 jumps to 1.
struct ShrinkingUniform {};

// Deterministic x -> x^2 on [0, 1) with the endpoint 1 sent to 0.
struct SquaringMap {};

// One strictly monotone continuous branch of a deterministic map.
struct MapPiece {
  enum class Kind { kAffine, kPower };
  double lo = 0.0, hi = 1.0;  // domain [lo, hi)
  Kind kind = Kind::kAffine;
  double a = 0.0, b = 1.0;    // affine: x -> a + b x, b != 0
  double exponent = 1.0;      // power: x -> x^p, p > 0

  double value(double x) const;
  double inverse(double y) const;  // exact on the closed image
  double derivative(double x) const;
  bool increasing() const;
  double image_lo() const;  // inf of the image over [lo, hi]
  double image_hi() const;
};

struct PointImage {
  double x;
  double value;
};

// Piecewise strictly monotone map of [0, 1] into itself with finitely many
// point overrides (jump points).  Pieces tile [0, 1] contiguously.
class DeterministicMap {
 public:
  DeterministicMap(std::vector<MapPiece> pieces, std::vector<PointImage> points);

  double value(double x) const;
  double limit_from_right_at_zero() const;
  const std::vector<MapPiece>& pieces() const { return pieces_; }
  const std::vector<PointImage>& points() const { return points_; }

 private:
  std::vector<MapPiece> pieces_;
  std::vector<PointImage> points_;  // sorted by x
};

// Row-stochastic transition matrix over a grid's bins.  p(x, .) is constant on
// each source bin; states at or below epsilon_min use the first row and exact
// point rows may override single locations (by default the state 0 also uses
// the first row).
class GridStochastic {
 public:
  struct PointRow {
    double x;
    std::vector<double> row;
  };

  GridStochastic(std::shared_ptr<const Grid> grid, std::vector<double> row_major,
                 std::vector<PointRow> point_rows = {});

  static GridStochastic from_csv(std::shared_ptr<const Grid> grid,
                                 const std::filesystem::path& matrix_path);

  const std::shared_ptr<const Grid>& grid() const { return grid_; }
  std::size_t size() const { return n_; }
  // Row governing transitions out of x (0 <= x <= 1).
  std::span<const double> row_for(double x) const;
  std::span<const double> row(std::size_t i) const;

 private:
  std::shared_ptr<const Grid> grid_;
  std::size_t n_;
  std::vector<double> rows_;  // n_ x n_, row-major
  std::vector<PointRow> point_rows_;
};

using Kernel =
    std::variant<ShrinkingUniform, SquaringMap, DeterministicMap, GridStochastic>;

std::string kernel_name(const Kernel& k);

// Distribution of one step from x, represented on the given grid.
HybridMeasure transition(const Kernel& k, double x,
                         std::shared_ptr<const Grid> grid);

// p(x, (a, b)) for an open interval, in closed form.
double transition_prob(const Kernel& k, double x, double a, double b);

// cdf of the image measure: t -> (A mu)((0, t]).  The set (0, t] is taken
// literally: image atoms landing at exactly 0 never enter it, and an image
// atom at 1 enters only when t = 1.
double pushforward_cdf(const Kernel& k, const HybridMeasure& mu, double t);

// Edge-sampled cdf of A mu together with its exact atoms, ready for
// projection back onto the grid.
struct PushforwardParts {
  std::vector<double> edge_cdf;  // (A mu)([0, edge_j]) including listed atoms
  std::vector<Atom> atoms;       // exact atoms of A mu
};
PushforwardParts pushforward_parts(const Kernel& k, const HybridMeasure& mu);

// Kernel descriptor JSON: {"kernel": "shrinking_uniform" | "squaring_map"} or
// {"kernel": "deterministic", "pieces": [...], "points": [...]} or
// {"kernel": "grid_stochastic", "matrix_path": "..."}.
Kernel kernel_from_json_string(const std::string& text,
                               std::shared_ptr<const Grid> grid,
                               const std::filesystem::path& base_dir = {});

}  // namespace cesarolab
