#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace cesarolab {

// Log-uniform partition of (epsilon_min, 1] into half-open bins
// (edge[i], edge[i+1]].  Mass below edge[0] is not resolved spatially;
// measures keep it in a separate near-zero bucket.
class Grid {
 public:
  Grid(double epsilon_min, std::size_t bin_count);

  static std::shared_ptr<const Grid> make(double epsilon_min, std::size_t bin_count);

  double epsilon_min() const { return epsilon_min_; }
  std::size_t bin_count() const { return edges_.size() - 1; }
  const std::vector<double>& edges() const { return edges_; }
  double edge(std::size_t i) const { return edges_[i]; }
  double log_edge(std::size_t i) const { return log_edges_[i]; }
  double width(std::size_t i) const { return edges_[i + 1] - edges_[i]; }

  // Index i with x in (edge[i], edge[i+1]]; requires epsilon_min < x <= 1.
  std::size_t bin_index(double x) const;

  bool same_layout(const Grid& other) const;

 private:
  double epsilon_min_;
  std::vector<double> edges_;
  std::vector<double> log_edges_;
};

}  // namespace cesarolab
