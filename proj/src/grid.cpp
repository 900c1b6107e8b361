#include "cesarolab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cesarolab {

Grid::Grid(double epsilon_min, std::size_t bin_count) : epsilon_min_(epsilon_min) {
  if (!(epsilon_min > 0.0) || !(epsilon_min < 1.0) || !std::isfinite(epsilon_min)) {
    throw std::invalid_argument("Grid: epsilon_min must lie in (0, 1)");
  }
  if (bin_count == 0) {
    throw std::invalid_argument("Grid: bin_count must be positive");
  }
  const double log_eps = std::log(epsilon_min);
  edges_.resize(bin_count + 1);
  log_edges_.resize(bin_count + 1);
  for (std::size_t i = 0; i <= bin_count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(bin_count);
    log_edges_[i] = log_eps * (1.0 - t);
    edges_[i] = std::exp(log_edges_[i]);
  }
  // Pin the boundary edges so queries against epsilon_min and 1 are exact.
  edges_.front() = epsilon_min;
  log_edges_.front() = log_eps;
  edges_.back() = 1.0;
  log_edges_.back() = 0.0;
}

std::shared_ptr<const Grid> Grid::make(double epsilon_min, std::size_t bin_count) {
  return std::make_shared<const Grid>(epsilon_min, bin_count);
}

std::size_t Grid::bin_index(double x) const {
  if (!(x > epsilon_min_) || !(x <= 1.0)) {
    throw std::invalid_argument("Grid::bin_index: x outside (epsilon_min, 1]");
  }
  // Bins are left-open, so the first edge >= x bounds the containing bin.
  auto it = std::lower_bound(edges_.begin(), edges_.end(), x);
  const auto j = static_cast<std::size_t>(it - edges_.begin());
  return j == 0 ? 0 : j - 1;
}

bool Grid::same_layout(const Grid& other) const {
  return epsilon_min_ == other.epsilon_min_ && bin_count() == other.bin_count();
}

}  // namespace cesarolab
