#include "cesarolab/hybrid_measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <json.hpp>


namespace cesarolab {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

HybridMeasure::HybridMeasure(std::shared_ptr<const Grid> grid,
                             std::vector<Atom> atoms,
                             std::vector<double> bin_masses,
                             double near_zero_mass)
    : grid_(std::move(grid)),
      bin_masses_(std::move(bin_masses)),
      near_zero_mass_(near_zero_mass) {
  require(grid_ != nullptr, "HybridMeasure: null grid");
  require(bin_masses_.size() == grid_->bin_count(),
          "HybridMeasure: bin vector does not match grid");
  require(std::isfinite(near_zero_mass_) && near_zero_mass_ >= 0.0,
          "HybridMeasure: near_zero_mass must be finite and >= 0");
  for (double m : bin_masses_) {
    require(std::isfinite(m) && m >= 0.0,
            "HybridMeasure: bin masses must be finite and >= 0");
  }

  // Merge duplicate atom locations exactly; drop zero weights.
  std::map<double, double> merged;
  for (const Atom& a : atoms) {
    require(std::isfinite(a.x) && a.x >= 0.0 && a.x <= 1.0,
            "HybridMeasure: atom location outside [0, 1]");
    require(std::isfinite(a.w) && a.w >= 0.0,
            "HybridMeasure: atom weight must be finite and >= 0");
    merged[a.x] += a.w;
  }
  atoms_.reserve(merged.size());
  for (const auto& [x, w] : merged) {
    if (w > 0.0) atoms_.push_back({x, w});
  }

  atom_mass_ = 0.0;
  for (const Atom& a : atoms_) atom_mass_ += a.w;
  double bins = 0.0;
  bin_prefix_.resize(bin_masses_.size() + 1);
  bin_prefix_[0] = 0.0;
  for (std::size_t i = 0; i < bin_masses_.size(); ++i) {
    bins += bin_masses_[i];
    bin_prefix_[i + 1] = bins;
  }
  total_mass_ = atom_mass_ + bins + near_zero_mass_;
}

HybridMeasure HybridMeasure::zero(std::shared_ptr<const Grid> grid) {
  std::vector<double> bins(grid->bin_count(), 0.0);
  return HybridMeasure(std::move(grid), {}, std::move(bins), 0.0);
}

HybridMeasure HybridMeasure::point_mass(std::shared_ptr<const Grid> grid,
                                        double x, double w) {
  std::vector<double> bins(grid->bin_count(), 0.0);
  return HybridMeasure(std::move(grid), {{x, w}}, std::move(bins), 0.0);
}

HybridMeasure HybridMeasure::lebesgue(std::shared_ptr<const Grid> grid) {
  std::vector<double> bins(grid->bin_count());
  for (std::size_t i = 0; i < bins.size(); ++i) bins[i] = grid->width(i);
  const double nz = grid->epsilon_min();
  return HybridMeasure(std::move(grid), {}, std::move(bins), nz);
}

double HybridMeasure::atom_mass_at(double x) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                             [](const Atom& a, double v) { return a.x < v; });
  return (it != atoms_.end() && it->x == x) ? it->w : 0.0;
}

bool HybridMeasure::is_probability(double tol) const {
  return std::abs(total_mass_ - 1.0) <= tol;
}

double HybridMeasure::density_mass_below(double x) const {
  const auto& edges = grid_->edges();
  if (x <= edges.front()) return 0.0;
  if (x >= 1.0) return bin_prefix_.back();
  auto it = std::upper_bound(edges.begin(), edges.end(), x);
  const auto j = static_cast<std::size_t>(it - edges.begin()) - 1;  // x in [edge j, edge j+1)
  double m = bin_prefix_[j];
  if (j < bin_masses_.size() && x > edges[j]) {
    m += bin_masses_[j] * (x - edges[j]) / grid_->width(j);
  }
  return m;
}

double integrate(const HybridMeasure& mu, const TestFunction& f) {
  double s = 0.0;
  for (const Atom& a : mu.atoms()) s += a.w * f(a.x);
  const Grid& g = *mu.grid();
  const auto& bins = mu.bin_masses();
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (bins[i] == 0.0) continue;
    // Density is constant on a bin, so the pairing reduces to the exact
    // average of f there.
    const double avg =
        (f.antiderivative(g.edge(i + 1)) - f.antiderivative(g.edge(i))) /
        g.width(i);
    s += bins[i] * avg;
  }
  s += mu.near_zero_mass() * f.at_zero();
  return s;
}

double mass_of_interval(const HybridMeasure& mu, double a, double b,
                        bool include_a, bool include_b) {
  if (!(a >= 0.0) || !(b <= 1.0) || !(a <= b) || !std::isfinite(a) ||
      !std::isfinite(b)) {
    throw std::invalid_argument("mass_of_interval: need 0 <= a <= b <= 1");
  }
  double s = 0.0;
  for (const Atom& at : mu.atoms()) {
    const bool lo = at.x > a || (include_a && at.x == a);
    const bool hi = at.x < b || (include_b && at.x == b);
    if (lo && hi) s += at.w;
  }
  // Density: endpoint inclusion is immaterial, overlap is proportional.
  s += mu.density_mass_below(b) - mu.density_mass_below(a);
  const double eps = mu.grid()->epsilon_min();
  const bool covers_bucket = a == 0.0 && (b > eps || (b == eps && include_b));
  if (covers_bucket) s += mu.near_zero_mass();
  return s;
}

HybridMeasure mix(std::span<const WeightedTerm> terms) {
  if (terms.empty()) throw std::invalid_argument("mix: no terms");
  const auto grid = terms.front().measure->grid();
  std::vector<double> bins(grid->bin_count(), 0.0);
  std::map<double, double> atoms;
  double nz = 0.0;
  for (const WeightedTerm& t : terms) {
    require(t.measure != nullptr, "mix: null measure");
    require(std::isfinite(t.weight) && t.weight >= 0.0,
            "mix: weights must be finite and >= 0");
    require(t.measure->grid()->same_layout(*grid), "mix: grid layout mismatch");
    const auto& m = *t.measure;
    for (std::size_t i = 0; i < bins.size(); ++i) {
      bins[i] += t.weight * m.bin_masses()[i];
    }
    for (const Atom& a : m.atoms()) atoms[a.x] += t.weight * a.w;
    nz += t.weight * m.near_zero_mass();
  }
  std::vector<Atom> av;
  av.reserve(atoms.size());
  for (const auto& [x, w] : atoms) av.push_back({x, w});
  return HybridMeasure(grid, std::move(av), std::move(bins), nz);
}

HybridMeasure mix2(double wa, const HybridMeasure& a, double wb,
                   const HybridMeasure& b) {
  const WeightedTerm terms[] = {{wa, &a}, {wb, &b}};
  return mix(terms);
}

HybridMeasure project_edge_cdf(std::span<const double> cdf,
                               std::span<const Atom> atoms,
                               std::shared_ptr<const Grid> grid) {
  const std::size_t n = grid->bin_count();
  require(cdf.size() == n + 1, "project: need one cdf sample per grid edge");
  double scale = std::max(1.0, std::abs(cdf.back()));
  const double slack = 1e-9 * scale;
  for (std::size_t j = 0; j + 1 <= n; ++j) {
    if (cdf[j + 1] < cdf[j] - slack) {
      throw std::invalid_argument("project: decreasing cdf samples");
    }
  }

  std::vector<double> bins(n, 0.0);
  double nz = cdf[0];
  for (const Atom& a : atoms) {
    if (a.x <= grid->epsilon_min()) {
      nz -= a.w;
    } else {
      bins[grid->bin_index(a.x)] -= a.w;  // removed below after cdf diff
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    bins[i] += cdf[i + 1] - cdf[i];
    if (bins[i] < 0.0) {
      if (bins[i] < -slack) {
        throw std::invalid_argument("project: atom weights exceed cdf increment");
      }
      bins[i] = 0.0;
    }
  }
  if (nz < 0.0) {
    if (nz < -slack) {
      throw std::invalid_argument("project: atom weights exceed cdf at epsilon_min");
    }
    nz = 0.0;
  }
  std::vector<Atom> av(atoms.begin(), atoms.end());
  return HybridMeasure(std::move(grid), std::move(av), std::move(bins), nz);
}

HybridMeasure project_cdf_to_grid(const std::function<double(double)>& cdf,
                                  std::span<const Atom> atoms,
                                  std::shared_ptr<const Grid> grid) {
  std::vector<double> samples(grid->bin_count() + 1);
  for (std::size_t j = 0; j < samples.size(); ++j) samples[j] = cdf(grid->edge(j));
  return project_edge_cdf(samples, atoms, std::move(grid));
}

std::string HybridMeasure::to_json_string(int indent) const {
  nlohmann::ordered_json j;
  j["grid"] = {{"epsilon_min", grid_->epsilon_min()},
               {"bin_count", grid_->bin_count()}};
  auto arr = nlohmann::ordered_json::array();
  for (const Atom& a : atoms_) arr.push_back({a.x, a.w});
  j["atoms"] = std::move(arr);
  j["bins"] = bin_masses_;
  j["near_zero_mass"] = near_zero_mass_;
  return j.dump(indent);
}

namespace {

HybridMeasure measure_from_json(const nlohmann::json& j,
                                std::shared_ptr<const Grid> grid) {
  for (const auto& [key, _] : j.items()) {
    if (key != "grid" && key != "atoms" && key != "bins" &&
        key != "near_zero_mass") {
      throw std::invalid_argument("measure json: unknown key " + key);
    }
  }
  const auto& jg = j.at("grid");
  const double eps = jg.at("epsilon_min").get<double>();
  const auto bins_n = jg.at("bin_count").get<std::size_t>();
  if (grid == nullptr) {
    grid = Grid::make(eps, bins_n);
  } else if (eps != grid->epsilon_min() || bins_n != grid->bin_count()) {
    throw std::invalid_argument("measure json: grid layout mismatch");
  }
  std::vector<Atom> atoms;
  for (const auto& pair : j.at("atoms")) {
    if (!pair.is_array() || pair.size() != 2) {
      throw std::invalid_argument("measure json: atoms must be [x, w] pairs");
    }
    atoms.push_back({pair[0].get<double>(), pair[1].get<double>()});
  }
  auto bins = j.at("bins").get<std::vector<double>>();
  const double nz = j.at("near_zero_mass").get<double>();
  return HybridMeasure(std::move(grid), std::move(atoms), std::move(bins), nz);
}

}  // namespace

HybridMeasure HybridMeasure::from_json_string(const std::string& text) {
  return measure_from_json(nlohmann::json::parse(text), nullptr);
}

HybridMeasure HybridMeasure::from_json_string(const std::string& text,
                                              std::shared_ptr<const Grid> grid) {
  return measure_from_json(nlohmann::json::parse(text), std::move(grid));
}

}  // namespace cesarolab
