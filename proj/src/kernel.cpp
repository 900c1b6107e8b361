#include "cesarolab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cesarolab {
namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Atom + density mass of an interval, endpoint flags exact, bucket excluded.
double interval_atoms_density(const HybridMeasure& mu, double a, double b,
                              bool include_a, bool include_b) {
  double s = 0.0;
  for (const Atom& at : mu.atoms()) {
    const bool lo = at.x > a || (include_a && at.x == a);
    const bool hi = at.x < b || (include_b && at.x == b);
    if (lo && hi) s += at.w;
  }
  s += mu.density_mass_below(b) - mu.density_mass_below(a);
  return s;
}

void check_unit_interval_pair(double a, double b) {
  require(std::isfinite(a) && std::isfinite(b) && a >= 0.0 && b <= 1.0 && a <= b,
          "transition_prob: need 0 <= a <= b <= 1");
}

}  // namespace

double MapPiece::value(double x) const {
  return kind == Kind::kAffine ? a + b * x : std::pow(x, exponent);
}

double MapPiece::inverse(double y) const {
  return kind == Kind::kAffine ? (y - a) / b : std::pow(y, 1.0 / exponent);
}

double MapPiece::derivative(double x) const {
  return kind == Kind::kAffine ? b : exponent * std::pow(x, exponent - 1.0);
}

bool MapPiece::increasing() const { return kind == Kind::kPower || b > 0.0; }

double MapPiece::image_lo() const { return std::min(value(lo), value(hi)); }

double MapPiece::image_hi() const { return std::max(value(lo), value(hi)); }

DeterministicMap::DeterministicMap(std::vector<MapPiece> pieces,
                                   std::vector<PointImage> points)
    : pieces_(std::move(pieces)), points_(std::move(points)) {
  require(!pieces_.empty(), "deterministic map: needs at least one piece");
  require(pieces_.front().lo == 0.0, "deterministic map: pieces must start at 0");
  require(pieces_.back().hi == 1.0, "deterministic map: pieces must end at 1");
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const MapPiece& p = pieces_[k];
    require(p.lo < p.hi, "deterministic map: piece domain is empty");
    if (k > 0) {
      require(p.lo == pieces_[k - 1].hi, "deterministic map: pieces must tile [0, 1]");
    }
    if (p.kind == MapPiece::Kind::kAffine) {
      require(p.b != 0.0, "deterministic map: affine piece must be strictly monotone");
    } else {
      require(p.exponent > 0.0, "deterministic map: power exponent must be positive");
    }
    require(p.image_lo() >= 0.0 && p.image_hi() <= 1.0,
            "deterministic map: image must stay inside [0, 1]");
  }
  std::sort(points_.begin(), points_.end(),
            [](const PointImage& l, const PointImage& r) { return l.x < r.x; });
  for (std::size_t k = 0; k < points_.size(); ++k) {
    const PointImage& pt = points_[k];
    require(pt.x >= 0.0 && pt.x <= 1.0 && pt.value >= 0.0 && pt.value <= 1.0,
            "deterministic map: point override outside [0, 1]");
    if (k > 0) {
      require(pt.x != points_[k - 1].x, "deterministic map: duplicate point override");
    }
  }
}

double DeterministicMap::value(double x) const {
  require(x >= 0.0 && x <= 1.0, "deterministic map: state outside [0, 1]");
  auto it = std::lower_bound(
      points_.begin(), points_.end(), x,
      [](const PointImage& p, double v) { return p.x < v; });
  if (it != points_.end() && it->x == x) return it->value;
  // Piece domains are [lo, hi); the last piece also owns x == 1.
  auto piece = std::upper_bound(
      pieces_.begin(), pieces_.end(), x,
      [](double v, const MapPiece& p) { return v < p.lo; });
  if (piece != pieces_.begin()) --piece;
  return piece->value(x);
}

double DeterministicMap::limit_from_right_at_zero() const {
  return pieces_.front().value(0.0);
}

GridStochastic::GridStochastic(std::shared_ptr<const Grid> grid,
                               std::vector<double> row_major,
                               std::vector<PointRow> point_rows)
    : grid_(std::move(grid)),
      n_(grid_ ? grid_->bin_count() : 0),
      rows_(std::move(row_major)),
      point_rows_(std::move(point_rows)) {
  require(grid_ != nullptr, "grid stochastic: null grid");
  require(rows_.size() == n_ * n_, "grid stochastic: matrix must be bins x bins");
  auto check_row = [&](std::span<const double> row, const std::string& what) {
    double sum = 0.0;
    for (double v : row) {
      require(std::isfinite(v) && v >= 0.0, what + ": entries must be >= 0");
      sum += v;
    }
    require(std::abs(sum - 1.0) <= 1e-12, what + ": row must sum to 1");
  };
  for (std::size_t i = 0; i < n_; ++i) check_row(row(i), "grid stochastic row");
  std::sort(point_rows_.begin(), point_rows_.end(),
            [](const PointRow& l, const PointRow& r) { return l.x < r.x; });
  for (std::size_t k = 0; k < point_rows_.size(); ++k) {
    const PointRow& pr = point_rows_[k];
    require(pr.x >= 0.0 && pr.x <= 1.0, "grid stochastic: point row outside [0, 1]");
    require(pr.row.size() == n_, "grid stochastic: point row has wrong length");
    if (k > 0) require(pr.x != point_rows_[k - 1].x, "grid stochastic: duplicate point row");
    check_row(pr.row, "grid stochastic point row");
  }
}

GridStochastic GridStochastic::from_csv(std::shared_ptr<const Grid> grid,
                                        const std::filesystem::path& matrix_path) {
  std::ifstream in(matrix_path);
  if (!in) {
    throw std::runtime_error("grid stochastic: cannot open " + matrix_path.string());
  }
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string cell;
    std::size_t cells = 0;
    while (std::getline(row, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("grid stochastic: bad number in " +
                                 matrix_path.string() + ": '" + cell + "'");
      }
      ++cells;
    }
    if (cells != grid->bin_count()) {
      throw std::runtime_error("grid stochastic: every row needs one entry per bin");
    }
  }
  return GridStochastic(std::move(grid), std::move(values));
}

std::span<const double> GridStochastic::row(std::size_t i) const {
  return {rows_.data() + i * n_, n_};
}

std::span<const double> GridStochastic::row_for(double x) const {
  require(x >= 0.0 && x <= 1.0, "grid stochastic: state outside [0, 1]");
  auto it = std::lower_bound(
      point_rows_.begin(), point_rows_.end(), x,
      [](const PointRow& p, double v) { return p.x < v; });
  if (it != point_rows_.end() && it->x == x) return {it->row.data(), n_};
  if (x <= grid_->epsilon_min()) return row(0);
  return row(grid_->bin_index(x));
}

std::string kernel_name(const Kernel& k) {
  struct Visitor {
    std::string operator()(const ShrinkingUniform&) const { return "shrinking_uniform"; }
    std::string operator()(const SquaringMap&) const { return "squaring_map"; }
    std::string operator()(const DeterministicMap&) const { return "deterministic"; }
    std::string operator()(const GridStochastic&) const { return "grid_stochastic"; }
  };
  return std::visit(Visitor{}, k);
}

namespace {

// Mass routed through each matrix row: bin masses use their own row, the
// near-zero bucket always uses the first row, atoms use row_for.
std::vector<double> grid_stochastic_image_bins(const GridStochastic& gs,
                                               const HybridMeasure& mu) {
  require(gs.grid()->same_layout(*mu.grid()), "grid stochastic: grid layout mismatch");
  const std::size_t n = gs.size();
  std::map<const double*, double> by_row;
  for (std::size_t i = 0; i < n; ++i) {
    if (mu.bin_masses()[i] != 0.0) by_row[gs.row(i).data()] += mu.bin_masses()[i];
  }
  if (mu.near_zero_mass() != 0.0) by_row[gs.row(0).data()] += mu.near_zero_mass();
  for (const Atom& a : mu.atoms()) by_row[gs.row_for(a.x).data()] += a.w;
  std::vector<double> out(n, 0.0);
  for (const auto& [row, mass] : by_row) {
    for (std::size_t t = 0; t < n; ++t) out[t] += mass * row[t];
  }
  return out;
}

double cdf_of_bins(const Grid& g, std::span<const double> bins, double t) {
  if (t <= g.edge(0)) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (t >= g.edge(i + 1)) {
      s += bins[i];
    } else {
      s += bins[i] * (t - g.edge(i)) / g.width(i);
      break;
    }
  }
  return s;
}

// Integral of 1/x against atoms and density over (t, 1].
double harmonic_tail(const HybridMeasure& mu, double t) {
  double h = 0.0;
  for (const Atom& a : mu.atoms()) {
    if (a.x > t) h += a.w / a.x;
  }
  const Grid& g = *mu.grid();
  const auto& bins = mu.bin_masses();
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const double hi = g.edge(i + 1);
    if (hi <= t || bins[i] == 0.0) continue;
    const double lo = std::max(g.edge(i), t);
    h += bins[i] / g.width(i) * (std::log(hi) - std::log(lo));
  }
  return h;
}

// Preimage mass of (0, t] under a deterministic map: atoms exactly, density
// piece by piece, the bucket by its image point (or epsilon_min when that
// image is 0).
double deterministic_pushforward_cdf(const DeterministicMap& dm,
                                     const HybridMeasure& mu, double t) {
  double s = 0.0;
  for (const Atom& a : mu.atoms()) {
    const double v = dm.value(a.x);
    if (v > 0.0 && v <= t) s += a.w;
  }
  for (const MapPiece& p : dm.pieces()) {
    double xa = p.lo, xb = p.hi;
    if (p.increasing()) {
      const double ylo = p.value(p.lo), yhi = p.value(p.hi);
      if (t < ylo) continue;
      if (t < yhi) xb = std::clamp(p.inverse(t), p.lo, p.hi);
    } else {
      const double ylo = p.value(p.hi), yhi = p.value(p.lo);
      if (t < ylo) continue;
      if (t < yhi) xa = std::clamp(p.inverse(t), p.lo, p.hi);
    }
    s += mu.density_mass_below(xb) - mu.density_mass_below(xa);
  }
  const double limit = dm.limit_from_right_at_zero();
  const double threshold = limit == 0.0 ? mu.grid()->epsilon_min() : limit;
  if (t >= threshold) s += mu.near_zero_mass();
  return s;
}

}  // namespace

HybridMeasure transition(const Kernel& k, double x,
                         std::shared_ptr<const Grid> grid) {
  require(x >= 0.0 && x <= 1.0, "transition: state outside [0, 1]");
  struct Visitor {
    double x;
    std::shared_ptr<const Grid> grid;

    HybridMeasure operator()(const ShrinkingUniform&) const {
      if (x == 0.0) return HybridMeasure::point_mass(grid, 1.0);
      std::vector<double> cdf(grid->bin_count() + 1);
      for (std::size_t j = 0; j < cdf.size(); ++j) {
        cdf[j] = std::min(1.0, grid->edge(j) / x);
      }
      return project_edge_cdf(cdf, {}, grid);
    }
    HybridMeasure operator()(const SquaringMap&) const {
      return HybridMeasure::point_mass(grid, x < 1.0 ? x * x : 0.0);
    }
    HybridMeasure operator()(const DeterministicMap& dm) const {
      return HybridMeasure::point_mass(grid, dm.value(x));
    }
    HybridMeasure operator()(const GridStochastic& gs) const {
      require(gs.grid()->same_layout(*grid), "transition: grid layout mismatch");
      auto row = gs.row_for(x);
      return HybridMeasure(grid, {}, {row.begin(), row.end()}, 0.0);
    }
  };
  return std::visit(Visitor{x, std::move(grid)}, k);
}

double transition_prob(const Kernel& k, double x, double a, double b) {
  require(x >= 0.0 && x <= 1.0, "transition_prob: state outside [0, 1]");
  check_unit_interval_pair(a, b);
  struct Visitor {
    double x, a, b;

    double operator()(const ShrinkingUniform&) const {
      if (x == 0.0) return (a < 1.0 && 1.0 < b) ? 1.0 : 0.0;
      return std::max(0.0, std::min(b, x) - a) / x;
    }
    double operator()(const SquaringMap&) const {
      const double v = x < 1.0 ? x * x : 0.0;
      return (a < v && v < b) ? 1.0 : 0.0;
    }
    double operator()(const DeterministicMap& dm) const {
      const double v = dm.value(x);
      return (a < v && v < b) ? 1.0 : 0.0;
    }
    double operator()(const GridStochastic& gs) const {
      const Grid& g = *gs.grid();
      auto row = gs.row_for(x);
      double p = 0.0;
      for (std::size_t i = 0; i < row.size(); ++i) {
        const double overlap =
            std::min(b, g.edge(i + 1)) - std::max(a, g.edge(i));
        if (overlap > 0.0) p += row[i] * overlap / g.width(i);
      }
      return p;
    }
  };
  return std::visit(Visitor{x, a, b}, k);
}

double pushforward_cdf(const Kernel& k, const HybridMeasure& mu, double t) {
  require(t >= 0.0 && t <= 1.0, "pushforward_cdf: t outside [0, 1]");
  const double eps = mu.grid()->epsilon_min();
  struct Visitor {
    const HybridMeasure& mu;
    double t, eps;

    double operator()(const ShrinkingUniform&) const {
      if (t == 0.0) return 0.0;
      // Sources above t contribute t/x each; the image atom at 1 coming from
      // mu({0}) enters (0, t] only at t = 1.
      double s = interval_atoms_density(mu, 0.0, t, false, true);
      s += t * harmonic_tail(mu, t);
      if (t >= eps) s += mu.near_zero_mass();
      if (t == 1.0) s += mu.atom_mass_at(0.0);
      return s;
    }
    double operator()(const SquaringMap&) const {
      if (t == 0.0) return 0.0;
      // Density via the preimage (0, sqrt(t)]; atoms by their computed image
      // so that squares underflowing to exact 0 leave (0, t] here exactly
      // when they show up as an atom at 0.
      double s = mu.density_mass_below(std::sqrt(t));
      for (const Atom& a : mu.atoms()) {
        const double im = a.x < 1.0 ? a.x * a.x : 0.0;
        if (im > 0.0 && im <= t) s += a.w;
      }
      if (t >= eps) s += mu.near_zero_mass();
      return s;
    }
    double operator()(const DeterministicMap& dm) const {
      return deterministic_pushforward_cdf(dm, mu, t);
    }
    double operator()(const GridStochastic& gs) const {
      const auto out = grid_stochastic_image_bins(gs, mu);
      return cdf_of_bins(*gs.grid(), out, t);
    }
  };
  return std::visit(Visitor{mu, t, eps}, k);
}

PushforwardParts pushforward_parts(const Kernel& k, const HybridMeasure& mu) {
  const Grid& g = *mu.grid();
  const std::size_t n = g.bin_count();
  struct Visitor {
    const HybridMeasure& mu;
    const Grid& g;
    std::size_t n;

    PushforwardParts operator()(const ShrinkingUniform&) const {
      PushforwardParts parts;
      parts.edge_cdf.resize(n + 1);
      // Suffix sums of the 1/x integral over density bins, then atoms.
      std::vector<double> tail(n + 1, 0.0);
      for (std::size_t i = n; i-- > 0;) {
        tail[i] = tail[i + 1] + mu.bin_masses()[i] / g.width(i) *
                                    (g.log_edge(i + 1) - g.log_edge(i));
      }
      const auto& atoms = mu.atoms();
      std::size_t idx = atoms.size();
      double atom_tail = 0.0;
      double jump_weight = 0.0;
      for (std::size_t j = n + 1; j-- > 0;) {
        const double e = g.edge(j);
        while (idx > 0 && atoms[idx - 1].x > e) {
          --idx;
          atom_tail += atoms[idx].w / atoms[idx].x;
        }
        double below = mu.density_mass_below(e);
        for (const Atom& a : atoms) {
          if (a.x == 0.0) {
            jump_weight = a.w;
          } else if (a.x <= e) {
            below += a.w;
          }
        }
        parts.edge_cdf[j] = below + e * (tail[j] + atom_tail) + mu.near_zero_mass();
      }
      if (jump_weight > 0.0) {
        parts.atoms.push_back({1.0, jump_weight});
        parts.edge_cdf[n] += jump_weight;
      }
      return parts;
    }
    PushforwardParts operator()(const SquaringMap&) const {
      PushforwardParts parts;
      std::map<double, double> images;
      for (const Atom& a : mu.atoms()) {
        images[a.x < 1.0 ? a.x * a.x : 0.0] += a.w;
      }
      // Edge samples use the same computed image locations as the atom list;
      // images is sorted, so one sweep covers all edges.
      parts.edge_cdf.resize(n + 1);
      auto it = images.begin();
      double atoms_below = 0.0;
      for (std::size_t j = 0; j <= n; ++j) {
        const double e = g.edge(j);
        while (it != images.end() && it->first <= e) {
          atoms_below += it->second;
          ++it;
        }
        parts.edge_cdf[j] =
            mu.density_mass_below(std::sqrt(e)) + atoms_below + mu.near_zero_mass();
      }
      for (const auto& [x, w] : images) parts.atoms.push_back({x, w});
      return parts;
    }
    PushforwardParts operator()(const DeterministicMap& dm) const {
      PushforwardParts parts;
      std::map<double, double> images;
      for (const Atom& a : mu.atoms()) images[dm.value(a.x)] += a.w;
      const double limit = dm.limit_from_right_at_zero();
      if (limit > g.epsilon_min() && mu.near_zero_mass() > 0.0) {
        images[limit] += mu.near_zero_mass();
      }
      double at_zero = 0.0;
      if (auto it = images.find(0.0); it != images.end()) at_zero = it->second;
      parts.edge_cdf.resize(n + 1);
      for (std::size_t j = 0; j <= n; ++j) {
        parts.edge_cdf[j] =
            deterministic_pushforward_cdf(dm, mu, g.edge(j)) + at_zero;
      }
      for (const auto& [x, w] : images) parts.atoms.push_back({x, w});
      return parts;
    }
    PushforwardParts operator()(const GridStochastic& gs) const {
      PushforwardParts parts;
      const auto out = grid_stochastic_image_bins(gs, mu);
      parts.edge_cdf.assign(n + 1, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        parts.edge_cdf[i + 1] = parts.edge_cdf[i] + out[i];
      }
      return parts;
    }
  };
  return std::visit(Visitor{mu, g, n}, k);
}

namespace {

MapPiece piece_from_json(const nlohmann::json& j) {
  MapPiece p;
  std::vector<std::string> allowed = {"lo", "hi", "type"};
  const std::string type = j.at("type").get<std::string>();
  p.lo = j.at("lo").get<double>();
  p.hi = j.at("hi").get<double>();
  if (type == "affine") {
    p.kind = MapPiece::Kind::kAffine;
    p.a = j.at("a").get<double>();
    p.b = j.at("b").get<double>();
    allowed.insert(allowed.end(), {"a", "b"});
  } else if (type == "power") {
    p.kind = MapPiece::Kind::kPower;
    p.exponent = j.at("exponent").get<double>();
    allowed.push_back("exponent");
  } else {
    throw std::invalid_argument("kernel json: unknown piece type '" + type + "'");
  }
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw std::invalid_argument("kernel json: unknown piece key '" + key + "'");
    }
  }
  return p;
}

void reject_unknown_keys(const nlohmann::json& j,
                         std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return key == k;
        }) == allowed.end()) {
      throw std::invalid_argument("kernel json: unknown key '" + key + "'");
    }
  }
}

}  // namespace

Kernel kernel_from_json_string(const std::string& text,
                               std::shared_ptr<const Grid> grid,
                               const std::filesystem::path& base_dir) {
  const auto j = nlohmann::json::parse(text);
  require(j.is_object(), "kernel json: expected an object");
  const std::string name = j.at("kernel").get<std::string>();
  if (name == "shrinking_uniform") {
    reject_unknown_keys(j, {"kernel"});
    return ShrinkingUniform{};
  }
  if (name == "squaring_map") {
    reject_unknown_keys(j, {"kernel"});
    return SquaringMap{};
  }
  if (name == "deterministic") {
    reject_unknown_keys(j, {"kernel", "pieces", "points"});
    std::vector<MapPiece> pieces;
    for (const auto& pj : j.at("pieces")) pieces.push_back(piece_from_json(pj));
    std::vector<PointImage> points;
    if (j.contains("points")) {
      for (const auto& pj : j.at("points")) {
        reject_unknown_keys(pj, {"x", "value"});
        points.push_back({pj.at("x").get<double>(), pj.at("value").get<double>()});
      }
    }
    return DeterministicMap(std::move(pieces), std::move(points));
  }
  if (name == "grid_stochastic") {
    reject_unknown_keys(j, {"kernel", "matrix_path", "point_rows"});
    std::filesystem::path path = j.at("matrix_path").get<std::string>();
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    auto gs = GridStochastic::from_csv(grid, path);
    if (j.contains("point_rows")) {
      std::vector<GridStochastic::PointRow> prs;
      for (const auto& pj : j.at("point_rows")) {
        reject_unknown_keys(pj, {"x", "row"});
        prs.push_back({pj.at("x").get<double>(),
                       pj.at("row").get<std::vector<double>>()});
      }
      // Rebuild with the explicit rows attached.
      std::vector<double> flat;
      flat.reserve(gs.size() * gs.size());
      for (std::size_t i = 0; i < gs.size(); ++i) {
        auto r = gs.row(i);
        flat.insert(flat.end(), r.begin(), r.end());
      }
      return GridStochastic(grid, std::move(flat), std::move(prs));
    }
    return gs;
  }
  throw std::invalid_argument("kernel json: unknown kernel '" + name + "'");
}

}  // namespace cesarolab
