#include "cesarolab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace cesarolab {
namespace {

// Richardson extrapolation of g(s + h q^j) to h -> 0, second order, using the
// last row of the Neville table.
template <typename G>
double extrapolate_limit(const G& g, double s, double step, int samples) {
  constexpr double q = 0.5;
  std::vector<double> row(samples);
  for (int j = 0; j < samples; ++j) row[j] = g(s + step * std::pow(q, j));
  for (int m = 1; m <= 2; ++m) {
    const double qm = std::pow(q, m);
    for (int j = samples - 1; j >= m; --j) {
      row[j] = (row[j] - qm * row[j - 1]) / (1.0 - qm);
    }
  }
  return row[samples - 1];
}

// Narrow an interval [a, b] with a visible variation of g down to a point,
// always descending into the half that carries the bigger share.
template <typename G>
double localize_jump(const G& g, double a, double b) {
  double ga = g(a), gb = g(b);
  for (int it = 0; it < 80 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const double gm = g(m);
    if (std::abs(gm - ga) >= std::abs(gb - gm)) {
      b = m;
      gb = gm;
    } else {
      a = m;
      ga = gm;
    }
  }
  return 0.5 * (a + b);
}

// Least-squares slope of d(n) over the last half of the run.
double slope_last_half(const std::vector<ReportRow>& rows) {
  const std::size_t lo = rows.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t cnt = 0;
  for (std::size_t i = lo; i < rows.size(); ++i) {
    const double x = static_cast<double>(rows[i].n);
    const double y = rows[i].weak_distance;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt < 2) return 0.0;
  const double denom = cnt * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (cnt * sxy - sx * sy) / denom;
}

}  // namespace

double weak_distance(const HybridMeasure& a, const HybridMeasure& b,
                     const TestFamily& family) {
  double d = 0.0;
  for (const TestFunction& f : family) {
    d = std::max(d, std::abs(integrate(a, f) - integrate(b, f)) / f.scale());
  }
  return d;
}

double invariance_residual(const Kernel& k, const HybridMeasure& mu,
                           const TestFamily& family) {
  return weak_distance(mu, apply_A(k, mu), family);
}

double witness_gap(const HybridMeasure& mu_a, const HybridMeasure& mu_b,
                   double a, double b) {
  return mass_of_interval(mu_a, a, b, false, false) -
         mass_of_interval(mu_b, a, b, false, false);
}

std::vector<EscapeRow> escape_profile(const HybridMeasure& mu,
                                      const std::vector<double>& ladder) {
  std::vector<EscapeRow> rows;
  rows.reserve(ladder.size());
  for (double eps : ladder) {
    rows.push_back({eps, mass_of_interval(mu, 0.0, eps, false, false)});
  }
  return rows;
}

std::vector<FellerFinding> feller_scan(const Kernel& k, const TestFunction& f,
                                       const Grid& grid,
                                       const FellerOptions& options) {
  auto g = [&](double x) { return apply_T(k, f, x); };
  const double tol = options.tolerance;
  if (!(tol > 0.0)) throw std::invalid_argument("feller_scan: tolerance must be > 0");

  std::vector<double> suspects = {0.0, 1.0};
  suspects.insert(suspects.end(), options.suspects.begin(), options.suspects.end());
  for (double s : suspects) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw std::invalid_argument("feller_scan: suspect outside [0, 1]");
    }
  }

  if (options.auto_detect) {
    // A genuine jump inside a bin shows up as an isolated spike in the
    // first differences of g along the grid edges.
    const std::size_t n = grid.bin_count();
    std::vector<double> ge(n + 1), diff(n);
    for (std::size_t j = 0; j <= n; ++j) ge[j] = g(grid.edge(j));
    for (std::size_t j = 0; j < n; ++j) diff[j] = std::abs(ge[j + 1] - ge[j]);
    const std::size_t known = suspects.size();
    for (std::size_t j = 0; j < n; ++j) {
      const double neighbor = std::max(j > 0 ? diff[j - 1] : 0.0,
                                       j + 1 < n ? diff[j + 1] : 0.0);
      if (diff[j] >= 10.0 * tol && diff[j] >= 5.0 * neighbor) {
        const double loc = localize_jump(g, grid.edge(j), grid.edge(j + 1));
        // A jump at a point we already scan (an endpoint or a requested
        // suspect) localizes to a value a hair inside the bin; keep the
        // exact point instead of the localized twin.
        const bool already =
            std::any_of(suspects.begin(), suspects.begin() + known,
                        [&](double s) { return std::abs(s - loc) < 1e-9; });
        if (!already) suspects.push_back(loc);
      }
    }
  }

  std::sort(suspects.begin(), suspects.end());
  suspects.erase(std::unique(suspects.begin(), suspects.end(),
                             [](double a, double b) { return b - a < 1e-12; }),
                 suspects.end());

  std::vector<FellerFinding> findings;
  const double step = 0.01;
  for (double s : suspects) {
    FellerFinding finding;
    finding.function_name = f.name();
    finding.x = s;
    finding.value = g(s);
    double jump = 0.0;
    if (s > 0.0) {
      const double reach = std::min(step, s * 0.5);
      auto mirrored = [&](double t) { return g(s - (t - s)); };
      finding.left_limit = extrapolate_limit(mirrored, s, reach, 6);
      jump = std::max(jump, std::abs(finding.value - *finding.left_limit));
    }
    if (s < 1.0) {
      const double reach = std::min(step, (1.0 - s) * 0.5);
      finding.right_limit = extrapolate_limit(g, s, reach, 6);
      jump = std::max(jump, std::abs(finding.value - *finding.right_limit));
    }
    finding.jump = jump;
    if (finding.jump > tol) findings.push_back(std::move(finding));
  }
  return findings;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kConvergesWeakly:
      return "converges_weakly";
    case Verdict::kNoTrend:
      return "no_trend";
    default:
      return "inconclusive";
  }
}

std::string ConvergenceReport::to_json_string(int indent) const {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["kernel"] = kernel;
  j["eta"] = eta;
  j["n_max"] = n_max;
  j["witnesses"] = nlohmann::ordered_json::array();
  for (const auto& [a, b] : witnesses) {
    j["witnesses"].push_back(nlohmann::ordered_json::array({a, b}));
  }
  j["epsilon_ladder"] = epsilon_ladder;
  j["final_weak_distance"] = final_weak_distance;
  j["slope_last_half"] = slope_last_half;
  j["verdict"] = to_string(verdict);
  j["pfa_signature"] = pfa_signature;
  j["rows"] = nlohmann::ordered_json::array();
  for (const ReportRow& r : rows) {
    nlohmann::ordered_json row;
    row["n"] = r.n;
    row["weak_distance"] = r.weak_distance;
    row["gaps"] = r.gaps;
    row["escapes"] = r.escapes;
    j["rows"].push_back(std::move(row));
  }
  j["feller"] = nlohmann::ordered_json::array();
  for (const FellerFinding& fd : feller) {
    nlohmann::ordered_json row;
    row["function"] = fd.function_name;
    row["x"] = fd.x;
    row["value"] = fd.value;
    row["left_limit"] =
        fd.left_limit ? nlohmann::ordered_json(*fd.left_limit) : nullptr;
    row["right_limit"] =
        fd.right_limit ? nlohmann::ordered_json(*fd.right_limit) : nullptr;
    row["jump"] = fd.jump;
    j["feller"].push_back(std::move(row));
  }
  return j.dump(indent);
}

SignatureResult pfa_signature(const Kernel& k, const HybridMeasure& initial,
                              const HybridMeasure& candidate,
                              const TestFamily& family, std::size_t n_max,
                              const SignatureOptions& options) {
  if (n_max == 0) {
    throw std::invalid_argument("pfa_signature: n_max must be >= 1");
  }
  for (const auto& [a, b] : options.witnesses) {
    if (!(a >= 0.0 && a < b && b <= 1.0)) {
      throw std::invalid_argument("pfa_signature: witness interval outside [0, 1]");
    }
  }
  std::vector<double> candidate_values(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    candidate_values[i] = integrate(candidate, family[i]);
  }
  std::vector<double> candidate_masses;
  candidate_masses.reserve(options.witnesses.size());
  for (const auto& [a, b] : options.witnesses) {
    candidate_masses.push_back(mass_of_interval(candidate, a, b, false, false));
  }

  ConvergenceReport report;
  report.kernel = kernel_name(k);
  report.n_max = n_max;
  report.witnesses = options.witnesses;
  report.epsilon_ladder = options.epsilon_ladder;
  report.rows.reserve(n_max);

  IterationState state(k, initial);
  for (std::size_t n = 1; n <= n_max; ++n) {
    state.step();
    const HybridMeasure& lam = state.cesaro();
    ReportRow row;
    row.n = n;
    for (std::size_t i = 0; i < family.size(); ++i) {
      const double v = integrate(lam, family[i]);
      row.weak_distance = std::max(
          row.weak_distance,
          std::abs(v - candidate_values[i]) / family[i].scale());
    }
    row.gaps.reserve(options.witnesses.size());
    for (std::size_t w = 0; w < options.witnesses.size(); ++w) {
      const auto& [a, b] = options.witnesses[w];
      row.gaps.push_back(mass_of_interval(lam, a, b, false, false) -
                         candidate_masses[w]);
    }
    row.escapes.reserve(options.epsilon_ladder.size());
    for (double eps : options.epsilon_ladder) {
      row.escapes.push_back(mass_of_interval(lam, 0.0, eps, false, false));
    }
    report.rows.push_back(std::move(row));
  }

  report.final_weak_distance = report.rows.back().weak_distance;
  report.slope_last_half = slope_last_half(report.rows);

  const bool close = report.final_weak_distance <= options.pfa.weak_threshold;
  if (close && report.slope_last_half <= 0.0) {
    report.verdict = Verdict::kConvergesWeakly;
  } else if (!close && report.slope_last_half >= -1e-6) {
    report.verdict = Verdict::kNoTrend;
  } else {
    report.verdict = Verdict::kInconclusive;
  }

  // A witness interval must hold its ground through the whole second half of
  // the run, not merely at the final step.
  bool witness_persists = false;
  const std::size_t lo = report.rows.size() / 2;
  for (std::size_t w = 0; w < options.witnesses.size() && !witness_persists;
       ++w) {
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = lo; i < report.rows.size(); ++i) {
      min_gap = std::min(min_gap, report.rows[i].gaps[w]);
    }
    witness_persists = min_gap >= options.pfa.witness_threshold;
  }
  report.pfa_signature = close && witness_persists;

  return SignatureResult{std::move(report), state.cesaro()};
}

}  // namespace cesarolab
