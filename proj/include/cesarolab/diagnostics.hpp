#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cesarolab/markov_operator.hpp"

namespace cesarolab {

// Largest normalized pairing gap over the family:
//   max_f |<f, a> - <f, b>| / scale(f).
double weak_distance(const HybridMeasure& a, const HybridMeasure& b,
                     const TestFamily& family);

// weak_distance between mu and A mu; zero exactly for fixed points of A.
double invariance_residual(const Kernel& k, const HybridMeasure& mu,
                           const TestFamily& family);

// Signed interval witness: mu_a((a, b)) - mu_b((a, b)), open interval.
double witness_gap(const HybridMeasure& mu_a, const HybridMeasure& mu_b,
                   double a, double b);

struct EscapeRow {
  double epsilon;
  double mass;  // mu((0, epsilon)), open at both ends
};
std::vector<EscapeRow> escape_profile(const HybridMeasure& mu,
                                      const std::vector<double>& ladder);

// A point where x -> (T f)(x) fails to match its one-sided limits, estimated
// by Richardson extrapolation along a geometric mesh.
struct FellerFinding {
  std::string function_name;
  double x;
  double value;
  std::optional<double> left_limit;
  std::optional<double> right_limit;
  double jump;  // largest |value - one-sided limit|
};

struct FellerOptions {
  double tolerance = 1e-4;
  std::vector<double> suspects;  // always scanned, in addition to 0 and 1
  bool auto_detect = true;       // look for isolated jumps between grid edges
};

// Returns only the points whose jump exceeds the tolerance; an empty result
// means no continuity defect was found.
std::vector<FellerFinding> feller_scan(const Kernel& k, const TestFunction& f,
                                       const Grid& grid,
                                       const FellerOptions& options = {});

struct PfaOptions {
  double weak_threshold = 1e-2;    // how close the averages must get
  double witness_threshold = 0.1;  // how far an interval must stay apart
};

enum class Verdict { kConvergesWeakly, kNoTrend, kInconclusive };
std::string to_string(Verdict v);

// One row per averaging step n.
struct ReportRow {
  std::size_t n = 0;
  double weak_distance = 0.0;   // against the candidate limit
  std::vector<double> gaps;     // witness_gap per configured interval
  std::vector<double> escapes;  // mass in (0, eps) per ladder entry
};

struct ConvergenceReport {
  std::string kernel;
  std::string eta;  // description of the initial measure, set by the caller
  std::size_t n_max = 0;
  std::vector<std::pair<double, double>> witnesses;
  std::vector<double> epsilon_ladder;
  std::vector<ReportRow> rows;
  double final_weak_distance = 0.0;
  double slope_last_half = 0.0;  // least-squares slope of d(n) over n > n_max/2
  Verdict verdict = Verdict::kInconclusive;
  bool pfa_signature = false;
  std::vector<FellerFinding> feller;  // filled in by the caller if scanned

  std::string to_json_string(int indent = 2) const;
};

struct SignatureOptions {
  std::vector<std::pair<double, double>> witnesses = {{0.0, 0.1}};
  std::vector<double> epsilon_ladder = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  PfaOptions pfa;
};

struct SignatureResult {
  ConvergenceReport report;
  HybridMeasure final_cesaro;
};

// Runs the averaged iteration against a candidate limit and summarizes how
// the averages behave.  The verdict says whether the averages settled at the
// candidate (distance below threshold with a non-increasing trend over the
// last half); the signature flag additionally requires some interval witness
// to stay wide over the last half even though every pairing converged.
SignatureResult pfa_signature(const Kernel& k, const HybridMeasure& initial,
                              const HybridMeasure& candidate,
                              const TestFamily& family, std::size_t n_max,
                              const SignatureOptions& options = {});

}  // namespace cesarolab
