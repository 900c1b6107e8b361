#include "cesarolab/commands.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "cesarolab/io_util.hpp"
#include "cesarolab/montecarlo.hpp"

namespace cesarolab {
namespace {

std::vector<std::string> indexed_names(const std::string& stem, std::size_t k) {
  std::vector<std::string> names;
  names.reserve(k);
  for (std::size_t i = 1; i <= k; ++i) names.push_back(stem + std::to_string(i));
  return names;
}

}  // namespace

int cmd_iterate(const RunConfig& cfg, bool quiet) {
  std::vector<std::string> header = {"n",         "total_mass",
                                     "mean",      "second_moment",
                                     "atom_mass", "near_zero_mass"};
  for (const std::string& name : indexed_names("escape_", cfg.epsilon_ladder.size())) {
    header.push_back(name);
  }
  CsvWriter csv(header);

  const TestFunction m1 = TestFunction::monomial(1);
  const TestFunction m2 = TestFunction::monomial(2);
  IterationState state(cfg.kernel, cfg.initial);
  bool drifted = false;
  std::size_t drift_n = 0;
  for (std::size_t n = 1; n <= cfg.n_max; ++n) {
    state.step();
    const HybridMeasure& mu = state.current();
    std::vector<std::string> row = {std::to_string(n),
                                    fmt_g17(mu.total_mass()),
                                    fmt_g17(integrate(mu, m1)),
                                    fmt_g17(integrate(mu, m2)),
                                    fmt_g17(mu.atom_mass()),
                                    fmt_g17(mu.near_zero_mass())};
    for (double eps : cfg.epsilon_ladder) {
      row.push_back(fmt_g17(mass_of_interval(mu, 0.0, eps, false, false)));
    }
    csv.add_row(row);
    if (!drifted && std::abs(mu.total_mass() - 1.0) > 1e-6) {
      drifted = true;
      drift_n = n;
    }
  }

  const auto out = cfg.out_dir / "iterate.csv";
  csv.write(out);
  if (drifted) {
    std::cerr << "iterate: total mass drifted beyond 1e-6 at n=" << drift_n
              << "\n";
    return kExitNumericFailure;
  }
  if (!quiet) std::cout << "iterate: wrote " << out.string() << "\n";
  return kExitOk;
}

int cmd_cesaro(const RunConfig& cfg, bool quiet) {
  SignatureOptions options;
  options.witnesses = cfg.witnesses;
  options.epsilon_ladder = cfg.epsilon_ladder;
  options.pfa = cfg.pfa;
  SignatureResult res = pfa_signature(cfg.kernel, cfg.initial, cfg.candidate,
                                      cfg.family, cfg.n_max, options);
  res.report.eta = cfg.initial_label;

  write_file_atomic(cfg.out_dir / "report.json",
                    res.report.to_json_string(2) + "\n");

  std::vector<std::string> header = {"n", "weak_distance"};
  for (const std::string& name : indexed_names("gap_", cfg.witnesses.size())) {
    header.push_back(name);
  }
  for (const std::string& name : indexed_names("escape_", cfg.epsilon_ladder.size())) {
    header.push_back(name);
  }
  CsvWriter report_csv(header);
  for (const ReportRow& r : res.report.rows) {
    std::vector<std::string> row = {std::to_string(r.n), fmt_g17(r.weak_distance)};
    for (double g : r.gaps) row.push_back(fmt_g17(g));
    for (double e : r.escapes) row.push_back(fmt_g17(e));
    report_csv.add_row(row);
  }
  report_csv.write(cfg.out_dir / "report.csv");

  CsvWriter curves(std::vector<std::string>{"n", "function_name", "value"});
  for (const CesaroRow& r :
       cesaro_integrals(cfg.kernel, cfg.initial, cfg.n_max, cfg.family)) {
    curves.add_row({std::to_string(r.n), r.function_name, fmt_g17(r.value)});
  }
  curves.write(cfg.out_dir / "curves.csv");

  if (!quiet) {
    const bool converges = res.report.verdict == Verdict::kConvergesWeakly;
    std::cout << "WEAK-CONVERGES to " << cfg.candidate_label << ": "
              << (converges ? "true" : "false")
              << "; PFA-SIGNATURE: " << (res.report.pfa_signature ? "true" : "false")
              << "\n";
  }
  return kExitOk;
}

int cmd_feller(const RunConfig& cfg, bool quiet) {
  std::vector<FellerFinding> findings;
  for (const TestFunction& f : cfg.family) {
    for (FellerFinding& finding : feller_scan(cfg.kernel, f, *cfg.grid, cfg.feller)) {
      findings.push_back(std::move(finding));
    }
  }

  CsvWriter csv(std::vector<std::string>{"function_name", "x", "value",
                                         "left_limit", "right_limit", "jump"});
  for (const FellerFinding& fd : findings) {
    csv.add_row({fd.function_name, fmt_g17(fd.x), fmt_g17(fd.value),
                 fd.left_limit ? fmt_g17(*fd.left_limit) : std::string(),
                 fd.right_limit ? fmt_g17(*fd.right_limit) : std::string(),
                 fmt_g17(fd.jump)});
  }
  csv.write(cfg.out_dir / "feller.csv");

  if (!quiet) {
    if (findings.empty()) {
      std::cout << "FELLER: true (none found at tolerance "
                << fmt_g(cfg.feller.tolerance) << ")\n";
    } else {
      std::string where;
      double last = -1.0;
      for (const FellerFinding& fd : findings) {
        if (!where.empty() && fd.x == last) continue;  // one mention per point
        if (!where.empty()) where += ", ";
        where += fmt_g(fd.x);
        last = fd.x;
      }
      std::cout << "FELLER: false (discontinuities at " << where << ")\n";
    }
  }
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, bool quiet) {
  SimConfig sim{cfg.kernel, cfg.initial, cfg.n_max, cfg.replicas, cfg.seed};

  if (cfg.dump_trajectories) {
    CsvWriter traj(std::vector<std::string>{"replica", "k", "x"});
    for_each_trajectory(sim, [&](std::size_t r, std::size_t k, double x, bool) {
      traj.add_row({std::to_string(r), std::to_string(k), fmt_g17(x)});
    });
    traj.write(cfg.out_dir / "trajectories.csv");
  }

  const std::vector<McCompareRow> rows = mc_vs_operator(sim, cfg.family);
  CsvWriter csv(std::vector<std::string>{"function_name", "mc_estimate",
                                         "operator_value", "std_error", "z"});
  double worst = 0.0;
  std::string worst_name;
  for (const McCompareRow& r : rows) {
    csv.add_row({r.function_name, fmt_g17(r.mc_estimate),
                 fmt_g17(r.operator_value), fmt_g17(r.std_error), fmt_g17(r.z)});
    if (std::abs(r.z) > std::abs(worst) || worst_name.empty()) {
      worst = r.z;
      worst_name = r.function_name;
    }
  }
  csv.write(cfg.out_dir / "mc_compare.csv");

  if (!quiet) {
    std::cout << "simulate: worst z = " << fmt_g(worst) << " (" << worst_name
              << ") over " << rows.size() << " functions\n";
  }
  for (const McCompareRow& r : rows) {
    if (!(std::abs(r.z) <= 6.0)) {
      std::cerr << "simulate: z-score out of range for " << r.function_name
                << ": z = " << fmt_g(r.z) << "\n";
      return kExitStatFailure;
    }
  }
  return kExitOk;
}

}  // namespace cesarolab
