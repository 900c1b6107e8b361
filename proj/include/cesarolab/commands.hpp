#pragma once

#include "cesarolab/run_config.hpp"

namespace cesarolab {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericFailure = 3;
inline constexpr int kExitStatFailure = 4;

// Raw iteration: per-n summaries of mu_n = A^n eta into iterate.csv.
// Fails with kExitNumericFailure when the total mass drifts beyond 1e-6.
int cmd_iterate(const RunConfig& cfg, bool quiet);

// Averaged run against the candidate limit: report.json, report.csv,
// curves.csv, plus a one-line verdict on stdout.
int cmd_cesaro(const RunConfig& cfg, bool quiet);

// Continuity scan of T f over the family: feller.csv plus a one-line verdict.
int cmd_feller(const RunConfig& cfg, bool quiet);

// Monte Carlo cross-check of the operator answers: mc_compare.csv (and
// trajectories.csv when requested).  Fails with kExitStatFailure when any
// z-score leaves [-6, 6].
int cmd_simulate(const RunConfig& cfg, bool quiet);

}  // namespace cesarolab
