#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cesarolab/diagnostics.hpp"

namespace cesarolab {

// Anything wrong with a run description: malformed JSON, unknown keys,
// values out of range, unreadable referenced files.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A fully materialized run description: every referenced object is already
// built, so commands never touch the filesystem for inputs again.
struct RunConfig {
  std::shared_ptr<const Grid> grid;
  Kernel kernel;
  HybridMeasure initial;
  HybridMeasure candidate;
  TestFamily family;
  std::string initial_label;    // human-readable descriptor, e.g. "delta(1)"
  std::string candidate_label;  // e.g. "delta(0)"
  std::size_t n_max = 200;
  std::vector<std::pair<double, double>> witnesses{{0.0, 0.1}};
  std::vector<double> epsilon_ladder{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  PfaOptions pfa;
  FellerOptions feller;
  std::size_t replicas = 1000;
  std::uint64_t seed = 1;
  bool dump_trajectories = false;
  std::filesystem::path out_dir = "out";

  RunConfig(std::shared_ptr<const Grid> g, Kernel k, HybridMeasure init,
            HybridMeasure cand, TestFamily fam)
      : grid(std::move(g)),
        kernel(std::move(k)),
        initial(std::move(init)),
        candidate(std::move(cand)),
        family(std::move(fam)) {}
};

// Parses and validates a run description.  Unknown keys anywhere in the
// document are rejected; relative paths resolve against base_dir.
RunConfig run_config_from_json_string(const std::string& text,
                                      const std::filesystem::path& base_dir = {});

RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace cesarolab
