#include "cesarolab/run_config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cesarolab {
namespace {

using nlohmann::json;

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  require(j.is_object(), where + ": expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    require(known, where + ": unknown key '" + item.key() + "'");
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot read file: " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string fmt_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

double get_number(const json& j, const std::string& where) {
  require(j.is_number(), where + ": expected a number");
  return j.get<double>();
}

std::size_t get_count(const json& j, const std::string& where) {
  require(j.is_number_integer() && j.get<long long>() >= 0,
          where + ": expected a nonnegative integer");
  return static_cast<std::size_t>(j.get<long long>());
}

struct ParsedMeasure {
  HybridMeasure measure;
  std::string label;
};

ParsedMeasure parse_measure(const json& j, const std::string& where,
                            const std::shared_ptr<const Grid>& grid,
                            const std::filesystem::path& base_dir) {
  require(j.is_object() && j.contains("type"), where + ": expected {\"type\": ...}");
  const std::string type = j.at("type").get<std::string>();
  if (type == "delta") {
    check_keys(j, where, {"type", "x"});
    require(j.contains("x"), where + ": delta needs \"x\"");
    const double x = get_number(j.at("x"), where + ".x");
    require(x >= 0.0 && x <= 1.0, where + ": delta location outside [0, 1]");
    return {HybridMeasure::point_mass(grid, x), "delta(" + fmt_num(x) + ")"};
  }
  if (type == "uniform") {
    check_keys(j, where, {"type"});
    return {HybridMeasure::lebesgue(grid), "uniform"};
  }
  if (type == "mixture") {
    check_keys(j, where, {"type", "components"});
    require(j.contains("components") && j.at("components").is_array() &&
                !j.at("components").empty(),
            where + ": mixture needs a non-empty \"components\" array");
    std::vector<ParsedMeasure> parts;
    std::vector<double> weights;
    double total = 0.0;
    std::string label;
    for (const json& c : j.at("components")) {
      const std::string cw = where + ".components";
      check_keys(c, cw, {"weight", "measure"});
      require(c.contains("weight") && c.contains("measure"),
              cw + ": each component needs \"weight\" and \"measure\"");
      const double w = get_number(c.at("weight"), cw + ".weight");
      require(w > 0.0, cw + ": weights must be positive");
      parts.push_back(parse_measure(c.at("measure"), cw + ".measure", grid, base_dir));
      weights.push_back(w);
      total += w;
      if (!label.empty()) label += " + ";
      label += fmt_num(w) + "*" + parts.back().label;
    }
    require(std::abs(total - 1.0) <= 1e-9,
            where + ": mixture weights must sum to 1");
    std::vector<WeightedTerm> terms;
    terms.reserve(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
      terms.push_back({weights[i], &parts[i].measure});
    }
    return {mix(terms), "mixture(" + label + ")"};
  }
  if (type == "file") {
    check_keys(j, where, {"type", "path"});
    require(j.contains("path"), where + ": file needs \"path\"");
    std::filesystem::path p = j.at("path").get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    try {
      return {HybridMeasure::from_json_string(read_text_file(p), grid),
              "file(" + p.filename().string() + ")"};
    } catch (const std::exception& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  throw ConfigError(where + ": unknown measure type '" + type + "'");
}

}  // namespace

RunConfig run_config_from_json_string(const std::string& text,
                                      const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "config",
             {"schema_version", "grid", "kernel", "initial", "candidate_limit",
              "n_max", "family", "witnesses", "epsilon_ladder", "pfa", "feller",
              "sim", "out_dir"});
  require(j.contains("schema_version"), "config: missing \"schema_version\"");
  require(j.at("schema_version").is_number_integer() &&
              j.at("schema_version").get<int>() == 1,
          "config: unsupported schema_version");
  require(j.contains("kernel"), "config: missing \"kernel\"");
  require(j.contains("initial"), "config: missing \"initial\"");

  double epsilon_min = 1e-12;
  std::size_t bin_count = 4096;
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    check_keys(g, "grid", {"epsilon_min", "bin_count"});
    if (g.contains("epsilon_min")) {
      epsilon_min = get_number(g.at("epsilon_min"), "grid.epsilon_min");
    }
    if (g.contains("bin_count")) {
      bin_count = get_count(g.at("bin_count"), "grid.bin_count");
    }
  }
  require(epsilon_min > 0.0 && epsilon_min < 1.0,
          "grid.epsilon_min must lie in (0, 1)");
  require(bin_count >= 1, "grid.bin_count must be >= 1");
  auto grid = std::make_shared<const Grid>(epsilon_min, bin_count);

  Kernel kernel = [&] {
    try {
      return kernel_from_json_string(j.at("kernel").dump(), grid, base_dir);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("kernel: ") + e.what());
    }
  }();

  ParsedMeasure initial = parse_measure(j.at("initial"), "initial", grid, base_dir);
  require(initial.measure.is_probability(1e-9),
          "initial: must be a probability measure");

  ParsedMeasure candidate =
      j.contains("candidate_limit")
          ? parse_measure(j.at("candidate_limit"), "candidate_limit", grid, base_dir)
          : ParsedMeasure{HybridMeasure::point_mass(grid, 0.0), "delta(0)"};

  int monomial_degree_max = 8;
  int cosine_count = 4;
  std::vector<TestFunction> extra;
  if (j.contains("family")) {
    const json& f = j.at("family");
    check_keys(f, "family", {"monomial_degree_max", "cosine_count", "hats"});
    if (f.contains("monomial_degree_max")) {
      monomial_degree_max =
          static_cast<int>(get_count(f.at("monomial_degree_max"),
                                     "family.monomial_degree_max"));
    }
    if (f.contains("cosine_count")) {
      cosine_count = static_cast<int>(
          get_count(f.at("cosine_count"), "family.cosine_count"));
    }
    if (f.contains("hats")) {
      require(f.at("hats").is_array(), "family.hats: expected an array");
      for (const json& h : f.at("hats")) {
        require(h.is_array() && h.size() == 3,
                "family.hats: each entry must be [a, b, c]");
        try {
          extra.push_back(TestFunction::hat(get_number(h[0], "family.hats"),
                                            get_number(h[1], "family.hats"),
                                            get_number(h[2], "family.hats")));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(std::string("family.hats: ") + e.what());
        }
      }
    }
  }
  require(monomial_degree_max >= 1 || cosine_count >= 1 || !extra.empty(),
          "family: must contain at least one non-constant function");

  RunConfig cfg(std::move(grid), std::move(kernel), std::move(initial.measure),
                std::move(candidate.measure),
                TestFamily::make(monomial_degree_max, cosine_count, extra));
  cfg.initial_label = std::move(initial.label);
  cfg.candidate_label = std::move(candidate.label);

  if (j.contains("n_max")) {
    cfg.n_max = get_count(j.at("n_max"), "n_max");
    require(cfg.n_max >= 1, "n_max must be >= 1");
  }
  if (j.contains("witnesses")) {
    require(j.at("witnesses").is_array(), "witnesses: expected an array");
    cfg.witnesses.clear();
    for (const json& w : j.at("witnesses")) {
      require(w.is_array() && w.size() == 2, "witnesses: each entry must be [a, b]");
      const double a = get_number(w[0], "witnesses");
      const double b = get_number(w[1], "witnesses");
      require(a >= 0.0 && a < b && b <= 1.0,
              "witnesses: need 0 <= a < b <= 1");
      cfg.witnesses.emplace_back(a, b);
    }
    require(!cfg.witnesses.empty(), "witnesses: must not be empty");
  }
  if (j.contains("epsilon_ladder")) {
    require(j.at("epsilon_ladder").is_array(), "epsilon_ladder: expected an array");
    cfg.epsilon_ladder.clear();
    for (const json& e : j.at("epsilon_ladder")) {
      const double eps = get_number(e, "epsilon_ladder");
      require(eps > 0.0 && eps <= 1.0, "epsilon_ladder: entries must lie in (0, 1]");
      cfg.epsilon_ladder.push_back(eps);
    }
    require(!cfg.epsilon_ladder.empty(), "epsilon_ladder: must not be empty");
  }
  if (j.contains("pfa")) {
    const json& p = j.at("pfa");
    check_keys(p, "pfa", {"weak_threshold", "witness_threshold"});
    if (p.contains("weak_threshold")) {
      cfg.pfa.weak_threshold = get_number(p.at("weak_threshold"), "pfa.weak_threshold");
    }
    if (p.contains("witness_threshold")) {
      cfg.pfa.witness_threshold =
          get_number(p.at("witness_threshold"), "pfa.witness_threshold");
    }
    require(cfg.pfa.weak_threshold > 0.0 && cfg.pfa.witness_threshold > 0.0,
            "pfa: thresholds must be positive");
  }
  if (j.contains("feller")) {
    const json& f = j.at("feller");
    check_keys(f, "feller", {"tolerance", "suspects", "auto_detect"});
    if (f.contains("tolerance")) {
      cfg.feller.tolerance = get_number(f.at("tolerance"), "feller.tolerance");
      require(cfg.feller.tolerance > 0.0, "feller.tolerance must be positive");
    }
    if (f.contains("suspects")) {
      require(f.at("suspects").is_array(), "feller.suspects: expected an array");
      for (const json& s : f.at("suspects")) {
        const double x = get_number(s, "feller.suspects");
        require(x >= 0.0 && x <= 1.0, "feller.suspects: entries must lie in [0, 1]");
        cfg.feller.suspects.push_back(x);
      }
    }
    if (f.contains("auto_detect")) {
      require(f.at("auto_detect").is_boolean(), "feller.auto_detect: expected a bool");
      cfg.feller.auto_detect = f.at("auto_detect").get<bool>();
    }
  }
  if (j.contains("sim")) {
    const json& s = j.at("sim");
    check_keys(s, "sim", {"replicas", "seed", "dump_trajectories"});
    if (s.contains("replicas")) {
      cfg.replicas = get_count(s.at("replicas"), "sim.replicas");
      require(cfg.replicas >= 1, "sim.replicas must be >= 1");
    }
    if (s.contains("seed")) {
      require(s.at("seed").is_number_integer(), "sim.seed: expected an integer");
      cfg.seed = s.at("seed").get<std::uint64_t>();
    }
    if (s.contains("dump_trajectories")) {
      require(s.at("dump_trajectories").is_boolean(),
              "sim.dump_trajectories: expected a bool");
      cfg.dump_trajectories = s.at("dump_trajectories").get<bool>();
    }
  }
  if (j.contains("out_dir")) {
    require(j.at("out_dir").is_string(), "out_dir: expected a string");
    cfg.out_dir = j.at("out_dir").get<std::string>();
    require(!cfg.out_dir.empty(), "out_dir: must not be empty");
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return run_config_from_json_string(read_text_file(path), path.parent_path());
}

}  // namespace cesarolab
