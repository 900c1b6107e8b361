#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cesarolab/io_util.hpp"
#include "cesarolab/montecarlo.hpp"
#include "cesarolab/run_config.hpp"

namespace py = pybind11;
using namespace cesarolab;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cesaro-average diagnostics for Markov chains on [0, 1]";

  py::register_exception<ConfigError>(m, "ConfigError");

  py::class_<Grid, std::shared_ptr<Grid>>(m, "Grid")
      .def(py::init<double, std::size_t>(), py::arg("epsilon_min") = 1e-12,
           py::arg("bin_count") = 4096)
      .def_property_readonly("epsilon_min", &Grid::epsilon_min)
      .def_property_readonly("bin_count", &Grid::bin_count)
      .def("edge", &Grid::edge)
      .def("bin_index", &Grid::bin_index)
      .def("__repr__", [](const Grid& g) {
        return "Grid(epsilon_min=" + fmt_g(g.epsilon_min()) +
               ", bin_count=" + std::to_string(g.bin_count()) + ")";
      });

  py::class_<TestFunction>(m, "TestFunction")
      .def_static("monomial", &TestFunction::monomial)
      .def_static("cosine", &TestFunction::cosine)
      .def_static("hat", &TestFunction::hat)
      .def("__call__", &TestFunction::operator())
      .def("antiderivative", &TestFunction::antiderivative)
      .def_property_readonly("name", &TestFunction::name)
      .def_property_readonly("sup_norm", &TestFunction::sup_norm)
      .def_property_readonly("oscillation", &TestFunction::oscillation)
      .def("__repr__", [](const TestFunction& f) { return f.name(); });

  py::class_<TestFamily>(m, "TestFamily")
      .def_static("defaults", &TestFamily::defaults)
      .def_static("make", &TestFamily::make, py::arg("monomial_degree_max"),
                  py::arg("cosine_count"),
                  py::arg("extra") = std::vector<TestFunction>{})
      .def("__len__", &TestFamily::size)
      .def("__getitem__",
           [](const TestFamily& fam, std::size_t i) {
             if (i >= fam.size()) throw py::index_error();
             return fam[i];
           });

  py::class_<Atom>(m, "Atom")
      .def(py::init([](double x, double w) { return Atom{x, w}; }),
           py::arg("x"), py::arg("w"))
      .def_readonly("x", &Atom::x)
      .def_readonly("w", &Atom::w);

  py::class_<HybridMeasure>(m, "HybridMeasure")
      .def(py::init<std::shared_ptr<const Grid>, std::vector<Atom>,
                    std::vector<double>, double>(),
           py::arg("grid"), py::arg("atoms"), py::arg("bin_masses"),
           py::arg("near_zero_mass"))
      .def_static("zero", &HybridMeasure::zero)
      .def_static("point_mass", &HybridMeasure::point_mass, py::arg("grid"),
                  py::arg("x"), py::arg("w") = 1.0)
      .def_static("lebesgue", &HybridMeasure::lebesgue)
      .def_static(
          "from_json",
          [](const std::string& text) { return HybridMeasure::from_json_string(text); })
      .def_property_readonly("grid", &HybridMeasure::grid)
      .def_property_readonly("atoms", &HybridMeasure::atoms)
      .def_property_readonly("bin_masses", &HybridMeasure::bin_masses)
      .def_property_readonly("near_zero_mass", &HybridMeasure::near_zero_mass)
      .def_property_readonly("total_mass", &HybridMeasure::total_mass)
      .def_property_readonly("atom_mass", &HybridMeasure::atom_mass)
      .def("atom_mass_at", &HybridMeasure::atom_mass_at)
      .def("is_probability", &HybridMeasure::is_probability, py::arg("tol") = 1e-12)
      .def("to_json", &HybridMeasure::to_json_string, py::arg("indent") = -1);

  m.def("integrate", &integrate, py::arg("mu"), py::arg("f"));
  m.def("mass_of_interval", &mass_of_interval, py::arg("mu"), py::arg("a"),
        py::arg("b"), py::arg("include_a"), py::arg("include_b"));
  m.def("mix2", &mix2, py::arg("wa"), py::arg("a"), py::arg("wb"), py::arg("b"));

  // A Kernel is a variant of these four; any of them is accepted wherever a
  // kernel argument is expected.
  py::class_<ShrinkingUniform>(m, "ShrinkingUniform")
      .def(py::init<>())
      .def("__repr__", [](const ShrinkingUniform&) {
        return std::string("ShrinkingUniform()");
      });
  py::class_<SquaringMap>(m, "SquaringMap")
      .def(py::init<>())
      .def("__repr__",
           [](const SquaringMap&) { return std::string("SquaringMap()"); });
  py::class_<DeterministicMap>(m, "DeterministicMap")
      .def("__repr__", [](const DeterministicMap& dm) {
        return "DeterministicMap(pieces=" + std::to_string(dm.pieces().size()) +
               ")";
      });
  py::class_<GridStochastic>(m, "GridStochastic")
      .def("__repr__", [](const GridStochastic& gs) {
        return "GridStochastic(bins=" + std::to_string(gs.size()) + ")";
      });
  m.def("shrinking_uniform", [] { return ShrinkingUniform{}; });
  m.def("squaring_map", [] { return SquaringMap{}; });
  m.def(
      "kernel_from_json",
      [](const std::string& text, std::shared_ptr<const Grid> grid,
         const std::filesystem::path& base_dir) {
        return kernel_from_json_string(text, std::move(grid), base_dir);
      },
      py::arg("text"), py::arg("grid"),
      py::arg("base_dir") = std::filesystem::path{});
  m.def("kernel_name", &kernel_name);

  m.def("transition", &transition, py::arg("kernel"), py::arg("x"), py::arg("grid"));
  m.def("transition_prob", &transition_prob, py::arg("kernel"), py::arg("x"),
        py::arg("a"), py::arg("b"));
  m.def("pushforward_cdf", &pushforward_cdf, py::arg("kernel"), py::arg("mu"),
        py::arg("t"));
  m.def("apply_A", &apply_A, py::arg("kernel"), py::arg("mu"));
  m.def("apply_T", &apply_T, py::arg("kernel"), py::arg("f"), py::arg("x"));
  m.def("apply_T_limit_at_zero", &apply_T_limit_at_zero, py::arg("kernel"),
        py::arg("f"));
  m.def("integrate_T", &integrate_T, py::arg("kernel"), py::arg("f"), py::arg("mu"));
  m.def("integrate_pushforward", &integrate_pushforward, py::arg("kernel"),
        py::arg("f"), py::arg("mu"));
  m.def("duality_gap", &duality_gap, py::arg("kernel"), py::arg("f"), py::arg("mu"));

  py::class_<IterationState>(m, "IterationState")
      .def(py::init<Kernel, HybridMeasure>(), py::arg("kernel"), py::arg("initial"))
      .def("step", &IterationState::step)
      .def_property_readonly("n", &IterationState::n)
      .def_property_readonly("eta", &IterationState::eta)
      .def_property_readonly("current", &IterationState::current)
      .def_property_readonly("cesaro", &IterationState::cesaro);

  py::class_<CesaroRow>(m, "CesaroRow")
      .def_readonly("n", &CesaroRow::n)
      .def_readonly("function_name", &CesaroRow::function_name)
      .def_readonly("value", &CesaroRow::value);
  m.def("cesaro_integrals", &cesaro_integrals, py::arg("kernel"),
        py::arg("initial"), py::arg("n_max"), py::arg("family"));
  m.def("damped_power_iterate", &damped_power_iterate, py::arg("kernel"),
        py::arg("state"), py::arg("steps"), py::arg("damping") = 0.5);

  m.def("weak_distance", &weak_distance, py::arg("a"), py::arg("b"), py::arg("family"));
  m.def("invariance_residual", &invariance_residual, py::arg("kernel"),
        py::arg("mu"), py::arg("family"));
  m.def("witness_gap", &witness_gap, py::arg("mu_a"), py::arg("mu_b"),
        py::arg("a"), py::arg("b"));

  py::class_<EscapeRow>(m, "EscapeRow")
      .def_readonly("epsilon", &EscapeRow::epsilon)
      .def_readonly("mass", &EscapeRow::mass);
  m.def("escape_profile", &escape_profile, py::arg("mu"), py::arg("ladder"));

  py::class_<FellerFinding>(m, "FellerFinding")
      .def_readonly("function_name", &FellerFinding::function_name)
      .def_readonly("x", &FellerFinding::x)
      .def_readonly("value", &FellerFinding::value)
      .def_readonly("left_limit", &FellerFinding::left_limit)
      .def_readonly("right_limit", &FellerFinding::right_limit)
      .def_readonly("jump", &FellerFinding::jump);
  py::class_<FellerOptions>(m, "FellerOptions")
      .def(py::init<>())
      .def_readwrite("tolerance", &FellerOptions::tolerance)
      .def_readwrite("suspects", &FellerOptions::suspects)
      .def_readwrite("auto_detect", &FellerOptions::auto_detect);
  m.def("feller_scan", &feller_scan, py::arg("kernel"), py::arg("f"),
        py::arg("grid"), py::arg("options") = FellerOptions{});

  py::class_<PfaOptions>(m, "PfaOptions")
      .def(py::init<>())
      .def_readwrite("weak_threshold", &PfaOptions::weak_threshold)
      .def_readwrite("witness_threshold", &PfaOptions::witness_threshold);
  py::class_<SignatureOptions>(m, "SignatureOptions")
      .def(py::init<>())
      .def_readwrite("witnesses", &SignatureOptions::witnesses)
      .def_readwrite("epsilon_ladder", &SignatureOptions::epsilon_ladder)
      .def_readwrite("pfa", &SignatureOptions::pfa);
  py::class_<ReportRow>(m, "ReportRow")
      .def_readonly("n", &ReportRow::n)
      .def_readonly("weak_distance", &ReportRow::weak_distance)
      .def_readonly("gaps", &ReportRow::gaps)
      .def_readonly("escapes", &ReportRow::escapes);
  py::class_<ConvergenceReport>(m, "ConvergenceReport")
      .def_readonly("kernel", &ConvergenceReport::kernel)
      .def_readonly("eta", &ConvergenceReport::eta)
      .def_readonly("n_max", &ConvergenceReport::n_max)
      .def_readonly("rows", &ConvergenceReport::rows)
      .def_readonly("final_weak_distance", &ConvergenceReport::final_weak_distance)
      .def_readonly("slope_last_half", &ConvergenceReport::slope_last_half)
      .def_property_readonly(
          "verdict",
          [](const ConvergenceReport& r) { return to_string(r.verdict); })
      .def_readonly("pfa_signature", &ConvergenceReport::pfa_signature)
      .def("to_json", &ConvergenceReport::to_json_string, py::arg("indent") = 2);
  py::class_<SignatureResult>(m, "SignatureResult")
      .def_readonly("report", &SignatureResult::report)
      .def_readonly("final_cesaro", &SignatureResult::final_cesaro);
  m.def("pfa_signature", &pfa_signature, py::arg("kernel"), py::arg("initial"),
        py::arg("candidate"), py::arg("family"), py::arg("n_max"),
        py::arg("options") = SignatureOptions{});

  py::class_<CounterRng>(m, "CounterRng")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"),
           py::arg("stream") = 0)
      .def("next_u64", &CounterRng::next_u64)
      .def("uniform_open01", &CounterRng::uniform_open01);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init([](Kernel kernel, HybridMeasure initial, std::size_t horizon,
                       std::size_t replicas, std::uint64_t seed) {
             return SimConfig{std::move(kernel), std::move(initial), horizon,
                              replicas, seed};
           }),
           py::arg("kernel"), py::arg("initial"), py::arg("horizon") = 100,
           py::arg("replicas") = 1000, py::arg("seed") = 1)
      .def_readwrite("horizon", &SimConfig::horizon)
      .def_readwrite("replicas", &SimConfig::replicas)
      .def_readwrite("seed", &SimConfig::seed);
  py::class_<McCompareRow>(m, "McCompareRow")
      .def_readonly("function_name", &McCompareRow::function_name)
      .def_readonly("mc_estimate", &McCompareRow::mc_estimate)
      .def_readonly("operator_value", &McCompareRow::operator_value)
      .def_readonly("std_error", &McCompareRow::std_error)
      .def_readonly("z", &McCompareRow::z);
  m.def("empirical_cesaro", &empirical_cesaro, py::arg("config"));
  m.def("mc_vs_operator", &mc_vs_operator, py::arg("config"), py::arg("family"));
  m.def("ks_statistic", &ks_statistic, py::arg("samples"), py::arg("cdf"));
  m.def("random_probability_measure", &random_probability_measure,
        py::arg("grid"), py::arg("rng"));

  py::class_<RunConfig>(m, "RunConfig")
      .def_readonly("kernel", &RunConfig::kernel)
      .def_readonly("initial", &RunConfig::initial)
      .def_readonly("candidate", &RunConfig::candidate)
      .def_readonly("family", &RunConfig::family)
      .def_readonly("initial_label", &RunConfig::initial_label)
      .def_readonly("candidate_label", &RunConfig::candidate_label)
      .def_readonly("n_max", &RunConfig::n_max)
      .def_readonly("witnesses", &RunConfig::witnesses)
      .def_readonly("epsilon_ladder", &RunConfig::epsilon_ladder)
      .def_readonly("replicas", &RunConfig::replicas)
      .def_readonly("seed", &RunConfig::seed)
      .def_property_readonly("out_dir", [](const RunConfig& c) {
        return c.out_dir.string();
      });
  m.def("load_run_config", &load_run_config, py::arg("path"));
}
