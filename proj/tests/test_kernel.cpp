#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "cesarolab/kernel.hpp"
#include "cesarolab/markov_operator.hpp"

using namespace cesarolab;

namespace {

std::shared_ptr<const Grid> small_grid() { return Grid::make(1e-12, 256); }

HybridMeasure mixed_measure(std::shared_ptr<const Grid> g) {
  std::vector<double> bins(g->bin_count());
  for (std::size_t i = 0; i < bins.size(); ++i) bins[i] = 0.5 * g->width(i);
  return HybridMeasure(g, {{0.0, 0.1}, {0.5, 0.2}, {1.0, 0.1}}, bins, 0.1);
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / "cesarolab-kernel-test";
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

void write_text(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p);
  out << body;
}

}  // namespace

TEST_CASE("shrinking uniform hits small intervals with probability eps/x") {
  const Kernel k = ShrinkingUniform{};
  for (int i = 1; i <= 20; ++i) {
    const double x = static_cast<double>(i) / 20.0;
    const double eps = 0.01;
    CHECK(transition_prob(k, x, 0.0, eps) ==
          doctest::Approx(eps / x).epsilon(1e-12));
  }
  CHECK(transition_prob(k, 0.5, 0.25, 1.0) == doctest::Approx(0.5));
  CHECK(transition_prob(k, 0.5, 0.0, 0.5) == doctest::Approx(1.0));
  CHECK(transition_prob(k, 0.5, 0.6, 0.9) == 0.0);
  // From the state 0 the step lands exactly on 1, which no open subinterval
  // of [0, 1] contains.
  CHECK(transition_prob(k, 0.0, 0.9, 1.0) == 0.0);
  CHECK_THROWS_AS(transition_prob(k, -0.1, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(transition_prob(k, 0.5, 0.8, 0.2), std::invalid_argument);
}

TEST_CASE("squaring map is a point kernel with the endpoint sent to 0") {
  const Kernel k = SquaringMap{};
  CHECK(transition_prob(k, 0.5, 0.2, 0.3) == 1.0);
  CHECK(transition_prob(k, 0.5, 0.25, 0.3) == 0.0);  // open at 0.25
  CHECK(transition_prob(k, 1.0, 0.0, 0.5) == 0.0);   // lands exactly on 0
  auto g = small_grid();
  auto tr = transition(k, 1.0, g);
  CHECK(tr.atom_mass_at(0.0) == 1.0);
  CHECK(transition(k, 0.5, g).atom_mass_at(0.25) == 1.0);
}

TEST_CASE("one-step distribution from x matches the closed-form probabilities") {
  const Kernel k = ShrinkingUniform{};
  auto g = small_grid();
  for (double x : {0.03, 0.37, 1.0}) {
    auto tr = transition(k, x, g);
    CHECK(tr.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t j : {std::size_t{0}, g->bin_count() / 3,
                          g->bin_count() / 2, g->bin_count()}) {
      const double t = g->edge(j);
      CHECK(mass_of_interval(tr, 0.0, t, false, true) ==
            doctest::Approx(std::min(1.0, t / x)).epsilon(1e-11));
    }
  }
  auto from_zero = transition(k, 0.0, g);
  CHECK(from_zero.atom_mass_at(1.0) == 1.0);
  CHECK(from_zero.total_mass() == 1.0);
}

TEST_CASE("image cdf of a point mass at 1 under shrinking uniform is t") {
  const Kernel k = ShrinkingUniform{};
  auto g = small_grid();
  auto mu = HybridMeasure::point_mass(g, 1.0);
  for (double t : {1e-12, 0.001, 0.25, 0.5, 0.999}) {
    CHECK(pushforward_cdf(k, mu, t) == doctest::Approx(t).epsilon(1e-14));
  }
  CHECK(pushforward_cdf(k, mu, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(pushforward_cdf(k, mu, 0.0) == 0.0);
}

TEST_CASE("image cdf of lebesgue under shrinking uniform is t(1 - ln t)") {
  const Kernel k = ShrinkingUniform{};
  auto mu = HybridMeasure::lebesgue(small_grid());
  for (double t : {0.01, 0.1, 0.5, 0.9}) {
    CHECK(pushforward_cdf(k, mu, t) ==
          doctest::Approx(t * (1.0 - std::log(t))).epsilon(1e-9));
  }
}

TEST_CASE("a point mass at 0 is pushed onto the atom at 1") {
  const Kernel k = ShrinkingUniform{};
  auto g = small_grid();
  auto mu = HybridMeasure::point_mass(g, 0.0);
  CHECK(pushforward_cdf(k, mu, 0.999) == 0.0);
  CHECK(pushforward_cdf(k, mu, 1.0) == 1.0);
  auto image = apply_A(k, mu);
  CHECK(image.atom_mass_at(1.0) == 1.0);
  CHECK(image.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("squares that underflow to zero leave (0, 1] in one step") {
  const Kernel k = SquaringMap{};
  auto g = small_grid();
  const double tiny = 1e-200;  // tiny^2 rounds to exactly 0
  REQUIRE(tiny * tiny == 0.0);
  auto mu = HybridMeasure::point_mass(g, tiny);
  CHECK(pushforward_cdf(k, mu, 1.0) == 0.0);
  auto image = apply_A(k, mu);
  CHECK(image.atom_mass_at(0.0) == 1.0);
  CHECK(image.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  // A comfortably representable square stays an interior atom.
  auto fine = apply_A(k, HybridMeasure::point_mass(g, 0.5));
  CHECK(fine.atom_mass_at(0.25) == 1.0);
}

TEST_CASE("edge-sampled image cdf agrees with the scalar image cdf") {
  auto g = small_grid();
  const auto mu = mixed_measure(g);
  std::vector<MapPiece> tent(2);
  tent[0] = {0.0, 0.5, MapPiece::Kind::kAffine, 0.0, 2.0, 1.0};
  tent[1] = {0.5, 1.0, MapPiece::Kind::kAffine, 2.0, -2.0, 1.0};
  const std::vector<Kernel> kernels = {
      ShrinkingUniform{}, SquaringMap{}, DeterministicMap(tent, {})};
  for (const Kernel& k : kernels) {
    CAPTURE(kernel_name(k));
    const PushforwardParts parts = pushforward_parts(k, mu);
    REQUIRE(parts.edge_cdf.size() == g->bin_count() + 1);
    double at_zero = 0.0;
    for (const Atom& a : parts.atoms) {
      if (a.x == 0.0) at_zero += a.w;
    }
    for (std::size_t j : {std::size_t{0}, g->bin_count() / 4,
                          g->bin_count() / 2, g->bin_count()}) {
      CHECK(parts.edge_cdf[j] ==
            doctest::Approx(pushforward_cdf(k, mu, g->edge(j)) + at_zero)
                .epsilon(1e-12));
    }
    // The image of the mixed probability-like measure keeps its mass.
    CHECK(apply_A(k, mu).total_mass() ==
          doctest::Approx(mu.total_mass()).epsilon(1e-10));
  }
}

TEST_CASE("deterministic tent map preserves lebesgue measure") {
  std::vector<MapPiece> tent(2);
  tent[0] = {0.0, 0.5, MapPiece::Kind::kAffine, 0.0, 2.0, 1.0};
  tent[1] = {0.5, 1.0, MapPiece::Kind::kAffine, 2.0, -2.0, 1.0};
  const Kernel k = DeterministicMap(tent, {});
  auto g = small_grid();
  auto mu = HybridMeasure::lebesgue(g);
  for (double t : {0.1, 0.4, 0.75, 1.0}) {
    CHECK(pushforward_cdf(k, mu, t) == doctest::Approx(t).epsilon(1e-9));
  }
  const DeterministicMap& dm = std::get<DeterministicMap>(k);
  CHECK(dm.value(0.25) == 0.5);
  CHECK(dm.value(0.75) == 0.5);
  CHECK(dm.value(1.0) == 0.0);  // owned by the decreasing piece
  CHECK(dm.limit_from_right_at_zero() == 0.0);
}

TEST_CASE("deterministic map construction is validated") {
  CHECK_THROWS_AS(DeterministicMap({}, {}), std::invalid_argument);
  MapPiece gap1{0.0, 0.4, MapPiece::Kind::kAffine, 0.0, 1.0, 1.0};
  MapPiece gap2{0.5, 1.0, MapPiece::Kind::kAffine, 0.0, 1.0, 1.0};
  CHECK_THROWS_AS(DeterministicMap({gap1, gap2}, {}), std::invalid_argument);
  MapPiece overflow{0.0, 1.0, MapPiece::Kind::kAffine, 0.5, 1.0, 1.0};
  CHECK_THROWS_AS(DeterministicMap({overflow}, {}), std::invalid_argument);
  MapPiece flat{0.0, 1.0, MapPiece::Kind::kAffine, 0.5, 0.0, 1.0};
  CHECK_THROWS_AS(DeterministicMap({flat}, {}), std::invalid_argument);
  MapPiece ok{0.0, 1.0, MapPiece::Kind::kAffine, 0.0, 1.0, 1.0};
  CHECK_THROWS_AS(DeterministicMap({ok}, {{0.5, 2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(DeterministicMap({ok}, {{0.5, 0.1}, {0.5, 0.2}}),
                  std::invalid_argument);
}

TEST_CASE("kernel descriptors parse from json") {
  auto g = small_grid();
  CHECK(kernel_name(kernel_from_json_string(R"({"kernel":"shrinking_uniform"})",
                                            g)) == "shrinking_uniform");
  CHECK(kernel_name(kernel_from_json_string(R"({"kernel":"squaring_map"})",
                                            g)) == "squaring_map");

  const std::string squaring_as_map = R"({
    "kernel": "deterministic",
    "pieces": [{"type": "power", "lo": 0.0, "hi": 1.0, "exponent": 2.0}],
    "points": [{"x": 1.0, "value": 0.0}]
  })";
  const Kernel dm = kernel_from_json_string(squaring_as_map, g);
  CHECK(kernel_name(dm) == "deterministic");
  const Kernel sq = SquaringMap{};
  for (double x : {0.0, 0.3, 0.8, 1.0}) {
    CHECK(transition_prob(dm, x, 0.05, 0.95) ==
          transition_prob(sq, x, 0.05, 0.95));
  }

  CHECK_THROWS_AS(kernel_from_json_string(R"({"kernel":"nope"})", g),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      kernel_from_json_string(R"({"kernel":"squaring_map","extra":1})", g),
      std::invalid_argument);
  const std::string bad_piece_key = R"({
    "kernel": "deterministic",
    "pieces": [{"type": "affine", "lo": 0.0, "hi": 1.0, "a": 0.0, "b": 1.0,
                "slope": 2.0}]
  })";
  CHECK_THROWS_AS(kernel_from_json_string(bad_piece_key, g),
                  std::invalid_argument);
}

TEST_CASE("grid-stochastic kernels load from csv and validate rows") {
  TempDir tmp;
  auto g = Grid::make(1e-12, 4);

  write_text(tmp.path / "ok.csv",
             "# one row per source bin\n"
             "0.1,0.2,0.3,0.4\n"
             "0.1,0.2,0.3,0.4\n"
             "0.1,0.2,0.3,0.4\n"
             "0.1,0.2,0.3,0.4\n");
  auto gs = GridStochastic::from_csv(g, tmp.path / "ok.csv");
  CHECK(gs.size() == 4);
  const Kernel k = gs;

  // Every state maps to the same image, so one step reaches the fixed point.
  auto image = apply_A(k, HybridMeasure::point_mass(g, 0.7));
  CHECK(image.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mass_of_interval(image, 0.0, g->edge(1), false, true) ==
        doctest::Approx(0.1).epsilon(1e-12));
  CHECK(mass_of_interval(image, g->edge(3), 1.0, false, true) ==
        doctest::Approx(0.4).epsilon(1e-12));
  auto twice = apply_A(k, image);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(twice.bin_masses()[i] ==
          doctest::Approx(image.bin_masses()[i]).epsilon(1e-12));
  }
  CHECK(transition_prob(k, 0.7, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-9));

  write_text(tmp.path / "short.csv", "0.5,0.5\n");
  CHECK_THROWS(GridStochastic::from_csv(g, tmp.path / "short.csv"));
  write_text(tmp.path / "sum.csv",
             "0.1,0.2,0.3,0.3\n0.1,0.2,0.3,0.4\n0.1,0.2,0.3,0.4\n0.1,0.2,0.3,0.4\n");
  CHECK_THROWS(GridStochastic::from_csv(g, tmp.path / "sum.csv"));
  write_text(tmp.path / "text.csv",
             "a,0.2,0.3,0.4\n0.1,0.2,0.3,0.4\n0.1,0.2,0.3,0.4\n0.1,0.2,0.3,0.4\n");
  CHECK_THROWS(GridStochastic::from_csv(g, tmp.path / "text.csv"));
  CHECK_THROWS(GridStochastic::from_csv(g, tmp.path / "missing.csv"));

  // Relative matrix paths resolve against the descriptor's directory, and
  // point rows override single states.
  const std::string desc = R"({
    "kernel": "grid_stochastic",
    "matrix_path": "ok.csv",
    "point_rows": [{"x": 0.5, "row": [1.0, 0.0, 0.0, 0.0]}]
  })";
  const Kernel loaded = kernel_from_json_string(desc, g, tmp.path);
  CHECK(kernel_name(loaded) == "grid_stochastic");
  CHECK(transition_prob(loaded, 0.5, 0.0, g->edge(1)) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(transition_prob(loaded, 0.7, 0.0, g->edge(1)) ==
        doctest::Approx(0.1).epsilon(1e-9));
}
