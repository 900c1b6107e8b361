#include "cesarolab/test_functions.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace cesarolab {

namespace {

constexpr double kPi = std::numbers::pi;

// Plain multiply chain; noticeably cheaper than std::pow on the Monte Carlo
// path, where monomials are evaluated per trajectory step.
double ipow(double y, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= y;
  return r;
}

}  // namespace

TestFunction TestFunction::monomial(int degree) {
  if (degree < 0) throw std::invalid_argument("monomial: degree must be >= 0");
  TestFunction f;
  f.shape_ = Shape::kMonomial;
  f.k_ = degree;
  f.name_ = "monomial(" + std::to_string(degree) + ")";
  f.sup_norm_ = 1.0;
  f.oscillation_ = degree == 0 ? 0.0 : 1.0;
  f.at_zero_ = degree == 0 ? 1.0 : 0.0;
  f.at_one_ = 1.0;
  return f;
}

TestFunction TestFunction::cosine(int k) {
  if (k < 1) throw std::invalid_argument("cosine: k must be >= 1");
  TestFunction f;
  f.shape_ = Shape::kCosine;
  f.k_ = k;
  f.name_ = "cosine(" + std::to_string(k) + ")";
  f.sup_norm_ = 1.0;
  f.oscillation_ = 2.0;  // cos(pi k y) attains both 1 and -1 on [0, 1]
  f.at_zero_ = 1.0;
  f.at_one_ = k % 2 == 0 ? 1.0 : -1.0;
  return f;
}

TestFunction TestFunction::hat(double a, double b, double c) {
  if (!(0.0 <= a && a < b && b < c && c <= 1.0)) {
    throw std::invalid_argument("hat: need 0 <= a < b < c <= 1");
  }
  TestFunction f;
  f.shape_ = Shape::kHat;
  f.a_ = a;
  f.b_ = b;
  f.c_ = c;
  f.name_ = "hat(" + std::to_string(a) + "," + std::to_string(b) + "," +
            std::to_string(c) + ")";
  f.sup_norm_ = 1.0;
  f.oscillation_ = 1.0;
  f.at_zero_ = 0.0;
  f.at_one_ = 0.0;
  f.breakpoints_ = {a, b, c};
  return f;
}

double TestFunction::operator()(double y) const {
  switch (shape_) {
    case Shape::kMonomial:
      return ipow(y, k_);
    case Shape::kCosine:
      return std::cos(kPi * k_ * y);
    case Shape::kHat:
      if (y <= a_ || y >= c_) return 0.0;
      if (y <= b_) return (y - a_) / (b_ - a_);
      return (c_ - y) / (c_ - b_);
  }
  return 0.0;
}

double TestFunction::antiderivative(double y) const {
  switch (shape_) {
    case Shape::kMonomial:
      return ipow(y, k_ + 1) / (k_ + 1);
    case Shape::kCosine:
      return std::sin(kPi * k_ * y) / (kPi * k_);
    case Shape::kHat: {
      if (y <= a_) return 0.0;
      if (y <= b_) {
        const double t = y - a_;
        return 0.5 * t * t / (b_ - a_);
      }
      const double up = 0.5 * (b_ - a_);
      if (y <= c_) {
        const double t = c_ - y;
        return up + 0.5 * ((c_ - b_) - t * t / (c_ - b_));
      }
      return up + 0.5 * (c_ - b_);
    }
  }
  return 0.0;
}

TestFamily::TestFamily(std::vector<TestFunction> functions)
    : functions_(std::move(functions)) {
  if (functions_.empty()) throw std::invalid_argument("TestFamily: empty");
  bool has_constant = false;
  std::set<std::string> names;
  for (const auto& f : functions_) {
    if (!names.insert(f.name()).second) {
      throw std::invalid_argument("TestFamily: duplicate name " + f.name());
    }
    if (f.name() == "monomial(0)") has_constant = true;
  }
  if (!has_constant) {
    throw std::invalid_argument("TestFamily: must contain monomial(0)");
  }
}

TestFamily TestFamily::defaults() { return make(8, 4); }

TestFamily TestFamily::make(int monomial_degree_max, int cosine_count,
                            const std::vector<TestFunction>& extra) {
  if (monomial_degree_max < 0 || cosine_count < 0) {
    throw std::invalid_argument("TestFamily: negative counts");
  }
  std::vector<TestFunction> fs;
  for (int k = 0; k <= monomial_degree_max; ++k) fs.push_back(TestFunction::monomial(k));
  for (int k = 1; k <= cosine_count; ++k) fs.push_back(TestFunction::cosine(k));
  for (const auto& f : extra) fs.push_back(f);
  return TestFamily(std::move(fs));
}

}  // namespace cesarolab
