#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace cesarolab {

// Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr std::array<double, 4> kGl4Nodes = {
    -0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
    0.8611363115940526};
inline constexpr std::array<double, 4> kGl4Weights = {
    0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
    0.3478548451374538};

inline constexpr std::array<double, 8> kGl8Nodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
inline constexpr std::array<double, 8> kGl8Weights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

template <typename F>
double gl4(F&& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) s += kGl4Weights[i] * f(c + h * kGl4Nodes[i]);
  return s * h;
}

template <typename F>
double gl8(F&& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < 8; ++i) s += kGl8Weights[i] * f(c + h * kGl8Nodes[i]);
  return s * h;
}

namespace detail {
template <typename F>
double adaptive_gl_impl(F& f, double a, double b, double whole, double abs_tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double left = gl8(f, a, m);
  const double right = gl8(f, m, b);
  const double delta = left + right - whole;
  if (std::abs(delta) <= abs_tol || depth >= 48) return left + right;
  return adaptive_gl_impl(f, a, m, left, 0.5 * abs_tol, depth + 1) +
         adaptive_gl_impl(f, m, b, right, 0.5 * abs_tol, depth + 1);
}
}  // namespace detail

// Adaptive Gauss-Legendre to an absolute tolerance.
template <typename F>
double adaptive_gl(F&& f, double a, double b, double abs_tol) {
  if (!(b > a)) return 0.0;
  return detail::adaptive_gl_impl(f, a, b, gl8(f, a, b), abs_tol, 0);
}

}  // namespace cesarolab
