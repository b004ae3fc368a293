#pragma once

// Reference computations for the tests. Nothing here uses the library's spline code.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "psoconv/angle.hpp"

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double fa, double b,
                      double fb, double fm, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

// Adaptive Simpson on [a, b]; f should be smooth there.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, fa, b, fb, fm, whole, tol, 50);
}

// Root of f on [a, b] by bisection; f(a) and f(b) must differ in sign.
inline double bisect(const std::function<double(double)>& f, double a, double b, double tol) {
  double fa = f(a);
  while (b - a > tol) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// Law of atan(Z) for Z ~ N(0, sigma^2): F(beta) = Phi(tan(beta) / sigma).
inline psoconv::AngleCdf squashed_gaussian(std::size_t knots, double sigma = 1.0) {
  auto kv = psoconv::KnotVector::equidistant(-psoconv::kHalfPi, psoconv::kHalfPi, knots);
  std::vector<double> values(knots);
  for (std::size_t i = 0; i < knots; ++i) {
    const double z = std::tan(kv[i]) / sigma;
    values[i] = 0.5 * std::erfc(-z / std::sqrt(2.0));
  }
  return psoconv::AngleCdf::from_values(std::move(kv), std::move(values));
}

// Uniform law tilted by a smooth term: density (1 + a cos(2 beta)) / pi, |a| < 1.
// Its spline stays strictly increasing.
inline psoconv::AngleCdf tilted_uniform(std::size_t knots, double a) {
  auto kv = psoconv::KnotVector::equidistant(-psoconv::kHalfPi, psoconv::kHalfPi, knots);
  std::vector<double> values(knots);
  for (std::size_t i = 0; i < knots; ++i)
    values[i] = (kv[i] + psoconv::kHalfPi + 0.5 * a * std::sin(2.0 * kv[i])) / std::numbers::pi;
  return psoconv::AngleCdf::from_values(std::move(kv), std::move(values));
}

}  // namespace oracle
