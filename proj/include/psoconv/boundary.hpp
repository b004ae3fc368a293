#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "psoconv/omega.hpp"

namespace psoconv {

// Point c*(chi) on the diagonal c_l = c_g = c where the drift changes sign.
struct BoundaryPoint {
  double chi = 0.0;
  double c_star = 0.0;
  double bracket_width = 0.0;
  std::pair<double, double> bracket;                // [c_lo, c_hi]
  std::pair<double, double> omega_at_bracket_ends;  // omega(c_lo) < 0 < omega(c_hi)
  // Bracket was widened because both ends sat inside the numerical error band.
  bool widened = false;
  // Set when this point could not be traced (boundary_curve keeps going).
  std::optional<std::string> error;
};

// Expected position converges for c_l = c_g = c < 2 (chi + 1).
double trelea_bound(double chi);
// Variance of the position converges for c_l = c_g = c <= 12 (1 - chi^2) / (7 - 5 chi).
double variance_bound(double chi);

inline constexpr double kDefaultBracketLow = 1e-3;
inline constexpr double kDefaultBracketHigh = 4.5;

// omega(chi, c, c): closed form at chi = 0, spline evaluation otherwise.
OmegaResult diagonal_omega(double chi, double c, const OmegaConfig& cfg);

// Bisection of c -> omega(chi, c, c) on [c_lo, c_hi]. omega(c_lo) < 0 is the caller's
// precondition and is only evaluated if the lower end never moves.
BoundaryPoint trace_boundary(double chi, double c_hi, double tol, const OmegaConfig& cfg,
                             double c_lo = kDefaultBracketLow);

// One traced point per chi, in input order. Failed points carry `error`.
std::vector<BoundaryPoint> boundary_curve(std::span<const double> chi_values, double tol,
                                          const OmegaConfig& cfg,
                                          double c_hi = kDefaultBracketHigh, int jobs = 1);

}  // namespace psoconv
