#include "psoconv/boundary.hpp"

#include <cmath>

#include "psoconv/error.hpp"

namespace psoconv {

double trelea_bound(double chi) { return 2.0 * (chi + 1.0); }

double variance_bound(double chi) { return 12.0 * (1.0 - chi * chi) / (7.0 - 5.0 * chi); }

OmegaResult diagonal_omega(double chi, double c, const OmegaConfig& cfg) {
  if (chi == 0.0) {
    OmegaResult r;
    r.omega = omega_chi_zero(c, c);
    r.method = OmegaMethod::ChiZeroClosedForm;
    return r;
  }
  return omega_general(SwarmParams{chi, c, c}, cfg);
}

BoundaryPoint trace_boundary(double chi, double c_hi, double tol, const OmegaConfig& cfg,
                             double c_lo) {
  if (!(tol > 0.0)) throw std::invalid_argument("bisection tolerance must be positive");
  if (!(c_lo < c_hi)) throw std::invalid_argument("need c_lo < c_hi");

  BoundaryPoint pt;
  pt.chi = chi;
  OmegaResult hi = diagonal_omega(chi, c_hi, cfg);
  if (!(hi.omega > 0.0))
    throw Error(ErrorKind::NoBracket, "omega(" + std::to_string(c_hi) + ") = " +
                                          std::to_string(hi.omega) + " is not positive");
  std::optional<OmegaResult> lo;
  double a = c_lo;
  double b = c_hi;
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    const OmegaResult m = diagonal_omega(chi, mid, cfg);
    if (m.omega < 0.0) {
      a = mid;
      lo = m;
    } else {
      b = mid;
      hi = m;
    }
  }
  if (!lo) {
    lo = diagonal_omega(chi, a, cfg);
    if (!(lo->omega < 0.0))
      throw Error(ErrorKind::NoBracket, "omega(" + std::to_string(a) + ") = " +
                                            std::to_string(lo->omega) + " is not negative");
  }

  // Both ends inside the error band: the sign change is not resolved at this width.
  for (int widen = 0; widen < 4; ++widen) {
    const bool lo_noisy = std::abs(lo->omega) <= lo->abs_error_estimate;
    const bool hi_noisy = std::abs(hi.omega) <= hi.abs_error_estimate;
    if (!(lo_noisy && hi_noisy)) break;
    const double w = b - a;
    const double na = std::max(c_lo, a - w);
    const double nb = std::min(c_hi, b + w);
    const OmegaResult ol = diagonal_omega(chi, na, cfg);
    const OmegaResult oh = diagonal_omega(chi, nb, cfg);
    if (!(ol.omega < 0.0 && oh.omega > 0.0)) break;
    a = na;
    b = nb;
    lo = ol;
    hi = oh;
    pt.widened = true;
  }

  pt.bracket = {a, b};
  pt.bracket_width = b - a;
  pt.c_star = 0.5 * (a + b);
  pt.omega_at_bracket_ends = {lo->omega, hi.omega};
  return pt;
}

std::vector<BoundaryPoint> boundary_curve(std::span<const double> chi_values, double tol,
                                          const OmegaConfig& cfg, double c_hi, int jobs) {
  std::vector<BoundaryPoint> out(chi_values.size());
  const auto count = static_cast<std::ptrdiff_t>(chi_values.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs > 0 ? jobs : 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const double chi = chi_values[static_cast<std::size_t>(i)];
    try {
      out[static_cast<std::size_t>(i)] = trace_boundary(chi, c_hi, tol, cfg);
    } catch (const std::exception& e) {
      BoundaryPoint failed;
      failed.chi = chi;
      failed.c_star = std::nan("");
      failed.error = e.what();
      out[static_cast<std::size_t>(i)] = std::move(failed);
    }
  }
  return out;
}

}  // namespace psoconv
