#pragma once

#include <cstddef>
#include <numbers>
#include <vector>

#include "psoconv/hdensity.hpp"
#include "psoconv/params.hpp"
#include "psoconv/spline.hpp"

namespace psoconv {

inline constexpr double kHalfPi = std::numbers::pi / 2.0;

// Distribution of the angle alpha with v = x tan(alpha), as a DerivativeMatched
// spline on [-pi/2, pi/2]. Values are pinned to 0 and 1 at the ends.
class AngleCdf {
public:
  explicit AngleCdf(CubicSpline spline);

  // Clamps the values into [0, 1] and pins both ends before splining.
  static AngleCdf from_values(KnotVector knots, std::vector<double> values);
  // F(beta) = (beta + pi/2) / pi.
  static AngleCdf uniform(std::size_t knot_count);

  // beta is clamped into the domain first, so atan() results can be passed directly.
  double operator()(double beta) const;
  double operator()(double beta, std::size_t& hint) const;
  double density(double beta) const;

  // Checks every knot and ten probes per knot interval, allowing `slack` of decrease.
  bool is_monotone(double slack = 1e-9) const;

  const CubicSpline& spline() const { return spline_; }
  const KnotVector& knots() const { return spline_.knots(); }

private:
  CubicSpline spline_;
};

struct FixedPointConfig {
  std::size_t initial_knots = 64;
  std::size_t max_knots = 2048;
  double l2_tolerance = 1e-7;
  // Share of the previous iterate kept in the next one.
  double blend_factor = 0.1;
  std::size_t max_iterations = 20000;
  // Knots for each h-integral; 0 means "same as the current angle knot count".
  std::size_t h_knots = 0;

  void validate() const;
};

enum class CaseTag { ChiZeroLeq, ChiZeroGt, MEqOneChiPos, MEqOneChiNeg, MGtOne, MLtOne };

const char* to_string(CaseTag tag);

// Which branch of Pr[f+(tan alpha, h) <= m] applies, and the angles bounding the
// preimage. The gammas are 0 when chi = 0 (no preimage needed) and gamma2 equals
// gamma1 when m = 1.
struct PropagationCase {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma_min = 0.0;
  double gamma_max = 0.0;
  CaseTag case_tag = CaseTag::MLtOne;
};

// Successor of tan(alpha) = m when H = h: 1 - 1 / (1 + chi m - h).
double f_plus(double m, double h, double chi);
// Inverse of f_plus in m: 1 / (chi (1 - m)) + (h - 1) / chi.
double f_minus(double m, double h, double chi);

PropagationCase propagation_case(double m, double h, double chi);

// Pr[f+(tan alpha, h) <= m] for alpha ~ F. m = +-inf gives the limits 1 and 0.
double prob_step_leq(const AngleCdf& F, double m, double h, double chi);

// One step of the angle-distribution recurrence, evaluated at F's knots.
AngleCdf propagate_cdf(const AngleCdf& F, const HDensity& d, double chi,
                       const FixedPointConfig& cfg);

struct StationaryResult {
  AngleCdf cdf;
  std::size_t iterations = 0;
  std::vector<double> residuals;
};

// Iterates F <- (1 - blend) propagate(F) + blend F from the uniform start until the
// L2 change drops to cfg.l2_tolerance at cfg.max_knots knots. The knot count doubles
// whenever a level has converged or stalled (< 10% residual decrease over 10 steps).
StationaryResult stationary_cdf(const SwarmParams& params, const FixedPointConfig& cfg);
StationaryResult stationary_cdf(const SwarmParams& params, const FixedPointConfig& cfg,
                                AngleCdf start);

}  // namespace psoconv
