#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "psoconv/angle.hpp"
#include "psoconv/hdensity.hpp"
#include "psoconv/params.hpp"
#include "psoconv/spline.hpp"

namespace psoconv {

enum class OmegaMethod { GeneralSpline, ChiZeroClosedForm };

// Stationary drift of Phi_t = ln(x_t^2 + v_t^2), in nats per iteration.
struct OmegaResult {
  double omega = 0.0;
  double abs_error_estimate = 0.0;
  std::size_t fixed_point_iterations = 0;
  OmegaMethod method = OmegaMethod::GeneralSpline;
};

enum class VerdictKind {
  Converges,
  Diverges,
  Indeterminate,
  DeterministicConverges,
  DeterministicDiverges,
};

struct Verdict {
  VerdictKind kind = VerdictKind::Indeterminate;
  std::optional<OmegaResult> omega;
  // Set when the fixed point iteration ran out of budget.
  std::optional<double> no_convergence_residual;
  std::string diagnostic;
};

struct OmegaConfig {
  FixedPointConfig fixed_point;
  // Knots for the outer (angle) and inner (h) splines of the final integral.
  std::size_t integration_knots = 8192;
  // Distance kept from +-pi/2 when chi = 0, where the inner integral diverges.
  double boundary_clip = 1e-15;
};

const char* to_string(OmegaMethod method);
const char* to_string(VerdictKind kind);

// ln( ((chi tan a - h)^2 + (chi tan a - h + 1)^2) / (1 + tan^2 a) ), evaluated in the
// equivalent form ln((chi sin a - h cos a)^2 + (chi sin a - (h - 1) cos a)^2). At
// a = +-pi/2 this is ln(2 chi^2), or -inf for chi = 0.
double g_integrand(double alpha, double h, double chi);

// Integral of g(alpha, h) f_H(h) over the support of H, computed with Natural splines
// on fixed per-piece knots. Construction does all the alpha-independent work.
class InnerIntegral {
public:
  InnerIntegral(const HDensity& d, double chi, std::size_t h_knot_count);
  double operator()(double alpha) const;

private:
  struct Piece {
    SplineQuadrature quad;
    std::vector<double> h;
    std::vector<double> density;
  };
  double chi_;
  std::vector<Piece> pieces_;
};

double f_inner(double alpha, const HDensity& d, double chi, std::size_t h_knot_count);

// Drift through the stationary angle density; the error estimate compares the final
// outer spline against one on every other knot.
OmegaResult omega_general(const SwarmParams& params, const OmegaConfig& cfg);
OmegaResult omega_general(const SwarmParams& params, const OmegaConfig& cfg,
                          const StationaryResult& stationary);

// Closed form for chi = 0.
double omega_chi_zero(double c_l, double c_g);

Verdict classify(const SwarmParams& params, const OmegaConfig& cfg);
// Also hands back the stationary angle CDF when the general path was taken.
Verdict classify(const SwarmParams& params, const OmegaConfig& cfg,
                 std::optional<AngleCdf>& stationary_out);

}  // namespace psoconv
