#include "psoconv/omega.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "psoconv/error.hpp"

namespace psoconv {

namespace {

// u^2 ln(u^2) with the removable singularity at u = 0.
double sq_log_sq(double u) { return u == 0.0 ? 0.0 : u * u * std::log(u * u); }

// Every other knot, always keeping both ends.
KnotVector halve(const KnotVector& knots) {
  std::vector<double> kept;
  for (std::size_t i = 0; i < knots.size(); i += 2) kept.push_back(knots[i]);
  if (kept.back() != knots.upper()) kept.push_back(knots.upper());
  return KnotVector(std::move(kept));
}

}  // namespace

const char* to_string(OmegaMethod method) {
  switch (method) {
    case OmegaMethod::GeneralSpline: return "GeneralSpline";
    case OmegaMethod::ChiZeroClosedForm: return "ChiZeroClosedForm";
  }
  return "GeneralSpline";
}

const char* to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::Converges: return "Converges";
    case VerdictKind::Diverges: return "Diverges";
    case VerdictKind::Indeterminate: return "Indeterminate";
    case VerdictKind::DeterministicConverges: return "DeterministicConverges";
    case VerdictKind::DeterministicDiverges: return "DeterministicDiverges";
  }
  return "Indeterminate";
}

double g_integrand(double alpha, double h, double chi) {
  if (std::abs(alpha) >= kHalfPi) {
    if (chi == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(2.0 * chi * chi);
  }
  const double s = std::sin(alpha);
  const double c = std::cos(alpha);
  const double a = chi * s - h * c;
  const double b = a + c;
  return std::log(a * a + b * b);
}

InnerIntegral::InnerIntegral(const HDensity& d, double chi, std::size_t h_knot_count) : chi_(chi) {
  const std::vector<double> cuts = breakpoints(d);
  const double span = cuts.back() - cuts.front();
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double width = cuts[p + 1] - cuts[p];
    const auto share = static_cast<std::size_t>(
        std::llround(static_cast<double>(h_knot_count) * width / span));
    auto knots = KnotVector::equidistant(cuts[p], cuts[p + 1], std::max<std::size_t>(4, share));
    Piece piece{SplineQuadrature(knots), {}, {}};
    for (double h : knots.positions()) {
      piece.h.push_back(h);
      piece.density.push_back(d(h));
    }
    pieces_.push_back(std::move(piece));
  }
}

double InnerIntegral::operator()(double alpha) const {
  if (std::abs(alpha) >= kHalfPi) return g_integrand(alpha, 0.0, chi_);
  const double s = std::sin(alpha);
  const double c = std::cos(alpha);
  std::vector<double> values;
  double total = 0.0;
  for (const Piece& p : pieces_) {
    values.resize(p.h.size());
    for (std::size_t j = 0; j < p.h.size(); ++j) {
      const double a = chi_ * s - p.h[j] * c;
      const double b = a + c;
      values[j] = std::log(a * a + b * b) * p.density[j];
    }
    total += p.quad.integrate(values);
  }
  return total;
}

double f_inner(double alpha, const HDensity& d, double chi, std::size_t h_knot_count) {
  return InnerIntegral(d, chi, h_knot_count)(alpha);
}

OmegaResult omega_general(const SwarmParams& params, const OmegaConfig& cfg) {
  return omega_general(params, cfg, stationary_cdf(params, cfg.fixed_point));
}

OmegaResult omega_general(const SwarmParams& params, const OmegaConfig& cfg,
                          const StationaryResult& stationary) {
  const HDensity d = make_h_density(params.c_l, params.c_g);
  const AngleCdf& F = stationary.cdf;
  const InnerIntegral inner(d, params.chi, cfg.integration_knots);

  // chi = 0 makes the inner integral -inf at +-pi/2; integrate over a clipped domain.
  const double clip = params.chi == 0.0 ? cfg.boundary_clip : 0.0;
  std::vector<double> start(F.knots().positions().begin(), F.knots().positions().end());
  start.front() = -kHalfPi + clip;
  start.back() = kHalfPi - clip;
  KnotVector knots(std::move(start));

  auto integrand = [&](double alpha) { return inner(alpha) * F.density(alpha); };
  std::vector<double> values(knots.size());
  for (std::size_t i = 0; i < knots.size(); ++i) values[i] = integrand(knots[i]);
  CubicSpline outer(knots, values, BoundaryKind::Natural);

  // Grow in small rounds so that every round re-ranks the third-derivative jumps;
  // steep regions (the log singularity for chi = 0) get split repeatedly.
  while (outer.knots().size() < cfg.integration_knots) {
    const std::size_t n = outer.knots().size();
    const std::size_t target = std::min(cfg.integration_knots, n + std::max<std::size_t>(16, n / 16));
    KnotVector refined = refine_knots(outer, target);
    std::vector<double> refined_values(refined.size());
    const auto old_x = outer.knots().positions();
    const auto old_v = outer.values();
    std::size_t k = 0;
    for (std::size_t i = 0; i < refined.size(); ++i) {
      if (k < old_x.size() && refined[i] == old_x[k]) {
        refined_values[i] = old_v[k++];
      } else {
        refined_values[i] = integrand(refined[i]);
      }
    }
    outer = CubicSpline(std::move(refined), std::move(refined_values), BoundaryKind::Natural);
  }

  OmegaResult result;
  result.omega = outer.integral();
  result.method = OmegaMethod::GeneralSpline;
  result.fixed_point_iterations = stationary.iterations;

  const KnotVector coarse = halve(outer.knots());
  std::vector<double> coarse_values(coarse.size());
  std::size_t hint = 0;
  for (std::size_t i = 0; i < coarse.size(); ++i) coarse_values[i] = outer.eval(coarse[i], hint);
  const double coarse_omega =
      CubicSpline(coarse, std::move(coarse_values), BoundaryKind::Natural).integral();
  result.abs_error_estimate = std::abs(result.omega - coarse_omega);
  return result;
}

double omega_chi_zero(double c_l, double c_g) {
  if (!std::isfinite(c_l) || !std::isfinite(c_g))
    throw Error(ErrorKind::NonFiniteInput, "coefficients must be finite");
  if (c_l == 0.0 && c_g == 0.0)
    throw Error(ErrorKind::DegenerateCoefficients, "c_l = c_g = 0 has no random drift");
  if (c_l == 0.0 || c_g == 0.0) {
    const double c = c_l == 0.0 ? c_g : c_l;
    const double u = 1.0 - c;
    // E[ln((1 - c r)^2)] for r ~ U[0, 1]; also the limit of the two-term form below.
    return (u == 0.0 ? 0.0 : -(u / c) * std::log(u * u)) - 2.0;
  }
  if (c_l == c_g) {
    const double c = c_l;
    return (sq_log_sq(1.0 - 2.0 * c) - 2.0 * sq_log_sq(1.0 - c)) / (2.0 * c * c) - 3.0;
  }
  return (sq_log_sq(1.0 - c_l - c_g) - sq_log_sq(1.0 - c_g) - sq_log_sq(1.0 - c_l)) /
             (2.0 * c_l * c_g) -
         3.0;
}

Verdict classify(const SwarmParams& params, const OmegaConfig& cfg) {
  std::optional<AngleCdf> unused;
  return classify(params, cfg, unused);
}

Verdict classify(const SwarmParams& params, const OmegaConfig& cfg,
                 std::optional<AngleCdf>& stationary_out) {
  if (!params.finite()) throw Error(ErrorKind::NonFiniteInput, "parameters must be finite");
  Verdict v;
  if (params.deterministic()) {
    // v_t = chi^t v_0, so x_t settles iff chi^t -> 0.
    v.kind = std::abs(params.chi) < 1.0 ? VerdictKind::DeterministicConverges
                                        : VerdictKind::DeterministicDiverges;
    return v;
  }

  OmegaResult r;
  if (params.chi == 0.0) {
    r.omega = omega_chi_zero(params.c_l, params.c_g);
    r.method = OmegaMethod::ChiZeroClosedForm;
  } else {
    try {
      const StationaryResult stationary = stationary_cdf(params, cfg.fixed_point);
      r = omega_general(params, cfg, stationary);
      stationary_out = stationary.cdf;
    } catch (const NoConvergence& e) {
      v.kind = VerdictKind::Indeterminate;
      v.no_convergence_residual = e.last_residual();
      v.diagnostic = e.what();
      return v;
    }
  }
  v.omega = r;
  if (std::abs(r.omega) <= r.abs_error_estimate) {
    v.kind = VerdictKind::Indeterminate;
    v.diagnostic = "|omega| is within the error estimate";
  } else {
    v.kind = r.omega < 0.0 ? VerdictKind::Converges : VerdictKind::Diverges;
  }
  return v;
}

}  // namespace psoconv
