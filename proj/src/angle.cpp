#include "psoconv/angle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "psoconv/error.hpp"

namespace psoconv {

namespace {

double clamp_angle(double beta) { return std::clamp(beta, -kHalfPi, kHalfPi); }

// Combines F(gamma1), F(gamma2) into the step probability for m != 1, chi != 0.
double preimage_probability(double m, double gamma1, double f1, double gamma2, double f2) {
  const double lo = gamma1 <= gamma2 ? f1 : f2;
  const double hi = gamma1 <= gamma2 ? f2 : f1;
  if (m < 1.0) return hi - lo;
  return 1.0 - hi + lo;
}

// chi = 0: f+ = 1 - 1/(1 - h) no longer depends on the old angle.
bool chi_zero_leq(double m, double h) {
  if (h == 1.0) return true;  // f+ -> -inf from the left; a single point either way
  return 1.0 - 1.0 / (1.0 - h) <= m;
}

// Equidistant knots per piece between `cuts`, about `total` knots overall, at least 4
// per piece. Pieces shorter than `min_width` are dropped.
std::vector<KnotVector> piece_knots(std::span<const double> cuts, std::size_t total,
                                    double min_width) {
  const double span = cuts.back() - cuts.front();
  std::vector<KnotVector> pieces;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double width = cuts[p + 1] - cuts[p];
    if (width <= min_width) continue;
    const auto share = static_cast<std::size_t>(
        std::llround(static_cast<double>(total) * width / span));
    pieces.push_back(KnotVector::equidistant(cuts[p], cuts[p + 1], std::max<std::size_t>(4, share)));
  }
  return pieces;
}

std::size_t h_knot_count(const FixedPointConfig& cfg, std::size_t angle_knots) {
  return cfg.h_knots > 0 ? cfg.h_knots : angle_knots;
}

AngleCdf blend(const AngleCdf& next, const AngleCdf& prev, double keep) {
  const auto pv = prev.spline().values();
  const auto nv = next.spline().values();
  std::vector<double> values(nv.size());
  for (std::size_t i = 0; i < nv.size(); ++i) values[i] = (1.0 - keep) * nv[i] + keep * pv[i];
  return AngleCdf::from_values(next.knots(), std::move(values));
}

AngleCdf resample(const AngleCdf& F, KnotVector knots) {
  std::vector<double> values(knots.size());
  std::size_t hint = 0;
  for (std::size_t i = 0; i < knots.size(); ++i) values[i] = F(knots[i], hint);
  return AngleCdf::from_values(std::move(knots), std::move(values));
}

}  // namespace

// ---------------------------------------------------------------------------
// AngleCdf

AngleCdf::AngleCdf(CubicSpline spline) : spline_(std::move(spline)) {
  if (std::abs(spline_.lower() + kHalfPi) > 1e-12 || std::abs(spline_.upper() - kHalfPi) > 1e-12)
    throw Error(ErrorKind::DomainMismatch, "angle CDF must live on [-pi/2, pi/2]");
}

AngleCdf AngleCdf::from_values(KnotVector knots, std::vector<double> values) {
  for (double& v : values) v = std::clamp(v, 0.0, 1.0);
  values.front() = 0.0;
  values.back() = 1.0;
  return AngleCdf(CubicSpline(std::move(knots), std::move(values), BoundaryKind::DerivativeMatched));
}

AngleCdf AngleCdf::uniform(std::size_t knot_count) {
  auto knots = KnotVector::equidistant(-kHalfPi, kHalfPi, knot_count);
  std::vector<double> values(knot_count);
  for (std::size_t i = 0; i < knot_count; ++i) values[i] = (knots[i] + kHalfPi) / std::numbers::pi;
  return from_values(std::move(knots), std::move(values));
}

double AngleCdf::operator()(double beta) const { return spline_.eval(clamp_angle(beta)); }

double AngleCdf::operator()(double beta, std::size_t& hint) const {
  return spline_.eval(clamp_angle(beta), hint);
}

double AngleCdf::density(double beta) const { return spline_.derivative(clamp_angle(beta)); }

bool AngleCdf::is_monotone(double slack) const {
  const auto x = knots().positions();
  const auto v = spline_.values();
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[i - 1] - slack) return false;
  double prev = v[0];
  std::size_t hint = 0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    for (int k = 1; k <= 10; ++k) {
      const double probe = x[i] + (x[i + 1] - x[i]) * k / 10.0;
      const double value = spline_.eval(std::min(probe, x[i + 1]), hint);
      if (value < prev - slack) return false;
      prev = value;
    }
  }
  return true;
}

void FixedPointConfig::validate() const {
  if (initial_knots < 4) throw std::invalid_argument("initial_knots must be >= 4");
  if (max_knots < initial_knots) throw std::invalid_argument("max_knots must be >= initial_knots");
  if (!(l2_tolerance > 0.0)) throw std::invalid_argument("l2_tolerance must be positive");
  if (!(blend_factor >= 0.0 && blend_factor < 1.0))
    throw std::invalid_argument("blend_factor must lie in [0, 1)");
  if (max_iterations == 0) throw std::invalid_argument("max_iterations must be positive");
  if (h_knots != 0 && h_knots < 4) throw std::invalid_argument("h_knots must be 0 or >= 4");
}

const char* to_string(CaseTag tag) {
  switch (tag) {
    case CaseTag::ChiZeroLeq: return "ChiZeroLeq";
    case CaseTag::ChiZeroGt: return "ChiZeroGt";
    case CaseTag::MEqOneChiPos: return "MEqOneChiPos";
    case CaseTag::MEqOneChiNeg: return "MEqOneChiNeg";
    case CaseTag::MGtOne: return "MGtOne";
    case CaseTag::MLtOne: return "MLtOne";
  }
  return "MLtOne";
}

// ---------------------------------------------------------------------------
// Maps

double f_plus(double m, double h, double chi) {
  const double denom = 1.0 + chi * m - h;
  if (denom == 0.0) throw Error(ErrorKind::SingularMap, "1 + chi m - h = 0");
  return 1.0 - 1.0 / denom;
}

double f_minus(double m, double h, double chi) {
  if (chi == 0.0) throw Error(ErrorKind::SingularInverse, "f- is undefined for chi = 0");
  if (m == 1.0) throw Error(ErrorKind::SingularInverse, "f- is undefined at m = 1");
  return 1.0 / (chi * (1.0 - m)) + (h - 1.0) / chi;
}

PropagationCase propagation_case(double m, double h, double chi) {
  PropagationCase pc;
  if (chi == 0.0) {
    pc.case_tag = chi_zero_leq(m, h) ? CaseTag::ChiZeroLeq : CaseTag::ChiZeroGt;
    return pc;
  }
  pc.gamma1 = std::atan((h - 1.0) / chi);
  if (m == 1.0) {
    pc.gamma2 = pc.gamma1;
    pc.case_tag = chi > 0.0 ? CaseTag::MEqOneChiPos : CaseTag::MEqOneChiNeg;
  } else {
    pc.gamma2 = std::atan((h - 1.0) / chi + 1.0 / (chi * (1.0 - m)));
    pc.case_tag = m > 1.0 ? CaseTag::MGtOne : CaseTag::MLtOne;
  }
  pc.gamma_min = std::min(pc.gamma1, pc.gamma2);
  pc.gamma_max = std::max(pc.gamma1, pc.gamma2);
  return pc;
}

double prob_step_leq(const AngleCdf& F, double m, double h, double chi) {
  if (m == std::numeric_limits<double>::infinity()) return 1.0;
  if (m == -std::numeric_limits<double>::infinity()) return 0.0;
  const PropagationCase pc = propagation_case(m, h, chi);
  double p = 0.0;
  switch (pc.case_tag) {
    case CaseTag::ChiZeroLeq: p = 1.0; break;
    case CaseTag::ChiZeroGt: p = 0.0; break;
    case CaseTag::MEqOneChiPos: p = 1.0 - F(pc.gamma1); break;
    case CaseTag::MEqOneChiNeg: p = F(pc.gamma1); break;
    case CaseTag::MGtOne: p = 1.0 - F(pc.gamma_max) + F(pc.gamma_min); break;
    case CaseTag::MLtOne: p = F(pc.gamma_max) - F(pc.gamma_min); break;
  }
  return std::clamp(p, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Propagation

AngleCdf propagate_cdf(const AngleCdf& F, const HDensity& d, double chi,
                       const FixedPointConfig& cfg) {
  const KnotVector& beta = F.knots();
  const std::size_t n = beta.size();
  const std::size_t h_total = h_knot_count(cfg, n);
  const std::vector<double> cuts = breakpoints(d);
  const double min_width = 1e-12 * std::max(1.0, d.c_max());

  std::vector<double> next(n, 0.0);
  next[n - 1] = 1.0;

  if (chi == 0.0) {
    // The integrand is an indicator times f_H: cutting additionally at its jumps
    // (h = 1 and f+ = m) leaves pieces on which the spline is exact.
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double m = std::tan(beta[i]);
      std::vector<double> local = cuts;
      for (double jump : {1.0, m == 1.0 ? 1.0 : 1.0 - 1.0 / (1.0 - m)})
        if (jump > d.lower() && jump < d.upper()) local.push_back(jump);
      std::sort(local.begin(), local.end());
      double total = 0.0;
      for (const KnotVector& knots : piece_knots(local, h_total, min_width)) {
        const double mid = 0.5 * (knots.lower() + knots.upper());
        const double indicator = chi_zero_leq(m, mid) ? 1.0 : 0.0;
        if (indicator == 0.0) continue;
        std::vector<double> values(knots.size());
        for (std::size_t j = 0; j < knots.size(); ++j) values[j] = d(knots[j]);
        total += CubicSpline(knots, std::move(values), BoundaryKind::Natural).integral();
      }
      next[i] = total;
    }
    return AngleCdf::from_values(beta, std::move(next));
  }

  // Shared h grid: quadrature weights, f_H and F(gamma1) do not depend on beta.
  struct HPiece {
    SplineQuadrature quad;
    std::vector<double> density;
    std::vector<double> shift;  // (h - 1) / chi
    std::vector<double> gamma1;
    std::vector<double> f_gamma1;
  };
  std::vector<HPiece> pieces;
  for (const KnotVector& knots : piece_knots(cuts, h_total, min_width)) {
    HPiece p{SplineQuadrature(knots), {}, {}, {}, {}};
    std::size_t hint = 0;
    for (double h : knots.positions()) {
      p.density.push_back(d(h));
      p.shift.push_back((h - 1.0) / chi);
      p.gamma1.push_back(std::atan(p.shift.back()));
      p.f_gamma1.push_back(F(p.gamma1.back(), hint));
    }
    pieces.push_back(std::move(p));
  }

#pragma omp parallel for schedule(dynamic, 8)
  for (std::size_t i = 1; i < n - 1; ++i) {
    const double m = std::tan(beta[i]);
    std::vector<double> values;
    double total = 0.0;
    for (const HPiece& p : pieces) {
      const std::size_t count = p.density.size();
      values.resize(count);
      if (m == 1.0) {
        for (std::size_t j = 0; j < count; ++j) {
          const double prob = chi > 0.0 ? 1.0 - p.f_gamma1[j] : p.f_gamma1[j];
          values[j] = prob * p.density[j];
        }
      } else {
        const double offset = 1.0 / (chi * (1.0 - m));
        std::size_t hint = 0;
        for (std::size_t j = 0; j < count; ++j) {
          const double gamma2 = std::atan(p.shift[j] + offset);
          const double prob =
              preimage_probability(m, p.gamma1[j], p.f_gamma1[j], gamma2, F(gamma2, hint));
          values[j] = std::clamp(prob, 0.0, 1.0) * p.density[j];
        }
      }
      total += p.quad.integrate(values);
    }
    next[i] = total;
  }
  return AngleCdf::from_values(beta, std::move(next));
}

// ---------------------------------------------------------------------------
// Fixed point

StationaryResult stationary_cdf(const SwarmParams& params, const FixedPointConfig& cfg) {
  cfg.validate();
  return stationary_cdf(params, cfg, AngleCdf::uniform(cfg.initial_knots));
}

StationaryResult stationary_cdf(const SwarmParams& params, const FixedPointConfig& cfg,
                                AngleCdf start) {
  cfg.validate();
  if (!params.finite()) throw Error(ErrorKind::NonFiniteInput, "parameters must be finite");
  const HDensity d = make_h_density(params.c_l, params.c_g);

  StationaryResult result{std::move(start), 0, {}};
  AngleCdf& F = result.cdf;
  std::size_t level_start = 0;  // index into residuals where the current knot level began

  auto refine = [&] {
    const std::size_t n = F.knots().size();
    F = resample(F, refine_knots(F.spline(), std::min(2 * n, cfg.max_knots)));
    level_start = result.residuals.size();
  };

  while (true) {
    if (result.iterations >= cfg.max_iterations)
      throw NoConvergence(result.residuals.empty() ? std::numeric_limits<double>::infinity()
                                                   : result.residuals.back(),
                          result.iterations);
    AngleCdf next = blend(propagate_cdf(F, d, params.chi, cfg), F, cfg.blend_factor);
    const double residual = l2_distance(F.spline(), next.spline());
    F = std::move(next);
    ++result.iterations;
    result.residuals.push_back(residual);

    const bool at_max = F.knots().size() >= cfg.max_knots;
    if (residual <= cfg.l2_tolerance) {
      if (at_max) return result;
      refine();
      continue;
    }
    const std::size_t level_len = result.residuals.size() - level_start;
    if (!at_max && level_len > 10) {
      const double earlier = result.residuals[result.residuals.size() - 11];
      if (residual > 0.9 * earlier) refine();
    }
  }
}

}  // namespace psoconv
