#include "psoconv/hdensity.hpp"

#include <algorithm>
#include <cmath>

#include "psoconv/error.hpp"

namespace psoconv {

HDensity make_h_density(double c_l, double c_g) {
  if (!std::isfinite(c_l) || !std::isfinite(c_g))
    throw Error(ErrorKind::NonFiniteInput, "H coefficients must be finite");
  if (c_l == 0.0 && c_g == 0.0)
    throw Error(ErrorKind::DegenerateCoefficients, "c_l = c_g = 0 gives a point mass");
  HDensity d;
  d.c_l_ = c_l;
  d.c_g_ = c_g;
  d.lower_ = std::min(0.0, c_l) + std::min(0.0, c_g);
  d.upper_ = std::max(0.0, c_l) + std::max(0.0, c_g);
  d.c_min_ = std::min(std::abs(c_l), std::abs(c_g));
  d.c_max_ = std::max(std::abs(c_l), std::abs(c_g));
  d.ramp_scale_ = d.c_min_ > 0.0 ? 1.0 / std::abs(c_l * c_g) : 0.0;
  return d;
}

double HDensity::operator()(double h) const {
  if (!std::isfinite(h)) throw Error(ErrorKind::NonFiniteInput, "h must be finite");
  if (h < lower_ || h > upper_) return 0.0;
  if (h < lower_ + c_min_) return (h - lower_) * ramp_scale_;
  if (h > upper_ - c_min_) return (upper_ - h) * ramp_scale_;
  return 1.0 / c_max_;
}

double eval_density(const HDensity& d, double h) { return d(h); }

std::vector<double> breakpoints(const HDensity& d) {
  std::vector<double> pts = {d.lower(), d.lower() + d.c_min(), d.upper() - d.c_min(), d.upper()};
  std::sort(pts.begin(), pts.end());
  const double eps = 1e-12 * std::max(1.0, d.c_max());
  pts.erase(std::unique(pts.begin(), pts.end(), [eps](double a, double b) { return b - a <= eps; }),
            pts.end());
  pts.back() = d.upper();
  return pts;
}

}  // namespace psoconv
