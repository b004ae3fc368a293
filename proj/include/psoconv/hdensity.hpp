#pragma once

#include <vector>

namespace psoconv {

// Density of H = c_l * r + c_g * s with r, s ~ U[0, 1] independent: a trapezoid
// (a triangle when |c_l| = |c_g|, a box when one coefficient is zero).
class HDensity {
public:
  double c_l() const { return c_l_; }
  double c_g() const { return c_g_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double c_min() const { return c_min_; }
  double c_max() const { return c_max_; }

  double operator()(double h) const;

private:
  friend HDensity make_h_density(double c_l, double c_g);
  HDensity() = default;

  double c_l_ = 0.0;
  double c_g_ = 0.0;
  double lower_ = 0.0;
  double upper_ = 0.0;
  double c_min_ = 0.0;
  double c_max_ = 0.0;
  double ramp_scale_ = 0.0;  // 1 / |c_l c_g|, zero when a coefficient vanishes
};

HDensity make_h_density(double c_l, double c_g);

double eval_density(const HDensity& d, double h);

// Sorted, de-duplicated {l_H, l_H + c_min, u_H - c_min, u_H}. The density is linear
// between consecutive entries.
std::vector<double> breakpoints(const HDensity& d);

}  // namespace psoconv
