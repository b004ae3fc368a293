#pragma once

#include <cmath>

namespace psoconv {

// Inertia weight chi and the local/global acceleration coefficients.
struct SwarmParams {
  double chi = 0.0;
  double c_l = 0.0;
  double c_g = 0.0;

  bool finite() const { return std::isfinite(chi) && std::isfinite(c_l) && std::isfinite(c_g); }
  // c_l = c_g = 0: the velocity decays deterministically, no randomness at all.
  bool deterministic() const { return c_l == 0.0 && c_g == 0.0; }
};

}  // namespace psoconv
