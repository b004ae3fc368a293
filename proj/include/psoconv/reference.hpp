#pragma once

#include <array>

namespace psoconv {

// Commonly used parameter sets with published drift values (six decimals).
struct ReferenceRow {
  double chi;
  double c_l;
  double c_g;
  double omega;
};

inline constexpr std::array<ReferenceRow, 9> kReferenceRows{{
    {0.72984, 1.496172, 1.496172, -0.194063},
    {0.72984, 2.04355, 0.94879, -0.177108},
    {0.6, 1.7, 1.7, -0.327742},
    {0.9, 0.1, 0.1, -0.100728},
    {0.7, 0.3, 0.3, -0.338770},
    {0.9, 3.0, 3.0, 0.380623},
    {0.1, 0.1, 0.1, -0.241938},
    {0.1, 2.1, 2.1, -0.485162},
    {-0.7, 0.5, 0.5, -0.133533},
}};

// Root of c -> omega(0, c, c) other than the trivial c = 0.
inline constexpr double kChiZeroRoot = 2.3195565;

}  // namespace psoconv
