#include <cmath>

#include "doctest.h"
#include "psoconv/boundary.hpp"
#include "psoconv/error.hpp"
#include "psoconv/reference.hpp"

using namespace psoconv;

namespace {

// Smaller budgets keep the bisection tests quick; signs away from the frontier do not
// depend on them.
OmegaConfig quick_config() {
  OmegaConfig cfg;
  cfg.fixed_point.max_knots = 512;
  cfg.integration_knots = 2048;
  return cfg;
}

void check_evidence(const BoundaryPoint& p, double tol) {
  CHECK_FALSE(p.error.has_value());
  CHECK(p.omega_at_bracket_ends.first < 0.0);
  CHECK(p.omega_at_bracket_ends.second > 0.0);
  CHECK(p.bracket.first < p.c_star);
  CHECK(p.c_star < p.bracket.second);
  CHECK(p.bracket_width == doctest::Approx(p.bracket.second - p.bracket.first));
  if (!p.widened) CHECK(p.bracket_width <= tol);
}

}  // namespace

TEST_CASE("comparison bounds") {
  CHECK(trelea_bound(0.0) == 2.0);
  CHECK(trelea_bound(-1.0) == 0.0);
  CHECK(trelea_bound(1.0) == 4.0);
  CHECK(variance_bound(0.0) == doctest::Approx(12.0 / 7.0));
  CHECK(variance_bound(1.0) == 0.0);
  CHECK(variance_bound(-1.0) == 0.0);
  for (double chi : {-0.83, 0.1, 0.77}) {
    CHECK(trelea_bound(chi) == trelea_bound(chi));
    CHECK(variance_bound(chi) == variance_bound(chi));
  }
}

TEST_CASE("trace at chi = 0 finds the closed-form root") {
  const BoundaryPoint p = trace_boundary(0.0, kDefaultBracketHigh, 1e-4, OmegaConfig{});
  check_evidence(p, 1e-4);
  CHECK(std::abs(p.c_star - kChiZeroRoot) <= 1e-4);
  CHECK(variance_bound(0.0) < p.c_star);
}

TEST_CASE("standard parameters are inside the convergent region") {
  const BoundaryPoint p = trace_boundary(0.72984, kDefaultBracketHigh, 1e-2, quick_config());
  check_evidence(p, 1e-2);
  CHECK(p.c_star > 1.496172);
  CHECK(variance_bound(0.72984) < p.c_star);
}

TEST_CASE("boundary_curve") {
  CHECK(boundary_curve({}, 1e-3, OmegaConfig{}).empty());

  const std::vector<double> one{0.0};
  const auto single = boundary_curve(one, 1e-4, OmegaConfig{});
  REQUIRE(single.size() == 1);
  CHECK(std::abs(single[0].c_star - kChiZeroRoot) <= 1e-4);

  const std::vector<double> chis{-0.5, 0.0, 0.5};
  const auto pts = boundary_curve(chis, 2e-2, quick_config(), kDefaultBracketHigh, 2);
  REQUIRE(pts.size() == 3);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(pts[i].chi == chis[i]);
    check_evidence(pts[i], 2e-2);
    CHECK(pts[i].c_star > variance_bound(chis[i]));
  }
}

TEST_CASE("no bracket") {
  // omega(0, 1, 1) = -3: nothing to bisect below c = 1.
  try {
    trace_boundary(0.0, 1.0, 1e-3, OmegaConfig{});
    FAIL("expected NoBracket");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoBracket);
  }
  const std::vector<double> chis{0.0};
  const auto pts = boundary_curve(chis, 1e-3, OmegaConfig{}, 1.0);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].error.has_value());
  CHECK(std::isnan(pts[0].c_star));

  CHECK_THROWS(trace_boundary(0.0, 4.5, 0.0, OmegaConfig{}));
  CHECK_THROWS(trace_boundary(0.0, 0.5, 1e-3, OmegaConfig{}, 1.0));
}
