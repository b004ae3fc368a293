#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "psoconv/error.hpp"
#include "psoconv/hdensity.hpp"

using namespace psoconv;

TEST_CASE("support and shape parameters") {
  const HDensity a = make_h_density(2, 2);
  CHECK(a.lower() == 0.0);
  CHECK(a.upper() == 4.0);
  CHECK(a.c_min() == 2.0);
  CHECK(a.c_max() == 2.0);

  const HDensity b = make_h_density(1, 3);
  CHECK(b.lower() == 0.0);
  CHECK(b.upper() == 4.0);
  CHECK(b.c_min() == 1.0);
  CHECK(b.c_max() == 3.0);

  const HDensity c = make_h_density(-0.5, 2);
  CHECK(c.lower() == -0.5);
  CHECK(c.upper() == 2.0);
  CHECK(c.c_min() == 0.5);
  CHECK(c.c_max() == 2.0);
}

TEST_CASE("density values") {
  CHECK(eval_density(make_h_density(2, 2), 1.0) == doctest::Approx(0.25));
  CHECK(eval_density(make_h_density(1, 3), 2.0) == doctest::Approx(1.0 / 3.0));
  for (auto [cl, cg] : {std::pair{2.0, 2.0}, {1.0, 3.0}, {-0.5, 2.0}, {0.0, 1.5}}) {
    const HDensity d = make_h_density(cl, cg);
    CHECK(eval_density(d, d.upper() + 1.0) == 0.0);
    CHECK(eval_density(d, d.lower() - 1.0) == 0.0);
  }
  // One zero coefficient: uniform on [0, c].
  const HDensity u = make_h_density(0.0, 1.5);
  for (double h : {0.0, 0.2, 1.0, 1.5}) CHECK(u(h) == doctest::Approx(1.0 / 1.5));
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(make_h_density(0, 0), Error);
  CHECK_THROWS_AS(make_h_density(NAN, 1), Error);
  CHECK_THROWS_AS(make_h_density(1, INFINITY), Error);
  CHECK_THROWS_AS(eval_density(make_h_density(1, 1), NAN), Error);
  try {
    make_h_density(0, 0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateCoefficients);
  }
}

TEST_CASE("breakpoints") {
  auto eq = [](const std::vector<double>& got, const std::vector<double>& want) {
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]));
  };
  eq(breakpoints(make_h_density(2, 2)), {0, 2, 4});
  eq(breakpoints(make_h_density(1, 3)), {0, 1, 3, 4});
  eq(breakpoints(make_h_density(0, 1.5)), {0, 1.5});
  eq(breakpoints(make_h_density(-0.5, 2)), {-0.5, 0, 1.5, 2});
}

TEST_CASE("normalization, positivity, symmetry, continuity") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> coef(-3.0, 4.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double cl = coef(rng);
    const double cg = trial % 8 == 0 ? 0.0 : coef(rng);
    const HDensity d = make_h_density(cl, cg);
    const auto cuts = breakpoints(d);
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      mass += oracle::integrate([&](double h) { return d(h); }, cuts[i], cuts[i + 1], 1e-14);
    CHECK(std::abs(mass - 1.0) <= 1e-10);

    const HDensity s = make_h_density(cg, cl);
    std::uniform_real_distribution<double> hs(d.lower() - 1.0, d.upper() + 1.0);
    for (int k = 0; k < 100; ++k) {
      const double h = hs(rng);
      CHECK(d(h) >= 0.0);
      CHECK(d(h) == s(h));
    }

    if (d.c_min() > 0.01) {  // ramp slope 1/|c_l c_g| stays moderate
      for (double b : cuts) {
        const double left = d(b - 1e-9), right = d(b + 1e-9);
        CHECK(std::abs(left - right) <= 1e-6 * std::max({1.0, left, right}));
      }
    }
  }
}
