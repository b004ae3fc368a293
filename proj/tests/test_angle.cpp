#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "psoconv/angle.hpp"
#include "psoconv/error.hpp"
#include "psoconv/montecarlo.hpp"

using namespace psoconv;

namespace {

const SwarmParams kStandard{0.72984, 1.496172, 1.496172};

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected psoconv::Error");
  return ErrorKind::InvalidKnots;
}

}  // namespace

TEST_CASE("f_plus") {
  for (double chi : {-0.7, 0.0, 0.5, 1.0}) CHECK(f_plus(0, 0, chi) == 0.0);
  CHECK(f_plus(1, 1, 0.5) == doctest::Approx(-1.0));
  CHECK(f_plus(2, 0.5, 0.0) == doctest::Approx(-1.0));
  CHECK(kind_of([] { f_plus(1, 1.5, 0.5); }) == ErrorKind::SingularMap);
}

TEST_CASE("f_minus") {
  CHECK(std::abs(f_minus(f_plus(0.3, 0.7, 0.9), 0.7, 0.9) - 0.3) < 1e-12);
  CHECK(f_minus(0, 1, 1) == doctest::Approx(1.0));
  CHECK(kind_of([] { f_minus(1, 0.5, 0.5); }) == ErrorKind::SingularInverse);
  CHECK(kind_of([] { f_minus(0.2, 0.5, 0.0); }) == ErrorKind::SingularInverse);
}

TEST_CASE("f_minus inverts f_plus") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> um(-5.0, 5.0), uh(-1.0, 5.0), uc(0.05, 1.0);
  int done = 0;
  while (done < 1000) {
    const double m = um(rng), h = uh(rng);
    const double chi = (rng() & 1 ? 1.0 : -1.0) * uc(rng);
    if (std::abs(1.0 + chi * m - h) < 0.05) continue;
    const double back = f_minus(f_plus(m, h, chi), h, chi);
    CHECK(std::abs(back - m) <= 1e-10 * std::max(1.0, std::abs(m)));
    ++done;
  }
}

TEST_CASE("propagation_case") {
  const PropagationCase a = propagation_case(0, 0.5, 0);
  CHECK(a.case_tag == CaseTag::ChiZeroLeq);
  CHECK(propagation_case(-2, 0.5, 0).case_tag == CaseTag::ChiZeroGt);

  const PropagationCase b = propagation_case(1, 1, 1);
  CHECK(b.case_tag == CaseTag::MEqOneChiPos);
  CHECK(b.gamma1 == 0.0);
  CHECK(propagation_case(1, 1, -1).case_tag == CaseTag::MEqOneChiNeg);

  const PropagationCase c = propagation_case(0, 1, 1);
  CHECK(c.case_tag == CaseTag::MLtOne);
  CHECK(c.gamma_min == 0.0);
  CHECK(c.gamma_max == doctest::Approx(std::numbers::pi / 4));
  CHECK(propagation_case(3, 1, 1).case_tag == CaseTag::MGtOne);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const PropagationCase p = propagation_case(u(rng), u(rng), u(rng));
    CHECK(p.gamma_min == std::min(p.gamma1, p.gamma2));
    CHECK(p.gamma_max == std::max(p.gamma1, p.gamma2));
    CHECK(std::abs(p.gamma1) < kHalfPi);
    CHECK(std::abs(p.gamma2) < kHalfPi);
  }
}

TEST_CASE("prob_step_leq") {
  const AngleCdf uniform = AngleCdf::uniform(64);
  CHECK(prob_step_leq(uniform, 0, 0.5, 0) == 1.0);
  CHECK(prob_step_leq(uniform, 1, 1, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(prob_step_leq(uniform, 0, 1, 1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(prob_step_leq(uniform, INFINITY, 1, 1) == 1.0);
  CHECK(prob_step_leq(uniform, -INFINITY, 1, 1) == 0.0);
}

TEST_CASE("prob_step_leq against sampling") {
  // Pr[f+(tan(alpha), h) <= m] with tan(alpha) drawn from the Gaussian behind F.
  const AngleCdf F = oracle::squashed_gaussian(128, 0.7);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(0.0, 0.7);
  const int n = 400000;
  for (auto [m, h, chi] : {std::tuple{0.3, 0.8, 0.6}, {2.0, 1.5, -0.5}, {1.0, 0.2, 0.9}, {-4.0, 2.5, 0.3}}) {
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += f_plus(z(rng), h, chi) <= m;
    const double p = static_cast<double>(hits) / n;
    const double sigma = std::sqrt(std::max(p * (1 - p), 1e-6) / n);
    // Spline interpolation of F adds a little on top of the sampling noise.
    CHECK(std::abs(prob_step_leq(F, m, h, chi) - p) <= 4.0 * sigma + 2e-4);
  }
}

TEST_CASE("prob_step_leq is a CDF in m") {
  const AngleCdf F = oracle::tilted_uniform(64, 0.6);
  REQUIRE(F.is_monotone(0.0));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> uh(-1.0, 3.0), uchi(-1.0, 1.0), um(-50.0, 50.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double h = uh(rng);
    double chi = uchi(rng);
    if (chi == 0.0) chi = 0.5;
    std::vector<double> ms(200);
    for (double& m : ms) m = um(rng);
    ms.push_back(1.0);
    std::sort(ms.begin(), ms.end());
    double prev = 0.0;
    for (double m : ms) {
      const double p = prob_step_leq(F, m, h, chi);
      CHECK(p >= prev - 1e-9);
      prev = p;
    }
  }
}

TEST_CASE("AngleCdf") {
  const AngleCdf u = AngleCdf::uniform(16);
  CHECK(u(-kHalfPi) == 0.0);
  CHECK(u(kHalfPi) == 1.0);
  CHECK(u(0.0) == doctest::Approx(0.5));
  CHECK(u(10.0) == 1.0);  // clamped into the domain
  CHECK(u.is_monotone());

  auto k = KnotVector::equidistant(-kHalfPi, kHalfPi, 5);
  const AngleCdf c = AngleCdf::from_values(k, {0.2, -0.1, 0.5, 1.3, 0.9});
  CHECK(c.spline().values()[0] == 0.0);
  CHECK(c.spline().values()[1] == 0.0);
  CHECK(c.spline().values()[3] == 1.0);
  CHECK(c.spline().values()[4] == 1.0);

  CHECK(kind_of([] {
          AngleCdf(CubicSpline(KnotVector::equidistant(0, 1, 4), {0, 0.3, 0.6, 1}, BoundaryKind::Natural));
        }) == ErrorKind::DomainMismatch);
  CHECK_FALSE(AngleCdf::from_values(k, {0, 0.8, 0.2, 0.9, 1}).is_monotone());
}

TEST_CASE("FixedPointConfig validation") {
  FixedPointConfig c;
  CHECK_NOTHROW(c.validate());
  c.blend_factor = 1.0;
  CHECK_THROWS(c.validate());
  c = {};
  c.l2_tolerance = 0.0;
  CHECK_THROWS(c.validate());
  c = {};
  c.max_knots = 32;
  CHECK_THROWS(c.validate());
  c = {};
  c.initial_knots = 3;
  CHECK_THROWS(c.validate());
}

TEST_CASE("propagate_cdf contracts") {
  const HDensity d = make_h_density(kStandard.c_l, kStandard.c_g);
  const AngleCdf next = propagate_cdf(AngleCdf::uniform(64), d, kStandard.chi, FixedPointConfig{});
  CHECK(next(-kHalfPi) == 0.0);
  CHECK(next(kHalfPi) == 1.0);
  CHECK(next.is_monotone());

  // Swapping the coefficients leaves H, and so the step, unchanged.
  const HDensity ds = make_h_density(2.04355, 0.94879);
  const HDensity dt = make_h_density(0.94879, 2.04355);
  const AngleCdf F = oracle::squashed_gaussian(64);
  const AngleCdf a = propagate_cdf(F, ds, 0.72984, FixedPointConfig{});
  const AngleCdf b = propagate_cdf(F, dt, 0.72984, FixedPointConfig{});
  for (std::size_t i = 0; i < a.knots().size(); ++i)
    CHECK(a.spline().values()[i] == b.spline().values()[i]);
}

TEST_CASE("propagate_cdf against adaptive quadrature of prob_step_leq") {
  for (auto [chi, cl, cg] : {std::tuple{0.72984, 1.496172, 1.496172}, {-0.7, 0.5, 0.5}, {0.9, -0.3, 2.2}}) {
    const HDensity d = make_h_density(cl, cg);
    const AngleCdf F = oracle::squashed_gaussian(64, 1.3);
    FixedPointConfig cfg;
    cfg.h_knots = 2048;
    const AngleCdf next = propagate_cdf(F, d, chi, cfg);
    const auto cuts = breakpoints(d);
    for (std::size_t i = 1; i + 1 < F.knots().size(); i += 7) {
      const double m = std::tan(F.knots()[i]);
      double want = 0.0;
      for (std::size_t p = 0; p + 1 < cuts.size(); ++p)
        want += oracle::integrate([&](double h) { return prob_step_leq(F, m, h, chi) * d(h); },
                                  cuts[p], cuts[p + 1], 1e-11);
      CHECK(std::abs(next.spline().values()[i] - want) <= 2e-6);
    }
  }
}

TEST_CASE("propagate_cdf with chi = 0 against sampling") {
  // With chi = 0 the successor is atan(1 - 1/(1 - H)) whatever the old angle, so a
  // steep CDF around 0 (almost a point mass) gives the law of that expression.
  auto k = KnotVector::equidistant(-kHalfPi, kHalfPi, 129);
  std::vector<double> v(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) v[i] = 0.5 * std::erfc(-k[i] / 1e-3);
  const AngleCdf F = AngleCdf::from_values(k, v);
  const HDensity d = make_h_density(1.2, 0.7);
  const AngleCdf next = propagate_cdf(F, d, 0.0, FixedPointConfig{});

  StepRng rng(99);
  const int n = 1'000'000;
  std::vector<double> sample(n);
  for (double& s : sample) {
    const double h = 1.2 * rng.uniform() + 0.7 * rng.uniform();
    s = std::atan(1.0 - 1.0 / (1.0 - h));
  }
  std::sort(sample.begin(), sample.end());
  for (double q : {0.25, 0.5, 0.75}) {
    // Knot closest to the empirical quantile.
    const double at = sample[static_cast<std::size_t>(q * n)];
    const std::size_t i = k.interval_of(at);
    const double beta = k[i];
    const double emp =
        static_cast<double>(std::upper_bound(sample.begin(), sample.end(), beta) - sample.begin()) / n;
    const double sigma = std::sqrt(emp * (1 - emp) / n);
    CHECK(std::abs(next.spline().values()[i] - emp) <= 3.0 * sigma);
  }
}

TEST_CASE("stationary_cdf") {
  FixedPointConfig cfg;
  const StationaryResult r = stationary_cdf(kStandard, cfg);
  CHECK(r.iterations < 1000);
  CHECK(r.cdf.knots().size() == cfg.max_knots);
  for (double res : r.residuals) CHECK(std::isfinite(res));
  CHECK(r.residuals.back() <= 1e-7);
  CHECK(r.cdf.is_monotone());
  CHECK(r.cdf(-kHalfPi) == 0.0);
  CHECK(r.cdf(kHalfPi) == 1.0);

  SUBCASE("fixed point residual") {
    const HDensity d = make_h_density(kStandard.c_l, kStandard.c_g);
    const AngleCdf once = propagate_cdf(r.cdf, d, kStandard.chi, cfg);
    CHECK(l2_distance(r.cdf.spline(), once.spline()) <= 2e-7);
  }
  SUBCASE("limit does not depend on the start") {
    const StationaryResult g = stationary_cdf(kStandard, cfg, oracle::squashed_gaussian(64));
    CHECK(l2_distance(r.cdf.spline(), g.cdf.spline()) <= 1e-5);
  }
}

TEST_CASE("stationary_cdf out of budget") {
  FixedPointConfig cfg;
  cfg.max_iterations = 3;
  try {
    stationary_cdf(kStandard, cfg);
    FAIL("expected NoConvergence");
  } catch (const NoConvergence& e) {
    CHECK(e.kind() == ErrorKind::NoConvergence);
    CHECK(e.iterations() == 3);
    CHECK(std::isfinite(e.last_residual()));
    CHECK(e.last_residual() > 1e-7);
  }
  CHECK_THROWS_AS(stationary_cdf(SwarmParams{0.5, 0, 0}, FixedPointConfig{}), Error);
}
