#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "expord/integrator.hpp"
#include "expord/nicholson.hpp"
#include "support/models.hpp"
#include "support/oracles.hpp"

using namespace expord;
using testmodels::benchmark_scalar;
using testmodels::bigosc_scalar;
using testmodels::scalar_const;
using testmodels::twopatch_ap;

namespace {
bool holds(Verdict v) {
  return v == Verdict::HoldsStrict || v == Verdict::HoldsNonStrict;
}
}  // namespace

TEST_SUITE_BEGIN("nicholson");

TEST_CASE("hypothesis validation") {
  // Zero migration keeps the nonnegativity entry at equality, so the overall
  // verdict is the non-strict hold.
  CHECK(holds(validate_model(benchmark_scalar()).overall));
  CHECK(holds(validate_model(twopatch_ap()).overall));

  // Decay with analytic lower bound -0.2 fails positivity.
  const auto bad = testmodels::scalar(
      Coefficient(QuasiPeriodicCoefficient(0.1, {{0.3, 1.0, 0.0}})),
      Coefficient(2.0), Coefficient(1.0), 0.5);
  const auto rep = validate_model(bad);
  const auto* a2 = rep.find("decay_lower_positive");
  REQUIRE(a2 != nullptr);
  CHECK(a2->verdict == Verdict::Fails);
  CHECK(a2->certified[0] == doctest::Approx(-0.2));
  CHECK(rep.overall == Verdict::Fails);

  // Migration draining exactly the whole decay leaves zero net mortality.
  NicholsonModel two = twopatch_ap();
  two.migration[1][0] = two.decay[0];
  const auto rep2 = validate_model(two);
  const auto* a6 = rep2.find("net_mortality_positive");
  REQUIRE(a6 != nullptr);
  CHECK(a6->verdict == Verdict::Fails);
  CHECK(a6->certified[0] == 0.0);  // exact cancellation
}

TEST_CASE("structural defects throw") {
  NicholsonModel m = benchmark_scalar();
  m.migration[0][0] = Coefficient(0.5);
  CHECK_THROWS_AS(validate_model(m), std::invalid_argument);
  NicholsonModel short_delays = benchmark_scalar();
  short_delays.delays[0] = -1.0;
  CHECK_THROWS_AS(validate_model(short_delays), std::invalid_argument);
}

TEST_CASE("right-hand side values") {
  const auto m = benchmark_scalar();
  const double step = 0.3 / 50.0;
  const auto zero = HistorySegment::constant(Eigen::VectorXd::Zero(1),
                                             m.delays, step);
  CHECK(rhs(m, 0.0, zero)[0] == 0.0);

  const auto eq = HistorySegment::constant(
      Eigen::VectorXd::Constant(1, std::log(2.0)), m.delays, step);
  CHECK(std::abs(rhs(m, 5.0, eq)[0]) < 1e-15);

  const auto no_birth = scalar_const(1.0, 0.0, 1.0, 0.3);
  const auto one = HistorySegment::constant(Eigen::VectorXd::Constant(1, 1.0),
                                            no_birth.delays, step);
  CHECK(rhs(no_birth, 0.0, one)[0] == -1.0);

  CHECK_THROWS_AS(rhs(m, 0.0,
                      HistorySegment::constant(Eigen::VectorXd::Zero(2),
                                               Eigen::ArrayXd::Constant(2, 0.3),
                                               step)),
                  std::invalid_argument);
}

TEST_CASE("offset shifts coefficient time") {
  auto m = testmodels::scalar(
      Coefficient(QuasiPeriodicCoefficient(1.0, {{0.5, 2.0, 0.1}})),
      Coefficient(2.0), Coefficient(1.0), 0.4);
  m.offset = 1.7;
  const auto seg = HistorySegment::constant(Eigen::VectorXd::Constant(1, 1.0),
                                            m.delays, 0.01);
  const double expected = -m.decay[0](2.0 + 1.7) * 1.0 +
                          2.0 * 1.0 * std::exp(-1.0);
  CHECK(rhs(m, 2.0, seg)[0] == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("cone rate formula") {
  CHECK(cone_rate(1.0, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(cone_rate(0.5, 2.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(cone_rate(1.0, std::exp(2.0)) == doctest::Approx(0.0));

  const auto build = cone_from_model(benchmark_scalar());
  CHECK(build.ok);
  CHECK(build.mu[0] ==
        doctest::Approx(std::log(std::exp(2.0) / 0.6) / 0.3).epsilon(1e-15));
  // mu maximises the quasimonotone margin.
  CHECK(std::abs(quasimonotone_margin_slope(build.mu[0], 0.3, 2.0)) <= 1e-12);

  const auto too_big = cone_from_model(scalar_const(1.0, 30.0, 1.0, 1.0));
  CHECK_FALSE(too_big.ok);
  CHECK(too_big.mu[0] < 0.0);
  CHECK_THROWS_AS(too_big.cone(), std::logic_error);
}

TEST_CASE("delay pressure conditions") {
  // 0.6 e^{0.3} = 0.8099 < e: strict holds.
  const auto rep = check_monotone(benchmark_scalar());
  const auto* strict = rep.find("delay_pressure_strict");
  REQUIRE(strict != nullptr);
  CHECK(strict->certified[0] ==
        doctest::Approx(0.6 * std::exp(0.3)).epsilon(1e-15));
  CHECK(strict->verdict == Verdict::HoldsStrict);
  CHECK(rep.overall == Verdict::HoldsStrict);
  // Strict condition implies positive scanned quasimonotone gap.
  const auto* gap = rep.find("quasimonotone_gap_scan");
  REQUIRE(gap != nullptr);
  CHECK(gap->observed[0] > 0.0);

  // Boundary: r beta e^{0} = e exactly: non-strict holds, strict fails.
  const auto edge = check_monotone(scalar_const(0.0, std::numbers::e, 1.0, 1.0));
  CHECK(edge.find("delay_pressure")->verdict == Verdict::HoldsNonStrict);
  CHECK(edge.find("delay_pressure_strict")->verdict == Verdict::Fails);

  // 0.65 e^{1.5} = 2.913 > e: fails.
  const auto fails = check_monotone(scalar_const(3.0, 1.3, 1.0, 0.5));
  CHECK(fails.find("delay_pressure_strict")->verdict == Verdict::Fails);
  CHECK(fails.find("delay_pressure_strict")->certified[0] ==
        doctest::Approx(0.65 * std::exp(1.5)).epsilon(1e-15));

  CHECK(check_monotone(twopatch_ap()).overall == Verdict::HoldsStrict);
}

TEST_CASE("strict pressure implies positive quasimonotone gap on random models") {
  std::mt19937_64 rng(40);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int passing = 0;
  while (passing < 10) {
    const double r = 0.1 + 0.9 * u(rng);
    const double d = 2.0 * u(rng);
    const double beta = 0.2 + 3.0 * u(rng);
    const auto m = scalar_const(d, beta, 1.0, r);
    const auto rep = check_monotone(m);
    if (rep.overall != Verdict::HoldsStrict) continue;
    ++passing;
    CHECK(rep.find("quasimonotone_gap_scan")->observed[0] > 0.0);
  }
}

TEST_CASE("averaged delay pressure") {
  // Constant coefficients reduce to the plain condition exactly.
  const auto m = benchmark_scalar();
  const double plain =
      check_monotone(m).find("delay_pressure_strict")->certified[0];
  const auto relaxed = check_relaxed(m);
  CHECK(relaxed.find("averaged_delay_pressure")->certified[0] ==
        doctest::Approx(plain).epsilon(1e-12));

  // Oscillating decay: plain fails, averaged holds at 0.65 e^{0.5 + 0.2 sin 5}.
  const auto big = bigosc_scalar();
  CHECK(check_monotone(big).overall == Verdict::Fails);
  const auto rep = check_relaxed(big);
  const auto* avg = rep.find("averaged_delay_pressure");
  REQUIRE(avg != nullptr);
  const double expected = 0.65 * std::exp(0.5 + 0.2 * std::abs(std::sin(5.0)));
  CHECK(avg->certified[0] == doctest::Approx(expected).epsilon(1e-9));
  CHECK(std::abs(avg->observed[0] - expected) < 1e-6);
  CHECK(avg->verdict == Verdict::HoldsStrict);

  // A huge birth rate fails no matter the averaging.
  const auto huge = testmodels::scalar(
      Coefficient(QuasiPeriodicCoefficient(1.0, {{2.0, 20.0, 0.0}})),
      Coefficient(20.0), Coefficient(1.0), 0.5);
  CHECK(check_relaxed(huge).overall == Verdict::Fails);
}

TEST_CASE("mean-value transform") {
  // Constant decay: the transform is the identity.
  const auto id = transform_mean(benchmark_scalar());
  CHECK(id.primitives[0].is_constant());
  CHECK(id.mean_decay[0] == 1.0);
  for (double t = 0.0; t < 3.0; t += 0.31) {
    CHECK(id.transformed.birth[0](t) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(id.transformed.saturation[0](t) == doctest::Approx(1.0).epsilon(1e-14));
  }

  const auto big = bigosc_scalar();
  const auto tr = transform_mean(big);
  // h = 0.1 sin(20 t), transformed decay is the mean.
  for (double t = -2.0; t < 2.0; t += 0.17) {
    CHECK(tr.primitives[0](t) ==
          doctest::Approx(0.1 * std::sin(20.0 * t)).epsilon(1e-12));
    CHECK(tr.transformed.decay[0](t) == 1.0);
    const double beta_expected =
        1.3 * std::exp(0.1 * std::sin(20.0 * t) -
                       0.1 * std::sin(20.0 * (t - 0.5)));
    CHECK(tr.transformed.birth[0](t) ==
          doctest::Approx(beta_expected).epsilon(1e-12));
    const double c_expected = std::exp(-0.1 * std::sin(20.0 * (t - 0.5)));
    CHECK(tr.transformed.saturation[0](t) ==
          doctest::Approx(c_expected).epsilon(1e-12));
  }
  // Gauge factor e^{-h} stays within its reported positive bounds.
  CHECK(tr.gauge_lower[0] == doctest::Approx(std::exp(-0.1)).epsilon(1e-12));
  CHECK(tr.gauge_upper[0] == doctest::Approx(std::exp(0.1)).epsilon(1e-12));

  // Transformed strict condition agrees with the averaged condition of the
  // original model.
  const auto strict_tr = check_monotone(tr.transformed);
  const auto* entry = strict_tr.find("delay_pressure_strict");
  REQUIRE(entry != nullptr);
  CHECK(entry->verdict == Verdict::HoldsStrict);
  const double relaxed_value =
      check_relaxed(big).find("averaged_delay_pressure")->certified[0];
  CHECK(entry->certified[0] == doctest::Approx(relaxed_value).epsilon(1e-12));
  // The transformed model satisfies the decay positivity hypothesis.
  CHECK(validate_model(tr.transformed)
            .find("decay_lower_positive")
            ->verdict == Verdict::HoldsStrict);
}

TEST_CASE("transform round trip along trajectories") {
  const auto big = bigosc_scalar();
  const auto tr = transform_mean(big);
  const double step = 0.002;
  const auto phi = HistorySegment::constant(
      Eigen::VectorXd::Constant(1, 0.4), big.delays, step);
  // Transformed start: z(s) = e^{h(s)} y(s).
  const auto& h = tr.primitives[0];
  const auto z0 = HistorySegment::sample(
      {[&](double s) { return std::exp(h(s)) * 0.4; }},
      {[&](double s) {
        return 2.0 * std::cos(20.0 * s) * std::exp(h(s)) * 0.4;
      }},
      big.delays, step);
  const double T = 10.0;
  const auto y = integrate(big, phi, T, step);
  const auto z = integrate(tr.transformed, z0, T, step);
  double worst = 0.0;
  for (double t = 0.0; t <= T; t += 0.05) {
    worst = std::max(worst, std::abs(z.value(t, 0) -
                                     std::exp(h(t)) * y.value(t, 0)));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("super-solution radius") {
  const auto r1 = superequilibrium_radius(benchmark_scalar());
  CHECK(r1.radius == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  // Independent root: beta e^{-R} = d.
  const double root = oracle::bisect_root(
      [](double R) { return 2.0 * std::exp(-R) - 1.0; }, 0.0, 10.0);
  CHECK(r1.radius == doctest::Approx(root).epsilon(1e-9));

  CHECK(superequilibrium_radius(scalar_const(1.0, 0.9, 1.0, 0.3)).radius ==
        0.0);
  CHECK(superequilibrium_radius(
            scalar_const(1.0, 2.0 * std::numbers::e, 1.0, 0.3))
            .radius == doctest::Approx(1.0 + std::log(2.0)).epsilon(1e-9));

  // Migration outflow larger than the decay: no radius below the cap.
  auto leaky = twopatch_ap();
  leaky.migration[0][1] = Coefficient(1.5);
  CHECK_THROWS_AS(superequilibrium_radius(leaky), std::runtime_error);
}

TEST_CASE("special-solution conditions") {
  const auto m = scalar_const(1.0, 1.0, 1.0, 0.1);
  const auto rep = special_solution_conditions(m);
  const auto* classic = rep.find("lipschitz_delay_product");
  REQUIRE(classic != nullptr);
  CHECK(classic->certified[0] ==
        doctest::Approx(0.2 * std::numbers::e).epsilon(1e-15));
  CHECK(classic->verdict == Verdict::HoldsStrict);
  const auto* expo = rep.find("exponential_small_delay");
  REQUIRE(expo != nullptr);
  CHECK(expo->certified[0] == doctest::Approx(0.1 * std::exp(0.1)).epsilon(1e-15));
  CHECK(expo->verdict == Verdict::HoldsStrict);

  // Constant decay: averaged forms coincide with the plain ones.
  CHECK(rep.find("lipschitz_delay_product_averaged")->certified[0] ==
        doctest::Approx(classic->certified[0]).epsilon(1e-12));
  CHECK(rep.find("exponential_small_delay_averaged")->certified[0] ==
        doctest::Approx(expo->certified[0]).epsilon(1e-12));

  // Oscillating decay: the averaged product improves on the classic one.
  const auto osc = testmodels::scalar(
      Coefficient(QuasiPeriodicCoefficient(1.0, {{2.0, 20.0, 0.0}})),
      Coefficient(1.0), Coefficient(1.0), 0.1);
  const auto orep = special_solution_conditions(osc);
  CHECK(orep.find("lipschitz_delay_product_averaged")->certified[0] <=
        orep.find("lipschitz_delay_product")->certified[0]);
  CHECK(orep.find("exponential_small_delay_averaged")->certified[0] <=
        orep.find("exponential_small_delay")->certified[0]);

  CHECK_THROWS_AS(special_solution_conditions(twopatch_ap()),
                  std::invalid_argument);
}

TEST_SUITE_END();
