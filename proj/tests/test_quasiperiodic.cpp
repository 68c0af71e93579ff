#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "expord/quasiperiodic.hpp"
#include "support/oracles.hpp"

using expord::Harmonic;
using expord::QuasiPeriodicCoefficient;
using expord::ScanWindow;
using expord::default_scan_window;
using expord::window_inf;
using expord::window_sup;

namespace {

QuasiPeriodicCoefficient bigosc() {
  return QuasiPeriodicCoefficient(1.0, {{2.0, 20.0, 0.0}});
}

}  // namespace

TEST_SUITE_BEGIN("coeffs");

TEST_CASE("evaluation") {
  CHECK(QuasiPeriodicCoefficient(1.5, {{0.3, 1.0, 0.0}})(0.0) ==
        doctest::Approx(1.8).epsilon(1e-15));
  CHECK(QuasiPeriodicCoefficient(2.0)(123.4) == 2.0);
  CHECK(bigosc()(std::numbers::pi / 20.0) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(QuasiPeriodicCoefficient(1.0, {{1.0, -2.0, 0.0}}),
                  std::invalid_argument);
}

TEST_CASE("mean values and cached bounds") {
  CHECK(QuasiPeriodicCoefficient(1.5, {{0.3, 1.0, 0.0}}).mean_value() == 1.5);
  CHECK(QuasiPeriodicCoefficient(2.0).mean_value() == 2.0);
  CHECK(bigosc().mean_value() == 1.0);
  CHECK(bigosc().lower_bound() == -1.0);
  CHECK(bigosc().upper_bound() == 3.0);

  // Long-run average agrees with the constant term within O(1/T).
  const auto c = QuasiPeriodicCoefficient(0.7, {{0.5, 1.0, 0.4}, {0.2, std::numbers::sqrt2, 0.0}});
  const double T = 1e4;
  const double avg = oracle::integrate([&](double t) { return c(t); }, 0.0, T,
                                       1e-9) / T;
  double drift = 0.0;
  for (const auto& h : c.harmonics()) drift += 2.0 * std::abs(h.amp) / h.freq;
  CHECK(std::abs(avg - c.mean_value()) <= drift / T + 1e-9);
}

TEST_CASE("moving integrals in closed form") {
  CHECK(QuasiPeriodicCoefficient(1.0).moving_integral(17.0, 0.5) ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(QuasiPeriodicCoefficient(0.0, {{1.0, 1.0, 0.0}})
            .moving_integral(std::numbers::pi, std::numbers::pi) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // Range of the moving integral of 1 + 2 cos(20 t) over half-unit windows.
  const auto mi = bigosc().moving_integral_coefficient(0.5);
  const double amp = 0.2 * std::abs(std::sin(5.0));
  CHECK(mi.constant_term() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mi.upper_bound() == doctest::Approx(0.5 + amp).epsilon(1e-13));
  CHECK(mi.lower_bound() == doctest::Approx(0.5 - amp).epsilon(1e-13));
  CHECK(mi.upper_bound() < 0.7);
  CHECK(mi.lower_bound() > 0.3);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ut(-20.0, 20.0), ur(0.05, 3.0);
  const auto c = QuasiPeriodicCoefficient(
      0.9, {{0.7, 1.0, 0.2}, {0.4, std::numbers::sqrt2, 1.3}});
  for (int trial = 0; trial < 20; ++trial) {
    const double t = ut(rng), r = ur(rng);
    const double quad =
        oracle::integrate([&](double s) { return c(s); }, t - r, t, 1e-13);
    CHECK(c.moving_integral(t, r) == doctest::Approx(quad).epsilon(1e-10));
    CHECK(c.moving_integral_coefficient(r)(t) ==
          doctest::Approx(quad).epsilon(1e-10));
  }
  CHECK_THROWS_AS(c.moving_integral(0.0, -1.0), std::invalid_argument);
}

TEST_CASE("bounded primitive") {
  const auto flat = QuasiPeriodicCoefficient(2.0).bounded_primitive();
  CHECK(flat.is_constant());
  CHECK(flat.constant_term() == 0.0);

  const auto h = bigosc().bounded_primitive();
  for (double t = -3.0; t <= 3.0; t += 0.37) {
    CHECK(h(t) == doctest::Approx(0.1 * std::sin(20.0 * t)).epsilon(1e-12));
  }

  // Fundamental theorem against quadrature, and the amplitude bound.
  const auto c = QuasiPeriodicCoefficient(
      1.4, {{0.6, 2.0, 0.0}, {0.3, std::numbers::e, 0.8}});
  const auto hc = c.bounded_primitive();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ut(-30.0, 30.0);
  for (int trial = 0; trial < 15; ++trial) {
    const double t1 = ut(rng), t2 = ut(rng);
    const double quad = oracle::integrate(
        [&](double s) { return c(s) - c.mean_value(); }, t1, t2, 1e-13);
    CHECK(hc(t2) - hc(t1) == doctest::Approx(quad).epsilon(1e-11));
  }
  double bound = 0.0;
  for (const auto& harm : c.harmonics()) bound += std::abs(harm.amp) / harm.freq;
  for (double t = 0.0; t < 50.0; t += 0.01) {
    CHECK(std::abs(hc(t)) <= bound + 1e-12);
  }
}

TEST_CASE("coefficient algebra merges colliding harmonics exactly") {
  const auto a = QuasiPeriodicCoefficient(1.0, {{0.5, 2.0, 0.3}});
  const auto b = QuasiPeriodicCoefficient(0.2, {{0.5, 2.0, 0.3}, {0.1, 3.0, 0.0}});
  const auto diff = a - b;
  CHECK(diff.constant_term() == doctest::Approx(0.8));
  CHECK(diff.harmonics().size() == 1);  // the 2.0-frequency terms cancel
  CHECK(diff.harmonics()[0].freq == 3.0);
  const auto zero = a - a;
  CHECK(zero.is_constant());
  CHECK(zero.constant_term() == 0.0);
  for (double t = -5.0; t < 5.0; t += 0.61) {
    CHECK((a + b)(t) == doctest::Approx(a(t) + b(t)).epsilon(1e-13));
  }
}

TEST_CASE("window supremum") {
  const auto c2 = window_sup([](double) { return 2.0; }, {1.0, 0.5});
  CHECK(c2.value == 2.0);
  CHECK(c2.argmax == 0.0);

  const auto osc = window_sup([](double t) { return 1.0 + 2.0 * std::cos(20.0 * t); },
                              {10.0, 1e-3});
  CHECK(std::abs(osc.value - 3.0) < 1e-6);

  // Product with the exponential of the moving integral; the maximum is
  // 1.3 exp(0.5 + 0.2 |sin 5|), from the closed form of the integral.
  const auto d = bigosc();
  auto expr = [&d](double t) {
    return 1.3 * std::exp(d.moving_integral(t, 0.5));
  };
  const double expected = 1.3 * std::exp(0.5 + 0.2 * std::abs(std::sin(5.0)));
  const auto got = window_sup(expr, default_scan_window(d.frequencies()));
  CHECK(std::abs(got.value - expected) < 1e-6);

  // Never exceeds the cached analytic bound of a raw coefficient.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const QuasiPeriodicCoefficient c(
        u(rng), {{u(rng), u(rng), u(rng)}, {u(rng), 3.0 * u(rng), 0.0}});
    const auto ws = window_sup([&](double t) { return c(t); },
                               default_scan_window(c.frequencies()));
    CHECK(ws.value <= c.upper_bound() + 1e-12);
    const auto wi = window_inf([&](double t) { return c(t); },
                               default_scan_window(c.frequencies()));
    CHECK(wi.value >= c.lower_bound() - 1e-12);
  }
}

TEST_CASE("default scan windows") {
  const auto w = default_scan_window({1.0, 20.0});
  CHECK(w.t_scan == doctest::Approx(50.0 * 2.0 * std::numbers::pi));
  CHECK(w.step == doctest::Approx(2.0 * std::numbers::pi / 20.0 / 50.0));
  const auto capped = default_scan_window({1e-3});
  CHECK(capped.t_scan == 1e4);
}

TEST_SUITE_END();
