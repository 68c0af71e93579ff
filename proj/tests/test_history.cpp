#include <doctest.h>

#include <cmath>
#include <sstream>

#include "expord/history.hpp"

using expord::HistorySegment;
using expord::axpy;
using expord::scale;

namespace {

Eigen::ArrayXd delays1(double r) {
  Eigen::ArrayXd d(1);
  d << r;
  return d;
}

HistorySegment from_fn(const std::function<double(double)>& f, double r,
                       double step) {
  return HistorySegment::sample({f}, delays1(r), step);
}

}  // namespace

TEST_SUITE_BEGIN("fnspace");

TEST_CASE("constant history has the expected grid and values") {
  std::vector<Eigen::ArrayXd> values{Eigen::ArrayXd::Constant(11, 1.0)};
  const auto seg = HistorySegment::make(values, delays1(1.0), 0.1);
  CHECK(seg.dim() == 1);
  CHECK(seg.points(0) == 11);
  for (int k = 0; k < 11; ++k) CHECK(seg.values(0)[k] == 1.0);
  CHECK(seg.eval(-0.37, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(seg.grid_point(0, 0) == -1.0);
  CHECK(seg.grid_point(0, 10) == 0.0);
}

TEST_CASE("finite-difference derivatives are second order") {
  auto f = [](double s) { return std::exp(-s); };
  double prev_err = 0.0;
  for (const double step : {0.1, 0.05, 0.025}) {
    const auto seg = from_fn(f, 1.0, step);
    double err = 0.0;
    for (int k = 0; k < seg.points(0); ++k) {
      const double s = seg.grid_point(0, k);
      err = std::max(err, std::abs(seg.derivs(0)[k] - (-std::exp(-s))));
    }
    CHECK(err <= std::exp(1.0) * step * step);
    if (prev_err > 0.0) CHECK(prev_err / err >= 3.0);
    prev_err = err;
  }
}

TEST_CASE("degenerate inputs are rejected") {
  CHECK_THROWS_AS(HistorySegment::make({}, Eigen::ArrayXd(), 0.1),
                  std::invalid_argument);
  std::vector<Eigen::ArrayXd> empty{Eigen::ArrayXd()};
  CHECK_THROWS_AS(HistorySegment::make(empty, delays1(1.0), 0.1),
                  std::invalid_argument);
  std::vector<Eigen::ArrayXd> ok{Eigen::ArrayXd::Constant(11, 1.0)};
  CHECK_THROWS_AS(HistorySegment::make(ok, delays1(1.0), -0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(HistorySegment::make(ok, delays1(1.0), 0.07),
                  std::invalid_argument);
}

TEST_CASE("interpolation reproduces nodes exactly and references between") {
  auto f = [](double s) { return std::sin(s); };
  auto df = [](double s) { return std::cos(s); };
  const auto lin = from_fn([](double s) { return s; }, 1.0, 0.1);
  CHECK(lin.eval(-0.5, 0) == doctest::Approx(-0.5).epsilon(1e-14));

  const auto hermite =
      HistorySegment::sample({f}, {df}, delays1(1.0), 0.05);
  // Hermite error bound h^4 |f''''| / 384 ~ 1.6e-8 at this step.
  CHECK(std::abs(hermite.eval(-0.42, 0) - std::sin(-0.42)) < 2e-8);
  for (int k = 0; k < hermite.points(0); ++k) {
    CHECK(hermite.eval(hermite.grid_point(0, k), 0) == hermite.values(0)[k]);
  }
  // With finite-difference derivatives the accuracy drops but stays sub-1e-6.
  const auto fd = from_fn(f, 1.0, 0.05);
  CHECK(std::abs(fd.eval(-0.42, 0) - std::sin(-0.42)) < 1e-6);

  CHECK_THROWS_AS(hermite.eval(-1.5, 0), std::out_of_range);
  CHECK_THROWS_AS(hermite.eval(0.5, 0), std::out_of_range);
}

TEST_CASE("interpolation error shrinks like step^2 (linear) and step^4 (Hermite)") {
  auto f = [](double s) { return std::sin(3.0 * s); };
  auto df = [](double s) { return 3.0 * std::cos(3.0 * s); };
  auto max_err = [&](const HistorySegment& seg) {
    double err = 0.0;
    for (double s = -1.0; s <= 0.0; s += 0.0017) {
      err = std::max(err, std::abs(seg.eval(s, 0) - f(s)));
    }
    return err;
  };
  double lin_prev = 0.0, her_prev = 0.0;
  for (const double step : {0.1, 0.05, 0.025}) {
    std::vector<Eigen::ArrayXd> vals(1);
    const int n = static_cast<int>(std::lround(1.0 / step)) + 1;
    vals[0].resize(n);
    for (int k = 0; k < n; ++k) {
      vals[0][k] = f(-1.0 + k * step);
    }
    const auto lin = HistorySegment::make(vals, delays1(1.0), step,
                                          HistorySegment::DerivFill::None);
    const auto her = HistorySegment::sample({f}, {df}, delays1(1.0), step);
    const double le = max_err(lin);
    const double he = max_err(her);
    if (lin_prev > 0.0) CHECK(lin_prev / le >= 3.5);
    if (her_prev > 0.0) CHECK(her_prev / he >= 14.0);
    lin_prev = le;
    her_prev = he;
  }
}

TEST_CASE("norms") {
  const auto c2 = HistorySegment::constant(Eigen::VectorXd::Constant(1, 2.0),
                                           delays1(1.0), 0.1);
  CHECK(c2.sup_norm() == 2.0);
  CHECK(c2.lipschitz_norm() == 2.0);

  const auto id = HistorySegment::sample({[](double s) { return s; }},
                                         {[](double) { return 1.0; }},
                                         delays1(1.0), 0.1);
  CHECK(id.lipschitz_norm() == doctest::Approx(2.0).epsilon(1e-15));

  std::vector<Eigen::ArrayXd> vals{Eigen::ArrayXd::Constant(11, 1.0)};
  const auto bare = HistorySegment::make(vals, delays1(1.0), 0.1,
                                         HistorySegment::DerivFill::None);
  CHECK_THROWS_AS(bare.lipschitz_norm(), std::logic_error);
}

TEST_CASE("axpy and scaling") {
  const auto c1 = HistorySegment::constant(Eigen::VectorXd::Constant(1, 1.0),
                                           delays1(1.0), 0.1);
  const auto c2 = HistorySegment::constant(Eigen::VectorXd::Constant(1, 2.0),
                                           delays1(1.0), 0.1);
  CHECK(axpy(0.0, c2, c1).values(0)[0] == 1.0);       // alpha = 0 gives y
  CHECK(axpy(0.5, c2, c1).values(0)[3] == 2.0);       // 0.5*2 + 1
  CHECK(scale(1.0, c2).values(0)[7] == 2.0);          // identity

  const auto fine = HistorySegment::constant(Eigen::VectorXd::Constant(1, 1.0),
                                             delays1(1.0), 0.05);
  CHECK_THROWS_AS(axpy(1.0, c1, fine), std::invalid_argument);

  // |alpha| homogeneity of the sup norm, exactly.
  const auto wavy = from_fn([](double s) { return std::sin(5 * s) + 0.3; }, 1.0, 0.02);
  for (const double a : {-2.5, -1.0, 0.25, 3.0}) {
    CHECK(scale(a, wavy).sup_norm() == std::abs(a) * wavy.sup_norm());
  }
}

TEST_CASE("csv dump shape") {
  const auto c1 = HistorySegment::constant(Eigen::VectorXd::Constant(2, 1.0),
                                           Eigen::ArrayXd::Constant(2, 0.5),
                                           0.25);
  std::ostringstream os;
  write_csv(c1, os);
  const std::string text = os.str();
  CHECK(text.rfind("component,s,value,deriv\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 2 * 3);
}

TEST_SUITE_END();
