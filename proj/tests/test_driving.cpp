#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "loewner/driving.hpp"
#include "oracles.hpp"

using namespace loewner;

TEST_CASE("driver families evaluate per definition") {
  const Driver sq = make_driver(DriverFamily::sqrt_forward, 1.0, 1.0);
  CHECK(sq.eval(0.25) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(sq.eval(0.0) == 0.0);

  const Driver c = make_driver(DriverFamily::constant, 0.0, 1.0);
  CHECK(c.eval(0.3) == 0.0);
  CHECK(c.eval(1.0) == 0.0);

  const Driver back = make_driver(DriverFamily::sqrt_backward, 2.0, 1.0);
  CHECK(back.eval(0.0) == doctest::Approx(0.0));
  CHECK(back.eval(1.0) == doctest::Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("driver construction errors") {
  CHECK_THROWS_AS(make_driver(DriverFamily::sqrt_forward, -1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_driver(DriverFamily::piecewise_linear, 0.0, 1.0, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_driver(DriverFamily::piecewise_linear, 0.0, 1.0,
                              {{0.0, 0.0}, {0.5, 1.0}, {0.5, 2.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_driver(DriverFamily::piecewise_linear, 0.0, 1.0,
                              {{0.1, 0.0}, {1.0, 1.0}}),
                  std::invalid_argument);
  const Driver d = make_driver(DriverFamily::sqrt_forward, 1.0, 1.0);
  CHECK_THROWS_AS(d.eval(1.5), std::domain_error);
  CHECK_THROWS_AS(d.eval(-0.5), std::domain_error);
}

TEST_CASE("lip_seminorm on the reference families") {
  const Driver c = make_driver(DriverFamily::constant, 0.0, 1.0);
  CHECK(lip_seminorm(c, 64) == 0.0);

  const Driver sq = make_driver(DriverFamily::sqrt_forward, 1.0, 1.0);
  CHECK(lip_seminorm(sq, 256) == doctest::Approx(1.0).epsilon(1e-12));

  // linear driver lambda(t) = t: sup attained at the (0, 1) pair
  const Driver lin = make_driver(DriverFamily::piecewise_linear, 0.0, 1.0,
                                 {{0.0, 0.0}, {1.0, 1.0}});
  std::vector<double> ts, vs;
  for (int i = 0; i < 257; ++i) {
    ts.push_back(i / 256.0);
    vs.push_back(lin.eval(ts.back()));
  }
  const double brute = oracles::brute_seminorm(ts, vs);
  CHECK(brute == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lip_seminorm(lin, 257) == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("grid seminorm is monotone under grid refinement") {
  const Driver back = make_driver(DriverFamily::sqrt_backward, 1.7, 1.0);
  double prev = 0;
  for (int n : {33, 65, 129, 257}) {
    const double cur = lip_seminorm(back, n);
    CHECK(cur >= prev - 1e-15);
    prev = cur;
  }
}

TEST_CASE("measured seminorm never exceeds the nominal one") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<DriverSample> knots{{0.0, 0.0}};
    const int n = 8 + static_cast<int>(rng() % 32);
    double v = 0;
    for (int k = 1; k <= n; ++k) {
      v += ((rng() >> 62) & 1 ? 1.0 : -1.0) * std::sqrt(1.0 / n) *
           (0.2 + (rng() % 1000) / 1000.0);
      knots.push_back({static_cast<double>(k) / n, v});
    }
    const Driver d = make_driver(DriverFamily::piecewise_linear, 0.0, 1.0, knots);
    for (int g : {32, 257, 1000})
      CHECK(lip_seminorm(d, g) <= d.nominal_seminorm() * (1.0 + 1e-9));
  }
  for (double sigma : {0.3, 1.0, 3.9}) {
    const Driver sq = make_driver(DriverFamily::sqrt_forward, sigma, 2.0);
    CHECK(lip_seminorm(sq, 512) <= sq.nominal_seminorm() * (1.0 + 1e-9));
    const Driver back = make_driver(DriverFamily::sqrt_backward, sigma, 0.5);
    CHECK(lip_seminorm(back, 512) <= back.nominal_seminorm() * (1.0 + 1e-9));
  }
}

TEST_CASE("exact piecewise-linear seminorm dominates every grid estimate") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<DriverSample> knots{{0.0, 0.0}};
    const int n = 16;
    for (int k = 1; k <= n; ++k)
      knots.push_back({static_cast<double>(k) / n,
                       ((rng() % 2000) / 1000.0 - 1.0)});
    const double exact = piecewise_linear_seminorm(knots);
    std::vector<double> ts, vs;
    const Driver d = make_driver(DriverFamily::piecewise_linear, 0.0, 1.0, knots);
    for (int i = 0; i <= 2000; ++i) {
      ts.push_back(i / 2000.0);
      vs.push_back(d.eval(ts.back()));
    }
    CHECK(oracles::brute_seminorm(ts, vs) <= exact * (1.0 + 1e-12));
    // exact value is nearly attained on a fine grid
    CHECK(oracles::brute_seminorm(ts, vs) >= exact * 0.98);
  }
}

TEST_CASE("reverse driver algebra") {
  const Driver sq = make_driver(DriverFamily::sqrt_forward, 1.5, 1.0);
  const ReverseDriver beta = reverse_driver(sq, 1.0);
  CHECK(beta.eval(0.0) == doctest::Approx(0.0));
  for (double s : {0.1, 0.4, 0.9})
    CHECK(beta.eval(s) == doctest::Approx(1.5 * (1.0 - std::sqrt(1.0 - s))).epsilon(1e-14));
  CHECK(beta.eval(1.0) == doctest::Approx(sq.eval(1.0)).epsilon(1e-14));

  const Driver c = make_driver(DriverFamily::constant, 0.0, 1.0);
  const ReverseDriver bc = reverse_driver(c, 0.7);
  for (double s : {0.0, 0.3, 0.7}) CHECK(bc.eval(s) == 0.0);

  CHECK_THROWS_AS(reverse_driver(sq, 0.0), std::domain_error);
  CHECK_THROWS_AS(reverse_driver(sq, 1.5), std::domain_error);
}

TEST_CASE("reversing twice recovers the driver") {
  const Driver back = make_driver(DriverFamily::sqrt_backward, 2.2, 1.0);
  const double t = 0.8;
  const ReverseDriver beta = reverse_driver(back, t);
  // beta(t) - beta(t - s) = lambda(s) on [0, t]
  for (double s : {0.0, 0.11, 0.35, 0.8})
    CHECK(beta.eval(t) - beta.eval(t - s) ==
          doctest::Approx(back.eval(s)).epsilon(1e-13));
}

TEST_CASE("reversal does not increase the measured seminorm") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<DriverSample> knots{{0.0, 0.0}};
    for (int k = 1; k <= 20; ++k)
      knots.push_back({k / 20.0, ((rng() % 2000) / 1000.0 - 1.0) * 0.4});
    const Driver d = make_driver(DriverFamily::piecewise_linear, 0.0, 1.0, knots);
    const ReverseDriver b = reverse_driver(d, 1.0);
    // same grid: reversal is a reflection plus shift, pairs map onto pairs
    CHECK(lip_seminorm(b, 301) <= lip_seminorm(d, 301) * (1.0 + 1e-12));
  }
}

TEST_CASE("sampled drivers load from CSV") {
  std::istringstream good("t,lambda\n0,5\n0.5,5.7\n1,4.9\n");
  const Driver d = load_driver_csv(good);
  CHECK(d.eval(0.0) == 0.0);  // shifted so lambda(0) = 0
  CHECK(d.eval(0.5) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(d.eval(0.25) == doctest::Approx(0.35).epsilon(1e-15));
  CHECK(d.horizon() == 1.0);

  std::istringstream bad_header("time,value\n0,0\n1,1\n");
  CHECK_THROWS_AS(load_driver_csv(bad_header), std::invalid_argument);
  std::istringstream not_at_zero("t,lambda\n0.1,0\n1,1\n");
  CHECK_THROWS_AS(load_driver_csv(not_at_zero), std::invalid_argument);
  std::istringstream unsorted("t,lambda\n0,0\n0.6,1\n0.4,2\n1,1\n");
  CHECK_THROWS_AS(load_driver_csv(unsorted), std::invalid_argument);
  std::istringstream empty("t,lambda\n");
  CHECK_THROWS_AS(load_driver_csv(empty), std::invalid_argument);
}
