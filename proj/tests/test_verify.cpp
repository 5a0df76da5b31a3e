#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>

#include "loewner/bounds.hpp"
#include "loewner/verify.hpp"

using namespace loewner;

namespace {

SweepConfig tiny_config() {
  SweepConfig cfg;
  cfg.sigmas = {1.0};
  cfg.ts = {1.0};
  cfg.y0s = {1e-2};
  cfg.random_seeds = 2;
  cfg.random_knots = 64;
  cfg.solver.threads = 1;
  return cfg;
}

TracedCurve synthetic_power_curve(double alpha, int n) {
  TracedCurve c;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    CurveSample cs;
    cs.t = t;
    cs.gamma = Complex(0.0, std::pow(t, alpha) + 1e-12);
    c.samples.push_back(cs);
  }
  return c;
}

bool all_ok(const std::vector<VerificationReport>& reports) {
  for (const auto& r : reports)
    if (r.status == CheckStatus::fail) return false;
  return true;
}

}  // namespace

TEST_CASE("random piecewise drivers hit their target seminorm") {
  for (int seed = 0; seed < 20; ++seed) {
    const Driver d = make_random_driver(1.7, 1.0, 256, 1000 + seed);
    CHECK(d.nominal_seminorm() == doctest::Approx(1.7).epsilon(1e-12));
    const double measured = lip_seminorm(d, 2049);
    CHECK(measured <= 1.7 * (1.0 + 1e-9));
    CHECK(measured >= 1.7 * 0.95);  // within 5% of the target
  }
}

TEST_CASE("random drivers are reproducible and seed-sensitive") {
  const Driver a = make_random_driver(1.0, 1.0, 128, 42);
  const Driver b = make_random_driver(1.0, 1.0, 128, 42);
  const Driver c = make_random_driver(1.0, 1.0, 128, 43);
  bool same = true, differ = false;
  for (double t = 0; t <= 1.0; t += 1.0 / 64) {
    same = same && a.eval(t) == b.eval(t);
    differ = differ || a.eval(t) != c.eval(t);
  }
  CHECK(same);
  CHECK(differ);
}

TEST_CASE("holder estimator recovers pure power laws") {
  const HolderFit half = estimate_holder(synthetic_power_curve(0.5, 512), 0.0, 1.0);
  CHECK(half.exponent == doctest::Approx(0.5).epsilon(0.04));
  const HolderFit p7 = estimate_holder(synthetic_power_curve(0.7, 512), 0.0, 1.0);
  CHECK(p7.exponent == doctest::Approx(0.7).epsilon(0.04));
  CHECK(p7.octaves >= 4);
  CHECK(p7.stderr_ >= 0.0);
}

TEST_CASE("holder estimator rejects degenerate input") {
  CHECK_THROWS_AS(estimate_holder(synthetic_power_curve(0.5, 16), 0.0, 1.0),
                  std::invalid_argument);
  TracedCurve flat;
  for (int i = 0; i <= 64; ++i)
    flat.samples.push_back({i / 64.0, Complex(0.0, 1.0), 0.0});
  CHECK_THROWS_AS(estimate_holder(flat, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("cone checks pass on the sqrt family") {
  SweepConfig cfg = tiny_config();
  cfg.families = {"sqrt"};
  const auto reports = verify_cone(cfg);
  REQUIRE(!reports.empty());
  CHECK(all_ok(reports));
  for (const auto& r : reports)
    if (r.check == "cone_sup_w_vs_8pi")
      CHECK(r.measured <= 0.4270013736851164 + 1e-3);
}

TEST_CASE("cone checks hold for many random drivers above 8/pi") {
  SweepConfig cfg = tiny_config();
  cfg.sigmas = {3.5};
  cfg.families = {"random"};
  cfg.random_seeds = 100;
  const auto reports = verify_cone(cfg);
  CHECK(all_ok(reports));
  int l_checks = 0;
  for (const auto& r : reports) {
    if (r.check == "cone_sup_w_vs_L") {
      ++l_checks;
      CHECK(r.bound == doctest::Approx(big_l(3.5)));
    }
    CHECK(r.check != "cone_sup_w_vs_8pi");  // hypothesis fails above 8/pi
  }
  CHECK(l_checks == 100);
}

TEST_CASE("zero driver stays on the axis") {
  SweepConfig cfg = tiny_config();
  cfg.sigmas = {0.0};
  cfg.families = {"sqrt"};  // sigma = 0 makes this the zero driver
  const auto reports = verify_cone(cfg);
  REQUIRE(!reports.empty());
  for (const auto& r : reports) {
    CHECK(r.measured == 0.0);
    CHECK(r.status == CheckStatus::pass);
  }
}

TEST_CASE("winding reports for flat and spiral drivers") {
  const std::vector<double> ys{1e-2, 1e-3, 1e-4, 1e-5};
  SolverOptions o;
  o.threads = 1;

  Driver flat = make_driver(DriverFamily::constant, 0.0, 1.0);
  const auto flat_reports = verify_winding(flat, 0.0, 1.0, ys, o);
  CHECK(all_ok(flat_reports));
  for (const auto& r : flat_reports)
    if (r.check == "winding_arg_vs_bound") CHECK(r.measured == 0.0);

  Driver spiral = make_driver(DriverFamily::sqrt_backward, 1.0, 1.0);
  const auto spiral_reports = verify_winding(spiral, 1.0, 1.0 - 1e-3, ys, o);
  CHECK(all_ok(spiral_reports));
  const double a_sharp = winding_bound(1.0, 1.0, 1e-3).a;
  CHECK(a_sharp == doctest::Approx(0.3611523949820878).epsilon(1e-12));

  // above 4*sqrt(2)/pi only the trivial coefficients apply, and they hold
  Driver rough = make_driver(DriverFamily::sqrt_backward, 1.9, 1.0);
  const auto rough_reports = verify_winding(rough, 1.9, 1.0, ys, o);
  CHECK(all_ok(rough_reports));
  CHECK_FALSE(winding_bound(1.9, 1.0, 1e-3).sharp);

  CHECK_THROWS_AS(verify_winding(flat, 0.0, 1.0, {1e-2, 1e-3}, o),
                  std::invalid_argument);
}

TEST_CASE("comparison ODE domination") {
  for (auto [z0, sigma] : {std::pair{1.0, 1.0}, {1.0, 2.0}, {0.1, 3.0}}) {
    const auto reports = verify_comparison(sigma, z0, 1.0);
    REQUIRE(reports.size() == 2);
    CHECK(all_ok(reports));
    CHECK(reports[0].measured <= 1e-6);  // exact forcing matches closed form
    CHECK(reports[1].margin >= 0.0);     // reduced forcing stays strictly below
  }
  CHECK_THROWS_AS(verify_comparison(1.0, 0.0, 1.0), std::domain_error);
}

TEST_CASE("flow bound sweep on a small config") {
  SweepConfig cfg = tiny_config();
  cfg.sigmas = {1.0, 3.9};
  cfg.families = {"sqrt", "spiral", "random"};
  const auto reports = verify_flow_bounds(cfg);
  CHECK(all_ok(reports));
  bool saw_growth = false;
  for (const auto& r : reports)
    if (r.check == "flow_y_lower_growth") {
      saw_growth = true;
      CHECK(r.measured > 0.0);
    }
  CHECK(saw_growth);
}

TEST_CASE("bound identities all pass") {
  const auto reports = verify_bound_identities();
  CHECK(all_ok(reports));
}

TEST_CASE("suite aggregates, sorts, and reproduces bit-for-bit") {
  SweepConfig cfg = tiny_config();
  const SuiteResult a = run_suite(cfg);
  const SuiteResult b = run_suite(cfg);
  CHECK(a.pass);
  REQUIRE(a.reports.size() == b.reports.size());
  for (std::size_t i = 0; i < a.reports.size(); ++i) {
    CHECK(a.reports[i].check == b.reports[i].check);
    CHECK(a.reports[i].measured == b.reports[i].measured);
    CHECK(a.reports[i].margin == b.reports[i].margin);
  }
  // canonical order
  for (std::size_t i = 1; i < a.reports.size(); ++i)
    CHECK(a.reports[i - 1].check <= a.reports[i].check);

  std::ostringstream json_a, json_b;
  write_reports_json(json_a, a.reports, /*include_runtime=*/false);
  write_reports_json(json_b, b.reports, /*include_runtime=*/false);
  CHECK(json_a.str() == json_b.str());
}

TEST_CASE("out-of-hypothesis sigma is inconclusive, not a failure") {
  SweepConfig cfg = tiny_config();
  cfg.sigmas = {4.2};
  cfg.allow_supercritical = true;
  cfg.solver.allow_supercritical = true;
  cfg.families = {"random"};
  cfg.random_seeds = 2;
  const auto reports = verify_cone(cfg);
  REQUIRE(!reports.empty());
  for (const auto& r : reports) CHECK(r.status == CheckStatus::inconclusive);
  const SuiteResult s = run_suite(cfg);
  CHECK(s.pass);  // inconclusive entries never fail the aggregate
}

TEST_CASE("config validation") {
  SweepConfig cfg = tiny_config();
  cfg.families = {};
  CHECK_THROWS_AS(run_suite(cfg), std::invalid_argument);
  SweepConfig super = tiny_config();
  super.sigmas = {4.2};
  CHECK_THROWS_AS(super.validate(), std::invalid_argument);
  SweepConfig unknown = tiny_config();
  unknown.families = {"brownian"};
  CHECK_THROWS_AS(make_config_drivers(unknown, 1.0), std::invalid_argument);
}

TEST_CASE("report writers emit the documented schema") {
  VerificationReport r;
  r.check = "demo";
  r.driver_id = "sqrt";
  r.measured = 0.5;
  r.bound = 1.0;
  r.margin = 0.5;
  std::ostringstream csv;
  write_reports_csv(csv, {r});
  CHECK(csv.str().rfind("check,sigma,t,y0,driver,measured,bound,margin,slack,status",
                        0) == 0);
  std::ostringstream json;
  write_reports_json(json, {r});
  CHECK(json.str().find("\"check\": \"demo\"") != std::string::npos);
  CHECK(json.str().find("\"status\": \"pass\"") != std::string::npos);
}
