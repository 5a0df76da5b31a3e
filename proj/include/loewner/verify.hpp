#ifndef LOEWNER_VERIFY_HPP
#define LOEWNER_VERIFY_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "loewner/driving.hpp"
#include "loewner/flow.hpp"

namespace loewner {

enum class CheckStatus { pass, fail, inconclusive };

const char* status_name(CheckStatus s);

/// One measured inequality. `margin` is signed so that pass <=> margin >= -slack
/// regardless of the inequality direction: bound - measured for upper bounds,
/// measured - bound for lower bounds.
struct VerificationReport {
  std::string check;
  double sigma = 0;
  double t = 0;
  double y0 = 0;
  std::string driver_id;
  double measured = 0;
  double bound = 0;
  double margin = 0;
  double slack = 0;
  CheckStatus status = CheckStatus::pass;
  double runtime_s = 0;  // informational; excluded from reproducibility
};

struct SweepConfig {
  std::vector<double> sigmas{0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 3.5, 3.9};
  std::vector<double> ts{0.1, 1.0};
  std::vector<double> y0s{1e-2, 1e-3};
  std::vector<std::string> families{"sqrt", "spiral", "random"};
  int random_seeds = 20;
  int random_knots = 256;
  std::uint64_t seed = 1;
  SolverOptions solver{};
  bool allow_supercritical = false;

  void validate() const;
};

SweepConfig default_sweep_config();
SweepConfig load_sweep_config(const std::string& path);

/// Drivers named by a config family entry at a given sigma. Random piecewise
/// drivers use cumulative +-sqrt(dt) steps rescaled to exact seminorm sigma.
std::vector<Driver> make_config_drivers(const SweepConfig& cfg, double sigma);

Driver make_random_driver(double sigma, double horizon, int knots,
                          std::uint64_t seed);

/// sup |W| along reverse trajectories and |Re gamma|/Im gamma of traced tips
/// against the cone constants, slack 1e-3 * bound.
std::vector<VerificationReport> verify_cone(const SweepConfig& cfg);

struct HolderFit {
  double exponent = 0;
  double stderr_ = 0;
  int octaves = 0;
};

/// Least-squares slope of log sup-increment against log lag over octave bins.
/// Window restricts both endpoints of each increment pair.
HolderFit estimate_holder(const TracedCurve& curve, double window_lo,
                          double window_hi);

std::vector<VerificationReport> verify_holder(const SweepConfig& cfg);

/// |arg h_t'(i y)| across a log-spaced y grid against the winding bound, plus
/// a slope fit of |arg| vs log(1/y) reported against the coefficient b.
std::vector<VerificationReport> verify_winding(const Driver& d, double sigma,
                                               double t,
                                               const std::vector<double>& ys,
                                               const SolverOptions& opts = {});

/// Gronwall domination: the numerically integrated comparison ODE matches the
/// closed form (exact forcing) and stays strictly below it (reduced forcing).
std::vector<VerificationReport> verify_comparison(double sigma, double z0,
                                                  double horizon);

/// Y bounds and monotonicity, fitted lower growth, X oscillation bound, and
/// accumulated-vs-quadrature derivative consistency across the sweep.
std::vector<VerificationReport> verify_flow_bounds(const SweepConfig& cfg);

/// Closed-form identities of the bound calculus (root bracketing, expansion
/// constants, exponent identity, monotonicity, Lambert residuals).
std::vector<VerificationReport> verify_bound_identities();

struct SuiteResult {
  std::vector<VerificationReport> reports;
  bool pass = false;
  double runtime_s = 0;
};

/// Runs every check; deterministic given cfg.seed. Sweep points execute in
/// parallel (cfg.solver.threads) and reports are sorted by parameter point.
SuiteResult run_suite(const SweepConfig& cfg);

void write_reports_json(std::ostream& out, const std::vector<VerificationReport>& reports,
                        bool include_runtime = true);
void write_reports_csv(std::ostream& out, const std::vector<VerificationReport>& reports);

}  // namespace loewner

#endif
