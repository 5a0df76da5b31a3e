#include "loewner/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "loewner/bounds.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace loewner {

namespace {

constexpr double kPi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

VerificationReport upper_check(std::string name, double sigma, double t, double y0,
                               std::string driver, double measured, double bound,
                               double slack) {
  VerificationReport r;
  r.check = std::move(name);
  r.sigma = sigma;
  r.t = t;
  r.y0 = y0;
  r.driver_id = std::move(driver);
  r.measured = measured;
  r.bound = bound;
  r.margin = bound - measured;
  r.slack = slack;
  r.status = r.margin >= -slack ? CheckStatus::pass : CheckStatus::fail;
  return r;
}

VerificationReport lower_check(std::string name, double sigma, double t, double y0,
                               std::string driver, double measured, double bound,
                               double slack) {
  VerificationReport r = upper_check(std::move(name), sigma, t, y0,
                                     std::move(driver), measured, bound, slack);
  r.margin = measured - bound;
  r.status = r.margin >= -slack ? CheckStatus::pass : CheckStatus::fail;
  return r;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

void SweepConfig::validate() const {
  if (sigmas.empty() || ts.empty() || y0s.empty())
    throw std::invalid_argument("sweep config: empty parameter grid");
  if (families.empty())
    throw std::invalid_argument("sweep config: empty driver family list");
  for (double s : sigmas)
    if (s >= 4.0 && !allow_supercritical)
      throw std::invalid_argument(
          "sweep config: sigma >= 4 requires allow_supercritical");
  for (double t : ts)
    if (!(t > 0)) throw std::invalid_argument("sweep config: t must be positive");
  for (double y : y0s)
    if (!(y > 0)) throw std::invalid_argument("sweep config: y0 must be positive");
  if (random_seeds < 0 || random_knots < 2)
    throw std::invalid_argument("sweep config: bad random-driver parameters");
  solver.validate();
}

SweepConfig default_sweep_config() { return SweepConfig{}; }

SweepConfig load_sweep_config(const std::string& path) {
  if (path == "default") return default_sweep_config();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("sweep config: cannot open " + path);
  nlohmann::json j;
  in >> j;
  SweepConfig cfg;
  if (j.contains("sigmas")) cfg.sigmas = j["sigmas"].get<std::vector<double>>();
  if (j.contains("ts")) cfg.ts = j["ts"].get<std::vector<double>>();
  if (j.contains("y0s")) cfg.y0s = j["y0s"].get<std::vector<double>>();
  if (j.contains("families"))
    cfg.families = j["families"].get<std::vector<std::string>>();
  if (j.contains("random_seeds")) cfg.random_seeds = j["random_seeds"].get<int>();
  if (j.contains("random_knots")) cfg.random_knots = j["random_knots"].get<int>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("allow_supercritical"))
    cfg.allow_supercritical = j["allow_supercritical"].get<bool>();
  if (j.contains("tol")) cfg.solver.tol = j["tol"].get<double>();
  if (j.contains("threads")) cfg.solver.threads = j["threads"].get<int>();
  cfg.solver.allow_supercritical = cfg.allow_supercritical;
  return cfg;
}

Driver make_random_driver(double sigma, double horizon, int knots,
                          std::uint64_t seed) {
  if (knots < 2) throw std::invalid_argument("random driver: need >= 2 knots");
  std::mt19937_64 rng(splitmix64(seed));
  const double dt = horizon / (knots - 1);
  const double step = std::sqrt(dt);
  std::vector<DriverSample> samples(knots);
  samples[0] = {0.0, 0.0};
  double v = 0;
  for (int k = 1; k < knots; ++k) {
    // raw engine bits keep the construction platform-independent
    v += (rng() >> 63) ? step : -step;
    samples[k] = {k * dt, v};
  }
  const double norm = piecewise_linear_seminorm(samples);
  if (norm > 0) {
    const double scale = sigma / norm;
    for (auto& s : samples) s.value *= scale;
  }
  Driver d(DriverFamily::piecewise_linear, 0.0, horizon, std::move(samples));
  d.set_id("rand-" + std::to_string(seed));
  return d;
}

std::vector<Driver> make_config_drivers(const SweepConfig& cfg, double sigma) {
  const double horizon = *std::max_element(cfg.ts.begin(), cfg.ts.end());
  std::vector<Driver> out;
  for (const std::string& fam : cfg.families) {
    if (fam == "sqrt") {
      out.push_back(make_driver(DriverFamily::sqrt_forward, sigma, horizon));
      out.back().set_id("sqrt");
    } else if (fam == "spiral") {
      out.push_back(make_driver(DriverFamily::sqrt_backward, sigma, horizon));
      out.back().set_id("spiral");
    } else if (fam == "constant") {
      out.push_back(make_driver(DriverFamily::constant, 0.0, horizon));
      out.back().set_id("constant");
    } else if (fam == "random") {
      for (int k = 0; k < cfg.random_seeds; ++k) {
        const std::uint64_t s =
            splitmix64(cfg.seed ^ (0x5eedull << 32) ^
                       (static_cast<std::uint64_t>(sigma * 4096.0) << 8) ^
                       static_cast<std::uint64_t>(k));
        out.push_back(make_random_driver(sigma, horizon, cfg.random_knots, s));
        out.back().set_id("rand-" + std::to_string(k));
      }
    } else {
      throw std::invalid_argument("sweep config: unknown family '" + fam + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument("sweep config: no drivers");
  return out;
}

namespace {

// Runs independent jobs, each appending to its own slot; deterministic merge.
void run_jobs(int threads,
              const std::vector<std::function<std::vector<VerificationReport>()>>& jobs,
              std::vector<VerificationReport>& out) {
  std::vector<std::vector<VerificationReport>> slots(jobs.size());
  std::exception_ptr eptr;
  if (threads == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) slots[i] = jobs[i]();
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
    for (long i = 0; i < static_cast<long>(jobs.size()); ++i) {
      try {
        slots[i] = jobs[i]();
      } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
        if (!eptr) eptr = std::current_exception();
      }
    }
    if (eptr) std::rethrow_exception(eptr);
  }
  for (auto& s : slots)
    out.insert(out.end(), std::make_move_iterator(s.begin()),
               std::make_move_iterator(s.end()));
}

CheckStatus demote_if_supercritical(double sigma, CheckStatus st) {
  return sigma >= 4.0 ? CheckStatus::inconclusive : st;
}

std::vector<VerificationReport> cone_point(const SweepConfig& cfg, double sigma,
                                           const Driver& d, double t, double y0) {
  std::vector<VerificationReport> out;
  const auto t0 = Clock::now();
  SolverOptions opts = cfg.solver;
  opts.allow_supercritical = cfg.allow_supercritical;
  opts.threads = 1;
  const FlowTrajectory traj = solve_reverse(d, t, y0, opts);
  const double supw = traj.sup_abs_w();
  if (sigma == 0.0) {
    // both constants vanish in the sigma -> 0 limit; the flow stays on the axis
    auto r = upper_check("cone_sup_w_vs_L", sigma, t, y0, d.id(), supw, 0.0, 0.0);
    r.runtime_s = seconds_since(t0);
    out.push_back(std::move(r));
  } else if (sigma < 4.0) {
    const double L = big_l(sigma);
    auto r = upper_check("cone_sup_w_vs_L", sigma, t, y0, d.id(), supw, L, 1e-3 * L);
    r.runtime_s = seconds_since(t0);
    out.push_back(std::move(r));
    const ConeBound cb = cone_bound(sigma);
    if (cb.part_ii) {
      auto r2 = upper_check("cone_sup_w_vs_8pi", sigma, t, y0, d.id(), supw,
                            *cb.part_ii, 1e-3 * *cb.part_ii);
      out.push_back(std::move(r2));
    }
  } else {
    auto r = upper_check("cone_sup_w_vs_L", sigma, t, y0, d.id(), supw, 0.0, 0.0);
    r.status = CheckStatus::inconclusive;
    r.runtime_s = seconds_since(t0);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<VerificationReport> cone_curve_point(const SweepConfig& cfg, double sigma,
                                                 const Driver& d, double t) {
  std::vector<VerificationReport> out;
  if (sigma <= 0.0 || sigma >= 4.0) return out;
  SolverOptions opts = cfg.solver;
  opts.allow_supercritical = cfg.allow_supercritical;
  opts.threads = 1;
  const TracedCurve c = trace_curve_serial(d, {t}, opts);
  const Complex g = c.samples[0].gamma;
  const double ratio = std::abs(g.real()) / g.imag();
  const double L = big_l(sigma);
  out.push_back(upper_check("cone_curve_ratio_vs_L", sigma, t, 0.0, d.id(), ratio,
                            L, 1e-3 * L));
  const ConeBound cb = cone_bound(sigma);
  if (cb.part_ii)
    out.push_back(upper_check("cone_curve_ratio_vs_8pi", sigma, t, 0.0, d.id(),
                              ratio, *cb.part_ii, 1e-3 * *cb.part_ii));
  return out;
}

}  // namespace

std::vector<VerificationReport> verify_cone(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<std::function<std::vector<VerificationReport>()>> jobs;
  for (double sigma : cfg.sigmas) {
    const auto drivers = make_config_drivers(cfg, sigma);
    for (const Driver& d : drivers) {
      for (double t : cfg.ts) {
        for (double y0 : cfg.y0s)
          jobs.push_back([&cfg, sigma, d, t, y0] {
            auto rep = cone_point(cfg, sigma, d, t, y0);
            for (auto& r : rep) r.status = demote_if_supercritical(sigma, r.status);
            return rep;
          });
        jobs.push_back([&cfg, sigma, d, t] { return cone_curve_point(cfg, sigma, d, t); });
      }
    }
  }
  std::vector<VerificationReport> out;
  run_jobs(effective_threads(cfg.solver), jobs, out);
  return out;
}

HolderFit estimate_holder(const TracedCurve& curve, double window_lo,
                          double window_hi) {
  std::vector<double> t;
  std::vector<Complex> g;
  for (const CurveSample& cs : curve.samples)
    if (cs.t >= window_lo && cs.t <= window_hi) {
      t.push_back(cs.t);
      g.push_back(cs.gamma);
    }
  const std::size_t n = t.size();
  if (n < 32) throw std::invalid_argument("estimate_holder: fewer than 32 samples in window");
  double span = 0;
  for (const Complex& z : g)
    span = std::max(span, std::abs(z - g.front()));
  if (span == 0) throw std::invalid_argument("estimate_holder: degenerate curve");

  // sup-increment per octave bin of the lag, then least squares in log-log;
  // one pass over all pairs
  const double smax = (t.back() - t.front()) / 2.0;
  std::vector<double> xs, ys;
  const double root2 = std::numbers::sqrt2;
  const int max_bins = 48;
  std::vector<double> bin_inc(max_bins, 0.0), bin_lag(max_bins, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double lag = t[j] - t[i];
      if (!(lag > 0) || lag > smax * root2) continue;
      const int b = static_cast<int>(std::floor(std::log2(smax / lag) + 0.5));
      if (b < 0 || b >= max_bins) continue;
      const double inc = std::abs(g[j] - g[i]);
      if (inc > bin_inc[b]) {
        bin_inc[b] = inc;
        bin_lag[b] = lag;
      }
    }
  }
  for (int b = 0; b < max_bins; ++b)
    if (bin_inc[b] > 0) {
      xs.push_back(std::log(bin_lag[b]));
      ys.push_back(std::log(bin_inc[b]));
    }
  if (xs.size() < 5)
    throw std::invalid_argument("estimate_holder: lags span fewer than 4 octaves");

  const std::size_t m = xs.size();
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  HolderFit fit;
  fit.exponent = sxy / sxx;
  double ss = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = ys[i] - my - fit.exponent * (xs[i] - mx);
    ss += r * r;
  }
  fit.stderr_ = m > 2 ? std::sqrt(ss / ((m - 2) * sxx)) : 0.0;
  fit.octaves = static_cast<int>(m) - 1;
  return fit;
}

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

VerificationReport holder_point(const SweepConfig& cfg, double sigma,
                                const Driver& d) {
  const auto t0 = Clock::now();
  SolverOptions opts = cfg.solver;
  opts.allow_supercritical = cfg.allow_supercritical;
  opts.threads = 1;
  opts.richardson = false;  // increments dwarf the tip error at these scales
  double lo, hi;
  if (d.id() == "spiral") {
    lo = 0.5;
    hi = 1.0;
  } else {
    lo = 0.25;
    hi = 0.5;
  }
  const double horizon = d.horizon();
  lo *= horizon;
  hi *= horizon;
  const TracedCurve curve = trace_curve_serial(d, linspace(lo, hi, 97), opts);
  const HolderFit fit = estimate_holder(curve, lo, hi);
  const double alpha = sigma > 0 ? holder_exponents(sigma).alpha_cap : 1.0;
  // finite-scale fitting slack per the harness convention
  auto r = lower_check("holder_fit_vs_alpha_cap", sigma, hi, 0.0, d.id(),
                       fit.exponent, alpha - 0.05, 0.0);
  r.runtime_s = seconds_since(t0);
  return r;
}

}  // namespace

std::vector<VerificationReport> verify_holder(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<std::function<std::vector<VerificationReport>()>> jobs;
  for (double sigma : cfg.sigmas) {
    if (sigma >= 4.0) continue;
    // limit random drivers to three seeds per sigma; fits are costly
    SweepConfig sub = cfg;
    sub.random_seeds = std::min(cfg.random_seeds, 3);
    for (const Driver& d : make_config_drivers(sub, sigma))
      jobs.push_back([&cfg, sigma, d] {
        return std::vector<VerificationReport>{holder_point(cfg, sigma, d)};
      });
  }
  std::vector<VerificationReport> out;
  run_jobs(effective_threads(cfg.solver), jobs, out);
  return out;
}

std::vector<VerificationReport> verify_winding(const Driver& d, double sigma,
                                               double t, const std::vector<double>& ys,
                                               const SolverOptions& opts) {
  if (ys.size() < 4)
    throw std::invalid_argument("verify_winding: need a log-spaced grid of >= 4 points");
  if (!(sigma < 4.0)) throw std::domain_error("verify_winding: sigma must be < 4");
  std::vector<VerificationReport> out;
  SolverOptions o = opts;
  o.threads = 1;
  std::vector<double> logs_inv_y, args;
  for (double y : ys) {
    const auto t0 = Clock::now();
    const FlowTrajectory traj = solve_reverse(d, t, y, o);
    const double a_meas = std::abs(traj.back().arg_deriv);
    const WindingBound wb = winding_bound(sigma, t, y);
    auto r = upper_check("winding_arg_vs_bound", sigma, t, y, d.id(), a_meas,
                         wb.value, 1e-9 * std::max(1.0, wb.value));
    r.runtime_s = seconds_since(t0);
    out.push_back(std::move(r));
    logs_inv_y.push_back(std::log(1.0 / y));
    args.push_back(a_meas);
  }
  // slope of |arg| against log(1/y) compared with the coefficient b
  const std::size_t n = ys.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += logs_inv_y[i];
    my += args[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (logs_inv_y[i] - mx) * (logs_inv_y[i] - mx);
    sxy += (logs_inv_y[i] - mx) * (args[i] - my);
  }
  const double slope = sxy / sxx;
  const double b = winding_bound(sigma, t, ys.front()).b;
  out.push_back(upper_check("winding_slope_vs_b", sigma, t, ys.back(), d.id(),
                            slope, b, 1e-2));
  return out;
}

namespace {

// RK4 for du/dv = f(v, u) over [v0, v1]
template <typename F>
double rk4(F f, double u0, double v0, double v1, int steps) {
  double u = u0, v = v0;
  const double h = (v1 - v0) / steps;
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(v, u);
    const double k2 = f(v + h / 2, u + h / 2 * k1);
    const double k3 = f(v + h / 2, u + h / 2 * k2);
    const double k4 = f(v + h, u + h * k3);
    u += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    v += h;
  }
  return u;
}

}  // namespace

std::vector<VerificationReport> verify_comparison(double sigma, double z0,
                                                  double horizon) {
  if (!(z0 > 0)) throw std::domain_error("verify_comparison: z0 must be positive");
  if (!(sigma > 0) || !(sigma < 4))
    throw std::domain_error("verify_comparison: sigma must lie in (0, 4)");
  std::vector<VerificationReport> out;
  const auto t0 = Clock::now();
  const double c = sigma * sigma / 8.0;
  // in u = sqrt(s):  dU/du = sigma - 2 c u / U, regular at u = 0
  const double delta = 1e-6;
  const int samples = 64;
  const int inner = 256;
  double max_rel = 0;
  {
    double u = 0, U = z0;
    for (int k = 1; k <= samples; ++k) {
      const double u1 = std::sqrt(horizon) * k / samples;
      U = rk4([&](double v, double w) { return sigma - 2.0 * c * v / w; }, U, u, u1,
              inner);
      u = u1;
      if (U <= delta) break;
      const double Z = comparison_z(z0, sigma, u1 * u1);
      max_rel = std::max(max_rel, std::abs(U - Z) / Z);
    }
  }
  auto r1 = upper_check("comparison_exact_forcing_rel_err", sigma, horizon, z0,
                        "comparison", max_rel, 1e-6, 0.0);
  r1.runtime_s = seconds_since(t0);
  out.push_back(std::move(r1));

  // strictly smaller forcing must stay strictly below Z
  {
    double u = 0, U = z0;
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= samples; ++k) {
      const double u1 = std::sqrt(horizon) * k / samples;
      U = rk4([&](double v, double w) { return 0.9 * sigma - 2.0 * c * v / w; }, U, u,
              u1, inner);
      u = u1;
      if (U <= delta) break;
      const double Z = comparison_z(z0, sigma, u1 * u1);
      worst = std::min(worst, Z - U);
    }
    out.push_back(lower_check("comparison_reduced_forcing_below", sigma, horizon,
                              z0, "comparison", worst, 0.0, 0.0));
  }
  return out;
}

namespace {

std::vector<VerificationReport> flow_bounds_point(const SweepConfig& cfg,
                                                  double sigma, const Driver& d,
                                                  double t, double y0) {
  std::vector<VerificationReport> out;
  const auto t0 = Clock::now();
  SolverOptions opts = cfg.solver;
  opts.allow_supercritical = cfg.allow_supercritical;
  opts.threads = 1;
  const FlowTrajectory traj = solve_reverse(d, t, y0, opts);
  const ReverseDriver beta(d, t);

  // Y upper bound sqrt(y0^2 + 4 s), relative slack 1e-9
  double y_ratio = 0;
  bool monotone = true;
  double prev_y = 0;
  for (const FlowState& st : traj.states) {
    y_ratio = std::max(y_ratio, st.y / std::sqrt(y0 * y0 + 4.0 * st.s));
    if (st.s > 0 && !(st.y > prev_y)) monotone = false;
    prev_y = st.y;
  }
  auto r1 = upper_check("flow_y_upper", sigma, t, y0, d.id(), y_ratio, 1.0, 1e-9);
  r1.runtime_s = seconds_since(t0);
  out.push_back(std::move(r1));
  out.push_back(lower_check("flow_y_monotone", sigma, t, y0, d.id(),
                            monotone ? 1.0 : 0.0, 1.0, 0.0));

  // fitted lower-growth constant over s in [y0^2, t]; positivity only
  if (sigma < 4.0 && y0 <= 1.0) {
    double chat = std::numeric_limits<double>::infinity();
    for (const FlowState& st : traj.states)
      if (st.s >= y0 * y0)
        chat = std::min(chat, (st.y * st.y - y0 * y0) / st.s);
    if (std::isfinite(chat)) {
      auto r = lower_check("flow_y_lower_growth", sigma, t, y0, d.id(), chat, 0.0, 0.0);
      r.status = chat > 0 ? CheckStatus::pass : CheckStatus::fail;
      out.push_back(std::move(r));
    }
  }

  // |X_s| <= running oscillation of beta, pointwise on the recorded grid
  {
    double worst = -std::numeric_limits<double>::infinity();
    double bmin = 0, bmax = 0;
    for (const FlowState& st : traj.states) {
      const double b = beta.eval(st.s);
      bmin = std::min(bmin, b);
      bmax = std::max(bmax, b);
      const double osc = std::max(bmax - b, b - bmin);
      worst = std::max(worst, std::abs(st.x) - osc);
    }
    out.push_back(upper_check("flow_x_oscillation", sigma, t, y0, d.id(), worst,
                              0.0, 1e-9 * std::max(1.0, sigma)));
  }

  // accumulated derivative vs trapezoid quadrature of the integral formulas
  {
    const DerivQuadrature q = derivative_quadrature(traj);
    const FlowState& b = traj.back();
    out.push_back(upper_check("flow_deriv_log_consistency", sigma, t, y0, d.id(),
                              std::abs(b.log_abs_deriv - q.log_abs),
                              1e-3 * std::max(1.0, std::abs(q.log_abs)), 0.0));
    out.push_back(upper_check("flow_deriv_arg_consistency", sigma, t, y0, d.id(),
                              std::abs(b.arg_deriv - q.arg), 1e-3, 0.0));
  }
  for (auto& r : out) r.status = demote_if_supercritical(sigma, r.status);
  return out;
}

}  // namespace

std::vector<VerificationReport> verify_flow_bounds(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<std::function<std::vector<VerificationReport>()>> jobs;
  for (double sigma : cfg.sigmas) {
    const auto drivers = make_config_drivers(cfg, sigma);
    for (const Driver& d : drivers)
      for (double t : cfg.ts)
        for (double y0 : cfg.y0s)
          jobs.push_back([&cfg, sigma, d, t, y0] {
            return flow_bounds_point(cfg, sigma, d, t, y0);
          });
  }
  std::vector<VerificationReport> out;
  run_jobs(effective_threads(cfg.solver), jobs, out);
  return out;
}

std::vector<VerificationReport> verify_bound_identities() {
  std::vector<VerificationReport> out;
  const auto t0 = Clock::now();

  // Lambert W residual on a log-spaced grid
  {
    double worst = 0;
    for (int k = -12; k <= 12; ++k) {
      const double x = std::pow(10.0, k);
      const double w = lambert_w(x);
      worst = std::max(worst, std::abs(w * std::exp(w) - x) / std::max(1.0, x));
    }
    auto r = upper_check("lambert_w_residual", 0, 0, 0, "grid", worst, 1e-14, 0.0);
    r.runtime_s = seconds_since(t0);
    out.push_back(std::move(r));
  }

  // root sign change exactly once on [sigma/(4-sigma) + eps, 2 p]
  for (double sigma : {0.5, 1.0, 2.0, 3.0, 3.9}) {
    const double left = sigma / (4.0 - sigma);
    const double p = p_of_sigma(sigma);
    auto F = [&](double x) {
      const double inner = 16.0 * x * x - sigma * sigma * (x + 1.0) * (x + 1.0);
      if (!(inner > 0)) return -1.0;
      return x + 0.5 * std::log(inner) - 0.5 * std::log(16.0 - sigma * sigma);
    };
    int flips = 0;
    double prev = F(left + 1e-6);
    const int n = 2000;
    for (int i = 1; i <= n; ++i) {
      const double x = (left + 1e-6) + (2.0 * p - left - 1e-6) * i / n;
      const double f = F(x);
      if ((prev < 0 && f >= 0) || (prev >= 0 && f < 0)) ++flips;
      prev = f;
    }
    out.push_back(upper_check("p_root_single_sign_change", sigma, 0, 0, "scan",
                              static_cast<double>(flips), 1.0, 0.0));
    out.back().status = flips == 1 ? CheckStatus::pass : CheckStatus::fail;
    // residual of the defining equation in its original form
    const double rhs = std::sqrt(16.0 - sigma * sigma) /
                       std::sqrt(16.0 * p * p - sigma * sigma * (p + 1.0) * (p + 1.0));
    out.push_back(upper_check("p_equation_residual", sigma, 0, 0, "root",
                              std::abs(std::exp(p) - rhs) / rhs, 1e-12, 0.0));
    out.push_back(lower_check("p_above_left_endpoint", sigma, 0, 0, "root", p, left,
                              0.0));
  }

  // L and m strictly increasing on a grid
  {
    double prev_l = 0, prev_m = 0;
    bool inc_l = true, inc_m = true;
    for (int i = 1; i <= 60; ++i) {
      const double sigma = 3.98 * i / 60.0;
      const double L = big_l(sigma);
      if (L <= prev_l) inc_l = false;
      prev_l = L;
      if (sigma < 8.0 / kPi) {
        const double m = cone_bound(sigma).m;
        if (m <= prev_m) inc_m = false;
        prev_m = m;
      }
    }
    out.push_back(lower_check("L_strictly_increasing", 0, 0, 0, "grid",
                              inc_l ? 1.0 : 0.0, 1.0, 0.0));
    out.push_back(lower_check("m_strictly_increasing", 0, 0, 0, "grid",
                              inc_m ? 1.0 : 0.0, 1.0, 0.0));
  }

  // exponent identity and lower-vs-upper ordering on a grid over (0, 8/pi)
  {
    double worst_id = 0;
    double worst_order = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 50; ++i) {
      const double sigma = (8.0 / kPi) * i / 51.0;
      const ConeBound cb = cone_bound(sigma);
      if (cb.part_ii && *cb.part_ii <= big_l(sigma)) {
        const double lhs = 1.0 / (1.0 + cb.m * cb.m);
        const double rhs = 1.0 - kPi * kPi * sigma * sigma / 64.0;
        worst_id = std::max(worst_id, std::abs(lhs - rhs));
      }
      if (cb.part_ii) worst_order = std::min(worst_order, *cb.part_ii - cb.cone_lower);
    }
    out.push_back(upper_check("alpha_cap_identity", 0, 0, 0, "grid", worst_id,
                              1e-12, 0.0));
    out.push_back(lower_check("cone_lower_below_part_ii", 0, 0, 0, "grid",
                              worst_order, 0.0, 0.0));
  }

  // small-sigma expansion of L
  {
    const double ratio = big_l(1e-3) / 1e-3;
    const double target = (1.0 + 1.0 / lambert_w(1.0)) / 4.0;
    out.push_back(upper_check("L_expansion_constant", 1e-3, 0, 0, "formula",
                              std::abs(ratio - target), 1e-3, 0.0));
  }
  return out;
}

SuiteResult run_suite(const SweepConfig& cfg) {
  cfg.validate();
  const auto t0 = Clock::now();
  SuiteResult result;
  auto append = [&result](std::vector<VerificationReport> v) {
    result.reports.insert(result.reports.end(), std::make_move_iterator(v.begin()),
                          std::make_move_iterator(v.end()));
  };
  append(verify_bound_identities());
  append(verify_cone(cfg));
  append(verify_flow_bounds(cfg));
  append(verify_holder(cfg));
  for (double sigma : cfg.sigmas) {
    if (!(sigma > 0) || sigma >= 4.0) continue;
    const double horizon = *std::max_element(cfg.ts.begin(), cfg.ts.end());
    Driver spiral = make_driver(DriverFamily::sqrt_backward, sigma, horizon);
    spiral.set_id("spiral");
    std::vector<double> ys{1e-2, 1e-3, 1e-4, 1e-5};
    append(verify_winding(spiral, sigma, horizon, ys, cfg.solver));
    append(verify_comparison(sigma, 1.0, 1.0));
  }

  // canonical order: by check name, then parameter point
  std::sort(result.reports.begin(), result.reports.end(),
            [](const VerificationReport& a, const VerificationReport& b) {
              return std::tie(a.check, a.sigma, a.t, a.y0, a.driver_id) <
                     std::tie(b.check, b.sigma, b.t, b.y0, b.driver_id);
            });
  result.pass = std::all_of(result.reports.begin(), result.reports.end(),
                            [](const VerificationReport& r) {
                              return r.status != CheckStatus::fail;
                            });
  result.runtime_s = seconds_since(t0);
  return result;
}

void write_reports_json(std::ostream& out,
                        const std::vector<VerificationReport>& reports,
                        bool include_runtime) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const VerificationReport& r : reports) {
    nlohmann::ordered_json j;
    j["check"] = r.check;
    j["sigma"] = r.sigma;
    j["t"] = r.t;
    j["y0"] = r.y0;
    j["driver"] = r.driver_id;
    j["measured"] = r.measured;
    j["bound"] = r.bound;
    j["margin"] = r.margin;
    j["slack"] = r.slack;
    j["status"] = status_name(r.status);
    if (include_runtime) j["runtime_s"] = r.runtime_s;
    arr.push_back(std::move(j));
  }
  out << arr.dump(2) << '\n';
}

void write_reports_csv(std::ostream& out,
                       const std::vector<VerificationReport>& reports) {
  out.precision(17);
  out << "check,sigma,t,y0,driver,measured,bound,margin,slack,status\n";
  for (const VerificationReport& r : reports)
    out << r.check << ',' << r.sigma << ',' << r.t << ',' << r.y0 << ','
        << r.driver_id << ',' << r.measured << ',' << r.bound << ',' << r.margin
        << ',' << r.slack << ',' << status_name(r.status) << '\n';
}

}  // namespace loewner
