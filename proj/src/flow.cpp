#include "loewner/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace loewner {

namespace {

// complex square root with nonnegative imaginary part
Complex sqrt_upper(Complex w) {
  Complex r = std::sqrt(w);
  if (r.imag() < 0) r = -r;
  return r;
}

double default_y_tip(const SolverOptions& opts, double t) {
  return opts.y_tip > 0 ? opts.y_tip : 1e-4 * std::sqrt(t);
}

void check_subcritical(const Driver& d, const SolverOptions& opts) {
  if (!opts.allow_supercritical && d.nominal_seminorm() >= 4.0)
    throw std::invalid_argument(
        "flow: nominal seminorm >= 4 generates no curve; "
        "set allow_supercritical to explore anyway");
}

struct StepAccum {
  Complex h;
  double log_abs = 0;
  double arg = 0;
};

// One exact elementary map; updates the derivative accumulators with the
// factor h / sqrt(h^2 - 4 ds) at the pre-step point.
inline void advance(StepAccum& a, double dbeta, double ds) {
  const Complex r = sqrt_upper(a.h * a.h - 4.0 * ds);
  a.log_abs += 0.5 * (std::log(std::norm(a.h)) - std::log(std::norm(r)));
  a.arg += std::arg(a.h / r);
  a.h = r + dbeta;
}

}  // namespace

void SolverOptions::validate() const {
  if (!(tol > 0)) throw std::invalid_argument("solver options: tol must be positive");
  if (max_substeps <= 0)
    throw std::invalid_argument("solver options: max_substeps must be positive");
  if (y_tip < 0)
    throw std::invalid_argument("solver options: y_tip must be positive (0 = auto)");
  if (!(swallow_tol > 0))
    throw std::invalid_argument("solver options: swallow_tol must be positive");
}

int effective_threads(const SolverOptions& opts) {
  int n = opts.threads;
#ifdef _OPENMP
  if (n <= 0) n = omp_get_max_threads();
#else
  if (n <= 0) n = 1;
#endif
  if (const char* cap = std::getenv("LOEWNER_THREADS")) {
    const int c = std::atoi(cap);
    if (c > 0) n = std::min(n, c);
  }
  return std::max(1, n);
}

FlowState step_elementary(const FlowState& state, double dbeta, double ds) {
  if (!(ds > 0)) throw std::invalid_argument("step_elementary: ds must be positive");
  if (!(state.y > 0)) throw std::invalid_argument("step_elementary: Y must be positive");
  StepAccum a{state.point(), state.log_abs_deriv, state.arg_deriv};
  advance(a, dbeta, ds);
  return {state.s + ds, a.h.real(), a.h.imag(), a.log_abs, a.arg};
}

namespace {

FlowTrajectory solve_reverse_impl(const Driver& d, double t, Complex z,
                                  const SolverOptions& opts, bool record) {
  opts.validate();
  check_subcritical(d, opts);
  if (!(z.imag() > 0))
    throw std::invalid_argument("solve_reverse: start point must satisfy Im z > 0");
  if (!(t > 0) || t > d.horizon() * (1.0 + 1e-9))
    throw std::domain_error("solve_reverse: horizon outside (0, T]");
  t = std::min(t, d.horizon());
  const ReverseDriver beta(d, t);

  FlowTrajectory traj;
  traj.y0 = z.imag();
  traj.horizon = t;
  if (record) {
    traj.states.reserve(
        static_cast<std::size_t>(std::min<double>(
            4.0 + std::log((z.imag() * z.imag() + 4.0 * t) / (z.imag() * z.imag())) /
                      opts.tol,
            2e7)));
    traj.states.push_back({0.0, z.real(), z.imag(), 0.0, 0.0});
  }

  StepAccum a{z, 0.0, 0.0};
  double s = 0;
  double beta_prev = 0;  // beta(0) = 0
  long steps = 0;
  const bool quad = opts.deriv_mode == DerivMode::integral_quadrature;
  // trapezoid state for the quadrature accumulation mode
  double prev_flog = 0, prev_farg = 0;
  if (quad) {
    const double n2 = std::norm(z);
    prev_flog = 2.0 * (z.real() * z.real() - z.imag() * z.imag()) / (n2 * n2);
    prev_farg = -4.0 * z.real() * z.imag() / (n2 * n2);
  }

  while (s < t) {
    if (++steps > opts.max_substeps)
      throw step_budget_error("solve_reverse: substep budget exhausted at s = " +
                              std::to_string(s));
    const double y = a.h.imag();
    double ds = opts.tol * y * y / 4.0;
    bool last = false;
    if (ds >= t - s) {
      ds = t - s;
      last = true;
    }
    const double s_next = last ? t : s + ds;
    const double dbeta = beta.eval(s_next) - beta_prev;

    if (quad) {
      const Complex r = sqrt_upper(a.h * a.h - 4.0 * ds);
      a.h = r + dbeta;
      const double n2 = std::norm(a.h);
      const double flog =
          2.0 * (a.h.real() * a.h.real() - a.h.imag() * a.h.imag()) / (n2 * n2);
      const double farg = -4.0 * a.h.real() * a.h.imag() / (n2 * n2);
      a.log_abs += 0.5 * ds * (prev_flog + flog);
      a.arg += 0.5 * ds * (prev_farg + farg);
      prev_flog = flog;
      prev_farg = farg;
    } else {
      advance(a, dbeta, ds);
    }

    beta_prev += dbeta;
    s = s_next;
    if (record) traj.states.push_back({s, a.h.real(), a.h.imag(), a.log_abs, a.arg});
  }
  if (!record) traj.states.push_back({t, a.h.real(), a.h.imag(), a.log_abs, a.arg});
  return traj;
}

}  // namespace

FlowTrajectory solve_reverse(const Driver& d, double t, double y0,
                             const SolverOptions& opts) {
  if (!(y0 > 0)) throw std::invalid_argument("solve_reverse: y0 must be positive");
  return solve_reverse_impl(d, t, Complex(0.0, y0), opts, true);
}

FlowTrajectory solve_reverse_from(const Driver& d, double t, Complex z,
                                  const SolverOptions& opts) {
  return solve_reverse_impl(d, t, z, opts, true);
}

Complex FlowTrajectory::endpoint_deriv() const {
  const FlowState& b = states.back();
  return std::polar(std::exp(b.log_abs_deriv), b.arg_deriv);
}

double FlowTrajectory::sup_abs_w() const {
  double best = 0;
  for (const FlowState& st : states) best = std::max(best, std::abs(st.x) / st.y);
  return best;
}

namespace {

CurveSample trace_one(const Driver& d, double t, const SolverOptions& opts) {
  const double y = default_y_tip(opts, t);
  CurveSample out;
  out.t = t;
  const FlowTrajectory full = solve_reverse_impl(d, t, Complex(0, y), opts, false);
  if (!opts.richardson) {
    out.gamma = full.endpoint();
    out.err = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const FlowTrajectory half = solve_reverse_impl(d, t, Complex(0, y / 2), opts, false);
  const Complex vf = full.endpoint();
  const Complex vh = half.endpoint();
  // effective error order from the measured tip derivative: the leading tip
  // error scales like y * |h'(iy)| ~ y^(1 - xi)
  double q = 1.0 + (full.back().log_abs_deriv - half.back().log_abs_deriv) /
                       std::log(2.0);
  q = std::clamp(q, 0.25, 3.0);
  out.gamma = vh + (vh - vf) / (std::pow(2.0, q) - 1.0);
  out.err = std::abs(vf - vh);
  return out;
}

}  // namespace

TracedCurve trace_curve_serial(const Driver& d, const std::vector<double>& times,
                               const SolverOptions& opts) {
  opts.validate();
  check_subcritical(d, opts);
  if (times.empty()) throw std::invalid_argument("trace_curve: empty time list");
  if (!std::is_sorted(times.begin(), times.end()))
    throw std::invalid_argument("trace_curve: times must be sorted");
  if (!(times.front() > 0) || times.back() > d.horizon() * (1.0 + 1e-9))
    throw std::domain_error("trace_curve: times must lie in (0, T]");
  TracedCurve curve;
  curve.y_tip = opts.y_tip;
  curve.samples.resize(times.size());
  for (std::size_t i = 0; i < times.size(); ++i)
    curve.samples[i] = trace_one(d, times[i], opts);
  return curve;
}

TracedCurve trace_curve(const Driver& d, const std::vector<double>& times,
                        const SolverOptions& opts) {
  const int threads = effective_threads(opts);
  if (threads == 1) return trace_curve_serial(d, times, opts);
  opts.validate();
  check_subcritical(d, opts);
  if (times.empty()) throw std::invalid_argument("trace_curve: empty time list");
  if (!std::is_sorted(times.begin(), times.end()))
    throw std::invalid_argument("trace_curve: times must be sorted");
  if (!(times.front() > 0) || times.back() > d.horizon() * (1.0 + 1e-9))
    throw std::domain_error("trace_curve: times must lie in (0, T]");
  TracedCurve curve;
  curve.y_tip = opts.y_tip;
  curve.samples.resize(times.size());
  std::exception_ptr eptr;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (long i = 0; i < static_cast<long>(times.size()); ++i) {
    try {
      curve.samples[i] = trace_one(d, times[i], opts);
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!eptr) eptr = std::current_exception();
    }
  }
  if (eptr) std::rethrow_exception(eptr);
  return curve;
}

ReparamTrajectory reparametrize(const FlowTrajectory& traj) {
  ReparamTrajectory out;
  out.y0 = traj.y0;
  const std::size_t n = traj.states.size();
  out.s.resize(n);
  out.theta.resize(n);
  out.x.resize(n);
  out.y_tilde.resize(n);
  out.w_tilde.resize(n);
  double y_prev = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const FlowState& st = traj.states[k];
    if (k > 0 && !(st.y > y_prev))
      throw std::runtime_error("reparametrize: Y not strictly increasing "
                               "(upstream solver bug)");
    y_prev = st.y;
    const double u = st.y * st.y - traj.y0 * traj.y0;
    out.s[k] = u;
    out.theta[k] = st.s;
    out.x[k] = st.x;
    out.y_tilde[k] = std::sqrt(traj.y0 * traj.y0 + u);
    out.w_tilde[k] = st.x / out.y_tilde[k];
  }
  return out;
}

Complex spatial_derivative(const Driver& d, double t, double y,
                           const SolverOptions& opts) {
  if (!(y > 0)) throw std::invalid_argument("spatial_derivative: y must be positive");
  const FlowTrajectory traj = solve_reverse(d, t, y, opts);
  return traj.endpoint_deriv();
}

Complex solve_forward(const Driver& d, Complex z, double t,
                      const SolverOptions& opts) {
  opts.validate();
  if (!(z.imag() > 0))
    throw std::invalid_argument("solve_forward: Im z must be positive");
  if (!(t > 0) || t > d.horizon() * (1.0 + 1e-9))
    throw std::domain_error("solve_forward: horizon outside (0, T]");
  t = std::min(t, d.horizon());
  const double scale = 1.0 + std::abs(z);
  Complex g = z;
  double s = 0;
  long steps = 0;
  while (s < t) {
    if (++steps > opts.max_substeps)
      throw step_budget_error("solve_forward: substep budget exhausted at t = " +
                              std::to_string(s));
    const Complex w0 = g - d.eval(s);
    const double dist2 = std::norm(w0);
    if (dist2 <= opts.swallow_tol * opts.swallow_tol * scale * scale)
      throw swallowed_error("solve_forward: point swallowed near t = " +
                            std::to_string(s));
    double ds = opts.tol * dist2 / 4.0;
    bool last = false;
    const double remaining = t - s;
    // absorb a float-scale remainder exactly; the elementary map is exact in ds
    if (ds >= remaining || remaining <= 64.0 * std::numeric_limits<double>::epsilon() * t) {
      ds = remaining;
      last = true;
    }
    const double s_next = last ? t : s + ds;
    const double ell = d.eval(std::min(0.5 * (s + s_next), t));  // frozen midpoint value
    const Complex w = g - ell;
    Complex r = sqrt_upper(w * w + 4.0 * ds);
    g = ell + r;
    s = s_next;
  }
  return g;
}

DerivQuadrature derivative_quadrature(const FlowTrajectory& traj) {
  DerivQuadrature q;
  const auto& st = traj.states;
  for (std::size_t k = 1; k < st.size(); ++k) {
    auto flog = [](const FlowState& a) {
      const double n2 = a.x * a.x + a.y * a.y;
      return 2.0 * (a.x * a.x - a.y * a.y) / (n2 * n2);
    };
    auto farg = [](const FlowState& a) {
      const double n2 = a.x * a.x + a.y * a.y;
      return -4.0 * a.x * a.y / (n2 * n2);
    };
    const double ds = st[k].s - st[k - 1].s;
    q.log_abs += 0.5 * ds * (flog(st[k - 1]) + flog(st[k]));
    q.arg += 0.5 * ds * (farg(st[k - 1]) + farg(st[k]));
  }
  return q;
}

void write_trajectory_csv(std::ostream& out, const FlowTrajectory& traj) {
  out.precision(17);
  out << "s,x,y,w,logderiv,argderiv\n";
  for (const FlowState& st : traj.states)
    out << st.s << ',' << st.x << ',' << st.y << ',' << st.w() << ','
        << st.log_abs_deriv << ',' << st.arg_deriv << '\n';
}

void write_curve_csv(std::ostream& out, const TracedCurve& curve) {
  out.precision(17);
  out << "t,re,im,ratio,err\n";
  for (const CurveSample& cs : curve.samples)
    out << cs.t << ',' << cs.gamma.real() << ',' << cs.gamma.imag() << ','
        << cs.gamma.real() / cs.gamma.imag() << ',' << cs.err << '\n';
}

}  // namespace loewner
