#ifndef LOEWNER_FLOW_HPP
#define LOEWNER_FLOW_HPP

#include <complex>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "loewner/driving.hpp"

namespace loewner {

using Complex = std::complex<double>;

/// A point of the flow hit the singularity before the requested horizon.
struct swallowed_error : std::runtime_error {
  explicit swallowed_error(const std::string& what) : std::runtime_error(what) {}
};

/// The adaptive stepper ran out of its substep budget.
struct step_budget_error : std::runtime_error {
  explicit step_budget_error(const std::string& what) : std::runtime_error(what) {}
};

enum class DerivMode {
  exact_per_substep,   // multiply exact per-substep factors
  integral_quadrature  // trapezoid accumulation of the derivative integrals
};

struct SolverOptions {
  double tol = 1e-3;             // relative step tolerance, ds <= tol * Y^2 / 4
  long max_substeps = 10'000'000;
  double y_tip = 0;              // 0 -> default 1e-4 * sqrt(t)
  bool richardson = true;        // tip extrapolation over y_tip and y_tip/2
  DerivMode deriv_mode = DerivMode::exact_per_substep;
  double swallow_tol = 1e-9;     // forward solver: singularity proximity
  bool allow_supercritical = false;  // permit nominal seminorm >= 4
  int threads = 0;               // 0 -> all available (capped by LOEWNER_THREADS)

  void validate() const;
};

struct FlowState {
  double s = 0;
  double x = 0;
  double y = 0;
  double log_abs_deriv = 0;
  double arg_deriv = 0;  // accumulated continuously, never reduced mod 2*pi

  Complex point() const { return {x, y}; }
  double w() const { return x / y; }
};

/// Record of one reverse-flow solve started at i*y0 up to flow time `horizon`.
struct FlowTrajectory {
  double y0 = 0;
  double horizon = 0;
  std::vector<FlowState> states;

  const FlowState& back() const { return states.back(); }
  Complex endpoint() const { return states.back().point(); }
  Complex endpoint_deriv() const;
  double sup_abs_w() const;
};

/// Trajectory in the time scale where Y(theta(s))^2 - y0^2 = s.
struct ReparamTrajectory {
  double y0 = 0;
  std::vector<double> s;       // new time, = Y^2 - y0^2 at the source samples
  std::vector<double> theta;   // original flow time
  std::vector<double> x;       // X(theta(s))
  std::vector<double> y_tilde; // sqrt(y0^2 + s), equals Y(theta(s))
  std::vector<double> w_tilde; // x / y_tilde
};

struct CurveSample {
  double t = 0;
  Complex gamma;
  double err = 0;  // |value(y_tip) - value(y_tip/2)|; NaN if extrapolation off
};

struct TracedCurve {
  double y_tip = 0;  // requested tip height (before per-time scaling)
  std::vector<CurveSample> samples;
};

/// One elementary substep of the reverse flow: the exact map
/// h -> sqrt(h^2 - 4 ds) + dbeta with the positive-imaginary-part branch,
/// derivative factor h / sqrt(h^2 - 4 ds) at the pre-step point.
FlowState step_elementary(const FlowState& state, double dbeta, double ds);

/// Integrate the reverse flow for driver `d` at horizon `t` from i*y0.
FlowTrajectory solve_reverse(const Driver& d, double t, double y0,
                             const SolverOptions& opts = {});

/// Reverse solve from an arbitrary start z in the upper half-plane.
FlowTrajectory solve_reverse_from(const Driver& d, double t, Complex z,
                                  const SolverOptions& opts = {});

/// Trace gamma(t_i) = lim_{y->0} f_{t_i}(lambda_{t_i} + i y), one independent
/// reverse solve per output time (two with Richardson extrapolation).
/// Runs time points in parallel via OpenMP when opts.threads != 1.
TracedCurve trace_curve(const Driver& d, const std::vector<double>& times,
                        const SolverOptions& opts = {});

/// Serial reference path: identical arithmetic, plain loop. Kept for testing
/// and benchmarked against the parallel version.
TracedCurve trace_curve_serial(const Driver& d, const std::vector<double>& times,
                               const SolverOptions& opts = {});

/// Invert s -> Y_s^2 - y0^2 along a trajectory.
ReparamTrajectory reparametrize(const FlowTrajectory& traj);

/// hat{h}_t'(i y) = exp(log_abs_deriv + i arg_deriv) from an accumulated solve.
Complex spatial_derivative(const Driver& d, double t, double y,
                           const SolverOptions& opts = {});

/// Forward map g_t(z) by composition of exact slit maps with the driver frozen
/// at substep midpoints. Throws swallowed_error when z is absorbed before t.
Complex solve_forward(const Driver& d, Complex z, double t,
                      const SolverOptions& opts = {});

/// Trapezoid quadrature of the two derivative integrals over recorded states.
/// Returns {log|h'|, arg h'}; independent cross-check of the accumulated values.
struct DerivQuadrature {
  double log_abs = 0;
  double arg = 0;
};
DerivQuadrature derivative_quadrature(const FlowTrajectory& traj);

/// CSV export, header "s,x,y,w,logderiv,argderiv".
void write_trajectory_csv(std::ostream& out, const FlowTrajectory& traj);

/// CSV export, header "t,re,im,ratio,err".
void write_curve_csv(std::ostream& out, const TracedCurve& curve);

int effective_threads(const SolverOptions& opts);

}  // namespace loewner

#endif
