#include "loewner/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace loewner {

namespace {
constexpr double kPi = std::numbers::pi;

void require_sigma_open(double sigma) {
  if (!(sigma > 0) || !(sigma < 4))
    throw std::domain_error("bounds: sigma must lie in (0, 4)");
}
}  // namespace

double lambert_w(double x) {
  if (x < 0) throw std::domain_error("lambert_w: principal branch needs x >= 0");
  if (x == 0) return 0;
  // Halley iteration from w0 = log(1 + x); cubic convergence on [0, inf).
  double w = std::log1p(x);
  for (int it = 0; it < 60; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
    const double step = f / denom;
    w -= step;
    if (std::abs(f) <= 1e-15 * std::max(1.0, x) || std::abs(step) <= 1e-17 * std::abs(w))
      break;
  }
  return w;
}

namespace {

// Log-form residual of the defining equation:
//   F(x) = x + log sqrt(16 x^2 - sigma^2 (x+1)^2) - log sqrt(16 - sigma^2),
// strictly increasing on (sigma/(4-sigma), inf) with a single zero at p.
double p_residual(double x, double sigma) {
  const double inner = 16.0 * x * x - sigma * sigma * (x + 1.0) * (x + 1.0);
  if (!(inner > 0)) return -std::numeric_limits<double>::infinity();
  return x + 0.5 * std::log(inner) - 0.5 * std::log(16.0 - sigma * sigma);
}

}  // namespace

double p_of_sigma(double sigma) {
  require_sigma_open(sigma);
  const double left = sigma / (4.0 - sigma);
  double lo = left * (1.0 + 1e-9) + 1e-300;
  double hi = std::max(2.0 * lo, lo + 1.0);
  while (p_residual(hi, sigma) < 0) {
    hi *= 2.0;
    if (!std::isfinite(hi)) throw std::runtime_error("p_of_sigma: bracket failed");
  }
  if (p_residual(lo, sigma) > 0) {
    // the residual is already positive a relative 1e-9 away from the pole;
    // the root is pinched against the left endpoint
    hi = lo;
    lo = left;
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (p_residual(mid, sigma) < 0)
      lo = mid;
    else
      hi = mid;
  }
  double x = 0.5 * (lo + hi);
  // one Newton polish on the log-form residual
  const double inner = 16.0 * x * x - sigma * sigma * (x + 1.0) * (x + 1.0);
  if (inner > 0) {
    const double df = 1.0 + (16.0 * x - sigma * sigma * (x + 1.0)) / inner;
    const double step = p_residual(x, sigma) / df;
    const double xn = x - step;
    if (xn > left && std::abs(p_residual(xn, sigma)) <= std::abs(p_residual(x, sigma)))
      x = xn;
  }
  return x;
}

double k_of_sigma(double sigma) {
  require_sigma_open(sigma);
  return sigma / std::sqrt(16.0 - sigma * sigma);
}

double big_l(double sigma) {
  require_sigma_open(sigma);
  const double p = p_of_sigma(sigma);
  // exp(log ...) keeps the large-p regime from overflowing prematurely
  return std::exp(std::log(sigma) - 0.5 * std::log(16.0 - sigma * sigma) +
                  std::log1p(p) + p);
}

ConeBound cone_bound(double sigma) {
  require_sigma_open(sigma);
  ConeBound out;
  out.k = k_of_sigma(sigma);
  const double L = big_l(sigma);
  if (sigma < 8.0 / kPi)
    out.part_ii = kPi * sigma / std::sqrt(64.0 - kPi * kPi * sigma * sigma);
  out.m = out.part_ii ? std::min(L, *out.part_ii) : L;
  out.cone_lower = std::tan(kPi * sigma / (2.0 * std::sqrt(16.0 + sigma * sigma)));
  return out;
}

HolderExponents holder_exponents(double sigma) {
  require_sigma_open(sigma);
  const ConeBound cb = cone_bound(sigma);
  HolderExponents out;
  out.alpha_cap = 1.0 / (1.0 + cb.m * cb.m);
  if (sigma < 8.0 / kPi)
    out.alpha_cor2 = 1.0 - kPi * kPi * sigma * sigma / 64.0;
  out.alpha_spiral_ref = 1.0 - sigma * sigma / 16.0;
  return out;
}

WindingBound winding_bound(double sigma, double t, double y) {
  if (!(y > 0) || !(t > 0))
    throw std::domain_error("winding_bound: need y > 0 and t > 0");
  if (sigma < 0) throw std::domain_error("winding_bound: negative sigma");
  WindingBound out;
  if (sigma < 4.0 * std::numbers::sqrt2 / kPi) {
    out.a = kPi * sigma * std::sqrt(64.0 - kPi * kPi * sigma * sigma) / 64.0;
    out.b = 2.0 * out.a;
    out.sharp = true;
  } else {
    out.a = 1.0;
    out.b = 2.0;
  }
  out.value = out.a * std::log(y * y + 4.0 * t) + out.b * std::log(1.0 / y);
  return out;
}

double comparison_z(double z0, double sigma, double s) {
  if (!(z0 > 0)) throw std::domain_error("comparison_z: z0 must be positive");
  if (s < 0) throw std::domain_error("comparison_z: s must be nonnegative");
  return sigma * std::sqrt(s) / 2.0 +
         z0 * std::exp(lambert_w(sigma * std::sqrt(s) / (2.0 * z0)));
}

double h_func(double x0, double sigma, double x) {
  if (!(x0 > 0)) throw std::domain_error("h_func: x0 must be positive");
  if (!(x > 0)) throw std::domain_error("h_func: x must be positive");
  const double r = sigma * std::sqrt(x) / 2.0 +
                   x0 * std::exp(lambert_w(sigma * std::sqrt(x) / (2.0 * x0)));
  return r * r;
}

double m_of_kappa(double x0, double sigma, double kappa) {
  if (!(x0 > 0)) throw std::domain_error("m_of_kappa: x0 must be positive");
  if (!(kappa > sigma * sigma / 4.0) || !(kappa < 4.0))
    throw std::domain_error("m_of_kappa: kappa must lie in (sigma^2/4, 4)");
  // invert sigma^2/4 * (1 + 1/W)^2 = kappa:  W = sigma / (2 sqrt(kappa) - sigma)
  const double w = sigma / (2.0 * std::sqrt(kappa) - sigma);
  const double root_m = 2.0 * x0 / sigma * w * std::exp(w);
  return root_m * root_m;
}

double v_envelope(double x0, double y0, double sigma, double kappa, double s) {
  if (!(y0 > 0)) throw std::domain_error("v_envelope: y0 must be positive");
  if (s < 0) throw std::domain_error("v_envelope: s must be nonnegative");
  const double M = m_of_kappa(x0, sigma, kappa);
  return std::max(M / (y0 * y0), 1.0 / (4.0 - kappa)) * (y0 * y0 + s);
}

std::optional<QuasiarcProfile> quasiarc_profile(double sigma) {
  if (sigma < 0) throw std::domain_error("quasiarc_profile: negative sigma");
  if (sigma >= 1.0 / 3.0) return std::nullopt;
  QuasiarcProfile q;
  q.k = 3.0 * sigma;
  q.alpha_reparam = 1.0 / (1.0 + q.k * q.k);
  return q;
}

void ComparisonModel::validate() const {
  if (!(z0 > 0)) throw std::domain_error("comparison model: z0 must be positive");
  if (!(sigma > 0) || !(sigma < 4))
    throw std::domain_error("comparison model: sigma must lie in (0, 4)");
  if (!(x0 > 0) || !(y0 > 0))
    throw std::domain_error("comparison model: x0, y0 must be positive");
  if (!(kappa > sigma * sigma / 4.0) || !(kappa < 4.0))
    throw std::domain_error("comparison model: kappa outside (sigma^2/4, 4)");
}

BoundProfile bound_profile(double sigma) {
  require_sigma_open(sigma);
  BoundProfile bp;
  bp.sigma = sigma;
  bp.p = p_of_sigma(sigma);
  bp.L = big_l(sigma);
  const ConeBound cb = cone_bound(sigma);
  bp.K = cb.k;
  bp.m = cb.m;
  bp.xi = (bp.m * bp.m - 1.0) / (bp.m * bp.m + 1.0);
  const HolderExponents he = holder_exponents(sigma);
  bp.alpha_cap = he.alpha_cap;
  bp.alpha_cor2 = he.alpha_cor2;
  bp.alpha_spiral_ref = he.alpha_spiral_ref;
  bp.cone_lower = cb.cone_lower;
  const WindingBound wb = winding_bound(sigma, 1.0, 1e-2);
  bp.a_wind = wb.a;
  bp.b_wind = wb.b;
  if (auto q = quasiarc_profile(sigma)) {
    bp.k_quasiarc = q->k;
    bp.alpha_reparam = q->alpha_reparam;
  }
  return bp;
}

std::string bound_table_csv(const std::vector<double>& sigmas) {
  std::ostringstream out;
  out.precision(17);
  out << "sigma,p,L,K,m,alpha_cap,alpha_cor2,cone_lower,a_wind,b_wind,k\n";
  for (double s : sigmas) {
    const BoundProfile bp = bound_profile(s);
    out << bp.sigma << ',' << bp.p << ',' << bp.L << ',' << bp.K << ',' << bp.m
        << ',' << bp.alpha_cap << ',';
    if (bp.alpha_cor2) out << *bp.alpha_cor2;
    out << ',' << bp.cone_lower << ',' << bp.a_wind << ',' << bp.b_wind << ',';
    if (bp.k_quasiarc) out << *bp.k_quasiarc;
    out << '\n';
  }
  return out.str();
}

}  // namespace loewner
