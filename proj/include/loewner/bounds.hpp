#ifndef LOEWNER_BOUNDS_HPP
#define LOEWNER_BOUNDS_HPP

#include <optional>
#include <string>
#include <vector>

namespace loewner {

/// Principal branch of the Lambert W function on [0, inf).
/// Satisfies w * exp(w) = x to relative residual 1e-14.
double lambert_w(double x);

/// Root p > sigma/(4-sigma) of
///   exp(x) = sqrt(16 - sigma^2) / sqrt(16 x^2 - sigma^2 (x+1)^2),
/// the transcendental equation behind the cone constant. Valid for
/// 0 < sigma < 4.
double p_of_sigma(double sigma);

/// Cone constant L = sigma / sqrt(16 - sigma^2) * (1 + p) * exp(p) valid on
/// the full range 0 < sigma < 4. L ~ 0.6908 * sigma as sigma -> 0.
double big_l(double sigma);

/// sigma / sqrt(16 - sigma^2).
double k_of_sigma(double sigma);

struct ConeBound {
  double m = 0;                    // min of the two upper bounds where both exist
  double k = 0;                    // sigma / sqrt(16 - sigma^2)
  std::optional<double> part_ii;   // pi*sigma/sqrt(64 - pi^2 sigma^2), sigma < 8/pi
  double cone_lower = 0;           // tan(pi*sigma / (2 sqrt(16 + sigma^2)))
};

ConeBound cone_bound(double sigma);

struct HolderExponents {
  double alpha_cap = 0;                 // 1 / (1 + m^2)
  std::optional<double> alpha_cor2;     // 1 - pi^2 sigma^2 / 64, sigma < 8/pi
  double alpha_spiral_ref = 0;          // 1 - sigma^2/16; conjectured sharp, not a bound
};

HolderExponents holder_exponents(double sigma);

struct WindingBound {
  double value = 0;  // a*log(y^2 + 4t) + b*log(1/y)
  double a = 0;
  double b = 0;
  bool sharp = false;  // true when the sigma < 4*sqrt(2)/pi coefficients apply
};

WindingBound winding_bound(double sigma, double t, double y);

/// Closed-form solution Z_s = sigma*sqrt(s)/2 + z0*exp(W(sigma*sqrt(s)/(2 z0)))
/// of dZ = sigma d sqrt(s) - (sigma^2/8)/Z ds, Z_0 = z0 > 0.
double comparison_z(double z0, double sigma, double s);

/// H_{x0}(x) = (sigma*sqrt(x)/2 + x0*exp(W(sigma*sqrt(x)/(2 x0))))^2.
double h_func(double x0, double sigma, double x);

/// M(kappa): the threshold with H_{x0}(x) <= kappa*x for x >= M, obtained by
/// inverting sigma^2/4 * (1 + 1/W)^2 = kappa analytically. kappa in (sigma^2/4, 4).
double m_of_kappa(double x0, double sigma, double kappa);

/// Envelope max(M/y0^2, 1/(4-kappa)) * (y0^2 + s) dominating the solution of
/// dV/ds = H_{x0}(V)/(4(y0^2+s)) + 1/4, V_0 = 0.
double v_envelope(double x0, double y0, double sigma, double kappa, double s);

struct QuasiarcProfile {
  double k = 0;             // 3*sigma
  double alpha_reparam = 0; // 1 / (1 + k^2)
};

/// Present only for sigma < 1/3, where the 3*sigma-quasiarc statement applies.
std::optional<QuasiarcProfile> quasiarc_profile(double sigma);

/// Parameter bundle for the scalar comparison ODE and its envelope machinery.
struct ComparisonModel {
  double z0 = 1;     // comparison ODE start, > 0
  double sigma = 1;  // in (0, 4)
  double x0 = 1;     // cone-exit abscissa, > 0
  double y0 = 1;     // cone-exit height, > 0
  double kappa = 2;  // in (sigma^2/4, 4)

  double c() const { return sigma * sigma / 8.0; }
  double big_m() const { return m_of_kappa(x0, sigma, kappa); }
  void validate() const;
};

/// Every sigma-dependent bound of the calculus in one record.
struct BoundProfile {
  double sigma = 0;
  double p = 0;
  double L = 0;
  double K = 0;
  double m = 0;
  double xi = 0;  // (m^2 - 1) / (m^2 + 1)
  double alpha_cap = 0;
  std::optional<double> alpha_cor2;
  double alpha_spiral_ref = 0;
  double cone_lower = 0;
  double a_wind = 0;
  double b_wind = 0;
  std::optional<double> k_quasiarc;
  std::optional<double> alpha_reparam;
};

BoundProfile bound_profile(double sigma);

/// CSV table of profiles, header
/// sigma,p,L,K,m,alpha_cap,alpha_cor2,cone_lower,a_wind,b_wind,k
/// with empty cells where a quantity is undefined.
std::string bound_table_csv(const std::vector<double>& sigmas);

}  // namespace loewner

#endif
