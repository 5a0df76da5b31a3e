#ifndef LOEWNER_DRIVING_HPP
#define LOEWNER_DRIVING_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace loewner {

/// Driving-function families with closed-form or piecewise-linear evaluation.
enum class DriverFamily {
  sqrt_forward,     // lambda(t) = sigma * sqrt(t)
  sqrt_backward,    // lambda(t) = sigma * (sqrt(T - t) - sqrt(T)), spiral at t = T
  constant,         // lambda == 0
  piecewise_linear, // linear interpolation through user-supplied knots
  sampled           // piecewise_linear loaded from CSV
};

const char* family_name(DriverFamily f);

struct DriverSample {
  double t;
  double value;
};

/// A Lip-1/2 driving function on [0, T] with lambda(0) = 0.
///
/// Immutable after construction; evaluation is pure and thread-safe.
class Driver {
 public:
  Driver(DriverFamily family, double sigma, double horizon,
         std::vector<DriverSample> samples = {});

  double eval(double t) const;
  double operator()(double t) const { return eval(t); }

  DriverFamily family() const { return family_; }
  double horizon() const { return horizon_; }
  double sigma() const { return sigma_; }
  /// Claimed upper bound for the Lip-1/2 seminorm of this driver.
  double nominal_seminorm() const { return nominal_; }
  const std::string& id() const { return id_; }
  Driver& set_id(std::string id) { id_ = std::move(id); return *this; }

 private:
  DriverFamily family_;
  double sigma_;
  double horizon_;
  double nominal_;
  double shift_;                      // subtracted so that lambda(0) = 0
  std::vector<DriverSample> knots_;   // piecewise families only, sorted by t
  std::string id_;
};

/// beta(s) = lambda(t) - lambda(t - s) for a fixed horizon t in (0, T].
class ReverseDriver {
 public:
  ReverseDriver(Driver base, double horizon);

  double eval(double s) const;
  double operator()(double s) const { return eval(s); }

  double horizon() const { return horizon_; }
  const Driver& base() const { return base_; }
  double nominal_seminorm() const { return base_.nominal_seminorm(); }

 private:
  Driver base_;
  double horizon_;
};

Driver make_driver(DriverFamily family, double sigma, double horizon,
                   std::vector<DriverSample> samples = {});

ReverseDriver reverse_driver(const Driver& d, double horizon);

/// Lip-1/2 seminorm measured on an n-point uniform grid over [0, T].
/// All O(n^2) pairs for n <= 4096, dyadic-gap pairs beyond.
double lip_seminorm(const Driver& d, int grid_size);

/// Same measurement for a reversed driver, grid over [0, horizon].
double lip_seminorm(const ReverseDriver& d, int grid_size);

/// Exact Lip-1/2 seminorm of the piecewise-linear interpolant through `knots`.
/// The supremum over all real pairs, not just knot pairs.
double piecewise_linear_seminorm(const std::vector<DriverSample>& knots);

/// Load a sampled driver from CSV with header "t,lambda", strictly
/// increasing t and first row at t = 0. The value column is shifted so
/// that lambda(0) = 0.
Driver load_driver_csv(std::istream& in);
Driver load_driver_csv(const std::string& path);

}  // namespace loewner

#endif
