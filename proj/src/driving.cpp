#include "loewner/driving.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace loewner {

namespace {

constexpr double kDomainSlack = 1e-9;

double interp_knots(const std::vector<DriverSample>& knots, double t) {
  // knots sorted by t; t inside [front.t, back.t]
  auto it = std::upper_bound(knots.begin(), knots.end(), t,
                             [](double v, const DriverSample& k) { return v < k.t; });
  if (it == knots.begin()) return knots.front().value;
  if (it == knots.end()) return knots.back().value;
  const DriverSample& hi = *it;
  const DriverSample& lo = *(it - 1);
  const double u = (t - lo.t) / (hi.t - lo.t);
  return lo.value + u * (hi.value - lo.value);
}

void check_knots(const std::vector<DriverSample>& knots, double horizon) {
  if (knots.empty()) throw std::invalid_argument("driver: empty sample set");
  if (knots.front().t != 0.0)
    throw std::invalid_argument("driver: first sample must be at t = 0");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i].t > knots[i - 1].t))
      throw std::invalid_argument("driver: samples must be strictly increasing in t");
  if (knots.back().t < horizon * (1.0 - kDomainSlack))
    throw std::invalid_argument("driver: samples do not cover [0, T]");
}

}  // namespace

const char* family_name(DriverFamily f) {
  switch (f) {
    case DriverFamily::sqrt_forward: return "sqrt_forward";
    case DriverFamily::sqrt_backward: return "sqrt_backward";
    case DriverFamily::constant: return "constant";
    case DriverFamily::piecewise_linear: return "piecewise_linear";
    case DriverFamily::sampled: return "sampled";
  }
  return "?";
}

Driver::Driver(DriverFamily family, double sigma, double horizon,
               std::vector<DriverSample> samples)
    : family_(family), sigma_(sigma), horizon_(horizon), nominal_(0), shift_(0),
      knots_(std::move(samples)), id_(family_name(family)) {
  if (sigma < 0) throw std::invalid_argument("driver: negative sigma");
  if (!(horizon > 0)) throw std::invalid_argument("driver: horizon must be positive");
  switch (family_) {
    case DriverFamily::sqrt_forward:
      nominal_ = sigma_;  // |sqrt(t) - sqrt(s)| <= sqrt(t - s), tight at s = 0
      break;
    case DriverFamily::sqrt_backward:
      // stored as sigma * (sqrt(T-t) - sqrt(T)) so that lambda(0) = 0
      shift_ = sigma_ * std::sqrt(horizon_);
      nominal_ = sigma_;
      break;
    case DriverFamily::constant:
      nominal_ = 0;
      break;
    case DriverFamily::piecewise_linear:
    case DriverFamily::sampled: {
      check_knots(knots_, horizon_);
      shift_ = knots_.front().value;
      if (shift_ != 0.0)
        for (auto& k : knots_) k.value -= shift_;
      shift_ = 0.0;
      nominal_ = piecewise_linear_seminorm(knots_);
      break;
    }
  }
}

double Driver::eval(double t) const {
  const double slack = kDomainSlack * std::max(1.0, horizon_);
  if (t < -slack || t > horizon_ + slack)
    throw std::domain_error("driver: evaluation outside [0, T]");
  t = std::clamp(t, 0.0, horizon_);
  switch (family_) {
    case DriverFamily::sqrt_forward: return sigma_ * std::sqrt(t);
    case DriverFamily::sqrt_backward:
      return sigma_ * std::sqrt(horizon_ - t) - shift_;
    case DriverFamily::constant: return 0.0;
    case DriverFamily::piecewise_linear:
    case DriverFamily::sampled: return interp_knots(knots_, t);
  }
  return 0.0;
}

ReverseDriver::ReverseDriver(Driver base, double horizon)
    : base_(std::move(base)), horizon_(horizon) {
  if (!(horizon > 0) || horizon > base_.horizon() * (1.0 + kDomainSlack))
    throw std::domain_error("reverse_driver: horizon outside (0, T]");
  horizon_ = std::min(horizon_, base_.horizon());
}

double ReverseDriver::eval(double s) const {
  const double slack = kDomainSlack * std::max(1.0, horizon_);
  if (s < -slack || s > horizon_ + slack)
    throw std::domain_error("reverse_driver: evaluation outside [0, t]");
  s = std::clamp(s, 0.0, horizon_);
  return base_.eval(horizon_) - base_.eval(horizon_ - s);
}

Driver make_driver(DriverFamily family, double sigma, double horizon,
                   std::vector<DriverSample> samples) {
  return Driver(family, sigma, horizon, std::move(samples));
}

ReverseDriver reverse_driver(const Driver& d, double horizon) {
  return ReverseDriver(d, horizon);
}

namespace {

template <typename F>
double grid_seminorm(const F& f, double horizon, int n) {
  if (n < 2) throw std::invalid_argument("lip_seminorm: grid size must be >= 2");
  std::vector<double> t(n), v(n);
  for (int i = 0; i < n; ++i) {
    t[i] = horizon * static_cast<double>(i) / (n - 1);
    v[i] = f(t[i]);
  }
  double best = 0;
  auto consider = [&](int i, int j) {
    const double q = std::abs(v[j] - v[i]) / std::sqrt(t[j] - t[i]);
    if (q > best) best = q;
  };
  if (n <= 4096) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) consider(i, j);
  } else {
    for (int g = 1; g < n; g *= 2)
      for (int i = 0; i + g < n; ++i) consider(i, i + g);
  }
  return best;
}

}  // namespace

double lip_seminorm(const Driver& d, int grid_size) {
  return grid_seminorm([&](double t) { return d.eval(t); }, d.horizon(), grid_size);
}

double lip_seminorm(const ReverseDriver& d, int grid_size) {
  return grid_seminorm([&](double s) { return d.eval(s); }, d.horizon(), grid_size);
}

double piecewise_linear_seminorm(const std::vector<DriverSample>& knots) {
  // The difference quotient (v(t) - v(s)) / sqrt(t - s) restricted to a pair
  // of linear pieces has no interior stationary point unless the slopes
  // match, and in that degenerate case the value still peaks on the
  // rectangle boundary. So the supremum is attained with at least one point
  // at a knot; the free point is then either a knot or the single stationary
  // point of the one-variable restriction.
  const int n = static_cast<int>(knots.size());
  if (n == 1) return 0.0;
  double best = 0;
  auto quot = [&](double ta, double va, double tb, double vb) {
    if (!(tb > ta)) return 0.0;
    return std::abs(vb - va) / std::sqrt(tb - ta);
  };
  auto value_at = [&](int piece, double t) {
    const auto& a = knots[piece];
    const auto& b = knots[piece + 1];
    return a.value + (b.value - a.value) * (t - a.t) / (b.t - a.t);
  };
  for (int j = 0; j < n; ++j) {
    const double s = knots[j].t, vs = knots[j].value;
    // knot j against every piece to the right
    for (int a = j; a + 1 < n; ++a) {
      const double ta = knots[a].t, tb = knots[a + 1].t;
      const double m = (knots[a + 1].value - knots[a].value) / (tb - ta);
      best = std::max(best, quot(s, vs, tb, knots[a + 1].value));
      if (m != 0.0) {
        // stationary point of (v(t) - vs)/sqrt(t - s) on this piece
        const double tstar = 2.0 * s - ta + (knots[a].value - vs) / m;
        if (tstar > std::max(ta, s) && tstar < tb)
          best = std::max(best, quot(s, vs, tstar, value_at(a, tstar)));
      }
    }
    // knot j against every piece to the left (j as the right endpoint)
    for (int a = 0; a + 1 <= j; ++a) {
      const double ta = knots[a].t, tb = knots[a + 1].t;
      const double m = (knots[a + 1].value - knots[a].value) / (tb - ta);
      if (m != 0.0) {
        const double sstar = 2.0 * s - ta + (knots[a].value - vs) / m;
        if (sstar > ta && sstar < std::min(tb, s))
          best = std::max(best, quot(sstar, value_at(a, sstar), s, vs));
      }
    }
  }
  return best;
}

Driver load_driver_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("driver csv: empty input");
  // tolerate a UTF-8 BOM and whitespace around the header
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::string header = line;
  header.erase(std::remove_if(header.begin(), header.end(),
                              [](unsigned char c) { return std::isspace(c); }),
               header.end());
  if (header != "t,lambda")
    throw std::invalid_argument("driver csv: expected header 't,lambda'");
  std::vector<DriverSample> samples;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b))
      throw std::invalid_argument("driver csv: malformed row at line " +
                                  std::to_string(lineno));
    samples.push_back({std::stod(a), std::stod(b)});
  }
  if (samples.empty()) throw std::invalid_argument("driver csv: no samples");
  const double horizon = samples.back().t;
  return Driver(DriverFamily::sampled, 0.0, horizon, std::move(samples));
}

Driver load_driver_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("driver csv: cannot open " + path);
  return load_driver_csv(in);
}

}  // namespace loewner
