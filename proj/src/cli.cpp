#include "loewner/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "loewner/driving.hpp"
#include "loewner/verify.hpp"

namespace loewner {

namespace {

std::vector<double> parse_sigma_grid(const std::string& spec) {
  // "start:stop:step", endpoints inclusive within half a step
  std::istringstream in(spec);
  std::string a, b, c;
  if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, c))
    throw std::invalid_argument("sigma grid: expected start:stop:step");
  const double start = std::stod(a), stop = std::stod(b), step = std::stod(c);
  if (!(step > 0)) throw std::invalid_argument("sigma grid: step must be positive");
  std::vector<double> out;
  for (double s = start; s <= stop + step / 2; s += step) out.push_back(s);
  return out;
}

Driver driver_from_flags(const std::string& family, double sigma, double t_max,
                         const std::string& csv_path) {
  if (!csv_path.empty()) return load_driver_csv(csv_path);
  if (family == "sqrt")
    return make_driver(DriverFamily::sqrt_forward, sigma, t_max);
  if (family == "sqrt-back" || family == "spiral") {
    Driver d = make_driver(DriverFamily::sqrt_backward, sigma, t_max);
    d.set_id("spiral");
    return d;
  }
  if (family == "const" || family == "constant")
    return make_driver(DriverFamily::constant, 0.0, t_max);
  throw std::invalid_argument("unknown family '" + family +
                              "' (expected sqrt | sqrt-back | const)");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  return out;
}

nlohmann::ordered_json curve_json(const TracedCurve& curve) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const CurveSample& cs : curve.samples) {
    nlohmann::ordered_json j;
    j["t"] = cs.t;
    j["re"] = cs.gamma.real();
    j["im"] = cs.gamma.imag();
    j["ratio"] = cs.gamma.real() / cs.gamma.imag();
    j["err"] = cs.err;
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace

std::string curve_svg(const TracedCurve& curve, double cone_m, int width,
                      int height) {
  double xmax = 1e-12, ymax = 1e-12;
  for (const CurveSample& cs : curve.samples) {
    xmax = std::max(xmax, std::abs(cs.gamma.real()));
    ymax = std::max(ymax, cs.gamma.imag());
  }
  // symmetric about the imaginary axis so the cone apex sits at bottom center;
  // uniform scale keeps slopes exact in screen coordinates
  xmax = std::max(xmax, cone_m * ymax) * 1.05;
  ymax *= 1.05;
  const double margin = 20;
  const double scale =
      std::min((width - 2 * margin) / (2 * xmax), (height - 2 * margin) / ymax);
  auto X = [&](double x) { return width / 2.0 + x * scale; };
  auto Y = [&](double y) { return height - margin - y * scale; };

  std::ostringstream svg;
  svg.precision(17);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // real axis
  svg << "<line x1=\"" << X(-xmax) << "\" y1=\"" << Y(0) << "\" x2=\"" << X(xmax)
      << "\" y2=\"" << Y(0) << "\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  // cone rays |Re z| = m * Im z from the origin
  const double ytop = ymax / 1.05;
  for (int sgn : {-1, 1})
    svg << "<line class=\"cone\" x1=\"" << X(0) << "\" y1=\"" << Y(0) << "\" x2=\""
        << X(sgn * cone_m * ytop) << "\" y2=\"" << Y(ytop)
        << "\" stroke=\"#d55\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>\n";
  svg << "<polyline fill=\"none\" stroke=\"#275\" stroke-width=\"1.5\" points=\"";
  svg << X(0) << ',' << Y(0) << ' ';  // gamma(0) = 0
  for (const CurveSample& cs : curve.samples)
    svg << X(cs.gamma.real()) << ',' << Y(cs.gamma.imag()) << ' ';
  svg << "\"/>\n</svg>\n";
  return svg.str();
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Loewner evolution for Lip-1/2 drivers: traces, bounds, verification"};
  app.require_subcommand(1);

  std::string family = "sqrt", csv_path, out_path, format = "csv", config = "default";
  double sigma = 1.0, t_max = 1.0, y_tip = 0.0, tol = 1e-3;
  int samples = 200;
  std::uint64_t seed = 1;
  bool allow_super = false;

  auto add_driver_flags = [&](CLI::App* cmd) {
    cmd->add_option("--family", family, "driver family: sqrt | sqrt-back | const");
    cmd->add_option("--driver-csv", csv_path, "sampled driver CSV (t,lambda)");
    cmd->add_option("--sigma", sigma, "Lip-1/2 seminorm scale");
    cmd->add_option("--t-max", t_max, "capacity-time horizon");
    cmd->add_option("--y-tip", y_tip, "tip height (default 1e-4 sqrt(t))");
    cmd->add_option("--tol", tol, "relative step tolerance");
    cmd->add_flag("--allow-supercritical", allow_super,
                  "permit nominal seminorm >= 4");
  };

  CLI::App* trace = app.add_subcommand("trace", "trace the curve to CSV/JSON");
  add_driver_flags(trace);
  trace->add_option("--samples", samples, "number of output times");
  trace->add_option("--out", out_path, "output path")->required();
  trace->add_option("--format", format, "csv | json");

  CLI::App* bounds_cmd = app.add_subcommand("bounds", "bound table over a sigma grid");
  std::string sigma_grid = "0.5:3.5:0.5";
  bounds_cmd->add_option("--sigma-grid", sigma_grid, "start:stop:step");
  bounds_cmd->add_option("--out", out_path, "output path")->required();

  CLI::App* verify_cmd = app.add_subcommand("verify", "run the verification suite");
  verify_cmd->add_option("--config", config, "sweep config path or 'default'");
  verify_cmd->add_option("--out", out_path, "JSON report path (CSV written alongside)");
  verify_cmd->add_option("--seed", seed, "random-driver seed");
  verify_cmd->add_option("--tol", tol, "relative step tolerance");

  CLI::App* plot = app.add_subcommand("plot", "SVG plot with the cone overlay");
  add_driver_flags(plot);
  plot->add_option("--samples", samples, "number of output times");
  plot->add_option("--out", out_path, "output SVG path")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  try {
    SolverOptions opts;
    opts.tol = tol;
    opts.y_tip = y_tip;
    opts.allow_supercritical = allow_super;

    if (trace->parsed() || plot->parsed()) {
      const Driver d = driver_from_flags(family, sigma, t_max, csv_path);
      const double horizon = d.horizon();
      std::vector<double> times(samples);
      for (int i = 0; i < samples; ++i)
        times[i] = horizon * (i + 1) / static_cast<double>(samples);
      const TracedCurve curve = trace_curve(d, times, opts);
      if (plot->parsed()) {
        const double s = d.nominal_seminorm();
        const double m = (s > 0 && s < 4) ? cone_bound(s).m : 0.0;
        open_out(out_path) << curve_svg(curve, m);
      } else if (format == "json") {
        open_out(out_path) << curve_json(curve).dump(2) << '\n';
      } else {
        auto out = open_out(out_path);
        write_curve_csv(out, curve);
      }
      return 0;
    }

    if (bounds_cmd->parsed()) {
      open_out(out_path) << bound_table_csv(parse_sigma_grid(sigma_grid));
      return 0;
    }

    if (verify_cmd->parsed()) {
      SweepConfig cfg = load_sweep_config(config);
      cfg.seed = seed;
      cfg.solver.tol = tol;
      const SuiteResult result = run_suite(cfg);
      int passed = 0, failed = 0, inconclusive = 0;
      for (const VerificationReport& r : result.reports) {
        if (r.status == CheckStatus::pass) ++passed;
        else if (r.status == CheckStatus::fail) ++failed;
        else ++inconclusive;
        if (r.status == CheckStatus::fail)
          std::cout << "FAIL " << r.check << " sigma=" << r.sigma << " t=" << r.t
                    << " y0=" << r.y0 << " driver=" << r.driver_id
                    << " measured=" << r.measured << " bound=" << r.bound << '\n';
      }
      std::cout << (result.pass ? "PASS" : "FAIL") << ": " << passed << " passed, "
                << failed << " failed, " << inconclusive << " inconclusive in "
                << result.runtime_s << " s\n";
      if (!out_path.empty()) {
        auto json_out = open_out(out_path);
        write_reports_json(json_out, result.reports);
        std::string csv_out = out_path;
        const auto dot = csv_out.find_last_of('.');
        csv_out = (dot == std::string::npos ? csv_out : csv_out.substr(0, dot)) +
                  "_summary.csv";
        auto out = open_out(csv_out);
        write_reports_csv(out, result.reports);
      }
      return result.pass ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace loewner
