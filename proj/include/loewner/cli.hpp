#ifndef LOEWNER_CLI_HPP
#define LOEWNER_CLI_HPP

#include <string>
#include <vector>

#include "loewner/bounds.hpp"
#include "loewner/flow.hpp"

namespace loewner {

/// Entry point behind the `loewner` binary. Exit codes: 0 success,
/// 1 I/O or verification failure, 2 usage errors.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

/// Static SVG: curve polyline with the cone |Re z| = m * Im z overlaid as two
/// rays from the origin. Upper half-plane, origin at bottom center.
std::string curve_svg(const TracedCurve& curve, double cone_m,
                      int width = 640, int height = 480);

}  // namespace loewner

#endif
