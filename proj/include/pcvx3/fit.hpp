#pragma once

#include <cstddef>
#include <span>

namespace pcvx3 {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square of the fit residuals
  std::size_t points = 0;
};

// Ordinary least squares y = slope * x + intercept. Needs >= 2 distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Least-squares slope of log(y) against log(x); pairs with y <= 0 or x <= 0
// are skipped.
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

}  // namespace pcvx3
