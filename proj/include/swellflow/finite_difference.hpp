#ifndef SWELLFLOW_FINITE_DIFFERENCE_HPP
#define SWELLFLOW_FINITE_DIFFERENCE_HPP

#include <cmath>
#include <cstdlib>

namespace swellflow {

/// Step policy for central differences: h = max(rel_step*|x|, abs_step),
/// one level of Richardson extrapolation by default.  The relative step is
/// wide enough that roundoff in f stays below the extrapolated truncation.
struct FdOptions {
  double rel_step = 1e-5;
  double abs_step = 1e-9;
  bool richardson = true;
};

struct FdEstimate {
  double value = 0.0;
  double truncation_estimate = 0.0;  // |D(h/2) - D(h)| / 3
};

inline double fd_step(double x, const FdOptions& opt) {
  return std::max(opt.rel_step * std::abs(x), opt.abs_step);
}

/// Central-difference derivative of a scalar callable at x.
template <class F>
FdEstimate central_derivative_est(F&& f, double x, FdOptions opt = {}) {
  const double h = fd_step(x, opt);
  auto slope = [&](double step) { return (f(x + step) - f(x - step)) / (2.0 * step); };
  const double d1 = slope(h);
  if (!opt.richardson) return {d1, std::abs(d1) * opt.rel_step};
  const double d2 = slope(h / 2.0);
  return {(4.0 * d2 - d1) / 3.0, std::abs(d2 - d1) / 3.0};
}

template <class F>
double central_derivative(F&& f, double x, FdOptions opt = {}) {
  return central_derivative_est(f, x, opt).value;
}

}  // namespace swellflow

#endif
