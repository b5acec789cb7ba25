#pragma once

namespace mincop {

/// Standard normal distribution function.
double normal_cdf(double x);

/// Standard normal quantile; -inf at 0 and +inf at 1.
double normal_quantile(double p);

/// P(X <= h, Y <= k) for a standard bivariate normal pair with correlation r.
///
/// Genz's refinement of the Drezner-Wesolowsky method: Gauss-Legendre rules
/// of 6, 12 or 20 points depending on |r|, with an asymptotic expansion for
/// |r| >= 0.925. Absolute error is around 1e-15.
double bivariate_normal_cdf(double h, double k, double r);

}  // namespace mincop
