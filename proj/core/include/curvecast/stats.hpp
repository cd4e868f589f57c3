#pragma once

namespace curvecast {

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

/// Chi-square CDF with df degrees of freedom.
double chi_squared_cdf(double x, double df);

}  // namespace curvecast
