#pragma once

namespace subdiff {

/// Standard normal CDF Phi(x). Absolute error below 1e-12 everywhere.
double normal_cdf(double x);

/// Standard normal density phi(x).
double normal_pdf(double x);

/// Gamma function for x > 0. Throws std::domain_error otherwise.
double gamma_fn(double x);

}  // namespace subdiff
