#pragma once

namespace odt {

// Regularized lower incomplete gamma P(3/2, x) = gamma(3/2, x) / Gamma(3/2).
// Closed form: erf(sqrt(x)) - (2/sqrt(pi)) sqrt(x) exp(-x), with a series
// expansion near zero where the closed form loses all significance to
// cancellation. Accurate to ~1e-14 across x >= 0.
double incomplete_gamma_P32(double x);

}  // namespace odt
