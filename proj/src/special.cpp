#include "odt/special.hpp"

#include <cmath>

#include "odt/constants.hpp"

namespace odt {

double incomplete_gamma_P32(double x) {
    if (x <= 0.0) return 0.0;
    const double two_over_sqrt_pi = 2.0 / std::sqrt(constants::pi);
    const double sx = std::sqrt(x);
    if (x < 0.01) {
        // P(3/2,x) = (2/sqrt(pi)) sqrt(x) sum_{k>=1} (-1)^{k+1} x^k 2k/((2k+1) k!)
        // Both terms of the closed form are ~sqrt(x) while their difference is
        // ~x^{3/2}; at x=1e-4 that is nine digits of cancellation.
        double sum = 0.0;
        double xk = 1.0;       // x^k / k!
        double sign = 1.0;
        for (int k = 1; k <= 12; ++k) {
            xk *= x / k;
            sum += sign * xk * (2.0 * k) / (2.0 * k + 1.0);
            sign = -sign;
            if (xk < 1e-18) break;
        }
        return two_over_sqrt_pi * sx * sum;
    }
    return std::erf(sx) - two_over_sqrt_pi * sx * std::exp(-x);
}

}  // namespace odt
