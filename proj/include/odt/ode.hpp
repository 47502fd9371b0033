#pragma once

#include <array>
#include <cmath>

#include "odt/errors.hpp"

namespace odt {

struct OdeOptions {
    double rel_tol = 1e-6;
    double abs_tol = 1e-9;
    double min_step_fraction = 1e-12;  // of the interval; below this: StiffnessError
};

// Cash-Karp embedded Runge-Kutta 4(5) with standard step-size control.
// Integrates y' = f(t, y) from t0 to t1 in place.
template <std::size_t D, class F>
void integrate_ode(F&& f, std::array<double, D>& y, double t0, double t1,
                   const OdeOptions& opts = {}) {
    static constexpr double a2 = 1.0 / 5.0;
    static constexpr double a3[] = {3.0 / 40.0, 9.0 / 40.0};
    static constexpr double a4[] = {3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0};
    static constexpr double a5[] = {-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0};
    static constexpr double a6[] = {1631.0 / 55296.0, 175.0 / 512.0, 575.0 / 13824.0,
                                    44275.0 / 110592.0, 253.0 / 4096.0};
    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 3.0 / 5.0, c5 = 1.0,
                            c6 = 7.0 / 8.0;
    static constexpr double b5[] = {37.0 / 378.0,  0.0, 250.0 / 621.0,
                                    125.0 / 594.0, 0.0, 512.0 / 1771.0};
    static constexpr double b4[] = {2825.0 / 27648.0,  0.0,           18575.0 / 48384.0,
                                    13525.0 / 55296.0, 277.0 / 14336.0, 1.0 / 4.0};

    const double span = t1 - t0;
    if (!(span > 0.0)) return;
    const double h_min = opts.min_step_fraction * span;
    double t = t0;
    double h = span / 100.0;

    std::array<double, D> k1, k2, k3, k4, k5, k6, yt, y5, y4;
    while (t < t1) {
        if (h > t1 - t) h = t1 - t;
        f(t, y, k1);
        for (std::size_t i = 0; i < D; ++i) yt[i] = y[i] + h * a2 * k1[i];
        f(t + c2 * h, yt, k2);
        for (std::size_t i = 0; i < D; ++i)
            yt[i] = y[i] + h * (a3[0] * k1[i] + a3[1] * k2[i]);
        f(t + c3 * h, yt, k3);
        for (std::size_t i = 0; i < D; ++i)
            yt[i] = y[i] + h * (a4[0] * k1[i] + a4[1] * k2[i] + a4[2] * k3[i]);
        f(t + c4 * h, yt, k4);
        for (std::size_t i = 0; i < D; ++i)
            yt[i] = y[i] + h * (a5[0] * k1[i] + a5[1] * k2[i] + a5[2] * k3[i] + a5[3] * k4[i]);
        f(t + c5 * h, yt, k5);
        for (std::size_t i = 0; i < D; ++i)
            yt[i] = y[i] + h * (a6[0] * k1[i] + a6[1] * k2[i] + a6[2] * k3[i] +
                                a6[3] * k4[i] + a6[4] * k5[i]);
        f(t + c6 * h, yt, k6);

        double err = 0.0;
        for (std::size_t i = 0; i < D; ++i) {
            y5[i] = y[i] + h * (b5[0] * k1[i] + b5[2] * k3[i] + b5[3] * k4[i] + b5[5] * k6[i]);
            y4[i] = y[i] + h * (b4[0] * k1[i] + b4[2] * k3[i] + b4[3] * k4[i] +
                                b4[4] * k5[i] + b4[5] * k6[i]);
            const double scale = opts.abs_tol + opts.rel_tol * std::abs(y5[i]);
            err = std::max(err, std::abs(y5[i] - y4[i]) / scale);
        }
        if (err <= 1.0) {
            t += h;
            y = y5;
            const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h *= std::min(5.0, std::max(1.0, grow));
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.25));
        }
        if (h < h_min) throw StiffnessError("ODE step size underflow");
    }
}

}  // namespace odt
