#pragma once

// Reference values computed without the library's scale-function code.

#include <cmath>
#include <functional>

#include "levyfluct/levy_model.hpp"

namespace oracle {

// Composite Simpson rule on n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    if (n % 2 == 1) ++n;
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

inline levyfluct::ProcessSpec brownian() { return levyfluct::ProcessSpec::make(0.0, 2.0); }

inline levyfluct::ProcessSpec cramer_lundberg() {
    return levyfluct::ProcessSpec::make(2.0, 0.0, 1.0, {{1.0, 1.0}});
}

// W^(q) of the zero-drift Brownian spec with variance 2 (phi = a^2).
inline double brownian_w(double q, double x) {
    if (q == 0.0) return x;
    const double r = std::sqrt(q);
    return std::sinh(r * x) / r;
}

inline double brownian_w_prime(double q, double x) {
    if (q == 0.0) return 1.0;
    return std::cosh(std::sqrt(q) * x);
}

// Cramer-Lundberg spec c = 2, rate 1, Exp(1) jumps:
// 1/(phi(a) - q) = (1 + a) / (2a^2 + (1 - q)a - q), two simple poles.
struct TwoPole {
    double r[2];
    double a[2];

    double w(double x) const { return a[0] * std::exp(r[0] * x) + a[1] * std::exp(r[1] * x); }
    double w_prime(double x) const {
        return a[0] * r[0] * std::exp(r[0] * x) + a[1] * r[1] * std::exp(r[1] * x);
    }
};

inline TwoPole cramer_lundberg_w(double q) {
    const double b = 1.0 - q;
    const double disc = std::sqrt(b * b + 8.0 * q);
    TwoPole out{};
    out.r[0] = (-b + disc) / 4.0;
    out.r[1] = (-b - disc) / 4.0;
    for (int i = 0; i < 2; ++i) out.a[i] = (1.0 + out.r[i]) / (4.0 * out.r[i] + b);
    return out;
}

// Z^(q)(alpha, x) from a given W by quadrature.
inline double z_by_quadrature(const std::function<double(double)>& w, double exponent_gap, double alpha, double x) {
    if (x == 0.0) return 1.0;
    const double integral = simpson([&](double y) { return std::exp(-alpha * y) * w(y); }, 0.0, x);
    return std::exp(alpha * x) * (1.0 + exponent_gap * integral);
}

// Same value for alpha > Phi(q) without cancellation: since the full transform
// is -1/gap, Z = -gap int_0^inf e^{-alpha s} W(x + s) ds.
inline double z_by_tail(const std::function<double(double)>& w, double exponent_gap, double alpha, double phi_q,
                        double x) {
    const double span = std::log(1e14) / (alpha - phi_q);
    return -exponent_gap * simpson([&](double s) { return std::exp(-alpha * s) * w(x + s); }, 0.0, span, 40000);
}

inline bool close_rel(double got, double want, double rel) {
    return std::abs(got - want) <= rel * std::max(std::abs(want), 1e-300);
}

} // namespace oracle
