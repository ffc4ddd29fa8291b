#include "levyfluct/laplace_inversion.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "levyfluct/error.hpp"

namespace levyfluct {

EulerInverter::EulerInverter(int term_count) {
    if (term_count < 3 || term_count % 2 == 0) {
        throw Error(ErrorKind::DomainError,
                    fmt::format("term count must be odd and >= 3, got {}", term_count));
    }
    order_ = (term_count - 1) / 2;
    const int m = order_;
    const double scale = std::ldexp(1.0, -m);

    // xi_0 = 1/2, xi_k = 1 for 1 <= k <= M, then the binomial tail of the
    // Euler summation: xi_{2M-k} = xi_{2M-k+1} + 2^-M C(M,k).
    std::vector<double> xi(2 * m + 1, 1.0);
    xi[0] = 0.5;
    xi[2 * m] = scale;
    double binom = 1.0;
    for (int k = 1; k < m; ++k) {
        binom = binom * (m - k + 1) / k;
        xi[2 * m - k] = xi[2 * m - k + 1] + scale * binom;
    }
    weights_.resize(xi.size());
    for (std::size_t k = 0; k < xi.size(); ++k) weights_[k] = (k % 2 == 0 ? 1.0 : -1.0) * xi[k];
}

double EulerInverter::invert(const std::function<std::complex<double>(std::complex<double>)>& transform,
                             double t) const {
    if (!(t > 0.0)) throw Error(ErrorKind::DomainError, fmt::format("inversion point must be > 0, got {}", t));
    const double shift = order_ * std::numbers::ln10 / 3.0;
    double sum = 0.0;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        const std::complex<double> s(shift / t, std::numbers::pi * static_cast<double>(k) / t);
        sum += weights_[k] * transform(s).real();
    }
    return std::pow(10.0, order_ / 3.0) / t * sum;
}

} // namespace levyfluct
