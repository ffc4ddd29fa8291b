#pragma once

#include <functional>

namespace levyfluct {

/// Adaptive Gauss-Legendre quadrature: each panel is integrated with an
/// 8-point rule and compared with the sum over its two halves; panels are
/// bisected until the difference is below their share of `abs_tol`.
[[nodiscard]] double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                        double abs_tol = 1e-10, int max_depth = 40);

} // namespace levyfluct
