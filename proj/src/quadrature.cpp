#include "levyfluct/quadrature.hpp"

#include <array>
#include <cmath>

namespace levyfluct {

namespace {

constexpr std::array<double, 4> kNodes = {
    0.1834346424956498049394761, 0.5255324099163289858177390,
    0.7966664774136267395915539, 0.9602898564975362316835609};
constexpr std::array<double, 4> kWeights = {
    0.3626837833783619829651504, 0.3137066458778872873379622,
    0.2223810344533744705443560, 0.1012285362903762591525314};

double panel(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < kNodes.size(); ++i) {
        sum += kWeights[i] * (f(mid - half * kNodes[i]) + f(mid + half * kNodes[i]));
    }
    return sum * half;
}

double refine(const std::function<double(double)>& f, double a, double b, double whole, double tol,
              int depth) {
    const double mid = 0.5 * (a + b);
    const double left = panel(f, a, mid);
    const double right = panel(f, mid, b);
    if (depth <= 0 || std::abs(left + right - whole) <= tol) return left + right;
    return refine(f, a, mid, left, 0.5 * tol, depth - 1) + refine(f, mid, b, right, 0.5 * tol, depth - 1);
}

} // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                          int max_depth) {
    if (a == b) return 0.0;
    if (b < a) return -integrate_adaptive(f, b, a, abs_tol, max_depth);
    return refine(f, a, b, panel(f, a, b), abs_tol, max_depth);
}

} // namespace levyfluct
