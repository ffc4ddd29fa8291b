#include "levyfluct/scale_functions.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include <Eigen/Core>
#include <fmt/format.h>
#include <unsupported/Eigen/Polynomials>

#include "levyfluct/error.hpp"
#include "levyfluct/quadrature.hpp"

namespace levyfluct {

struct ScaleEvaluator::Memo {
    mutable std::shared_mutex mutex;
    std::unordered_map<std::uint64_t, double> values;
};

namespace {

using Poly = std::vector<double>; // ascending coefficients
using cplx = std::complex<double>;

constexpr std::size_t kMemoLimit = 1u << 20;

Poly multiply_linear(const Poly& p, double constant) {
    // p(a) * (constant + a)
    Poly out(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i] += constant * p[i];
        out[i + 1] += p[i];
    }
    return out;
}

Poly add(Poly a, const Poly& b) {
    if (a.size() < b.size()) a.resize(b.size(), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    return a;
}

Poly multiply(const Poly& a, const Poly& b) {
    Poly out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

template <typename T>
T horner(const Poly& p, T x) {
    T acc = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Poly derivative(const Poly& p) {
    Poly out(p.size() > 1 ? p.size() - 1 : 1, 0.0);
    for (std::size_t i = 1; i < p.size(); ++i) out[i - 1] = static_cast<double>(i) * p[i];
    return out;
}

// (e^{d x} - 1) / d, continuous at d = 0.
cplx expm1_ratio(cplx d, double x) {
    const cplx dx = d * x;
    if (std::abs(dx) < 1e-5) return x * (1.0 + dx / 2.0 + dx * dx / 6.0);
    const double a = dx.real();
    const double b = dx.imag();
    const double s = std::sin(0.5 * b);
    const cplx em1(std::expm1(a) * std::cos(b) - 2.0 * s * s, std::exp(a) * std::sin(b));
    return em1 / d;
}

std::vector<ExponentialTerm> partial_fractions(const ProcessSpec& spec, double q, double phi_q) {
    // Distinct jump rates with merged weights.
    std::vector<JumpComponent> merged;
    for (const auto& c : spec.jump_mixture()) {
        auto it = std::find_if(merged.begin(), merged.end(), [&](const JumpComponent& m) { return m.rate == c.rate; });
        if (it == merged.end()) merged.push_back(c); else it->weight += c.weight;
    }

    // 1/(phi(a) - q) = N(a) / P(a) with N = prod (m_j + a).
    Poly numerator{1.0};
    for (const auto& c : merged) numerator = multiply_linear(numerator, c.rate);

    const double lambda = spec.jump_intensity();
    Poly gaussian_part{-lambda - q, spec.drift(), 0.5 * spec.gaussian_sq()};
    if (spec.gaussian_sq() == 0.0) gaussian_part.pop_back();
    Poly denominator = multiply(gaussian_part, numerator);
    for (std::size_t j = 0; j < merged.size(); ++j) {
        Poly others{lambda * merged[j].weight * merged[j].rate};
        for (std::size_t k = 0; k < merged.size(); ++k)
            if (k != j) others = multiply_linear(others, merged[k].rate);
        denominator = add(std::move(denominator), others);
    }

    Eigen::VectorXd coeffs(static_cast<Eigen::Index>(denominator.size()));
    for (std::size_t i = 0; i < denominator.size(); ++i) coeffs[static_cast<Eigen::Index>(i)] = denominator[i];
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
    solver.compute(coeffs);

    const Poly dden = derivative(denominator);
    std::vector<cplx> roots;
    for (Eigen::Index i = 0; i < solver.roots().size(); ++i) {
        cplx r = solver.roots()[i];
        if (std::abs(r.imag()) <= 1e-9 * std::max(1.0, std::abs(r))) r = r.real();
        for (int it = 0; it < 4; ++it) {
            const cplx d = horner(dden, r);
            if (d == 0.0) break;
            r -= horner(denominator, r) / d;
        }
        roots.push_back(r);
    }

    for (std::size_t i = 0; i < roots.size(); ++i) {
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            const double scale = std::max({1.0, std::abs(roots[i]), std::abs(roots[j])});
            if (std::abs(roots[i] - roots[j]) <= 1e-7 * scale) {
                throw Error(ErrorKind::FactorizationFailure,
                            fmt::format("phi(a) = {} has a repeated root near {}", q, roots[i].real()));
            }
        }
    }

    // Pin the leading root to Phi(q) from the convex solver.
    auto leading = std::min_element(roots.begin(), roots.end(),
                                    [&](cplx a, cplx b) { return std::abs(a - phi_q) < std::abs(b - phi_q); });
    if (leading == roots.end() || std::abs(*leading - phi_q) > 1e-8 * std::max(1.0, phi_q)) {
        throw Error(ErrorKind::FactorizationFailure, "no root of the rational transform matches Phi(q)");
    }
    *leading = phi_q;

    std::vector<ExponentialTerm> terms;
    terms.reserve(roots.size());
    for (const cplx r : roots) terms.push_back({horner(numerator, r) / horner(dden, r), r});
    return terms;
}

} // namespace

ScaleEvaluator::ScaleEvaluator(ProcessSpec spec, double q, double phi_q, Backend backend, InversionParams params)
    : spec_(std::move(spec)), q_(q), phi_q_(phi_q), backend_(backend), params_(params),
      memo_(std::make_shared<Memo>()) {}

ScaleEvaluator ScaleEvaluator::make(const ProcessSpec& spec, double q, Backend backend, InversionParams params) {
    if (!(q >= 0.0) || !std::isfinite(q)) {
        throw Error(ErrorKind::DomainError, fmt::format("q must be finite and >= 0, got {}", q));
    }
    ScaleEvaluator ev(spec, q, right_inverse(spec, q), backend, params);
    switch (backend) {
    case Backend::ClosedForm:
        ev.terms_ = partial_fractions(spec, q, ev.phi_q_);
        break;
    case Backend::NumericInversion:
        if (!(params.precision > 0.0)) {
            throw Error(ErrorKind::DomainError, "inversion precision must be positive");
        }
        ev.inverter_ = std::make_shared<const EulerInverter>(params.term_count);
        break;
    default:
        throw Error(ErrorKind::UnsupportedBackend, "unknown scale function backend");
    }
    return ev;
}

double ScaleEvaluator::w_at_zero() const noexcept {
    return spec_.bounded_variation() ? 1.0 / spec_.drift() : 0.0;
}

double ScaleEvaluator::tilted_w(double x) const {
    if (x == 0.0) return w_at_zero();
    const auto key = std::bit_cast<std::uint64_t>(x);
    {
        std::shared_lock lock(memo_->mutex);
        if (auto it = memo_->values.find(key); it != memo_->values.end()) return it->second;
    }
    const auto transform = [this](cplx s) { return 1.0 / (phi_complex(spec_, s + phi_q_) - q_); };
    const double value = inverter_->invert(transform, x);
    std::unique_lock lock(memo_->mutex);
    if (memo_->values.size() >= kMemoLimit) memo_->values.clear();
    memo_->values.emplace(key, value);
    return value;
}

double ScaleEvaluator::w(double x) const {
    if (!(x >= 0.0)) throw Error(ErrorKind::DomainError, fmt::format("W^(q) needs x >= 0, got {}", x));
    if (x == 0.0) return w_at_zero();
    if (backend_ == Backend::NumericInversion) return std::exp(phi_q_ * x) * tilted_w(x);
    cplx sum = 0.0;
    for (const auto& t : terms_) sum += t.coefficient * std::exp(t.root * x);
    return sum.real();
}

DerivativeEstimate ScaleEvaluator::w_prime(double x) const {
    if (!(x > 0.0)) throw Error(ErrorKind::DomainError, fmt::format("W^(q)' needs x > 0, got {}", x));
    if (backend_ == Backend::ClosedForm) {
        cplx sum = 0.0;
        for (const auto& t : terms_) sum += t.coefficient * t.root * std::exp(t.root * x);
        return {sum.real(), 0.0};
    }
    // Forward differences of the tilted function at h, h/2, h/4, two
    // Richardson sweeps; the step balances h^3 truncation against noise/h.
    const double h = std::pow(params_.precision, 0.25) * std::max(1.0, x);
    const double base = tilted_w(x);
    double d[3];
    for (int i = 0; i < 3; ++i) {
        const double step = h / static_cast<double>(1 << i);
        d[i] = (tilted_w(x + step) - base) / step;
    }
    const double r1a = 2.0 * d[1] - d[0];
    const double r1b = 2.0 * d[2] - d[1];
    const double r2 = (4.0 * r1b - r1a) / 3.0;
    const double growth = std::exp(phi_q_ * x);
    return {growth * (phi_q_ * base + r2), growth * std::abs(r2 - r1b)};
}

double ScaleEvaluator::exp_weighted_integral(double alpha, double x) const {
    if (!(x >= 0.0)) throw Error(ErrorKind::DomainError, fmt::format("integral needs x >= 0, got {}", x));
    if (x == 0.0) return 0.0;
    if (backend_ == Backend::ClosedForm) {
        cplx sum = 0.0;
        for (const auto& t : terms_) sum += t.coefficient * expm1_ratio(t.root - alpha, x);
        return sum.real();
    }
    const double shift = phi_q_ - alpha;
    return integrate_adaptive([&](double y) { return std::exp(shift * y) * tilted_w(y); }, 0.0, x, 1e-10);
}

double ScaleEvaluator::z(double alpha, double x) const {
    if (!(alpha >= 0.0)) throw Error(ErrorKind::DomainError, fmt::format("Z^(q) needs alpha >= 0, got {}", alpha));
    if (!(x >= 0.0)) throw Error(ErrorKind::DomainError, fmt::format("Z^(q) needs x >= 0, got {}", x));
    if (x == 0.0) return 1.0;
    if (alpha == phi_q_) return std::exp(phi_q_ * x);
    const double gap = q_ - phi(spec_, alpha);
    if (backend_ == Backend::NumericInversion && alpha > phi_q_ && (alpha - phi_q_) * x > 1.0) {
        // same identity, integrating the tilted W over [x, x + span)
        const double decay = alpha - phi_q_;
        const double span = 37.0 / decay;
        const double tail = integrate_adaptive([&](double s) { return std::exp(-decay * s) * tilted_w(x + s); }, 0.0,
                                               span, 1e-10 * std::abs(tilted_w(x)) / decay, 20);
        return -gap * std::exp(phi_q_ * x) * tail;
    }
    if (backend_ == Backend::ClosedForm && alpha > phi_q_ && (alpha - phi_q_) * x > 1.0) {
        // sum_i A_i / (alpha - r_i) = 1/(phi(alpha) - q) cancels the e^{alpha x}
        // part of the integral exactly, leaving only the decaying terms.
        cplx sum = 0.0;
        for (const auto& t : terms_) sum += t.coefficient * std::exp(t.root * x) / (t.root - alpha);
        return gap * sum.real();
    }
    return std::exp(alpha * x) * (1.0 + gap * exp_weighted_integral(alpha, x));
}

ScaleEvaluator make_evaluator_preferring_closed_form(const ProcessSpec& spec, double q, InversionParams params) {
    try {
        return ScaleEvaluator::make(spec, q, Backend::ClosedForm, params);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::FactorizationFailure) throw;
    }
    return ScaleEvaluator::make(spec, q, Backend::NumericInversion, params);
}

} // namespace levyfluct
