#include "levyfluct/fluctuation_identities.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "levyfluct/error.hpp"

namespace levyfluct {

namespace {

void check_query(const ScaleEvaluator& ev, const TransformQuery& query) {
    if (query.q != ev.q()) {
        throw Error(ErrorKind::AdmissibilityError,
                    fmt::format("query q = {} differs from evaluator q = {}", query.q, ev.q()));
    }
    if (!(query.b > 0.0) || !std::isfinite(query.b)) {
        throw Error(ErrorKind::AdmissibilityError, fmt::format("B must be positive, got {}", query.b));
    }
    if (!(query.x0 >= 0.0 && query.x0 <= query.b)) {
        throw Error(ErrorKind::AdmissibilityError,
                    fmt::format("x0 = {} outside [0, B = {}]", query.x0, query.b));
    }
    if (!(query.alpha >= ev.phi_q())) {
        throw Error(ErrorKind::AdmissibilityError,
                    fmt::format("alpha = {} below Phi(q) = {}", query.alpha, ev.phi_q()));
    }
    if (!(query.theta >= 0.0)) {
        throw Error(ErrorKind::AdmissibilityError, fmt::format("theta must be >= 0, got {}", query.theta));
    }
}

// phi(alpha) - q, exactly 0 at alpha = Phi(q).
double exponent_gap(const ScaleEvaluator& ev, double alpha) {
    return alpha == ev.phi_q() ? 0.0 : phi(ev.spec(), alpha) - ev.q();
}

double assemble_lower(const IdentityComponents& c, double alpha, double theta) {
    return c.z_alpha_x0 + c.w_x0 * (c.w_b * c.phi_alpha_minus_q - (alpha + theta) * c.z_alpha_b) /
                              (c.w_prime_b + theta * c.w_b);
}

} // namespace

double IdentityValue::reassemble() const {
    if (kind == PassageKind::Upper) {
        return query.x0 == query.b ? 1.0 : components.z_alpha_x0 / components.z_alpha_b;
    }
    return assemble_lower(components, query.alpha, query.theta);
}

double two_sided_exit(const ScaleEvaluator& ev, double a, double b) {
    if (!(a >= 0.0) || !(b >= 0.0) || !(a + b > 0.0)) {
        throw Error(ErrorKind::DomainError, fmt::format("two-sided exit needs a, b >= 0 and a + b > 0 (a={}, b={})", a, b));
    }
    if (b == 0.0) return 1.0;
    return ev.w(a) / ev.w(a + b);
}

IdentityValue upper_passage_transform(const ScaleEvaluator& ev, const TransformQuery& query) {
    check_query(ev, query);
    IdentityValue out{PassageKind::Upper, query, 1.0, {}};
    auto& c = out.components;
    c.phi_q = ev.phi_q();
    c.phi_alpha_minus_q = exponent_gap(ev, query.alpha);
    c.z_alpha_b = ev.z(query.alpha, query.b);
    c.w_b = ev.w(query.b);
    c.w_x0 = ev.w(query.x0);
    if (query.x0 == query.b) {
        c.z_alpha_x0 = c.z_alpha_b;
        return out;
    }
    c.z_alpha_x0 = ev.z(query.alpha, query.x0);
    out.value = c.z_alpha_x0 / c.z_alpha_b;
    return out;
}

IdentityValue lower_passage_transform(const ScaleEvaluator& ev, const TransformQuery& query) {
    check_query(ev, query);
    IdentityValue out{PassageKind::Lower, query, 0.0, {}};
    auto& c = out.components;
    c.phi_q = ev.phi_q();
    c.phi_alpha_minus_q = exponent_gap(ev, query.alpha);
    c.z_alpha_x0 = ev.z(query.alpha, query.x0);
    c.z_alpha_b = ev.z(query.alpha, query.b);
    c.w_x0 = ev.w(query.x0);
    c.w_b = ev.w(query.b);
    c.w_prime_b = ev.w_prime(query.b).value;
    out.value = assemble_lower(c, query.alpha, query.theta);
    return out;
}

double inverse_local_time_exponent(const ScaleEvaluator& ev, double q, double alpha, double b) {
    check_query(ev, TransformQuery{q, alpha, 0.0, b, b});
    return ev.w(b) * exponent_gap(ev, alpha) / ev.z(alpha, b) - alpha;
}

double local_time_jump_rate(const ScaleEvaluator& ev, double b) {
    if (!(b > 0.0)) throw Error(ErrorKind::DomainError, fmt::format("B must be positive, got {}", b));
    return ev.w_prime(b).value / ev.w(b);
}

double minimum_transform(const ProcessSpec& spec, double alpha) {
    const double mean = spec.mean();
    if (!(mean > 0.0)) {
        throw Error(ErrorKind::DomainError, fmt::format("minimum transform needs a positive mean, got {}", mean));
    }
    if (!(alpha > 0.0)) throw Error(ErrorKind::DomainError, fmt::format("alpha must be > 0, got {}", alpha));
    return mean * alpha / phi(spec, alpha);
}

double occupation_transform(const ScaleEvaluator& tilted_ev, double alpha, double x0, double b) {
    if (tilted_ev.q() != 0.0 || !(tilted_ev.spec().mean() > 0.0)) {
        throw Error(ErrorKind::DomainError, "occupation transform needs a q = 0 evaluator of a positive-mean law");
    }
    if (!(b > 0.0) || !(x0 >= 0.0 && x0 <= b)) {
        throw Error(ErrorKind::DomainError, fmt::format("need 0 <= x0 <= B, B > 0 (x0={}, B={})", x0, b));
    }
    if (!(alpha < 0.0)) throw Error(ErrorKind::DomainError, fmt::format("alpha must be < 0, got {}", alpha));

    double psi = std::numeric_limits<double>::quiet_NaN();
    try {
        psi = phi_extended(tilted_ev.spec(), alpha);
    } catch (const Error&) {
        throw Error(ErrorKind::DivergedTransform, fmt::format("psi({}) is infinite", alpha));
    }
    if (!(psi < 0.0)) {
        throw Error(ErrorKind::DivergedTransform, fmt::format("psi({}) = {} is not negative", alpha, psi));
    }
    return std::exp(alpha * (b + x0)) * (tilted_ev.exp_weighted_integral(alpha, x0) - 1.0 / psi) / tilted_ev.w(b);
}

double first_jump_transform(double rate, const std::function<double(double)>& jump_transform, double alpha,
                            double theta) {
    if (!(rate > 0.0)) throw Error(ErrorKind::DomainError, fmt::format("rate must be > 0, got {}", rate));
    if (!(alpha >= 0.0) || !(theta >= 0.0)) {
        throw Error(ErrorKind::DomainError, fmt::format("need alpha, theta >= 0 (alpha={}, theta={})", alpha, theta));
    }
    return rate * jump_transform(alpha) / (rate + theta);
}

namespace appendix {

double negative_exponent(double rate, const std::function<double(double)>& jump_transform, double alpha) {
    return rate * (jump_transform(alpha) - 1.0);
}

double first_jump_formula(double rate, const std::function<double(double)>& jump_transform, double alpha,
                          double theta) {
    if (!(rate > 0.0)) throw Error(ErrorKind::DomainError, fmt::format("rate must be > 0, got {}", rate));
    return (rate + negative_exponent(rate, jump_transform, alpha)) / (rate + theta);
}

} // namespace appendix

ScaleEvaluator make_tilted_evaluator(const ProcessSpec& spec, double q, Backend backend, InversionParams params) {
    return make_evaluator(tilt(spec, q).tilted, 0.0, backend, params);
}

} // namespace levyfluct
