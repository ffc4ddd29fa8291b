#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "levyfluct/laplace_inversion.hpp"
#include "levyfluct/levy_model.hpp"

namespace levyfluct {

enum class Backend { ClosedForm, NumericInversion };

/// W^(q)(x) = Re sum_i coefficient_i * exp(root_i * x). Roots of phi(a) = q
/// are real for the hyperexponential family in practice, but conjugate pairs
/// are carried through unchanged.
struct ExponentialTerm {
    std::complex<double> coefficient;
    std::complex<double> root;
};

struct InversionParams {
    int term_count = 41;
    /// Accuracy of a single inverted value; sets the finite-difference step
    /// of the derivative.
    double precision = 1e-10;
};

struct DerivativeEstimate {
    double value;
    double error;
};

/// q-scale function W^(q) of a spec together with Phi(q) and Z^(q).
///
/// Copies share one memo of inverted values. Everything else is immutable.
class ScaleEvaluator {
public:
    /// ClosedForm factors 1/(phi(a) - q) into simple poles and throws
    /// FactorizationFailure on repeated roots. NumericInversion inverts the
    /// bounded tilted transform 1/psi and multiplies back exp(Phi(q) x).
    static ScaleEvaluator make(const ProcessSpec& spec, double q, Backend backend,
                               InversionParams params = {});

    [[nodiscard]] const ProcessSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] double q() const noexcept { return q_; }
    [[nodiscard]] double phi_q() const noexcept { return phi_q_; }
    [[nodiscard]] Backend backend() const noexcept { return backend_; }
    [[nodiscard]] std::span<const ExponentialTerm> closed_form_terms() const noexcept { return terms_; }
    [[nodiscard]] const InversionParams& inversion_params() const noexcept { return params_; }

    /// W^(q)(x), x >= 0.
    [[nodiscard]] double w(double x) const;

    /// Right derivative W^(q)'_+(x), x > 0. Exact under ClosedForm (error 0);
    /// Richardson-extrapolated forward differences under NumericInversion.
    [[nodiscard]] DerivativeEstimate w_prime(double x) const;

    /// Z^(q)(alpha, x) = e^{alpha x} (1 + (q - phi(alpha)) int_0^x e^{-alpha y} W^(q)(y) dy).
    [[nodiscard]] double z(double alpha, double x) const;

    /// int_0^x e^{-alpha y} W^(q)(y) dy for any real alpha.
    [[nodiscard]] double exp_weighted_integral(double alpha, double x) const;

private:
    struct Memo;

    ScaleEvaluator(ProcessSpec spec, double q, double phi_q, Backend backend, InversionParams params);

    [[nodiscard]] double w_at_zero() const noexcept;
    /// e^{-Phi(q) x} W^(q)(x), the bounded inversion target (NumericInversion).
    [[nodiscard]] double tilted_w(double x) const;

    ProcessSpec spec_;
    double q_;
    double phi_q_;
    Backend backend_;
    InversionParams params_;
    std::vector<ExponentialTerm> terms_;
    std::shared_ptr<const EulerInverter> inverter_;
    std::shared_ptr<Memo> memo_;
};

[[nodiscard]] inline ScaleEvaluator make_evaluator(const ProcessSpec& spec, double q, Backend backend,
                                                   InversionParams params = {}) {
    return ScaleEvaluator::make(spec, q, backend, params);
}
/// ClosedForm when 1/(phi - q) has simple poles, NumericInversion otherwise
/// (e.g. q = 0 for a zero-mean process, where 0 is a double root).
[[nodiscard]] ScaleEvaluator make_evaluator_preferring_closed_form(const ProcessSpec& spec, double q,
                                                                   InversionParams params = {});

[[nodiscard]] inline double w_q(const ScaleEvaluator& ev, double x) { return ev.w(x); }
[[nodiscard]] inline DerivativeEstimate w_q_right_derivative(const ScaleEvaluator& ev, double x) {
    return ev.w_prime(x);
}
[[nodiscard]] inline double z_q(const ScaleEvaluator& ev, double alpha, double x) { return ev.z(alpha, x); }

} // namespace levyfluct
