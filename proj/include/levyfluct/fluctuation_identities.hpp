#pragma once

#include <functional>

#include "levyfluct/levy_model.hpp"
#include "levyfluct/scale_functions.hpp"

namespace levyfluct {

/// Parameters of a reflected passage identity. Admissible when
/// 0 <= x0 <= b, b > 0, alpha >= Phi(q) and theta >= 0.
struct TransformQuery {
    double q = 0.0;
    double alpha = 0.0;
    double theta = 0.0;
    double x0 = 0.0;
    double b = 1.0;
};

enum class PassageKind { Upper, Lower };

/// Intermediate quantities of a passage identity, kept for diagnostics.
struct IdentityComponents {
    double z_alpha_x0 = 0.0;
    double z_alpha_b = 0.0;
    double w_x0 = 0.0;
    double w_b = 0.0;
    double w_prime_b = 0.0;
    double phi_q = 0.0;
    double phi_alpha_minus_q = 0.0;
};

struct IdentityValue {
    PassageKind kind;
    TransformQuery query;
    double value;
    IdentityComponents components;

    /// Recomputes `value` from `components` alone.
    [[nodiscard]] double reassemble() const;
};

/// E(e^{-q tau_b^+}; tau_b^+ < tau_a^-) = W^(q)(a) / W^(q)(a+b).
[[nodiscard]] double two_sided_exit(const ScaleEvaluator& ev, double a, double b);

/// E_{x0} e^{-alpha L(tau_0^U) - q tau_0^U} = Z^(q)(alpha,x0) / Z^(q)(alpha,B).
/// Exactly 1 when x0 = B.
[[nodiscard]] IdentityValue upper_passage_transform(const ScaleEvaluator& ev, const TransformQuery& query);

/// E_{x0} e^{-alpha L(tau_0^L) - theta U(tau_0^L) - q tau_0^L}
///   = Z(alpha,x0) + W(x0) [W(B)(phi(alpha) - q) - (alpha + theta) Z(alpha,B)]
///                   / (W'_+(B) + theta W(B)).
[[nodiscard]] IdentityValue lower_passage_transform(const ScaleEvaluator& ev, const TransformQuery& query);

/// Bivariate exponent of (L(tau_x^U), tau_x^U):
/// W^(q)(B)(phi(alpha) - q) / Z^(q)(alpha,B) - alpha.
[[nodiscard]] double inverse_local_time_exponent(const ScaleEvaluator& ev, double q, double alpha, double b);

/// Arrival rate W'_+(B)/W(B) of jumps of x -> L(tau_x^U).
[[nodiscard]] double local_time_jump_rate(const ScaleEvaluator& ev, double b);

/// Generalized Pollaczek-Khinchine: E e^{alpha inf X} = mean * alpha / phi(alpha)
/// for a spec with positive mean and alpha > 0.
[[nodiscard]] double minimum_transform(const ProcessSpec& spec, double alpha);

/// int_0^inf E_{x0} e^{alpha X(tau_x^U)} dx for alpha < 0 under a positive-mean
/// law, evaluated through a q = 0 evaluator of that law:
/// e^{alpha(B+x0)} (int_0^{x0} e^{-alpha y} W(y) dy - 1/psi(alpha)) / W(B).
/// Throws DivergedTransform unless psi(alpha) is finite and negative.
[[nodiscard]] double occupation_transform(const ScaleEvaluator& tilted_ev, double alpha, double x0, double b);

/// E e^{-alpha X(J) - theta J} for a compound Poisson process with rate
/// `rate` and jump transform alpha -> E e^{-alpha xi}; J is the first jump epoch.
[[nodiscard]] double first_jump_transform(double rate, const std::function<double(double)>& jump_transform,
                                          double alpha, double theta);

namespace appendix {

/// The first-jump lemma writes exponents as log E e^{-alpha X(1)}, the
/// opposite sign convention to phi. For compound Poisson this is
/// rate * (E e^{-alpha xi} - 1).
[[nodiscard]] double negative_exponent(double rate, const std::function<double(double)>& jump_transform,
                                       double alpha);

/// (rate + psi(alpha)) / (rate + theta) with psi from negative_exponent.
[[nodiscard]] double first_jump_formula(double rate, const std::function<double(double)>& jump_transform,
                                        double alpha, double theta);

} // namespace appendix

/// Evaluator for the tilted law psi at q = 0, the change-of-measure
/// counterpart of `make_evaluator(spec, q, backend)`.
[[nodiscard]] ScaleEvaluator make_tilted_evaluator(const ProcessSpec& spec, double q, Backend backend,
                                                   InversionParams params = {});

} // namespace levyfluct
