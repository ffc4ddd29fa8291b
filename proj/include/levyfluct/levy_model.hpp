#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace levyfluct {

/// One phase of the hyperexponential jump-size law: with probability
/// `weight` a downward jump is Exp(`rate`) distributed.
struct JumpComponent {
    double weight;
    double rate;

    friend bool operator==(const JumpComponent&, const JumpComponent&) = default;
};

/// Spectrally negative Lévy process X(t) = c t + sigma B(t) - (compound Poisson
/// with hyperexponential jumps). Immutable once constructed; every instance
/// satisfies the non-monotonicity and mixture invariants.
class ProcessSpec {
public:
    /// Validates and builds a spec. Throws Error with kind MonotonePath,
    /// BadMixture or NegativeParameter.
    static ProcessSpec make(double drift, double gaussian_sq, double jump_intensity = 0.0,
                            std::vector<JumpComponent> mixture = {});

    [[nodiscard]] double drift() const noexcept { return drift_; }
    [[nodiscard]] double gaussian_sq() const noexcept { return gaussian_sq_; }
    [[nodiscard]] double jump_intensity() const noexcept { return jump_intensity_; }
    [[nodiscard]] std::span<const JumpComponent> jump_mixture() const noexcept { return mixture_; }
    [[nodiscard]] bool has_jumps() const noexcept { return jump_intensity_ > 0.0; }
    [[nodiscard]] bool bounded_variation() const noexcept { return gaussian_sq_ == 0.0; }

    /// E X(1) = phi'(0).
    [[nodiscard]] double mean() const noexcept;

    friend bool operator==(const ProcessSpec&, const ProcessSpec&) = default;

private:
    ProcessSpec(double drift, double gaussian_sq, double jump_intensity,
                std::vector<JumpComponent> mixture)
        : drift_(drift), gaussian_sq_(gaussian_sq), jump_intensity_(jump_intensity),
          mixture_(std::move(mixture)) {}

    double drift_;
    double gaussian_sq_;
    double jump_intensity_;
    std::vector<JumpComponent> mixture_;
};

/// Laplace exponent phi(alpha) = log E exp(alpha X(1)), alpha >= 0.
[[nodiscard]] double phi(const ProcessSpec& spec, double alpha);

/// Analytic derivative of phi, alpha >= 0.
[[nodiscard]] double phi_prime(const ProcessSpec& spec, double alpha);

/// phi continued to complex arguments with Re(s) > -min rate. Only the
/// numerical Laplace inversion uses this.
[[nodiscard]] std::complex<double> phi_complex(const ProcessSpec& spec, std::complex<double> s);

/// E exp(-alpha xi) for one jump magnitude xi, alpha > -min rate.
[[nodiscard]] double jump_magnitude_transform(const ProcessSpec& spec, double alpha);

/// phi extended to negative alpha where the jump transform is finite
/// (alpha > -min rate). Used by the occupation transform.
[[nodiscard]] double phi_extended(const ProcessSpec& spec, double alpha);

/// Right inverse Phi(q): for q > 0 the unique positive root of phi = q; for
/// q = 0 the largest nonnegative root of phi = 0.
[[nodiscard]] double right_inverse(const ProcessSpec& spec, double q);

/// Exponentially tilted process: psi(alpha) = phi(alpha + Phi(q)) - q.
/// `tilted` is the same family re-parameterized so that phi(tilted, .) == psi.
struct TiltedSpec {
    ProcessSpec base;
    double q;
    double phi_q;
    ProcessSpec tilted;

    /// psi evaluated through the base exponent, independent of `tilted`.
    [[nodiscard]] double psi(double alpha) const { return phi(base, alpha + phi_q) - q; }
};

/// Requires q > 0.
[[nodiscard]] TiltedSpec tilt(const ProcessSpec& spec, double q);

/// JSON object {"drift", "sigma2", "jumps": {"intensity", "mixture": [...]}}.
/// Unknown keys are rejected with ErrorKind::UnknownKey.
[[nodiscard]] ProcessSpec spec_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json spec_to_json(const ProcessSpec& spec);

} // namespace levyfluct
