#include "levyfluct/levy_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "levyfluct/error.hpp"

namespace levyfluct {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw Error(ErrorKind::NegativeParameter, fmt::format("{} must be finite, got {}", name, v));
    }
}

void require_nonnegative_alpha(double alpha) {
    if (!(alpha >= 0.0)) {
        throw Error(ErrorKind::DomainError, fmt::format("alpha must be >= 0, got {}", alpha));
    }
}

double min_rate(const ProcessSpec& spec) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : spec.jump_mixture()) m = std::min(m, c.rate);
    return m;
}

} // namespace

ProcessSpec ProcessSpec::make(double drift, double gaussian_sq, double jump_intensity,
                              std::vector<JumpComponent> mixture) {
    require_finite(drift, "drift");
    require_finite(gaussian_sq, "sigma2");
    require_finite(jump_intensity, "jump intensity");
    if (gaussian_sq < 0.0) {
        throw Error(ErrorKind::NegativeParameter, fmt::format("sigma2 must be >= 0, got {}", gaussian_sq));
    }
    if (jump_intensity < 0.0) {
        throw Error(ErrorKind::NegativeParameter,
                    fmt::format("jump intensity must be >= 0, got {}", jump_intensity));
    }

    if (jump_intensity == 0.0 && !mixture.empty()) {
        throw Error(ErrorKind::BadMixture, "jump mixture given but jump intensity is 0");
    }
    if (jump_intensity > 0.0 && mixture.empty()) {
        throw Error(ErrorKind::BadMixture, "positive jump intensity requires a non-empty mixture");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < mixture.size(); ++i) {
        const auto& c = mixture[i];
        if (!(c.weight > 0.0 && c.weight <= 1.0)) {
            throw Error(ErrorKind::BadMixture,
                        fmt::format("mixture[{}].weight must lie in (0,1], got {}", i, c.weight));
        }
        if (!(c.rate > 0.0) || !std::isfinite(c.rate)) {
            throw Error(ErrorKind::BadMixture,
                        fmt::format("mixture[{}].rate must be positive and finite, got {}", i, c.rate));
        }
        total += c.weight;
    }
    if (!mixture.empty() && std::abs(total - 1.0) > 1e-12) {
        throw Error(ErrorKind::BadMixture, fmt::format("mixture weights sum to {}, expected 1", total));
    }

    if (gaussian_sq == 0.0 && jump_intensity == 0.0) {
        throw Error(ErrorKind::MonotonePath, "no Gaussian part and no jumps: paths are deterministic");
    }
    if (gaussian_sq == 0.0 && drift <= 0.0) {
        throw Error(ErrorKind::MonotonePath,
                    fmt::format("bounded variation with drift {} <= 0 has non-increasing paths", drift));
    }
    return ProcessSpec(drift, gaussian_sq, jump_intensity, std::move(mixture));
}

double ProcessSpec::mean() const noexcept {
    double jumps = 0.0;
    for (const auto& c : mixture_) jumps += c.weight / c.rate;
    return drift_ - jump_intensity_ * jumps;
}

double phi(const ProcessSpec& spec, double alpha) {
    require_nonnegative_alpha(alpha);
    return phi_extended(spec, alpha);
}

double phi_extended(const ProcessSpec& spec, double alpha) {
    if (alpha == 0.0) return 0.0;
    double value = spec.drift() * alpha + 0.5 * spec.gaussian_sq() * alpha * alpha;
    if (spec.has_jumps()) {
        if (!(alpha > -min_rate(spec))) {
            throw Error(ErrorKind::DivergedTransform,
                        fmt::format("jump transform diverges at alpha = {}", alpha));
        }
        // sum w m/(m+a) - 1 = -sum w a/(m+a), which avoids cancellation near 0.
        double s = 0.0;
        for (const auto& c : spec.jump_mixture()) s += c.weight / (c.rate + alpha);
        value -= spec.jump_intensity() * alpha * s;
    }
    return value;
}

double jump_magnitude_transform(const ProcessSpec& spec, double alpha) {
    double s = 0.0;
    for (const auto& c : spec.jump_mixture()) {
        if (!(alpha > -c.rate)) {
            throw Error(ErrorKind::DivergedTransform,
                        fmt::format("jump transform diverges at alpha = {}", alpha));
        }
        s += c.weight * c.rate / (c.rate + alpha);
    }
    return s;
}

double phi_prime(const ProcessSpec& spec, double alpha) {
    require_nonnegative_alpha(alpha);
    double value = spec.drift() + spec.gaussian_sq() * alpha;
    for (const auto& c : spec.jump_mixture()) {
        const double d = c.rate + alpha;
        value -= spec.jump_intensity() * c.weight * c.rate / (d * d);
    }
    return value;
}

std::complex<double> phi_complex(const ProcessSpec& spec, std::complex<double> s) {
    std::complex<double> value = spec.drift() * s + 0.5 * spec.gaussian_sq() * s * s;
    if (spec.has_jumps()) {
        std::complex<double> acc = 0.0;
        for (const auto& c : spec.jump_mixture()) acc += c.weight / (c.rate + s);
        value -= spec.jump_intensity() * s * acc;
    }
    return value;
}

namespace {

// Walks a few ulps either way while the residual |phi - q| keeps shrinking.
double polish_root(const ProcessSpec& spec, double q, double x) {
    double best = std::abs(phi(spec, x) - q);
    for (const double toward : {0.0, std::numeric_limits<double>::infinity()}) {
        for (int step = 0; step < 8 && best > 0.0; ++step) {
            const double y = std::nextafter(x, toward);
            const double r = std::abs(phi(spec, y) - q);
            if (!(r < best)) break;
            x = y;
            best = r;
        }
    }
    return x;
}

} // namespace

double right_inverse(const ProcessSpec& spec, double q) {
    if (!(q >= 0.0) || !std::isfinite(q)) {
        throw Error(ErrorKind::DomainError, fmt::format("q must be finite and >= 0, got {}", q));
    }
    if (q == 0.0 && spec.mean() >= 0.0) return 0.0;

    // phi is convex with phi(0) = 0, so the target root is the right-most
    // crossing of phi = q. Newton started to its right descends monotonically.
    double lo = 0.0;
    double hi = 1.0;
    int doublings = 0;
    while (phi(spec, hi) <= q) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 2000) {
            throw Error(ErrorKind::ConvergenceFailure, fmt::format("no bracket for Phi({})", q));
        }
    }

    double x = hi;
    for (int iter = 0; iter < 200; ++iter) {
        const double f = phi(spec, x) - q;
        if (f == 0.0) return x;
        if (f > 0.0) hi = x; else lo = x;

        const double slope = phi_prime(spec, x);
        double next = (slope > 0.0) ? x - f / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * x ||
            hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
            // Pick the endpoint with the smaller residual.
            const double rn = std::abs(phi(spec, next) - q);
            return polish_root(spec, q, rn < std::abs(f) ? next : x);
        }
        x = next;
    }
    throw Error(ErrorKind::ConvergenceFailure, fmt::format("Newton did not converge for Phi({})", q));
}

TiltedSpec tilt(const ProcessSpec& spec, double q) {
    if (!(q > 0.0)) {
        throw Error(ErrorKind::DomainError, fmt::format("tilt requires q > 0, got {}", q));
    }
    const double shift = right_inverse(spec, q);

    // phi(a + shift) - q stays in the family: drift gains sigma2 * shift, each
    // rate m moves to m + shift and the intensity absorbs m / (m + shift).
    const double drift = spec.drift() + spec.gaussian_sq() * shift;
    double intensity = 0.0;
    std::vector<JumpComponent> mixture;
    if (spec.has_jumps()) {
        for (const auto& c : spec.jump_mixture()) intensity += c.weight * c.rate / (c.rate + shift);
        mixture.reserve(spec.jump_mixture().size());
        double total = 0.0;
        for (const auto& c : spec.jump_mixture()) {
            const double w = c.weight * c.rate / ((c.rate + shift) * intensity);
            mixture.push_back({w, c.rate + shift});
            total += w;
        }
        for (auto& c : mixture) c.weight /= total;
        intensity *= spec.jump_intensity();
    }
    return TiltedSpec{spec, q, shift, ProcessSpec::make(drift, spec.gaussian_sq(), intensity, std::move(mixture))};
}

namespace {

double number_at(const nlohmann::json& j, const char* key, const std::string& path) {
    const auto& v = j.at(key);
    if (!v.is_number()) {
        throw Error(ErrorKind::InvalidValue, fmt::format("{}{} must be a number", path, key));
    }
    return v.get<double>();
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                    const std::string& path) {
    for (const auto& [key, _] : j.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) ==
            allowed.end()) {
            throw Error(ErrorKind::UnknownKey, fmt::format("unknown key '{}{}'", path, key));
        }
    }
}

} // namespace

ProcessSpec spec_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorKind::ParseError, "process spec must be a JSON object");
    reject_unknown(j, {"drift", "sigma2", "jumps"}, "");
    for (const char* key : {"drift", "sigma2"}) {
        if (!j.contains(key)) throw Error(ErrorKind::InvalidValue, fmt::format("missing key '{}'", key));
    }
    const double drift = number_at(j, "drift", "");
    const double sigma2 = number_at(j, "sigma2", "");
    double intensity = 0.0;
    std::vector<JumpComponent> mixture;
    if (j.contains("jumps")) {
        const auto& jumps = j.at("jumps");
        if (!jumps.is_object()) throw Error(ErrorKind::InvalidValue, "jumps must be an object");
        reject_unknown(jumps, {"intensity", "mixture"}, "jumps.");
        if (!jumps.contains("intensity") || !jumps.contains("mixture")) {
            throw Error(ErrorKind::InvalidValue, "jumps requires 'intensity' and 'mixture'");
        }
        intensity = number_at(jumps, "intensity", "jumps.");
        const auto& mix = jumps.at("mixture");
        if (!mix.is_array()) throw Error(ErrorKind::InvalidValue, "jumps.mixture must be an array");
        for (std::size_t i = 0; i < mix.size(); ++i) {
            const std::string path = fmt::format("jumps.mixture[{}].", i);
            if (!mix[i].is_object()) throw Error(ErrorKind::InvalidValue, path + " must be an object");
            reject_unknown(mix[i], {"weight", "rate"}, path);
            if (!mix[i].contains("weight") || !mix[i].contains("rate")) {
                throw Error(ErrorKind::InvalidValue, path + " requires 'weight' and 'rate'");
            }
            mixture.push_back({number_at(mix[i], "weight", path), number_at(mix[i], "rate", path)});
        }
    }
    try {
        return ProcessSpec::make(drift, sigma2, intensity, std::move(mixture));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::BadMixture) {
            throw Error(ErrorKind::InvalidValue, fmt::format("jumps.mixture: {}", e.what()));
        }
        throw Error(ErrorKind::InvalidValue, e.what());
    }
}

nlohmann::json spec_to_json(const ProcessSpec& spec) {
    nlohmann::json j;
    j["drift"] = spec.drift();
    j["sigma2"] = spec.gaussian_sq();
    if (spec.has_jumps()) {
        nlohmann::json mix = nlohmann::json::array();
        for (const auto& c : spec.jump_mixture()) mix.push_back({{"weight", c.weight}, {"rate", c.rate}});
        j["jumps"] = {{"intensity", spec.jump_intensity()}, {"mixture", mix}};
    }
    return j;
}

} // namespace levyfluct
