#include <doctest.h>

#include <cmath>
#include <vector>

#include "levyfluct/error.hpp"
#include "levyfluct/levy_model.hpp"
#include "oracles.hpp"

using namespace levyfluct;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::DomainError;
}

std::vector<ProcessSpec> family() {
    return {
        ProcessSpec::make(1.0, 2.0),
        oracle::brownian(),
        oracle::cramer_lundberg(),
        ProcessSpec::make(1.0, 0.0, 2.0, {{1.0, 1.0}}),
        ProcessSpec::make(-0.5, 1.0, 1.5, {{0.4, 2.0}, {0.6, 5.0}}),
        ProcessSpec::make(3.0, 0.5, 4.0, {{0.2, 0.5}, {0.3, 1.0}, {0.5, 7.0}}),
    };
}

} // namespace

TEST_CASE("spec validation") {
    CHECK_NOTHROW(ProcessSpec::make(1.0, 2.0));
    CHECK_NOTHROW(ProcessSpec::make(2.0, 0.0, 1.0, {{1.0, 1.0}}));
    CHECK(kind_of([] { (void)ProcessSpec::make(1.0, 0.0); }) == ErrorKind::MonotonePath);
    CHECK(kind_of([] { (void)ProcessSpec::make(-1.0, 0.0, 1.0, {{1.0, 1.0}}); }) == ErrorKind::MonotonePath);
    CHECK(kind_of([] { (void)ProcessSpec::make(0.0, 0.0, 1.0, {{1.0, 1.0}}); }) == ErrorKind::MonotonePath);
    CHECK(kind_of([] { (void)ProcessSpec::make(1.0, -2.0); }) == ErrorKind::NegativeParameter);
    CHECK(kind_of([] { (void)ProcessSpec::make(1.0, 1.0, -1.0, {{1.0, 1.0}}); }) == ErrorKind::NegativeParameter);
    CHECK(kind_of([] { (void)ProcessSpec::make(NAN, 1.0); }) == ErrorKind::NegativeParameter);
    CHECK(kind_of([] { (void)ProcessSpec::make(1.0, 1.0, 1.0, {{0.5, 1.0}, {0.4, 2.0}}); }) == ErrorKind::BadMixture);
    CHECK(kind_of([] { (void)ProcessSpec::make(1.0, 1.0, 1.0, {}); }) == ErrorKind::BadMixture);
    CHECK(kind_of([] { (void)ProcessSpec::make(1.0, 1.0, 0.0, {{1.0, 1.0}}); }) == ErrorKind::BadMixture);
    CHECK(kind_of([] { (void)ProcessSpec::make(1.0, 1.0, 1.0, {{1.0, 0.0}}); }) == ErrorKind::BadMixture);
    CHECK(kind_of([] { (void)ProcessSpec::make(1.0, 1.0, 1.0, {{0.0, 1.0}, {1.0, 2.0}}); }) == ErrorKind::BadMixture);
}

TEST_CASE("laplace exponent values") {
    CHECK(phi(ProcessSpec::make(1.0, 2.0), 1.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(phi(oracle::cramer_lundberg(), 1.0) == doctest::Approx(1.5).epsilon(1e-15));
    for (const auto& s : family()) CHECK(phi(s, 0.0) == 0.0);
    CHECK(kind_of([] { (void)phi(oracle::brownian(), -0.1); }) == ErrorKind::DomainError);

    CHECK(phi_prime(ProcessSpec::make(1.0, 2.0), 0.0) == doctest::Approx(1.0));
    CHECK(phi_prime(oracle::cramer_lundberg(), 0.0) == doctest::Approx(1.0));
    CHECK(phi_prime(ProcessSpec::make(1.0, 2.0), 1.0) == doctest::Approx(3.0));
    CHECK(kind_of([] { (void)phi_prime(oracle::brownian(), -1.0); }) == ErrorKind::DomainError);

    for (const auto& s : family()) {
        CHECK(phi_prime(s, 0.0) == doctest::Approx(s.mean()));
        // central difference against the analytic derivative
        for (const double a : {0.3, 1.0, 4.0}) {
            const double h = 1e-5;
            CHECK(phi_prime(s, a) == doctest::Approx((phi(s, a + h) - phi(s, a - h)) / (2 * h)).epsilon(1e-7));
        }
    }
}

TEST_CASE("laplace exponent is convex") {
    for (const auto& s : family()) {
        for (double a = 0.0; a < 10.0; a += 0.37) {
            for (double b = a + 0.1; b < 12.0; b += 0.91) {
                CHECK(phi(s, 0.5 * (a + b)) <= 0.5 * (phi(s, a) + phi(s, b)) + 1e-12);
            }
        }
    }
}

TEST_CASE("complex exponent agrees on the real axis") {
    for (const auto& s : family()) {
        for (const double a : {0.0, 0.5, 2.0}) CHECK(phi_complex(s, a).real() == doctest::Approx(phi(s, a)));
        CHECK(phi_extended(s, 0.7) == doctest::Approx(phi(s, 0.7)));
    }
    const auto cl = oracle::cramer_lundberg();
    CHECK(phi_extended(cl, -0.5) == doctest::Approx(-1.0 + 0.5 / 0.5));
    CHECK(kind_of([&] { (void)phi_extended(cl, -1.0); }) == ErrorKind::DivergedTransform);
    CHECK(jump_magnitude_transform(cl, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("right inverse") {
    CHECK(right_inverse(oracle::brownian(), 4.0) == 2.0);
    CHECK(right_inverse(ProcessSpec::make(1.0, 2.0), 0.0) == 0.0);
    CHECK(right_inverse(ProcessSpec::make(1.0, 0.0, 2.0, {{1.0, 1.0}}), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(kind_of([] { (void)right_inverse(oracle::brownian(), -1.0); }) == ErrorKind::DomainError);

    for (const auto& s : family()) {
        double previous = 0.0;
        for (double q = 1e-6; q <= 1e3; q *= 3.7) {
            const double root = right_inverse(s, q);
            CHECK(std::abs(phi(s, root) - q) <= 1e-12 * std::max(1.0, q));
            CHECK(root >= previous);
            previous = root;
        }
    }
}

TEST_CASE("exponential tilt") {
    const auto t = tilt(ProcessSpec::make(1.0, 2.0), 2.0);
    CHECK(t.phi_q == doctest::Approx(1.0));
    for (const double a : {0.0, 0.5, 1.0, 3.0}) {
        CHECK(phi(t.tilted, a) == doctest::Approx(a * a + 3.0 * a).epsilon(1e-12));
    }
    CHECK(kind_of([] { (void)tilt(oracle::brownian(), 0.0); }) == ErrorKind::DomainError);

    for (const auto& s : family()) {
        for (const double q : {0.01, 0.5, 3.0}) {
            const auto ts = tilt(s, q);
            CHECK(std::abs(ts.psi(0.0)) <= 1e-10);
            CHECK(phi_prime(ts.tilted, 0.0) > 0.0);
            CHECK(phi_prime(ts.tilted, 0.0) == doctest::Approx(phi_prime(s, ts.phi_q)));
            for (double a = 0.0; a <= 8.0; a += 0.25) CHECK(std::abs(phi(ts.tilted, a) - ts.psi(a)) <= 1e-10);
        }
    }
}

TEST_CASE("spec json round trip and strictness") {
    for (const auto& s : family()) CHECK(spec_from_json(spec_to_json(s)) == s);
    CHECK(spec_from_json(nlohmann::json::parse(R"({"drift": 0, "sigma2": 2})")) == oracle::brownian());
    CHECK(kind_of([] { (void)spec_from_json(nlohmann::json::parse(R"({"drift": 0, "sigma": -1})")); }) ==
          ErrorKind::UnknownKey);
    CHECK(kind_of([] {
              (void)spec_from_json(nlohmann::json::parse(
                  R"({"drift": 1, "sigma2": 1, "jumps": {"intensity": 1, "mixture": [{"weight": 0.9, "rate": 1}]}})"));
          }) == ErrorKind::InvalidValue);
    try {
        (void)spec_from_json(nlohmann::json::parse(
            R"({"drift": 1, "sigma2": 1, "jumps": {"intensity": 1, "mixture": [{"weight": 0.9, "rate": 1}]}})"));
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("mixture") != std::string::npos);
    }
}
