#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oas/gauss_hermite.hpp"

using namespace oas;

namespace {

const double kSqrtPi = std::sqrt(M_PI);

// Apply a rule to g, approximating the integral of g over the real line.
template <class F>
double integrate(const HermiteRule& rule, F g) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * g(rule.nodes[i]);
    return acc;
}

} // namespace

TEST_CASE("low order rules match closed forms") {
    const HermiteRule& one = hermite_rule(1);
    REQUIRE(one.nodes.size() == 1);
    CHECK(one.nodes[0] == 0.0);
    CHECK(one.weights[0] == doctest::Approx(kSqrtPi).epsilon(1e-15));

    const HermiteRule& two = hermite_rule(2);
    REQUIRE(two.nodes.size() == 2);
    CHECK(two.nodes[0] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(two.nodes[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    // Premultiplied weights: w_i e^{x_i^2} = sqrt(pi) e^{1/2} / 2.
    CHECK(two.weights[0] == doctest::Approx(kSqrtPi * std::exp(0.5) / 2.0).epsilon(1e-15));
    CHECK(two.weights[1] == two.weights[0]);
}

TEST_CASE("nodes are ascending and exactly symmetric") {
    for (int order : {3, 8, 17, 64}) {
        const HermiteRule& rule = hermite_rule(order);
        REQUIRE(rule.nodes.size() == static_cast<std::size_t>(order));
        for (int i = 1; i < order; ++i) CHECK(rule.nodes[i - 1] < rule.nodes[i]);
        for (int i = 0; i < order; ++i) {
            CHECK(rule.nodes[i] == -rule.nodes[order - 1 - i]);
            CHECK(rule.weights[i] == rule.weights[order - 1 - i]);
            CHECK(rule.weights[i] > 0.0);
        }
        if (order % 2 == 1) CHECK(rule.nodes[order / 2] == 0.0);
    }
}

TEST_CASE("gaussian moments are integrated exactly") {
    // An order-n rule is exact for e^{-x^2} times polynomials of degree
    // 2n - 1; the even moments of e^{-x^2} are (2m-1)!! sqrt(pi) / 2^m.
    const HermiteRule& rule = hermite_rule(4);
    auto moment = [&](int m) {
        return integrate(rule, [m](double x) { return std::pow(x, m) * std::exp(-x * x); });
    };
    CHECK(moment(0) == doctest::Approx(kSqrtPi).epsilon(1e-14));
    CHECK(moment(2) == doctest::Approx(kSqrtPi / 2.0).epsilon(1e-14));
    CHECK(moment(4) == doctest::Approx(3.0 * kSqrtPi / 4.0).epsilon(1e-14));
    CHECK(moment(6) == doctest::Approx(15.0 * kSqrtPi / 8.0).epsilon(1e-14));
    CHECK(std::abs(moment(1)) < 1e-16);
    CHECK(std::abs(moment(3)) < 1e-16);
}

TEST_CASE("non polynomial integrand converges") {
    // integral e^{-x^2} cos(2x) dx = sqrt(pi) e^{-1}
    const double exact = kSqrtPi * std::exp(-1.0);
    const double approx = integrate(hermite_rule(20), [](double x) {
        return std::exp(-x * x) * std::cos(2.0 * x);
    });
    CHECK(approx == doctest::Approx(exact).epsilon(1e-14));
}

TEST_CASE("high order rules stay well conditioned") {
    const HermiteRule& rule = hermite_rule(128);
    double total = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        CHECK(std::isfinite(rule.weights[i]));
        CHECK(rule.weights[i] > 0.0);
        total += rule.weights[i] * std::exp(-rule.nodes[i] * rule.nodes[i]);
    }
    CHECK(total == doctest::Approx(kSqrtPi).epsilon(1e-13));
}

TEST_CASE("rules are cached per order") {
    const HermiteRule* a = &hermite_rule(9);
    const HermiteRule* b = &hermite_rule(9);
    CHECK(a == b);
}

TEST_CASE("order validation") {
    CHECK_THROWS_AS(hermite_rule(0), std::domain_error);
    CHECK_THROWS_AS(hermite_rule(-3), std::domain_error);
}
