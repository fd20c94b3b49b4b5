#include <doctest.h>

#include <cmath>

#include "stieltjes/derivator.hpp"
#include "stieltjes/exponential.hpp"

using namespace stieltjes;

namespace {

Derivator ramp_with_jump(double delta) {
    return Derivator({0.0, 1.0, 2.0}, {ConstantSlope{1.0}, ConstantSlope{1.0}}, {{1.0, delta}},
                     0.0);
}

Integrand constant(double v) {
    return Integrand{[v](double) { return v; }, 0};
}

double agree_tol(double direct) { return 1e-12 * std::max(1.0, std::abs(direct)); }

}  // namespace

TEST_CASE("positive factor keeps the exponential positive") {
    const Derivator g = ramp_with_jump(1.0);
    const Integrand h = constant(1.0);
    const auto dec = classify_jumps(h, g);
    CHECK(dec.t_minus.empty());
    CHECK(dec.t_n.empty());
    CHECK(dec.t_zero.empty());
    CHECK(dec.tau0 == 2.0);
    REQUIRE(dec.sign_breaks.size() == 1);
    CHECK(dec.sign_breaks[0] == 2.0);

    // Factor 2 at the jump, continuous integral 2 over [0,2).
    CHECK(g_exp(h, g, 2.0) == doctest::Approx(2.0 * std::exp(2.0)).epsilon(1e-13));
    CHECK(g_exp(h, g, 1.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-13));
    CHECK(std::abs(g_exp_via_hbar(h, g, 2.0) - g_exp(h, g, 2.0)) <= agree_tol(g_exp(h, g, 2.0)));
}

TEST_CASE("negative factor flips the sign once") {
    const Derivator g = ramp_with_jump(1.0);
    const Integrand h = constant(-2.0);
    const auto dec = classify_jumps(h, g);
    REQUIRE(dec.t_n.size() == 1);
    CHECK(dec.t_n[0] == 1.0);
    CHECK(dec.t_zero.empty());
    CHECK(dec.tau0 == 2.0);
    REQUIRE(dec.sign_breaks.size() == 2);
    CHECK(dec.sign_breaks[0] == 1.0);

    CHECK(g_exp(h, g, 1.5) == doctest::Approx(-std::exp(-3.0)).epsilon(1e-13));
    CHECK(g_exp(h, g, 2.0) == doctest::Approx(-std::exp(-4.0)).epsilon(1e-13));
    for (double t : {0.25, 1.0, 1.25, 1.75, 2.0})
        CHECK(std::abs(g_exp_via_hbar(h, g, t) - g_exp(h, g, t)) <= agree_tol(g_exp(h, g, t)));

    // hbar agrees with h off the jump set and carries log|factor|/jump on it.
    CHECK(dec.hbar(0.5) == -2.0);
    CHECK(dec.hbar(1.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
}

TEST_CASE("zero factor kills the exponential past tau0") {
    const Derivator g = ramp_with_jump(1.0);
    const Integrand h = constant(-1.0);
    const auto dec = classify_jumps(h, g);
    REQUIRE(dec.t_zero.size() == 1);
    CHECK(dec.t_zero[0] == 1.0);
    CHECK(dec.tau0 == 1.0);
    REQUIRE(dec.sign_breaks.size() == 1);
    CHECK(dec.sign_breaks[0] == 1.0);
    CHECK(dec.hbar(1.0) == 0.0);

    CHECK(g_exp(h, g, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
    CHECK(g_exp(h, g, 1.5) == 0.0);
    CHECK(g_exp(h, g, 2.0) == 0.0);
    CHECK(g_exp_via_hbar(h, g, 1.5) == 0.0);
    CHECK(g_exp_via_hbar(h, g, 2.0) == 0.0);
}

TEST_CASE("power-of-two jumps force exact zero factors") {
    const Derivator g = ramp_with_jump(0.25);
    const Integrand h = constant(-4.0);
    const auto dec = classify_jumps(h, g);
    CHECK(dec.tau0 == 1.0);
    CHECK(g_exp(h, g, 1.75) == 0.0);
    CHECK(g_exp_via_hbar(h, g, 1.75) == 0.0);
}

TEST_CASE("two negative factors cancel") {
    const Derivator g({0.0, 0.5, 1.5, 2.0},
                      {ConstantSlope{1.0}, ConstantSlope{1.0}, ConstantSlope{1.0}},
                      {{0.5, 1.0}, {1.5, 1.0}}, 0.0);
    const Integrand h = constant(-2.0);
    const auto dec = classify_jumps(h, g);
    CHECK(dec.t_n.size() == 2);
    REQUIRE(dec.sign_breaks.size() == 3);
    CHECK(dec.sign_breaks[0] == 0.5);
    CHECK(dec.sign_breaks[1] == 1.5);

    CHECK(g_exp(h, g, 1.0) < 0.0);
    CHECK(g_exp(h, g, 2.0) > 0.0);
    for (double t : {0.5, 1.0, 1.5, 2.0})
        CHECK(std::abs(g_exp_via_hbar(h, g, t) - g_exp(h, g, t)) <= agree_tol(g_exp(h, g, t)));
}

TEST_CASE("linear solution scales the exponential by x0") {
    const Derivator g = ramp_with_jump(1.0);
    const Integrand h = constant(-2.0);
    CHECK(linear_solution(1.0, h, g, 2.0) == doctest::Approx(-std::exp(-4.0)).epsilon(1e-13));
    CHECK(linear_solution(3.0, h, g, 2.0) == doctest::Approx(3.0 * g_exp(h, g, 2.0)));
    CHECK(linear_solution(0.0, h, g, 2.0) == 0.0);
}

TEST_CASE("time-dependent coefficients integrate through the continuous part") {
    const Derivator g = Derivator::identity(0.0, 1.0);
    const Integrand h{[](double t) { return 2.0 * t; }, 1};
    // No jumps: e_h(t) = exp(t^2).
    CHECK(g_exp(h, g, 1.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
    CHECK(g_exp_via_hbar(h, g, 1.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
}
