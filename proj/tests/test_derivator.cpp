#include <doctest.h>

#include <cmath>
#include <random>

#include "stieltjes/derivator.hpp"
#include "stieltjes/errors.hpp"

using namespace stieltjes;

namespace {

// Brute-force total variation through eval() only: partition sum over a grid
// that contains every breakpoint, every sampled sub-node and a point just
// right of every jump.  Densities are sign-definite between those points, so
// the sum is exact up to the 1e-9 jump-isolation slivers.
double tv_oracle(const Derivator& g, int cells_per_piece = 64) {
    std::vector<double> pts;
    const auto& bp = g.breakpoints();
    for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
        std::vector<double> nodes{bp[k], bp[k + 1]};
        if (const auto* s = std::get_if<SampledDensity>(&g.segments()[k])) {
            const double h = (bp[k + 1] - bp[k]) / static_cast<double>(s->values.size() - 1);
            for (std::size_t j = 1; j + 1 < s->values.size(); ++j)
                nodes.insert(nodes.end() - 1, bp[k] + h * static_cast<double>(j));
        }
        for (std::size_t j = 0; j + 1 < nodes.size(); ++j)
            for (int i = 0; i < cells_per_piece; ++i)
                pts.push_back(nodes[j] + (nodes[j + 1] - nodes[j]) * i / cells_per_piece);
    }
    pts.push_back(bp.back());
    const double sliver = 1e-9 * (g.b() - g.a());
    for (const auto& [s, d] : g.jumps()) pts.push_back(s + sliver);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    while (pts.back() > g.b()) pts.pop_back();

    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        acc += std::abs(g.eval(pts[i + 1]) - g.eval(pts[i]));
    return acc;
}

Derivator ramp_with_jump() {
    return Derivator({0.0, 1.0, 2.0}, {ConstantSlope{1.0}, ConstantSlope{1.0}}, {{1.0, 1.0}}, 0.0);
}

}  // namespace

TEST_CASE("construction rejects malformed input") {
    CHECK_THROWS_AS(Derivator({0.0}, {}, {}, 0.0), DomainError);
    CHECK_THROWS_AS(Derivator({0.0, 0.0}, {ZeroDensity{}}, {}, 0.0), DomainError);
    CHECK_THROWS_AS(Derivator({1.0, 0.0}, {ZeroDensity{}}, {}, 0.0), DomainError);
    CHECK_THROWS_AS(Derivator({0.0, 1.0}, {}, {}, 0.0), DomainError);
    CHECK_THROWS_AS(Derivator({0.0, 1.0}, {ZeroDensity{}}, {}, std::nan("")), DomainError);
    // Jumps only at breakpoints, never at b.
    CHECK_THROWS_AS(Derivator({0.0, 1.0}, {ZeroDensity{}}, {{0.5, 1.0}}, 0.0), DomainError);
    CHECK_THROWS_AS(Derivator({0.0, 1.0}, {ZeroDensity{}}, {{1.0, 1.0}}, 0.0), DomainError);
    // Sampled segments need at least two nodes.
    CHECK_THROWS_AS(Derivator({0.0, 1.0}, {SampledDensity{{1.0}, QuadratureRule::LeftRectangle}},
                              {}, 0.0),
                    DomainError);
}

TEST_CASE("evaluation is left continuous with exact jumps") {
    const Derivator g = ramp_with_jump();
    CHECK(g.eval(0.0) == 0.0);
    CHECK(g.eval(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g.eval_right(1.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(g.jump_at(1.0) == 1.0);
    CHECK(g.jump_at(0.5) == 0.0);
    CHECK(g.eval(1.5) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(g.eval(2.0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(g.total_variation() == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(g.scale() == doctest::Approx(3.0));
    CHECK_THROWS_AS((void)g.eval(-0.1), DomainError);
    CHECK_THROWS_AS((void)g.eval(2.1), DomainError);
}

TEST_CASE("eval_right minus eval equals the stored jump everywhere") {
    const Derivator g({0.0, 0.5, 1.0, 2.0},
                      {PolynomialDensity{{-1.0, 2.0}}, ZeroDensity{}, ConstantSlope{-0.5}},
                      {{0.5, -0.75}, {1.0, 0.25}}, 3.0);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int i = 0; i < 1000; ++i) {
        const double t = u(rng);
        CHECK(g.eval_right(t) - g.eval(t) == g.jump_at(t));
    }
    for (double t : g.breakpoints())
        if (t < g.b()) CHECK(g.eval_right(t) - g.eval(t) == g.jump_at(t));
}

TEST_CASE("identity evaluates to t exactly") {
    const Derivator id = Derivator::identity(0.0, 5.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int i = 0; i < 200; ++i) {
        const double t = u(rng);
        CHECK(id.eval(t) == t);
    }
    CHECK(id.eval(5.0) == 5.0);
    CHECK(id.total_variation() == 5.0);
}

TEST_CASE("constant derivator is flat and warns about b") {
    const Derivator c = Derivator::constant(0.0, 2.0, 4.0);
    CHECK(c.eval(1.3) == 4.0);
    CHECK(c.total_variation() == 0.0);
    CHECK(c.scale() == 1.0);
    CHECK(c.b_in_ng_plus());
    DerivatorOptions strict;
    strict.require_b_not_in_ng_plus = true;
    CHECK_THROWS_AS(Derivator({0.0, 2.0}, {ZeroDensity{}}, {}, 4.0, strict), DomainError);
}

TEST_CASE("polynomial density splits at sign changes") {
    // density (t-1)(t-3) = 3 - 4t + t^2 on [0,4]; roots at 1 and 3.
    const Derivator g({0.0, 4.0}, {PolynomialDensity{{3.0, -4.0, 1.0}}}, {}, 0.0);
    CHECK(g.breakpoints().size() == 4);
    CHECK(g.breakpoints()[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.breakpoints()[2] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(g.eval(4.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(g.total_variation() == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(g.density_value(0.5) == doctest::Approx(0.5 * 0.5 - 4.0 * 0.5 + 3.0));
}

TEST_CASE("sampled densities: left rectangle reading") {
    const Derivator g({0.0, 1.0}, {SampledDensity{{2.0, 4.0, 6.0}, QuadratureRule::LeftRectangle}},
                      {}, 0.0);
    CHECK(g.eval(1.0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(g.eval(0.75) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(g.density_value(0.25) == 2.0);
    CHECK(g.density_value(0.75) == 4.0);
    const Derivator s({0.0, 1.0}, {SampledDensity{{2.0, -4.0, 6.0}, QuadratureRule::LeftRectangle}},
                      {}, 0.0);
    CHECK(s.eval(1.0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(s.total_variation() == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("sampled densities: trapezoid reading") {
    const Derivator g({0.0, 1.0}, {SampledDensity{{0.0, 2.0}, QuadratureRule::Trapezoid}}, {}, 0.0);
    CHECK(g.eval(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g.eval(0.5) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g.density_value(0.5) == doctest::Approx(1.0));
    // Strict in-cell sign change is not representable.
    CHECK_THROWS_AS(Derivator({0.0, 1.0}, {SampledDensity{{-1.0, 1.0}, QuadratureRule::Trapezoid}},
                              {}, 0.0),
                    DomainError);
    // Touching zero at a node is fine.
    CHECK_NOTHROW(Derivator({0.0, 1.0},
                            {SampledDensity{{-1.0, 0.0, 1.0}, QuadratureRule::Trapezoid}}, {}, 0.0));
}

TEST_CASE("variation against the partition-sum oracle") {
    const Derivator g({0.0, 0.5, 1.0, 2.0},
                      {PolynomialDensity{{-1.0, 2.0}},
                       SampledDensity{{1.0, -1.0, 2.0}, QuadratureRule::LeftRectangle},
                       ConstantSlope{-0.5}},
                      {{0.5, -0.75}, {1.0, 0.25}}, 3.0);
    const double tv = tv_oracle(g);
    CHECK(g.total_variation() == doctest::Approx(tv).epsilon(1e-7));
    const Derivator var = variation(g);
    CHECK(var.anchor() == 0.0);
    CHECK(var.eval(2.0) == doctest::Approx(tv).epsilon(1e-7));
    CHECK(var.eval(2.0) == doctest::Approx(g.total_variation()).epsilon(1e-14));
    CHECK(var.jump_at(0.5) == 0.75);
}

TEST_CASE("jordan pieces reconstruct g and the variation") {
    const Derivator g({0.0, 1.0, 2.0},
                      {PolynomialDensity{{-1.0, 1.0}}, ConstantSlope{2.0}},
                      {{0.0, -1.0}, {1.0, 0.5}}, -2.0);
    const auto [g1, g2] = jordan(g);
    const Derivator var = variation(g);
    CHECK(g1.anchor() == 0.0);
    CHECK(g2.anchor() == 0.0);
    const double tol = 1e-13 * g.scale();
    for (int i = 0; i <= 400; ++i) {
        const double t = 2.0 * i / 400.0;
        CHECK(std::abs(g.anchor() + g1.eval(t) - g2.eval(t) - g.eval(t)) <= tol);
        CHECK(std::abs(g1.eval(t) + g2.eval(t) - var.eval(t)) <= tol);
    }
    // Monotone: both pieces have nonnegative increments.
    for (int i = 0; i < 400; ++i) {
        const double t = 2.0 * i / 400.0;
        const double s = 2.0 * (i + 1) / 400.0;
        CHECK(g1.eval(s) - g1.eval(t) >= -tol);
        CHECK(g2.eval(s) - g2.eval(t) >= -tol);
    }
}

TEST_CASE("constancy components and point classification") {
    const Derivator g({0.0, 1.0, 2.0, 3.0},
                      {ConstantSlope{1.0}, ZeroDensity{}, ConstantSlope{1.0}}, {}, 0.0);
    const auto comps = constancy_components(g);
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].first == 1.0);
    CHECK(comps[0].second == 2.0);

    CHECK(classify_point(g, 0.5).tag == PointTag::Regular);
    CHECK(classify_point(g, 0.5).star == 0.5);
    CHECK(classify_point(g, 1.5).tag == PointTag::ConstancyInterior);
    CHECK(classify_point(g, 1.5).star == 2.0);
    CHECK(classify_point(g, 1.0).tag == PointTag::NgMinus);
    CHECK(classify_point(g, 1.0).star == 1.0);
    CHECK(classify_point(g, 2.0).tag == PointTag::NgPlus);
    CHECK(classify_point(g, 2.0).star == 2.0);
    CHECK_FALSE(g.b_in_ng_plus());
}

TEST_CASE("jump points win over constancy endpoints") {
    const Derivator g({0.0, 1.0, 2.0, 3.0},
                      {ConstantSlope{1.0}, ZeroDensity{}, ConstantSlope{1.0}}, {{1.0, 0.5}}, 0.0);
    CHECK(classify_point(g, 1.0).tag == PointTag::Jump);
    CHECK(classify_point(g, 1.0).star == 1.0);
}

TEST_CASE("component abutting a maps interior points to its right end") {
    const Derivator g({0.0, 1.0, 2.0}, {ZeroDensity{}, ConstantSlope{1.0}}, {}, 0.0);
    const auto at_a = classify_point(g, 0.0);
    CHECK(at_a.tag == PointTag::Regular);
    CHECK(at_a.star == 1.0);
    CHECK(classify_point(g, 0.5).star == 1.0);
}

TEST_CASE("adjacent flat segments merge when no jump separates them") {
    const Derivator merged({0.0, 1.0, 2.0, 3.0},
                           {ConstantSlope{1.0}, ZeroDensity{}, ZeroDensity{}}, {}, 0.0);
    const auto comps = constancy_components(merged);
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].second == 3.0);
    CHECK(merged.b_in_ng_plus());

    const Derivator split({0.0, 1.0, 2.0, 3.0},
                          {ConstantSlope{1.0}, ZeroDensity{}, ZeroDensity{}}, {{2.0, 1.0}}, 0.0);
    CHECK(constancy_components(split).size() == 2);
}

TEST_CASE("sum is exact and pointwise") {
    const Derivator a({0.0, 1.0, 2.0}, {ConstantSlope{1.0}, ZeroDensity{}}, {{1.0, 2.0}}, 1.0);
    const Derivator b({0.0, 2.0}, {ConstantSlope{2.0}}, {{0.0, -1.0}}, -0.5);
    const Derivator s = sum({a, b});
    CHECK(s.anchor() == 0.5);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int i = 0; i < 300; ++i) {
        const double t = u(rng);
        CHECK(s.eval(t) == doctest::Approx(a.eval(t) + b.eval(t)).epsilon(1e-14));
    }
    CHECK(s.jump_at(1.0) == 2.0);
    CHECK(s.jump_at(0.0) == -1.0);
}

TEST_CASE("sum adds slopes into sampled node values") {
    const Derivator a = Derivator::identity(0.0, 1.0);
    const Derivator b({0.0, 1.0}, {SampledDensity{{2.0, 4.0, 6.0}, QuadratureRule::LeftRectangle}},
                      {}, 0.0);
    const Derivator s = sum({a, b});
    CHECK(s.eval(1.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(s.density_value(0.25) == doctest::Approx(3.0));
}

TEST_CASE("sum refines commensurate sampled grids and rejects the rest") {
    const Derivator a({0.0, 1.0}, {SampledDensity{{1.0, 1.0, 1.0}, QuadratureRule::LeftRectangle}},
                      {}, 0.0);
    const Derivator b({0.0, 1.0},
                      {SampledDensity{{2.0, 2.0, 2.0, 2.0}, QuadratureRule::LeftRectangle}}, {},
                      0.0);
    const Derivator s = sum({a, b});
    CHECK(s.eval(1.0) == doctest::Approx(3.0).epsilon(1e-14));

    const Derivator trap({0.0, 1.0}, {SampledDensity{{2.0, 2.0}, QuadratureRule::Trapezoid}}, {},
                         0.0);
    CHECK_THROWS_AS(sum({a, trap}), DomainError);

    const Derivator poly({0.0, 1.0}, {PolynomialDensity{{0.0, 1.0}}}, {}, 0.0);
    CHECK_THROWS_AS(sum({a, poly}), DomainError);

    CHECK_THROWS_AS(sum({a, Derivator::identity(0.0, 2.0)}), DomainError);
}

TEST_CASE("density integrals split continuous and jump mass") {
    const Derivator g = ramp_with_jump();
    CHECK(g.density_integral(0.0, 2.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(g.abs_density_integral(0.0, 2.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(g.eval(2.0) - g.eval(0.0) == doctest::Approx(3.0).epsilon(1e-15));
}
