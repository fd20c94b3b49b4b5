#include <doctest.h>

#include <cmath>
#include <functional>

#include "stieltjes/derivator.hpp"
#include "stieltjes/errors.hpp"
#include "stieltjes/measure.hpp"

using namespace stieltjes;

namespace {

// Independent Riemann-Stieltjes oracle over [u, v) built from eval /
// eval_right only: midpoint rule for the continuous part of each cell plus
// f at the left end for the jump mass there.  Second order in the cell
// width once every breakpoint is a partition point.
double rs_oracle(const std::function<double(double)>& f, const Derivator& g, double u, double v,
                 int cells = 4000) {
    std::vector<double> pts{u, v};
    for (double t : g.breakpoints())
        if (t > u && t < v) pts.push_back(t);
    for (int i = 1; i < cells; ++i) pts.push_back(u + (v - u) * i / cells);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double p = pts[i], q = pts[i + 1];
        const double jump = g.eval_right(p) - g.eval(p);
        acc += f(p) * jump;
        acc += f(0.5 * (p + q)) * (g.eval(q) - g.eval_right(p));
    }
    return acc;
}

}  // namespace

TEST_CASE("interval conventions and bounds") {
    const Derivator g = Derivator::identity(0.0, 2.0);
    const SignedMeasureView m{g};
    const Integrand one{[](double) { return 1.0; }, 0};
    CHECK(integrate(one, m, 0.5, 0.5) == 0.0);
    CHECK_THROWS_AS((void)integrate(one, m, 1.0, 0.5), DomainError);
    CHECK_THROWS_AS((void)integrate(one, m, -0.5, 1.0), DomainError);
    CHECK_THROWS_AS((void)integrate(one, m, 0.0, 2.5), DomainError);
}

TEST_CASE("jump mass follows the left-closed convention") {
    const Derivator g({0.0, 1.0, 2.0}, {ConstantSlope{1.0}, ConstantSlope{1.0}}, {{1.0, 1.0}},
                      0.0);
    const SignedMeasureView m{g};
    const Integrand f{[](double t) { return t; }, 1};
    // Integral of s over [0,2): continuous part 2 plus the jump at 1.
    CHECK(integrate(f, m, 0.0, 2.0) == doctest::Approx(3.0).epsilon(1e-14));
    // [0,1) excludes the jump, [1,2) includes it.
    CHECK(integrate(f, m, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(integrate(f, m, 1.0, 2.0) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(m.measure(0.5, 1.5) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(m.abs_measure(0.5, 1.5) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("polynomial times polynomial is quadrature-exact") {
    const Derivator g({0.0, 2.0}, {PolynomialDensity{{-1.0, 1.0}}}, {}, 0.0);
    const SignedMeasureView m{g};
    const Integrand f{[](double t) { return t * t; }, 2};
    CHECK(integrate(f, m, 0.0, 2.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(integrate_abs(f, m, 0.0, 2.0) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(m.measure(0.0, 2.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(m.abs_measure(0.0, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("degree hints are optional: default order handles smooth integrands") {
    const Derivator g = Derivator::identity(0.0, 1.0);
    const SignedMeasureView m{g};
    const Integrand f{[](double t) { return std::sin(t); }, std::nullopt};
    CHECK(integrate(f, m, 0.0, 1.0) == doctest::Approx(1.0 - std::cos(1.0)).epsilon(1e-12));
}

TEST_CASE("sampled left-rectangle integration evaluates f at cell lefts") {
    const Derivator g({0.0, 1.0}, {SampledDensity{{2.0, 4.0, 6.0}, QuadratureRule::LeftRectangle}},
                      {}, 0.0);
    const SignedMeasureView m{g};
    const Integrand f{[](double t) { return t; }, 1};
    CHECK(integrate(f, m, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    // Partial cells clip at the interval ends.
    CHECK(integrate(f, m, 0.25, 0.75) == doctest::Approx(0.625).epsilon(1e-15));
}

TEST_CASE("sampled trapezoid integration averages the endpoint products") {
    const Derivator g({0.0, 1.0}, {SampledDensity{{0.0, 2.0}, QuadratureRule::Trapezoid}}, {}, 0.0);
    const SignedMeasureView m{g};
    const Integrand one{[](double) { return 1.0; }, 0};
    const Integrand f{[](double t) { return t; }, 1};
    CHECK(integrate(one, m, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(integrate(f, m, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("agreement with the Riemann-Stieltjes oracle on a mixed derivator") {
    // Sampled segments are excluded on purpose: their declared node reading
    // is not the refinement limit this oracle computes.
    const Derivator g({0.0, 0.5, 1.0, 2.0},
                      {PolynomialDensity{{-1.0, 2.0}},
                       PolynomialDensity{{1.0, -4.0}},
                       ConstantSlope{-0.5}},
                      {{0.5, -0.75}, {1.0, 0.25}}, 3.0);
    const SignedMeasureView m{g};
    const Integrand f{[](double t) { return 1.0 + t; }, 1};
    const auto plain = [](double t) { return 1.0 + t; };
    CHECK(integrate(f, m, 0.0, 2.0) == doctest::Approx(rs_oracle(plain, g, 0.0, 2.0)).epsilon(1e-6));
    CHECK(integrate(f, m, 0.25, 1.75) ==
          doctest::Approx(rs_oracle(plain, g, 0.25, 1.75)).epsilon(1e-6));

    const Derivator var = variation(g);
    const SignedMeasureView mv{var};
    CHECK(integrate_abs(f, m, 0.0, 2.0) ==
          doctest::Approx(rs_oracle(plain, var, 0.0, 2.0)).epsilon(1e-6));
    CHECK(integrate_abs(f, m, 0.0, 2.0) == doctest::Approx(integrate(f, mv, 0.0, 2.0)));
}

TEST_CASE("non-finite integrand values are reported") {
    const Derivator g = Derivator::identity(0.0, 1.0);
    const SignedMeasureView m{g};
    const Integrand bad{[](double) { return std::nan(""); }, std::nullopt};
    CHECK_THROWS_AS((void)integrate(bad, m, 0.0, 1.0), NonFiniteState);
}
