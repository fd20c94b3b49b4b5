#include "stieltjes/derivative.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stieltjes/errors.hpp"

namespace stieltjes {

namespace {

constexpr int kLevels = 40;
constexpr int kProbesPerSide = 8;

double window_base(const Derivator& g) { return (g.b() - g.a()) / 16.0; }

// Right limit of f at s: exact when supplied, otherwise linear extrapolation
// from the two finest window offsets (eps and 2*eps).
double right_limit(const TimeFunction& f, const Derivator& g, double s) {
    if (f.right_value) return f.right_value(s);
    const double eps = window_base(g) * std::ldexp(1.0, -(kLevels - 1));
    const double f1 = f.value(s + eps);
    const double f2 = f.value(s + 2.0 * eps);
    return 2.0 * f1 - f2;
}

}  // namespace

GDerivativeResult g_derivative(const TimeFunction& f, const Derivator& g, double t, double tol) {
    const PointClass pc = classify_point(g, t);
    const double s = pc.star;
    const PointClass sc = (s == t) ? pc : classify_point(g, s);

    if (g.jump_at(s) != 0.0) {
        const double jump = g.jump_at(s);
        const double fr = right_limit(f, g, s);
        return {(fr - f.value(s)) / jump, QuotientMethod::JumpQuotient, 0.0, 0.0};
    }

    bool left = true, right = true;
    if (sc.tag == PointTag::NgPlus) left = false;
    if (sc.tag == PointTag::NgMinus) right = false;
    if (s == g.a()) left = false;
    if (s == g.b()) right = false;

    const double gs = g.eval(s);
    const double fs = f.value(s);
    const double w0 = window_base(g);
    double best_spread = std::numeric_limits<double>::infinity();
    bool any_sample = false;

    for (int level = 0; level < kLevels; ++level) {
        const double w = w0 * std::ldexp(1.0, -level);
        double qmin = std::numeric_limits<double>::infinity();
        double qmax = -std::numeric_limits<double>::infinity();
        int count = 0;
        for (int j = 1; j <= kProbesPerSide; ++j) {
            const double off = w * static_cast<double>(j) / kProbesPerSide;
            for (int side = 0; side < 2; ++side) {
                if (side == 0 && !right) continue;
                if (side == 1 && !left) continue;
                const double x = side == 0 ? s + off : s - off;
                if (x < g.a() || x > g.b()) continue;
                const double gx = g.eval(x);
                if (gx == gs) continue;
                const double q = (f.value(x) - fs) / (gx - gs);
                if (!std::isfinite(q)) throw NonFiniteState("difference quotient is not finite");
                qmin = std::min(qmin, q);
                qmax = std::max(qmax, q);
                ++count;
            }
        }
        if (count == 0) continue;
        any_sample = true;
        const double spread = qmax - qmin;
        best_spread = std::min(best_spread, spread);
        if (spread < tol)
            return {0.5 * (qmin + qmax), QuotientMethod::LimitQuotient, w, spread};
    }

    if (!any_sample)
        throw DegenerateDenominator("g admits no increments near the star point");
    throw NonConvergence("difference quotients did not settle below the requested tolerance",
                         best_spread);
}

double chain_rule_explicit(double fg, double f_star, double jump,
                           const std::function<double(double)>& hprime) {
    if (fg == 0.0 || jump == 0.0) return fg * hprime(f_star);
    // 16-point Gauss-Legendre on [0, 1] for the averaged derivative.
    static const double nodes[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                    0.9445750230732326, 0.9894009349916499};
    static const double weights[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                      0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                      0.0622535239386479, 0.0271524594117541};
    const double mid = 0.5, half = 0.5;
    double acc = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double rp = mid + half * nodes[i];
        const double rm = mid - half * nodes[i];
        acc += weights[i] * (hprime(f_star + rp * fg * jump) + hprime(f_star + rm * fg * jump));
    }
    return fg * acc * half;
}

double chain_rule_implicit(double f_star, double f_star_right, double fg,
                           const std::function<double(double)>& h,
                           const std::function<double(double)>& hprime) {
    if (f_star_right == f_star) {
        if (!hprime)
            throw DomainError("chain rule needs a derivative oracle when the state does not jump");
        return hprime(f_star) * fg;
    }
    return (h(f_star_right) - h(f_star)) / (f_star_right - f_star) * fg;
}

double ftc_residual(const Integrand& f, const Derivator& g, std::span<const double> probes,
                    double tol) {
    const SignedMeasureView m{g};
    TimeFunction primitive;
    primitive.value = [&f, &m, a = g.a()](double t) { return integrate(f, m, a, t); };
    primitive.right_value = [&f, &m, &g, a = g.a()](double t) {
        return integrate(f, m, a, t) + f(t) * g.jump_at(t);
    };

    double worst = 0.0;
    for (double t : probes) {
        const PointClass pc = classify_point(g, t);
        const GDerivativeResult d = g_derivative(primitive, g, t, tol);
        worst = std::max(worst, std::abs(d.value - f(pc.star)));
    }
    return worst;
}

}  // namespace stieltjes
