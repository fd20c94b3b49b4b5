#include "stieltjes/measure.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <unordered_map>
#include <vector>

#include "stieltjes/errors.hpp"
#include "stieltjes/polynomial.hpp"

namespace stieltjes {

namespace {

struct GaussRule {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;  // summing to 2
};

// Legendre nodes by Newton iteration; cached per order.
const GaussRule& gauss_rule(int n) {
    static std::mutex mu;
    static std::unordered_map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(n, std::move(r)).first->second;
}

int rule_order(const std::optional<int>& hint, int density_degree) {
    if (!hint) return 16;
    const int total = std::max(0, *hint) + std::max(0, density_degree);
    return std::clamp(total / 2 + 1, 2, 64);
}

double checked(double v) {
    if (!std::isfinite(v)) throw NonFiniteState("integrand evaluated to a non-finite value");
    return v;
}

// Gauss-Legendre integral of f * weight_fn over [lo, hi].
template <class W>
double gauss_integral(const Integrand& f, int order, double lo, double hi, W&& weight) {
    const GaussRule& r = gauss_rule(order);
    const double c = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
    double acc = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        const double s = c + hw * r.nodes[i];
        acc += r.weights[i] * checked(f(s)) * weight(s);
    }
    return acc * hw;
}

// Density part of the integral of f over [u, v) against g (or |g| when
// absolute is set).  Jump contributions are handled by the caller.
double density_part(const Integrand& f, const Derivator& g, double u, double v, bool absolute) {
    const auto& bp = g.breakpoints();
    const auto& segs = g.segments();
    double acc = 0.0;

    for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
        const double lo = std::max(u, bp[k]);
        const double hi = std::min(v, bp[k + 1]);
        if (!(lo < hi)) continue;
        const auto& s = segs[k];

        if (std::holds_alternative<ZeroDensity>(s)) continue;

        if (const auto* cs = std::get_if<ConstantSlope>(&s)) {
            const double c = absolute ? std::abs(cs->slope) : cs->slope;
            acc += gauss_integral(f, rule_order(f.degree_hint, 0), lo, hi,
                                  [c](double) { return c; });
            continue;
        }

        if (const auto* pd = std::get_if<PolynomialDensity>(&s)) {
            // Sign-definite per segment, so |p| is p up to one sign.
            double flip = 1.0;
            if (absolute) {
                const double mid = poly::eval(pd->coeffs, 0.5 * (bp[k + 1] - bp[k]));
                if (mid < 0.0) flip = -1.0;
            }
            const double t0 = bp[k];
            acc += gauss_integral(f, rule_order(f.degree_hint, poly::degree(pd->coeffs)), lo, hi,
                                  [&, flip, t0](double t) { return flip * poly::eval(pd->coeffs, t - t0); });
            continue;
        }

        const auto& sd = std::get<SampledDensity>(s);
        const std::size_t n = sd.values.size() - 1;
        const double h = (bp[k + 1] - bp[k]) / static_cast<double>(n);
        auto cell_of = [&](double t) {
            auto j = static_cast<std::size_t>(std::floor((t - bp[k]) / h));
            return std::min(j, n - 1);
        };
        for (std::size_t j = cell_of(lo); j <= cell_of(std::nextafter(hi, lo)); ++j) {
            const double nl = bp[k] + h * static_cast<double>(j);
            const double nr = bp[k] + h * static_cast<double>(j + 1);
            const double clo = std::max(lo, nl), chi = std::min(hi, nr);
            if (!(clo < chi)) continue;
            if (sd.rule == QuadratureRule::LeftRectangle) {
                const double d = absolute ? std::abs(sd.values[j]) : sd.values[j];
                acc += checked(f(clo)) * d * (chi - clo);
            } else {
                auto dens = [&](double t) {
                    const double val = sd.values[j] + (sd.values[j + 1] - sd.values[j]) * ((t - nl) / h);
                    return absolute ? std::abs(val) : val;
                };
                acc += 0.5 * (checked(f(clo)) * dens(clo) + checked(f(chi)) * dens(chi)) * (chi - clo);
            }
        }
    }
    return acc;
}

double jump_part(const Integrand& f, const Derivator& g, double u, double v, bool absolute) {
    double acc = 0.0;
    for (const auto& [t, d] : g.jumps()) {
        if (t < u) continue;
        if (t >= v) break;
        acc += checked(f(t)) * (absolute ? std::abs(d) : d);
    }
    return acc;
}

void check_interval(const Derivator& g, double u, double v) {
    if (!(u >= g.a() && v <= g.b() && u <= v))
        throw DomainError("integration interval must satisfy a <= u <= v <= b");
}

}  // namespace

SignedMeasureView::SignedMeasureView(Derivator g) : g_(std::move(g)), var_(variation(g_)) {}

double SignedMeasureView::measure(double u, double v) const {
    check_interval(g_, u, v);
    return g_.eval(v) - g_.eval(u);
}

double SignedMeasureView::abs_measure(double u, double v) const {
    check_interval(g_, u, v);
    return var_.eval(v) - var_.eval(u);
}

double integrate(const Integrand& f, const SignedMeasureView& m, double u, double v) {
    const Derivator& g = m.derivator();
    check_interval(g, u, v);
    if (u == v) return 0.0;
    return jump_part(f, g, u, v, false) + density_part(f, g, u, v, false);
}

double integrate_abs(const Integrand& f, const SignedMeasureView& m, double u, double v) {
    const Derivator& g = m.derivator();
    check_interval(g, u, v);
    if (u == v) return 0.0;
    return jump_part(f, g, u, v, true) + density_part(f, g, u, v, true);
}

}  // namespace stieltjes
