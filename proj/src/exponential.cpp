#include "stieltjes/exponential.hpp"

#include <cmath>
#include <map>

#include "stieltjes/errors.hpp"

namespace stieltjes {

namespace {

double zero_cut(double hj) { return 1e-14 * (1.0 + std::abs(hj)); }

void check_time(const Derivator& g, double t) {
    if (!(t >= g.a() && t <= g.b())) throw DomainError("evaluation time outside the domain");
}

// Continuous part of the integral of h over [a, t): full integral minus the
// jump terms.
double continuous_integral(const Integrand& h, const SignedMeasureView& m, double t) {
    double acc = integrate(h, m, m.derivator().a(), t);
    for (const auto& [s, d] : m.derivator().jumps()) {
        if (s >= t) break;
        acc -= h(s) * d;
    }
    return acc;
}

}  // namespace

ExpDecomposition classify_jumps(const Integrand& h, const Derivator& g) {
    ExpDecomposition dec;
    dec.tau0 = g.b();
    std::map<double, double> hbar_jumps;  // value of hbar at each jump time

    for (const auto& [s, d] : g.jumps()) {
        const double hj = h(s) * d;
        if (!std::isfinite(hj)) throw NonFiniteState("h evaluated to a non-finite value at a jump");
        const double factor = 1.0 + hj;
        if (std::abs(factor) <= zero_cut(hj)) {
            dec.t_minus.push_back(s);
            dec.t_zero.push_back(s);
        } else if (factor < 0.0) {
            dec.t_minus.push_back(s);
            dec.t_n.push_back(s);
        }
    }
    if (!dec.t_zero.empty()) dec.tau0 = dec.t_zero.front();

    for (double s : dec.t_n)
        if (s < dec.tau0) dec.sign_breaks.push_back(s);
    dec.sign_breaks.push_back(dec.tau0);

    const double tau0 = dec.tau0;
    auto jumps = g.jumps();
    auto hf = h.f;
    dec.hbar = [jumps = std::move(jumps), hf = std::move(hf), tau0](double t) {
        const auto it = jumps.find(t);
        if (it == jumps.end()) return hf(t);
        if (t >= tau0) return 0.0;
        return std::log(std::abs(1.0 + hf(t) * it->second)) / it->second;
    };
    return dec;
}

double g_exp(const Integrand& h, const Derivator& g, double t) {
    check_time(g, t);
    const SignedMeasureView m{g};
    double product = 1.0;
    for (const auto& [s, d] : g.jumps()) {
        if (s >= t) break;
        product *= 1.0 + h(s) * d;
    }
    return product * std::exp(continuous_integral(h, m, t));
}

double g_exp_via_hbar(const Integrand& h, const Derivator& g, double t) {
    check_time(g, t);
    const ExpDecomposition dec = classify_jumps(h, g);
    if (t > dec.tau0) return 0.0;

    int flips = 0;
    for (double s : dec.t_n)
        if (s < t) ++flips;

    // Integral of hbar over [a, t): continuous part of h plus the log terms.
    const SignedMeasureView m{g};
    double integral = continuous_integral(h, m, t);
    for (const auto& [s, d] : g.jumps()) {
        if (s >= t) break;
        if (s >= dec.tau0) continue;
        integral += std::log(std::abs(1.0 + h(s) * d));
    }

    const double sign = (flips % 2 == 0) ? 1.0 : -1.0;
    return sign * std::exp(integral);
}

double linear_solution(double x0, const Integrand& h, const Derivator& g, double t) {
    return x0 * g_exp(h, g, t);
}

}  // namespace stieltjes
