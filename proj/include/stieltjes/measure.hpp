#pragma once

#include <functional>
#include <optional>

#include "stieltjes/derivator.hpp"

namespace stieltjes {

// Integrand for Lebesgue-Stieltjes integrals.  The degree hint, when
// present, promises the callable is a polynomial of at most that degree, so
// segment quadrature can be made structurally exact.  Without the hint a
// fixed-order rule is used; accuracy is then the caller's business (refine
// the derivator's segments).
struct Integrand {
    std::function<double(double)> f;
    std::optional<int> degree_hint;

    double operator()(double t) const { return f(t); }
};

// Measure view of a derivator: mu_g on intervals [u, v), plus the cached
// variation derivator backing |mu_g|.
class SignedMeasureView {
  public:
    explicit SignedMeasureView(Derivator g);

    [[nodiscard]] const Derivator& derivator() const { return g_; }
    [[nodiscard]] const Derivator& variation_derivator() const { return var_; }

    // mu_g([u, v)) = g(v) - g(u); requires a <= u <= v <= b.
    [[nodiscard]] double measure(double u, double v) const;
    // |mu_g|([u, v)) via the variation function.
    [[nodiscard]] double abs_measure(double u, double v) const;

  private:
    Derivator g_;
    Derivator var_;
};

// Integral of f over [u, v) against mu_g: jump part (sum of f * jump over
// breakpoints in [u, v)) plus the per-segment density part.  Polynomial
// densities use Gauss-Legendre sized by the degree hint; sampled densities
// use their declared rule with f evaluated at the same nodes.
[[nodiscard]] double integrate(const Integrand& f, const SignedMeasureView& m, double u, double v);

// Same against |mu_g|.
[[nodiscard]] double integrate_abs(const Integrand& f, const SignedMeasureView& m, double u, double v);

}  // namespace stieltjes
