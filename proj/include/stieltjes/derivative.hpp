#pragma once

#include <functional>
#include <span>

#include "stieltjes/derivator.hpp"
#include "stieltjes/measure.hpp"

namespace stieltjes {

// A real function of time with optional exact right limits.  When
// right_value is absent and a right limit is needed (derivative across a
// jump), it is recovered by sampling just right of the point and
// extrapolating linearly to the point, which cancels the first-order drift
// of the continuous part.
struct TimeFunction {
    std::function<double(double)> value;
    std::function<double(double)> right_value;

    static TimeFunction of(std::function<double(double)> v) { return {std::move(v), {}}; }
};

enum class QuotientMethod { JumpQuotient, LimitQuotient };

struct GDerivativeResult {
    double value = 0.0;
    QuotientMethod method = QuotientMethod::LimitQuotient;
    double window = 0.0;          // window half-width at convergence
    double achieved_spread = 0.0; // quotient spread at that window
};

// Derivative of f with respect to g at t.  The difference quotient is formed
// at star(t): exact jump quotient there if star(t) is a jump point, otherwise
// a two-sided (one-sided at N_g^+/N_g^- points) quotient limit over a
// shrinking dyadic window schedule, converged when the quotient spread drops
// below tol.  Throws DegenerateDenominator when g offers no usable increments
// and NonConvergence when the schedule is exhausted.
[[nodiscard]] GDerivativeResult g_derivative(const TimeFunction& f, const Derivator& g, double t,
                                             double tol = 1e-9);

// Derivative of h(f(.)) at a point where f'_g(t) = fg and the underlying
// jump of g at star(t) is `jump`: fg * int_0^1 h'(f_star + r * fg * jump) dr.
// The averaged form; exact when jump or fg vanishes.
[[nodiscard]] double chain_rule_explicit(double fg, double f_star, double jump,
                                         const std::function<double(double)>& hprime);

// Two-branch form: difference quotient of h across the state jump when there
// is one, h'(f_star) * fg otherwise.  The second branch needs the derivative
// oracle; omitting it there is an error.
[[nodiscard]] double chain_rule_implicit(double f_star, double f_star_right, double fg,
                                         const std::function<double(double)>& h,
                                         const std::function<double(double)>& hprime = {});

// Max over probes of |(d/dg) int_[a,t) f dmu_g  -  f(star(t))|.  The
// primitive is equipped with exact right limits, so probes at jump points
// are exact.
[[nodiscard]] double ftc_residual(const Integrand& f, const Derivator& g,
                                  std::span<const double> probes, double tol = 1e-6);

}  // namespace stieltjes
