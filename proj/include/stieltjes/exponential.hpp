#pragma once

#include <functional>
#include <vector>

#include "stieltjes/derivator.hpp"
#include "stieltjes/measure.hpp"

namespace stieltjes {

// Jump classification for the exponential e_h(.; a).  A jump at s carries
// the factor 1 + h(s) * jump(s); factors are sorted into
//   t_minus: factor <= 0 (nonpositive),
//   t_n:     factor strictly negative,
//   t_zero:  factor zero up to the classification cut.
// tau0 is the first zero-factor time (b when none); past it the exponential
// vanishes identically.  sign_breaks lists the strictly negative factors
// below tau0 followed by tau0 itself, which delimits the sign bands of the
// piecewise representation.
struct ExpDecomposition {
    std::vector<double> t_minus;
    std::vector<double> t_n;
    std::vector<double> t_zero;
    double tau0 = 0.0;
    std::vector<double> sign_breaks;
    // h off the jump set; log|factor| / jump on jumps below tau0; 0 on
    // jumps past tau0.
    std::function<double(double)> hbar;
};

// Classification cut: |factor| <= 1e-14 * (1 + |h * jump|) counts as zero,
// so exact algebraic zeros survive rounding without absorbing genuinely
// negative factors.
[[nodiscard]] ExpDecomposition classify_jumps(const Integrand& h, const Derivator& g);

// Product form: prod of jump factors over [a, t) times exp of the integral
// of h over [a, t) with the jump terms removed.
[[nodiscard]] double g_exp(const Integrand& h, const Derivator& g, double t);

// Piecewise form through hbar: sign band times exp(integral of hbar), zero
// past tau0.  Algorithmically independent of g_exp; the two must agree.
[[nodiscard]] double g_exp_via_hbar(const Integrand& h, const Derivator& g, double t);

// x0 * e_h(t; a), the solution of x'_g = h x, x(a) = x0.
[[nodiscard]] double linear_solution(double x0, const Integrand& h, const Derivator& g, double t);

}  // namespace stieltjes
