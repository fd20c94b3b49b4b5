#pragma once

#include <vector>

namespace stieltjes::poly {

// Dense univariate polynomials, coefficients in ascending degree order.
// An empty vector is the zero polynomial.

double eval(const std::vector<double>& c, double x);

std::vector<double> derivative(const std::vector<double>& c);

// Antiderivative with zero constant term.
std::vector<double> antiderivative(const std::vector<double>& c);

double integral(const std::vector<double>& c, double x0, double x1);

// Coefficients of p(x + delta) in x.
std::vector<double> shift(const std::vector<double>& c, double delta);

// Drops trailing coefficients that are exactly zero.
std::vector<double> trim(std::vector<double> c);

int degree(const std::vector<double>& c);  // -1 for the zero polynomial

// Roots in the open interval (lo, hi) at which the sign strictly changes,
// in increasing order.  Bisection on the monotone pieces delimited by the
// critical points, found recursively.  Tangential zeros are skipped, which
// is what segment splitting wants: |p| stays polynomial across them.
std::vector<double> sign_change_roots(const std::vector<double>& c, double lo, double hi);

}  // namespace stieltjes::poly
