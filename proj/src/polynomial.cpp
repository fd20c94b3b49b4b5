#include "stieltjes/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace stieltjes::poly {

double eval(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::vector<double> derivative(const std::vector<double>& c) {
    if (c.size() <= 1) return {};
    std::vector<double> d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = c[k] * static_cast<double>(k);
    return d;
}

std::vector<double> antiderivative(const std::vector<double>& c) {
    std::vector<double> a(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) a[k + 1] = c[k] / static_cast<double>(k + 1);
    return a;
}

double integral(const std::vector<double>& c, double x0, double x1) {
    const auto a = antiderivative(c);
    return eval(a, x1) - eval(a, x0);
}

std::vector<double> shift(const std::vector<double>& c, double delta) {
    if (delta == 0.0 || c.empty()) return c;
    // In-place Taylor shift by repeated synthetic division.
    std::vector<double> work = c;
    const std::size_t n = work.size();
    for (std::size_t j = 0; j + 1 < n; ++j)
        for (std::size_t k = n - 1; k-- > j;)
            work[k] += delta * work[k + 1];
    return trim(std::move(work));
}

std::vector<double> trim(std::vector<double> c) {
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    return c;
}

int degree(const std::vector<double>& c) {
    for (std::size_t k = c.size(); k-- > 0;)
        if (c[k] != 0.0) return static_cast<int>(k);
    return -1;
}

namespace {

// Bisection for a root of p in [lo, hi] where p(lo), p(hi) have strict
// opposite signs.
double bisect(const std::vector<double>& c, double lo, double hi) {
    double flo = eval(c, lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = eval(c, mid);
        if (fm == 0.0) return mid;
        if ((flo < 0.0) == (fm < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> sign_change_roots(const std::vector<double>& c, double lo, double hi) {
    std::vector<double> roots;
    const auto p = trim(c);
    if (degree(p) <= 0 || !(lo < hi)) return roots;

    // Monotone pieces are delimited by critical points of p.
    std::vector<double> nodes = {lo};
    for (double r : sign_change_roots(derivative(p), lo, hi)) nodes.push_back(r);
    // Tangential extrema of p' do not bound monotone pieces poorly enough to
    // matter here, but include plain (non-sign-change) critical points too:
    // bisection below only fires on strict sign changes of p anyway, so a
    // denser node set is merely safer.  Sample a few interior points.
    const int extra = 8 * std::max(1, degree(p));
    for (int j = 1; j < extra; ++j) nodes.push_back(lo + (hi - lo) * j / extra);
    nodes.push_back(hi);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    // Pair consecutive nonzero samples; a zero sample sits inside the bracket
    // and bisection recovers it exactly (the first midpoint probe hits it).
    double prev_x = 0.0, prev_f = 0.0;
    bool have_prev = false;
    for (double x : nodes) {
        const double f = eval(p, x);
        if (f == 0.0) continue;
        if (have_prev && (f < 0.0) != (prev_f < 0.0)) {
            const double r = bisect(p, prev_x, x);
            if (r > lo && r < hi && (roots.empty() || r > roots.back())) roots.push_back(r);
        }
        prev_x = x;
        prev_f = f;
        have_prev = true;
    }
    return roots;
}

}  // namespace stieltjes::poly
