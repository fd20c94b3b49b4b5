#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace stieltjes {

// A derivator is a left-continuous bounded-variation function g on [a, b],
// stored exactly: an anchor value g(a), a strictly increasing breakpoint
// grid a = t_0 < ... < t_m = b, one absolutely continuous density per open
// segment (t_k, t_{k+1}), and a finite set of right jumps placed at
// breakpoints.  Everything downstream (measures, g-derivatives, the
// exponential, the solver) reads this structure instead of probing limits
// numerically, so the jump set, the constancy set and the variation are all
// decidable.

enum class QuadratureRule { LeftRectangle, Trapezoid };

struct ZeroDensity {};

struct ConstantSlope {
    double slope = 0.0;
};

// density(t) = sum_j coeffs[j] * (t - t_k)^j on segment k.
struct PolynomialDensity {
    std::vector<double> coeffs;
};

// Node values on the uniform sub-grid t_k + j*h, j = 0..n, h = len/n.
// LeftRectangle reads the density as piecewise constant (values[j] on cell j,
// the final node is kept only for grid alignment); Trapezoid reads it as the
// piecewise linear interpolant.  All integrals are exact for that reading,
// which is what makes the declared rule composable with the Euler grid.
struct SampledDensity {
    std::vector<double> values;
    QuadratureRule rule = QuadratureRule::LeftRectangle;
};

using SegmentDensity = std::variant<ZeroDensity, ConstantSlope, PolynomialDensity, SampledDensity>;

enum class PointTag { Regular, Jump, ConstancyInterior, NgMinus, NgPlus };

// tag: how t sits relative to the jump set and the constancy components.
// star: the point t* at which difference quotients must be formed; never
// interior to a constancy component.
struct PointClass {
    PointTag tag = PointTag::Regular;
    double star = 0.0;
};

struct DerivatorOptions {
    // The theory assumes b is not the right endpoint of a constancy
    // component.  Default is to record the violation and let queries warn;
    // set to true to reject such representations at construction.
    bool require_b_not_in_ng_plus = false;
};

class Derivator {
  public:
    Derivator(std::vector<double> breakpoints,
              std::vector<SegmentDensity> segments,
              std::map<double, double> jumps,
              double anchor,
              DerivatorOptions options = {});

    static Derivator identity(double a, double b);
    static Derivator constant(double a, double b, double value);

    [[nodiscard]] double a() const { return breakpoints_.front(); }
    [[nodiscard]] double b() const { return breakpoints_.back(); }
    [[nodiscard]] const std::vector<double>& breakpoints() const { return breakpoints_; }
    [[nodiscard]] const std::vector<SegmentDensity>& segments() const { return segments_; }
    [[nodiscard]] const std::map<double, double>& jumps() const { return jumps_; }
    [[nodiscard]] double anchor() const { return anchor_; }

    // Left-continuous evaluation; eval_right adds the jump, if any.
    [[nodiscard]] double eval(double t) const;
    [[nodiscard]] double eval_right(double t) const;
    [[nodiscard]] double jump_at(double t) const;

    [[nodiscard]] double total_variation() const { return total_variation_; }
    // max(1, total variation): the scale used in relative tolerances.
    [[nodiscard]] double scale() const;

    [[nodiscard]] bool b_in_ng_plus() const { return b_in_ng_plus_; }

    // Continuous part of mu_g over [u, v) (jumps excluded).
    [[nodiscard]] double density_integral(double u, double v) const;
    // Same against |density|.
    [[nodiscard]] double abs_density_integral(double u, double v) const;

    [[nodiscard]] double density_value(double t) const;

  private:
    friend Derivator variation(const Derivator&);
    friend std::pair<Derivator, Derivator> jordan(const Derivator&);

    struct SegmentAux {
        double integral = 0.0;      // integral of the density over the segment
        double abs_integral = 0.0;  // integral of |density|
        int sign = 0;               // density sign on the segment; 0 for Zero
        std::vector<double> cell_prefix;      // sampled: cumulative cell integrals
        std::vector<double> abs_cell_prefix;  // sampled: cumulative |cell| integrals
    };

    void normalize_segments();
    void build_aux();
    [[nodiscard]] std::size_t segment_of(double t) const;  // k with t in (t_k, t_{k+1}]
    [[nodiscard]] double segment_prefix(std::size_t k, double t, bool absolute) const;

    std::vector<double> breakpoints_;
    std::vector<SegmentDensity> segments_;
    std::map<double, double> jumps_;
    double anchor_ = 0.0;
    std::vector<SegmentAux> aux_;
    std::vector<double> cum_;      // g at breakpoints
    std::vector<double> var_cum_;  // variation at breakpoints
    double total_variation_ = 0.0;
    bool b_in_ng_plus_ = false;
};

// Variation function t -> var of g over [a, t], anchored at 0.  Same
// breakpoints, |density| per segment, |jump| per jump.
[[nodiscard]] Derivator variation(const Derivator& g);

// Jordan pieces (g1, g2): both nondecreasing, anchored at 0, with
// g = g(a) + g1 - g2 and g1 + g2 = variation(g) pointwise.
[[nodiscard]] std::pair<Derivator, Derivator> jordan(const Derivator& g);

[[nodiscard]] PointClass classify_point(const Derivator& g, double t);

// Maximal open intervals on which g is constant, in increasing order.
[[nodiscard]] std::vector<std::pair<double, double>> constancy_components(const Derivator& g);

// Exact pointwise sum; all inputs must share [a, b].  Sampled segments
// combine only when their sub-grids align (equal or commensurate node
// counts over each merged piece) and rules agree.
[[nodiscard]] Derivator sum(const std::vector<Derivator>& gs);

}  // namespace stieltjes
