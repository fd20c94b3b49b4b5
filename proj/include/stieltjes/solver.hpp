#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stieltjes/derivator.hpp"

namespace stieltjes {

enum class GuardPolicy { Clamp, Reject };

struct Guard {
    double lo = 0.0;
    double hi = 0.0;
    GuardPolicy policy = GuardPolicy::Clamp;
    double tolerance = 1e-9;  // Reject only fires beyond this slack
};

using Rhs = std::function<std::vector<double>(double, const std::vector<double>&)>;

// System x_i'_{g_i} = f_i(t, x), x(a) = x0, one derivator per component,
// all sharing the domain [a, b].
struct StieltjesIVP {
    std::vector<Derivator> derivators;
    Rhs rhs;
    std::vector<double> x0;
    std::vector<std::optional<Guard>> guards;  // empty or one per component
    // Optional coupled projection applied after guards at every accepted
    // node (e.g. a state-dependent admissible set).
    std::function<void(double, std::vector<double>&)> projection;

    void validate() const;
    [[nodiscard]] double t0() const { return derivators.front().a(); }
    [[nodiscard]] double horizon() const { return derivators.front().b(); }
};

struct TrajectoryMeta {
    std::string scheme;
    double requested_step = 0.0;
    std::size_t jump_nodes = 0;
    std::size_t rhs_evaluations = 0;
};

struct Trajectory {
    std::vector<double> grid;
    std::vector<std::vector<double>> states;  // one state vector per node
    // Post-jump values x(s+) at nodes where some derivator jumps, keyed by
    // grid index; satisfies x(s+) = x(s) + f(s, x(s)) * jump exactly.
    std::map<std::size_t, std::vector<double>> post_jump_states;
    TrajectoryMeta meta;
};

struct PicardReport {
    std::size_t iterations = 0;
    double final_delta = 0.0;
    std::vector<double> contraction_estimates;  // delta_n / delta_{n-1}
    std::string bielecki_weight;                // description of the weight used
    double lipschitz_estimate = 0.0;
    double weighted_contraction = 0.0;  // last contraction ratio under the weight
    bool suggests_weighted_norm = false;
};

// Grid: uniform nodes of the requested step merged with every jump point of
// every derivator (tolerance 1e-12 * span for dedup; jump points win).
[[nodiscard]] std::vector<double> solver_grid(const StieltjesIVP& ivp, double step);

// Explicit scheme.  At a jump node the atom is applied exactly with the
// pre-jump slope, x+ = x + f(s_k, x) * jump, and the continuous remainder of
// the cell continues from x+ with a re-evaluated slope:
//   x(s_{k+1}) = x+ + f(s_k, x+) * (g(s_{k+1}) - g(s_k+)).
// Off jump nodes this is the plain one-slope update and degenerates bitwise
// to forward Euler when every derivator is the identity.
[[nodiscard]] Trajectory euler_solve(const StieltjesIVP& ivp, double step);

// Picard iteration of the integral operator on the same grid, using the
// left-constant interpolant of the previous iterate (open cell parts carry
// the post-jump values).  Converges to the discrete fixed point, which
// coincides with the Euler trajectory.
[[nodiscard]] std::pair<Trajectory, PicardReport> picard_solve(const StieltjesIVP& ivp, double tol,
                                                               std::size_t max_iter, double step);

struct ProbeBox {
    std::pair<double, double> time;
    std::vector<std::pair<double, double>> state;
};

// Sampled Lipschitz constant of the rhs over the box: max ratio
// ||f(t,u) - f(t,v)||_inf / ||u - v||_inf over seeded random draws.
[[nodiscard]] double lipschitz_probe(const Rhs& rhs, const ProbeBox& box, std::size_t samples,
                                     std::uint64_t seed);

// Max over nodes of the defect against the discrete integral equation.
// Zero (to rounding) for trajectories produced by euler_solve without
// guards.
[[nodiscard]] double residual(const Trajectory& traj, const StieltjesIVP& ivp);

struct ConvergenceRow {
    double step = 0.0;
    double error = 0.0;           // sup-norm error at the final time
    double observed_order = 0.0;  // vs the previous row; NaN on the first
};

[[nodiscard]] std::vector<ConvergenceRow> convergence_study(
    const StieltjesIVP& ivp, std::span<const double> steps,
    const std::function<std::vector<double>(double)>& reference);

}  // namespace stieltjes
