#include "stieltjes/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "stieltjes/errors.hpp"
#include "stieltjes/exponential.hpp"

namespace stieltjes {

namespace {

void check_finite(const std::vector<double>& x, double t) {
    for (double v : x)
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "state became non-finite at t = " << t;
            throw NonFiniteState(os.str());
        }
}

void apply_guards(const StieltjesIVP& ivp, double t, std::vector<double>& x) {
    if (!ivp.guards.empty()) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!ivp.guards[i]) continue;
            const Guard& gd = *ivp.guards[i];
            if (gd.policy == GuardPolicy::Clamp) {
                x[i] = std::clamp(x[i], gd.lo, gd.hi);
            } else if (x[i] < gd.lo - gd.tolerance || x[i] > gd.hi + gd.tolerance) {
                std::ostringstream os;
                os << "component " << i << " left [" << gd.lo << ", " << gd.hi << "] at t = " << t;
                throw GuardViolation(os.str());
            }
        }
    }
    if (ivp.projection) ivp.projection(t, x);
}

std::vector<double> eval_rhs(const StieltjesIVP& ivp, double t, const std::vector<double>& x,
                             std::size_t& evals) {
    ++evals;
    std::vector<double> f = ivp.rhs(t, x);
    if (f.size() != x.size()) throw DomainError("rhs dimension does not match the state");
    return f;
}

}  // namespace

void StieltjesIVP::validate() const {
    if (derivators.empty()) throw DomainError("system needs at least one derivator");
    if (x0.size() != derivators.size()) throw DomainError("x0 dimension mismatch");
    if (!guards.empty() && guards.size() != derivators.size())
        throw DomainError("guard list must be empty or match the dimension");
    if (!rhs) throw DomainError("missing rhs");
    const double a = derivators.front().a(), b = derivators.front().b();
    for (const auto& g : derivators)
        if (g.a() != a || g.b() != b) throw DomainError("derivators live on different domains");
    if (!(a < b)) throw DomainError("empty time domain");
}

std::vector<double> solver_grid(const StieltjesIVP& ivp, double step) {
    if (!(step > 0.0)) throw DomainError("step must be positive");
    const double a = ivp.t0(), b = ivp.horizon();
    const double span = b - a;
    const double tol = 1e-12 * span;

    std::vector<double> grid;
    for (std::size_t k = 0;; ++k) {
        const double t = a + step * static_cast<double>(k);
        if (t >= b - tol) break;
        grid.push_back(t);
    }
    grid.push_back(b);

    std::vector<double> jump_times;
    for (const auto& g : ivp.derivators)
        for (const auto& [t, d] : g.jumps()) jump_times.push_back(t);
    std::sort(jump_times.begin(), jump_times.end());
    jump_times.erase(std::unique(jump_times.begin(), jump_times.end()), jump_times.end());

    for (double tj : jump_times) {
        auto it = std::lower_bound(grid.begin(), grid.end(), tj);
        // Snap the nearest uniform node onto the jump instead of keeping a
        // sliver cell; never move the domain endpoints.
        double* candidate = nullptr;
        if (it != grid.end() && std::abs(*it - tj) <= tol) candidate = &*it;
        if (it != grid.begin() && std::abs(*(it - 1) - tj) <= tol) candidate = &*(it - 1);
        if (candidate != nullptr) {
            if (*candidate != a && *candidate != b) *candidate = tj;
            continue;
        }
        grid.insert(it, tj);
    }
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

Trajectory euler_solve(const StieltjesIVP& ivp, double step) {
    ivp.validate();
    const std::size_t n = ivp.derivators.size();

    Trajectory traj;
    traj.grid = solver_grid(ivp, step);
    traj.meta.scheme = "stieltjes-euler";
    traj.meta.requested_step = step;

    std::vector<double> x = ivp.x0;
    apply_guards(ivp, traj.grid.front(), x);
    check_finite(x, traj.grid.front());
    traj.states.push_back(x);

    for (std::size_t k = 0; k + 1 < traj.grid.size(); ++k) {
        const double s = traj.grid[k], s1 = traj.grid[k + 1];
        const std::vector<double> f = eval_rhs(ivp, s, x, traj.meta.rhs_evaluations);

        // Jump substep: the atom at s is weighted by the state at s, and the
        // continuous remainder of the cell continues from the post-jump state.
        bool jumped = false;
        for (std::size_t i = 0; i < n; ++i)
            if (ivp.derivators[i].jump_at(s) != 0.0) jumped = true;
        if (jumped) {
            std::vector<double> post(n);
            for (std::size_t i = 0; i < n; ++i)
                post[i] = x[i] + f[i] * ivp.derivators[i].jump_at(s);
            traj.post_jump_states.emplace(k, post);
            ++traj.meta.jump_nodes;
            x = std::move(post);
        }
        const std::vector<double> fc =
            jumped ? eval_rhs(ivp, s, x, traj.meta.rhs_evaluations) : f;
        for (std::size_t i = 0; i < n; ++i)
            x[i] += fc[i] * (ivp.derivators[i].eval(s1) - ivp.derivators[i].eval_right(s));
        apply_guards(ivp, s1, x);
        check_finite(x, s1);
        traj.states.push_back(x);
    }
    return traj;
}

std::pair<Trajectory, PicardReport> picard_solve(const StieltjesIVP& ivp, double tol,
                                                 std::size_t max_iter, double step) {
    ivp.validate();
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    if (max_iter == 0) throw DomainError("max_iter must be at least one");
    const std::size_t n = ivp.derivators.size();

    Trajectory traj;
    traj.grid = solver_grid(ivp, step);
    traj.meta.scheme = "picard";
    traj.meta.requested_step = step;
    const std::size_t nodes = traj.grid.size();

    // Cache the atom and continuous-remainder increments of every cell once.
    std::vector<std::vector<double>> jmp(n, std::vector<double>(nodes - 1));
    std::vector<std::vector<double>> cont(n, std::vector<double>(nodes - 1));
    std::vector<char> any_jump(nodes - 1, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k + 1 < nodes; ++k) {
            jmp[i][k] = ivp.derivators[i].jump_at(traj.grid[k]);
            cont[i][k] =
                ivp.derivators[i].eval(traj.grid[k + 1]) - ivp.derivators[i].eval_right(traj.grid[k]);
            if (jmp[i][k] != 0.0) any_jump[k] = 1;
        }

    std::vector<std::vector<double>> prev(nodes, ivp.x0);
    std::vector<std::vector<double>> next(nodes, ivp.x0);
    for (std::size_t k = 0; k < nodes; ++k) apply_guards(ivp, traj.grid[k], prev[k]);

    PicardReport report;
    std::vector<double> delta_profile(nodes, 0.0), prev_profile;
    double prev_delta = std::numeric_limits<double>::quiet_NaN();

    for (std::size_t iter = 1; iter <= max_iter; ++iter) {
        std::vector<double> acc = ivp.x0;
        next[0] = acc;
        apply_guards(ivp, traj.grid.front(), next[0]);
        for (std::size_t k = 0; k + 1 < nodes; ++k) {
            const std::vector<double> f =
                eval_rhs(ivp, traj.grid[k], prev[k], traj.meta.rhs_evaluations);
            if (any_jump[k]) {
                for (std::size_t i = 0; i < n; ++i) acc[i] += f[i] * jmp[i][k];
                std::vector<double> post(n);
                for (std::size_t i = 0; i < n; ++i) post[i] = prev[k][i] + f[i] * jmp[i][k];
                const std::vector<double> fp =
                    eval_rhs(ivp, traj.grid[k], post, traj.meta.rhs_evaluations);
                for (std::size_t i = 0; i < n; ++i) acc[i] += fp[i] * cont[i][k];
            } else {
                for (std::size_t i = 0; i < n; ++i) acc[i] += f[i] * cont[i][k];
            }
            next[k + 1] = acc;
            apply_guards(ivp, traj.grid[k + 1], next[k + 1]);
            check_finite(next[k + 1], traj.grid[k + 1]);
        }

        double delta = 0.0;
        prev_profile = delta_profile;
        for (std::size_t k = 0; k < nodes; ++k) {
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(next[k][i] - prev[k][i]));
            delta_profile[k] = d;
            delta = std::max(delta, d);
        }
        report.iterations = iter;
        report.final_delta = delta;
        if (!std::isnan(prev_delta) && prev_delta > 0.0)
            report.contraction_estimates.push_back(delta / prev_delta);
        prev_delta = delta;
        prev.swap(next);
        if (delta < tol) break;
    }

    if (report.final_delta >= tol)
        throw NonConvergence("picard iteration did not contract below tol", report.final_delta);

    traj.states = prev;
    for (std::size_t k = 0; k + 1 < nodes; ++k) {
        bool jumped = false;
        for (const auto& g : ivp.derivators)
            if (g.jump_at(traj.grid[k]) != 0.0) jumped = true;
        if (!jumped) continue;
        const std::vector<double> f =
            eval_rhs(ivp, traj.grid[k], traj.states[k], traj.meta.rhs_evaluations);
        std::vector<double> post(n);
        for (std::size_t i = 0; i < n; ++i)
            post[i] = traj.states[k][i] + f[i] * ivp.derivators[i].jump_at(traj.grid[k]);
        traj.post_jump_states.emplace(k, std::move(post));
        ++traj.meta.jump_nodes;
    }

    // Bielecki weight diagnostics: e_L(.; t0; gsum) with gsum the sum of the
    // component variations and L a sampled Lipschitz constant over the box
    // the iterates visited.
    ProbeBox box;
    box.time = {ivp.t0(), ivp.horizon()};
    box.state.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& s : traj.states) {
            lo = std::min(lo, s[i]);
            hi = std::max(hi, s[i]);
        }
        const double pad = 0.1 * std::max(1.0, hi - lo);
        box.state[i] = {lo - pad, hi + pad};
    }
    report.lipschitz_estimate = lipschitz_probe(ivp.rhs, box, 256, 0x5eed);

    std::vector<Derivator> variations;
    variations.reserve(n);
    for (const auto& g : ivp.derivators) variations.push_back(variation(g));
    const Derivator gsum = n == 1 ? variations.front() : sum(variations);
    const Integrand lconst{[L = report.lipschitz_estimate](double) { return L; }, 0};
    std::vector<double> weight(nodes);
    for (std::size_t k = 0; k < nodes; ++k) weight[k] = g_exp(lconst, gsum, traj.grid[k]);

    auto weighted = [&](const std::vector<double>& profile) {
        double w = 0.0;
        for (std::size_t k = 0; k < nodes; ++k) w = std::max(w, profile[k] / weight[k]);
        return w;
    };
    const double wprev = weighted(prev_profile), wlast = weighted(delta_profile);
    report.weighted_contraction = wprev > 0.0 ? wlast / wprev : 0.0;
    {
        std::ostringstream os;
        os << "e_L(.; t0; sum of variations), L = " << report.lipschitz_estimate;
        report.bielecki_weight = os.str();
    }
    bool plain_expands = false;
    for (double r : report.contraction_estimates)
        if (r > 1.0) plain_expands = true;
    report.suggests_weighted_norm = plain_expands && report.weighted_contraction <= 1.0;

    return {std::move(traj), std::move(report)};
}

double lipschitz_probe(const Rhs& rhs, const ProbeBox& box, std::size_t samples,
                       std::uint64_t seed) {
    if (!rhs) throw DomainError("missing rhs");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = box.state.size();
    auto draw_state = [&] {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& [lo, hi] = box.state[i];
            x[i] = lo + (hi - lo) * unit(rng);
        }
        return x;
    };

    double best = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const double t = box.time.first + (box.time.second - box.time.first) * unit(rng);
        const std::vector<double> u = draw_state(), v = draw_state();
        double dist = 0.0;
        for (std::size_t i = 0; i < n; ++i) dist = std::max(dist, std::abs(u[i] - v[i]));
        if (dist < 1e-14) continue;
        const std::vector<double> fu = rhs(t, u), fv = rhs(t, v);
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(fu[i] - fv[i]));
        best = std::max(best, diff / dist);
    }
    return best;
}

double residual(const Trajectory& traj, const StieltjesIVP& ivp) {
    ivp.validate();
    const std::size_t n = ivp.derivators.size();
    std::vector<double> acc = ivp.x0;
    double worst = 0.0;
    std::size_t evals = 0;
    for (std::size_t k = 0; k < traj.grid.size(); ++k) {
        for (std::size_t i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(traj.states[k][i] - acc[i]));
        if (k + 1 == traj.grid.size()) break;
        const double s = traj.grid[k], s1 = traj.grid[k + 1];
        const std::vector<double> f = eval_rhs(ivp, s, traj.states[k], evals);
        bool jumped = false;
        for (std::size_t i = 0; i < n; ++i)
            if (ivp.derivators[i].jump_at(s) != 0.0) jumped = true;
        std::vector<double> mid = traj.states[k];
        if (jumped) {
            for (std::size_t i = 0; i < n; ++i) {
                acc[i] += f[i] * ivp.derivators[i].jump_at(s);
                mid[i] += f[i] * ivp.derivators[i].jump_at(s);
            }
        }
        const std::vector<double> fc = jumped ? eval_rhs(ivp, s, mid, evals) : f;
        for (std::size_t i = 0; i < n; ++i)
            acc[i] += fc[i] * (ivp.derivators[i].eval(s1) - ivp.derivators[i].eval_right(s));
    }
    return worst;
}

std::vector<ConvergenceRow> convergence_study(
    const StieltjesIVP& ivp, std::span<const double> steps,
    const std::function<std::vector<double>(double)>& reference) {
    std::vector<ConvergenceRow> rows;
    for (double step : steps) {
        const Trajectory traj = euler_solve(ivp, step);
        const std::vector<double> ref = reference(traj.grid.back());
        double err = 0.0;
        for (std::size_t i = 0; i < ref.size(); ++i)
            err = std::max(err, std::abs(traj.states.back()[i] - ref[i]));
        ConvergenceRow row{step, err, std::numeric_limits<double>::quiet_NaN()};
        if (!rows.empty() && rows.back().error > 0.0 && err > 0.0 && rows.back().step != step)
            row.observed_order = std::log(rows.back().error / err) / std::log(rows.back().step / step);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace stieltjes
