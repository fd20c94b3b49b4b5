#include "stieltjes/pv_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stieltjes/errors.hpp"

namespace stieltjes {

namespace {

double interp(const std::vector<double>& grid, const std::vector<double>& vals, double t) {
    if (t <= grid.front()) return vals.front();
    if (t >= grid.back()) return vals.back();
    const auto it = std::upper_bound(grid.begin(), grid.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - grid.begin()) - 1;
    const double w = (t - grid[k]) / (grid[k + 1] - grid[k]);
    return vals[k] + (vals[k + 1] - vals[k]) * w;
}

// Weather resampled onto the scenario grid t = k * step over [0, horizon].
// The weather grid is the master; step must be a multiple or a divisor of
// its spacing.
WeatherSeries resample(const WeatherSeries& w, double step, double horizon) {
    const double wstep = w.step();
    const double ratio = step > wstep ? step / wstep : wstep / step;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
        throw DomainError("scenario step must be a multiple or divisor of the weather step");

    const double cells = horizon / step;
    const auto k_end = static_cast<std::size_t>(std::llround(cells));
    if (k_end < 1 || std::abs(cells - static_cast<double>(k_end)) > 1e-9 * std::max(1.0, cells))
        throw DomainError("simulated horizon must be a whole number of scenario steps");

    WeatherSeries out;
    for (std::size_t k = 0; k <= k_end; ++k) {
        const double t = k == k_end ? horizon : step * static_cast<double>(k);
        out.time_h.push_back(t);
        out.t_ambient_c.push_back(interp(w.time_h, w.t_ambient_c, t));
        out.poa_wm2.push_back(interp(w.time_h, w.poa_wm2, t));
    }
    return out;
}

}  // namespace

void WeatherSeries::validate() const {
    if (time_h.size() < 2) throw SchemaError("weather series needs at least two rows");
    if (t_ambient_c.size() != time_h.size() || poa_wm2.size() != time_h.size())
        throw SchemaError("weather series columns have different lengths");
    const double dt = time_h[1] - time_h[0];
    if (!(dt > 0.0)) throw SchemaError("weather grid must be increasing");
    for (std::size_t k = 0; k + 1 < time_h.size(); ++k) {
        const double d = time_h[k + 1] - time_h[k];
        if (std::abs(d - dt) > 1e-9 * std::max(1.0, dt))
            throw SchemaError("weather grid is not uniform");
    }
    for (std::size_t k = 0; k < time_h.size(); ++k) {
        if (!std::isfinite(time_h[k]) || !std::isfinite(t_ambient_c[k]) || !std::isfinite(poa_wm2[k]))
            throw SchemaError("weather series contains a non-finite value");
        if (poa_wm2[k] < 0.0) throw SchemaError("negative irradiance at row " + std::to_string(k + 1));
    }
}

double WeatherSeries::step() const {
    if (time_h.size() < 2) throw SchemaError("weather series needs at least two rows");
    return time_h[1] - time_h[0];
}

double WeatherSeries::ambient_at(double t) const { return interp(time_h, t_ambient_c, t); }

double WeatherSeries::poa_at(double t) const { return interp(time_h, poa_wm2, t); }

void DemandSchedule::validate() const {
    if (breaks_h.empty() || breaks_h.size() != watts.size())
        throw SchemaError("demand schedule needs matching breakpoints and values");
    if (breaks_h.front() != 0.0) throw SchemaError("demand schedule must start at hour 0");
    for (std::size_t k = 0; k + 1 < breaks_h.size(); ++k)
        if (!(breaks_h[k] < breaks_h[k + 1])) throw SchemaError("demand breakpoints must increase");
    if (breaks_h.back() >= 24.0) throw SchemaError("demand breakpoints must stay below 24");
    for (double wt : watts)
        if (!(wt >= 0.0) || !std::isfinite(wt)) throw SchemaError("demand values must be finite and nonnegative");
}

double DemandSchedule::at(double t_hours) const {
    double h = std::fmod(t_hours, 24.0);
    if (h < 0.0) h += 24.0;
    const auto it = std::upper_bound(breaks_h.begin(), breaks_h.end(), h);
    const std::size_t k = static_cast<std::size_t>(it - breaks_h.begin());
    return watts[k == 0 ? 0 : k - 1];
}

DemandSchedule DemandSchedule::household_default() {
    DemandSchedule d;
    d.breaks_h = {0.0, 6.0, 9.0, 13.0, 15.0, 18.0, 23.0};
    d.watts = {120.0, 180.0, 130.0, 180.0, 130.0, 200.0, 120.0};
    return d;
}

void Scenario::validate() const {
    weather.validate();
    demand.validate();
    if (!(battery.e_max_wh > 0.0)) throw DomainError("battery capacity must be positive");
    if (!(h0 > 0.0 && h0 <= 1.0)) throw DomainError("initial health must lie in (0, 1]");
    if (!(s0 >= 0.0 && s0 <= 1.0)) throw DomainError("initial stress must lie in [0, 1]");
    if (!(e0_wh >= 0.0 && e0_wh <= battery.e_max_wh * h0))
        throw DomainError("initial charge must lie in [0, e_max * h0]");
    if (!(step_h > 0.0)) throw DomainError("scenario step must be positive");
    if (!(battery.h_floor > 0.0 && battery.h_floor < 1.0))
        throw DomainError("health floor must lie in (0, 1)");
    if (!(panel.beta > 0.0) || !(panel.beta_r > 0.0))
        throw DomainError("stress exponents must be positive");
    if (horizon_days >= 0.0 &&
        horizon_days * 24.0 > weather.horizon() * (1.0 + 1e-12) + 1e-12)
        throw DomainError("simulated horizon exceeds the weather horizon");
}

double Scenario::horizon_h() const {
    return horizon_days < 0.0 ? weather.horizon() : horizon_days * 24.0;
}

std::vector<double> cell_temperature(const WeatherSeries& w, double noct_c) {
    std::vector<double> out(w.time_h.size());
    const double c = (noct_c - 20.0) / 800.0;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = w.t_ambient_c[k] + c * w.poa_wm2[k];
    return out;
}

double efficiency(const PanelParams& p, double t_cell_c, double stress) {
    return p.alpha_ref * (1.0 - p.gamma_per_c * (t_cell_c - p.t_ref_c)) * (1.0 - p.rho * stress);
}

double power(const PanelParams& p, double t_cell_c, double poa_wm2, double stress) {
    return p.area_m2 * efficiency(p, t_cell_c, stress) * poa_wm2;
}

Derivator build_g2(const WeatherSeries& w, const BatteryParams& b) {
    w.validate();
    std::vector<double> values(w.time_h.size());
    for (std::size_t k = 0; k < values.size(); ++k)
        values[k] = std::exp(b.beta_thermal * std::max(0.0, w.t_ambient_c[k] - b.t_thresh_c));
    return Derivator({w.time_h.front(), w.time_h.back()},
                     {SampledDensity{std::move(values), QuadratureRule::LeftRectangle}}, {}, 0.0);
}

Derivator build_g3(const WeatherSeries& w, const PanelParams& p) {
    w.validate();
    const std::vector<double> tc = cell_temperature(w, p.noct_c);
    std::vector<double> values(tc.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double over = std::max(0.0, tc[k] - p.t_op_c);
        const double under = std::max(0.0, p.t_op_c - tc[k]);
        values[k] = p.mu1 * std::pow(over, p.beta) - p.mu2 * std::pow(under, p.beta_r);
    }
    return Derivator({w.time_h.front(), w.time_h.back()},
                     {SampledDensity{std::move(values), QuadratureRule::LeftRectangle}}, {}, 0.0);
}

std::vector<double> scenario_rhs(const Scenario& sc, double t, const std::vector<double>& state) {
    const double E = state[0], H = state[1], S = state[2];
    const PanelParams& p = sc.panel;
    const BatteryParams& b = sc.battery;

    const double ta = sc.weather.ambient_at(t);
    const double poa = sc.weather.poa_at(t);
    const double tc = ta + (p.noct_c - 20.0) / 800.0 * poa;
    const double P = power(p, tc, poa, S);
    const double D = sc.demand.at(t);

    const double cap = b.e_max_wh * H;
    const double soc = E / cap;
    const double thermal_derate = 1.0 + b.delta_t * (ta - b.t_opt_c) * (ta - b.t_opt_c);

    const double fE = b.eta0 * H * (P - D) / thermal_derate * (1.0 - soc)
                      - b.lambda0 * (1.0 + b.delta * (1.0 - H) * (1.0 - H)) * E;
    const double fH = -b.nu * std::pow(soc - 0.5, 4) * H;
    const double fS = tc >= p.t_op_c ? 1.0 - S : S;
    return {fE, fH, fS};
}

SimulationResult simulate(const Scenario& sc) {
    sc.validate();
    SimulationResult out;
    const double horizon = sc.horizon_h();

    auto fill_derived = [&](const Scenario& params) {
        for (std::size_t k = 0; k < out.traj.grid.size(); ++k) {
            const double t = out.traj.grid[k];
            const double ta = params.weather.ambient_at(t);
            const double poa = params.weather.poa_at(t);
            const double tc = ta + (params.panel.noct_c - 20.0) / 800.0 * poa;
            const double S = out.traj.states[k][2];
            out.t_cell_c.push_back(tc);
            out.alpha.push_back(efficiency(params.panel, tc, S));
            out.power_w.push_back(power(params.panel, tc, poa, S));
            out.demand_w.push_back(params.demand.at(t));
        }
    };

    if (horizon <= 0.0) {
        out.traj.grid = {0.0};
        out.traj.states = {{sc.e0_wh, sc.h0, sc.s0}};
        out.traj.meta.scheme = "stieltjes-euler";
        out.traj.meta.requested_step = sc.step_h;
        fill_derived(sc);
        return out;
    }

    Scenario run = sc;
    run.weather = resample(sc.weather, sc.step_h, horizon);

    StieltjesIVP ivp;
    ivp.derivators.push_back(Derivator::identity(0.0, run.weather.horizon()));
    ivp.derivators.push_back(build_g2(run.weather, run.battery));
    ivp.derivators.push_back(build_g3(run.weather, run.panel));
    ivp.x0 = {run.e0_wh, run.h0, run.s0};
    ivp.rhs = [run](double t, const std::vector<double>& x) { return scenario_rhs(run, t, x); };
    ivp.projection = [cap = run.battery.e_max_wh, floor = run.battery.h_floor](double,
                                                                               std::vector<double>& x) {
        x[1] = std::clamp(x[1], floor, 1.0);
        x[2] = std::clamp(x[2], 0.0, 1.0);
        x[0] = std::clamp(x[0], 0.0, cap * x[1]);
    };

    out.traj = euler_solve(ivp, sc.step_h);
    fill_derived(run);
    return out;
}

WeatherSeries synth_clear_sky(int days, double peak_poa_wm2, double t_min_c, double t_max_c) {
    if (days < 1) throw DomainError("synthesis needs at least one day");
    if (!(peak_poa_wm2 >= 0.0)) throw DomainError("peak irradiance must be nonnegative");
    if (!(t_min_c <= t_max_c)) throw DomainError("ambient bounds are reversed");

    WeatherSeries w;
    const int n = days * 240;  // 0.1 h grid
    const double mean = 0.5 * (t_min_c + t_max_c);
    const double amp = 0.5 * (t_max_c - t_min_c);
    w.time_h.reserve(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double t = 0.1 * static_cast<double>(k);
        double h = std::fmod(t, 24.0);
        w.time_h.push_back(t);
        double poa = 0.0;
        if (h >= 6.0 && h <= 20.0)
            poa = peak_poa_wm2 * std::sin(std::numbers::pi * (h - 6.0) / 14.0);
        w.poa_wm2.push_back(poa);
        double ta;
        if (h >= 5.0 && h <= 15.0)
            ta = mean - amp * std::cos(std::numbers::pi * (h - 5.0) / 10.0);
        else {
            if (h < 5.0) h += 24.0;
            ta = mean + amp * std::cos(std::numbers::pi * (h - 15.0) / 14.0);
        }
        w.t_ambient_c.push_back(ta);
    }
    return w;
}

}  // namespace stieltjes
