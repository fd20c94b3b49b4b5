#pragma once

#include <string>
#include <vector>

#include "stieltjes/derivator.hpp"
#include "stieltjes/solver.hpp"

namespace stieltjes {

// Uniformly gridded ambient/irradiance series; time in hours, temperature
// in degC, plane-of-array irradiance in W/m^2.
struct WeatherSeries {
    std::vector<double> time_h;
    std::vector<double> t_ambient_c;
    std::vector<double> poa_wm2;

    void validate() const;
    [[nodiscard]] double step() const;
    [[nodiscard]] double horizon() const { return time_h.back(); }
    [[nodiscard]] double ambient_at(double t) const;
    [[nodiscard]] double poa_at(double t) const;
};

struct PanelParams {
    double area_m2 = 18.0;
    double alpha_ref = 0.18;
    double gamma_per_c = 0.004;
    double rho = 0.3;
    double noct_c = 45.0;
    double t_ref_c = 25.0;  // reference temperature of the efficiency law
    double t_op_c = 25.0;   // nominal operating threshold of the stress law
    double mu1 = 1e-4;      // overheating stress accrual, per degC hour
    double mu2 = 0.5e-4;    // cooling recovery, per degC hour
    double beta = 1.0;      // overheating exponent
    double beta_r = 1.0;    // recovery exponent
};

struct BatteryParams {
    double e_max_wh = 20000.0;
    double eta0 = 0.95;
    double t_opt_c = 25.0;
    double delta_t = 0.005;   // thermal de-rating of charging, per degC^2
    double lambda0 = 1e-4;    // leakage rate, per hour
    double delta = 1.0;       // leakage amplification by degradation
    double nu = 2e-4;         // degradation rate, per thermal-exposure unit
    double t_thresh_c = 30.0;
    double beta_thermal = 0.07;  // per degC
    double h_floor = 1e-3;
};

// Piecewise-constant daily load, cyclic with period 24 h.
struct DemandSchedule {
    std::vector<double> breaks_h;  // 0 = b_0 < b_1 < ... < 24 implied
    std::vector<double> watts;     // one per segment

    void validate() const;
    [[nodiscard]] double at(double t_hours) const;
    static DemandSchedule household_default();
};

struct Scenario {
    WeatherSeries weather;
    PanelParams panel;
    BatteryParams battery;
    DemandSchedule demand;
    double e0_wh = 16000.0;
    double h0 = 0.9;
    double s0 = 0.1;
    double step_h = 0.1;
    // Simulated horizon in days; negative means the full weather horizon.
    // Zero is allowed and yields the initial state only.
    double horizon_days = -1.0;

    void validate() const;
    [[nodiscard]] double horizon_h() const;
};

// Ross formula: T_cell = T_amb + (NOCT - 20)/800 * I_POA.
[[nodiscard]] std::vector<double> cell_temperature(const WeatherSeries& w, double noct_c);

// alpha(T, S) = alpha_ref (1 - gamma (T_cell - T_ref)) (1 - rho S).
[[nodiscard]] double efficiency(const PanelParams& p, double t_cell_c, double stress);

// P = A * alpha(T, S) * I_POA.
[[nodiscard]] double power(const PanelParams& p, double t_cell_c, double poa_wm2, double stress);

// Thermal-exposure clock: density exp(beta_thermal * max(0, T_amb - T_thresh)),
// sampled on the weather grid, left-rectangle rule.  Nondecreasing.
[[nodiscard]] Derivator build_g2(const WeatherSeries& w, const BatteryParams& b);

// Panel stress clock: density mu1 * max(0, T_cell - T_op)^beta
//                           - mu2 * max(0, T_op - T_cell)^beta_r.
// Non-monotone in general; constant where T_cell == T_op throughout.
[[nodiscard]] Derivator build_g3(const WeatherSeries& w, const PanelParams& p);

// Rates for the (E, H, S) system at time t; weather is read off the
// scenario grid by linear interpolation.
[[nodiscard]] std::vector<double> scenario_rhs(const Scenario& sc, double t,
                                               const std::vector<double>& state);

struct SimulationResult {
    Trajectory traj;
    // Derived series on the trajectory grid.
    std::vector<double> t_cell_c;
    std::vector<double> power_w;
    std::vector<double> demand_w;
    std::vector<double> alpha;
};

[[nodiscard]] SimulationResult simulate(const Scenario& sc);

// Deterministic clear-sky synthesizer on a 0.1 h grid: half-sine irradiance
// between 06:00 and 20:00 peaking at 13:00, and a piecewise-sinusoid ambient
// with minimum t_min at 05:00 and maximum t_max at 15:00.
[[nodiscard]] WeatherSeries synth_clear_sky(int days, double peak_poa_wm2, double t_min_c,
                                            double t_max_c);

}  // namespace stieltjes
