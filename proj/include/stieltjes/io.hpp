#pragma once

#include <iosfwd>
#include <string>

#include "stieltjes/derivator.hpp"
#include "stieltjes/measure.hpp"
#include "stieltjes/pv_model.hpp"
#include "stieltjes/solver.hpp"

namespace stieltjes {

// Line-oriented derivator text format, version tagged.  All numbers are
// printed with 17 significant digits, so read(write(g)) evaluates bit-for-
// bit identically to g.
//
//   stieltjes-derivator v1
//   domain <a> <b>
//   anchor <g(a)>
//   breakpoints <t_0> ... <t_m>
//   segment <k> zero
//   segment <k> slope <c>
//   segment <k> poly <c_0> ... <c_d>        (density in t - t_k)
//   segment <k> sampled <leftrect|trapezoid> <v_0> ... <v_n>
//   jump <t> <delta>
void write_derivator(std::ostream& os, const Derivator& g);
[[nodiscard]] Derivator read_derivator(std::istream& is);
void write_derivator_file(const std::string& path, const Derivator& g);
[[nodiscard]] Derivator read_derivator_file(const std::string& path);

// Weather CSV with the exact header time_hours,t_ambient_c,poa_wm2.
void write_weather_csv(std::ostream& os, const WeatherSeries& w);
[[nodiscard]] WeatherSeries read_weather_csv(std::istream& is);
void write_weather_csv_file(const std::string& path, const WeatherSeries& w);
[[nodiscard]] WeatherSeries read_weather_csv_file(const std::string& path);

// Generic trajectory CSV: time_hours,x1..xn,post_jump.  Post-jump states
// appear as extra rows with the same time and flag 1.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

// Scenario trajectory CSV with the pinned schema
// time_hours,E_wh,H,S,t_cell_c,power_w,demand_w,alpha.
void write_simulation_csv(std::ostream& os, const SimulationResult& r);

// Companion series CSV: time_hours,g2,g3,t_ambient_c,poa_wm2.
void write_derived_csv(std::ostream& os, const SimulationResult& r, const Derivator& g2,
                       const Derivator& g3, const WeatherSeries& w);

// Key-value scenario config (panel.*, battery.*, initial.*, step_hours,
// horizon_days, demand).  '#' starts a comment.  Unknown keys are errors;
// mu2 defaults to 0.5 * mu1 when absent.  The weather series is supplied
// separately.
[[nodiscard]] Scenario read_scenario_config(std::istream& is, WeatherSeries weather);
[[nodiscard]] Scenario read_scenario_config_file(const std::string& path, WeatherSeries weather);

// Demand schedule literal: "0:120,6:180,...", hours strictly increasing
// from 0, watts nonnegative.
[[nodiscard]] DemandSchedule parse_demand_schedule(const std::string& text);

// h specs for the exponential tools: "const:<v>", "pwc:t0:v0,t1:v1,..."
// (left-closed steps, first t0 must not exceed a), or "expr:<expression>".
// A bare number is a constant; anything else is tried as an expression.
[[nodiscard]] Integrand parse_scalar_field(const std::string& spec);

[[nodiscard]] std::string format_double(double v);  // shortest 17-digit form

}  // namespace stieltjes
