#include "stieltjes/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "stieltjes/errors.hpp"
#include "stieltjes/expr.hpp"

namespace stieltjes {

namespace {

double parse_double(const std::string& tok, const std::string& where) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || tok.empty())
        throw SchemaError("expected a number in " + where + ", got '" + tok + "'");
    return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string strip(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw SchemaError("cannot open '" + path + "' for reading");
    return is;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw SchemaError("cannot open '" + path + "' for writing");
    return os;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_derivator(std::ostream& os, const Derivator& g) {
    os << "stieltjes-derivator v1\n";
    os << "domain " << format_double(g.a()) << ' ' << format_double(g.b()) << '\n';
    os << "anchor " << format_double(g.anchor()) << '\n';
    os << "breakpoints";
    for (double t : g.breakpoints()) os << ' ' << format_double(t);
    os << '\n';
    for (std::size_t k = 0; k < g.segments().size(); ++k) {
        os << "segment " << k;
        const auto& s = g.segments()[k];
        if (std::holds_alternative<ZeroDensity>(s)) {
            os << " zero";
        } else if (const auto* cs = std::get_if<ConstantSlope>(&s)) {
            os << " slope " << format_double(cs->slope);
        } else if (const auto* pd = std::get_if<PolynomialDensity>(&s)) {
            os << " poly";
            for (double c : pd->coeffs) os << ' ' << format_double(c);
        } else {
            const auto& sd = std::get<SampledDensity>(s);
            os << " sampled " << (sd.rule == QuadratureRule::LeftRectangle ? "leftrect" : "trapezoid");
            for (double v : sd.values) os << ' ' << format_double(v);
        }
        os << '\n';
    }
    for (const auto& [t, d] : g.jumps())
        os << "jump " << format_double(t) << ' ' << format_double(d) << '\n';
}

Derivator read_derivator(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || strip(line) != "stieltjes-derivator v1")
        throw SchemaError("missing derivator header line");

    std::vector<double> breakpoints;
    std::map<std::size_t, SegmentDensity> segments;
    std::map<double, double> jumps;
    bool have_domain = false, have_anchor = false;
    double a = 0.0, b = 0.0, anchor = 0.0;

    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        line = strip(line);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        const std::string where = "line " + std::to_string(lineno);

        if (key == "domain") {
            std::string ta, tb;
            if (!(ls >> ta >> tb)) throw SchemaError("domain needs two numbers, " + where);
            a = parse_double(ta, where);
            b = parse_double(tb, where);
            have_domain = true;
        } else if (key == "anchor") {
            std::string tv;
            if (!(ls >> tv)) throw SchemaError("anchor needs a number, " + where);
            anchor = parse_double(tv, where);
            have_anchor = true;
        } else if (key == "breakpoints") {
            std::string tok;
            while (ls >> tok) breakpoints.push_back(parse_double(tok, where));
        } else if (key == "segment") {
            std::size_t idx;
            std::string kind;
            if (!(ls >> idx >> kind)) throw SchemaError("segment needs an index and kind, " + where);
            if (kind == "zero") {
                segments[idx] = ZeroDensity{};
            } else if (kind == "slope") {
                std::string tv;
                if (!(ls >> tv)) throw SchemaError("slope needs a value, " + where);
                segments[idx] = ConstantSlope{parse_double(tv, where)};
            } else if (kind == "poly") {
                std::vector<double> coeffs;
                std::string tok;
                while (ls >> tok) coeffs.push_back(parse_double(tok, where));
                segments[idx] = PolynomialDensity{std::move(coeffs)};
            } else if (kind == "sampled") {
                std::string rule;
                if (!(ls >> rule)) throw SchemaError("sampled needs a rule, " + where);
                QuadratureRule qr;
                if (rule == "leftrect")
                    qr = QuadratureRule::LeftRectangle;
                else if (rule == "trapezoid")
                    qr = QuadratureRule::Trapezoid;
                else
                    throw SchemaError("unknown quadrature rule '" + rule + "', " + where);
                std::vector<double> values;
                std::string tok;
                while (ls >> tok) values.push_back(parse_double(tok, where));
                segments[idx] = SampledDensity{std::move(values), qr};
            } else {
                throw SchemaError("unknown segment kind '" + kind + "', " + where);
            }
        } else if (key == "jump") {
            std::string tt, td;
            if (!(ls >> tt >> td)) throw SchemaError("jump needs a time and a size, " + where);
            jumps[parse_double(tt, where)] = parse_double(td, where);
        } else {
            throw SchemaError("unknown directive '" + key + "', " + where);
        }
    }

    if (!have_domain || !have_anchor) throw SchemaError("derivator file lacks domain or anchor");
    if (breakpoints.size() < 2) throw SchemaError("derivator file lacks breakpoints");
    if (breakpoints.front() != a || breakpoints.back() != b)
        throw SchemaError("breakpoints do not span the declared domain");

    std::vector<SegmentDensity> segs(breakpoints.size() - 1, ZeroDensity{});
    for (auto& [idx, s] : segments) {
        if (idx >= segs.size()) throw SchemaError("segment index out of range");
        segs[idx] = std::move(s);
    }
    return Derivator(std::move(breakpoints), std::move(segs), std::move(jumps), anchor);
}

void write_derivator_file(const std::string& path, const Derivator& g) {
    auto os = open_out(path);
    write_derivator(os, g);
}

Derivator read_derivator_file(const std::string& path) {
    auto is = open_in(path);
    return read_derivator(is);
}

void write_weather_csv(std::ostream& os, const WeatherSeries& w) {
    os << "time_hours,t_ambient_c,poa_wm2\n";
    for (std::size_t k = 0; k < w.time_h.size(); ++k)
        os << format_double(w.time_h[k]) << ',' << format_double(w.t_ambient_c[k]) << ','
           << format_double(w.poa_wm2[k]) << '\n';
}

WeatherSeries read_weather_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || strip(line) != "time_hours,t_ambient_c,poa_wm2")
        throw SchemaError("weather CSV must start with header time_hours,t_ambient_c,poa_wm2");

    WeatherSeries w;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (strip(line).empty()) continue;
        const auto cols = split(line, ',');
        if (cols.size() != 3)
            throw SchemaError("weather CSV row " + std::to_string(lineno) + " needs 3 columns");
        const std::string where = "weather CSV row " + std::to_string(lineno);
        w.time_h.push_back(parse_double(strip(cols[0]), where));
        w.t_ambient_c.push_back(parse_double(strip(cols[1]), where));
        w.poa_wm2.push_back(parse_double(strip(cols[2]), where));
    }
    w.validate();
    return w;
}

void write_weather_csv_file(const std::string& path, const WeatherSeries& w) {
    auto os = open_out(path);
    write_weather_csv(os, w);
}

WeatherSeries read_weather_csv_file(const std::string& path) {
    auto is = open_in(path);
    return read_weather_csv(is);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
    os << "time_hours";
    for (std::size_t i = 1; i <= n; ++i) os << ",x" << i;
    os << ",post_jump\n";
    for (std::size_t k = 0; k < traj.grid.size(); ++k) {
        os << format_double(traj.grid[k]);
        for (double v : traj.states[k]) os << ',' << format_double(v);
        os << ",0\n";
        const auto it = traj.post_jump_states.find(k);
        if (it != traj.post_jump_states.end()) {
            os << format_double(traj.grid[k]);
            for (double v : it->second) os << ',' << format_double(v);
            os << ",1\n";
        }
    }
}

void write_simulation_csv(std::ostream& os, const SimulationResult& r) {
    os << "time_hours,E_wh,H,S,t_cell_c,power_w,demand_w,alpha\n";
    for (std::size_t k = 0; k < r.traj.grid.size(); ++k) {
        const auto& x = r.traj.states[k];
        os << format_double(r.traj.grid[k]) << ',' << format_double(x[0]) << ','
           << format_double(x[1]) << ',' << format_double(x[2]) << ','
           << format_double(r.t_cell_c[k]) << ',' << format_double(r.power_w[k]) << ','
           << format_double(r.demand_w[k]) << ',' << format_double(r.alpha[k]) << '\n';
    }
}

void write_derived_csv(std::ostream& os, const SimulationResult& r, const Derivator& g2,
                       const Derivator& g3, const WeatherSeries& w) {
    os << "time_hours,g2,g3,t_ambient_c,poa_wm2\n";
    for (double t : r.traj.grid)
        os << format_double(t) << ',' << format_double(g2.eval(t)) << ','
           << format_double(g3.eval(t)) << ',' << format_double(w.ambient_at(t)) << ','
           << format_double(w.poa_at(t)) << '\n';
}

DemandSchedule parse_demand_schedule(const std::string& text) {
    DemandSchedule d;
    for (const auto& item : split(text, ',')) {
        const auto parts = split(strip(item), ':');
        if (parts.size() != 2) throw SchemaError("demand entries must look like hour:watts");
        d.breaks_h.push_back(parse_double(strip(parts[0]), "demand schedule"));
        d.watts.push_back(parse_double(strip(parts[1]), "demand schedule"));
    }
    d.validate();
    return d;
}

Scenario read_scenario_config(std::istream& is, WeatherSeries weather) {
    Scenario sc;
    sc.weather = std::move(weather);
    sc.demand = DemandSchedule::household_default();

    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw SchemaError("config line " + std::to_string(lineno) + " is not key = value");
        const std::string key = strip(line.substr(0, eq));
        const std::string val = strip(line.substr(eq + 1));
        if (kv.count(key)) throw SchemaError("duplicate config key '" + key + "'");
        kv[key] = val;
    }

    const std::set<std::string> known = {
        "panel.area_m2",     "panel.alpha_ref", "panel.gamma_per_c", "panel.rho",
        "panel.noct_c",      "panel.t_ref_c",   "panel.t_op_c",      "panel.mu1",
        "panel.mu2",         "panel.beta",      "panel.beta_r",      "battery.e_max_wh",
        "battery.eta0",      "battery.t_opt_c", "battery.delta_t",   "battery.lambda0",
        "battery.delta",     "battery.nu",      "battery.t_thresh_c","battery.beta_thermal",
        "battery.h_floor",   "initial.e0_wh",   "initial.h0",        "initial.s0",
        "step_hours",        "horizon_days",    "demand"};
    for (const auto& [k, v] : kv)
        if (!known.count(k)) throw SchemaError("unknown config key '" + k + "'");

    auto num = [&kv](const std::string& key, double& slot) {
        const auto it = kv.find(key);
        if (it != kv.end()) slot = parse_double(it->second, "config key " + key);
    };

    num("panel.area_m2", sc.panel.area_m2);
    num("panel.alpha_ref", sc.panel.alpha_ref);
    num("panel.gamma_per_c", sc.panel.gamma_per_c);
    num("panel.rho", sc.panel.rho);
    num("panel.noct_c", sc.panel.noct_c);
    num("panel.t_ref_c", sc.panel.t_ref_c);
    num("panel.t_op_c", sc.panel.t_op_c);
    num("panel.mu1", sc.panel.mu1);
    num("panel.beta", sc.panel.beta);
    num("panel.beta_r", sc.panel.beta_r);
    num("battery.e_max_wh", sc.battery.e_max_wh);
    num("battery.eta0", sc.battery.eta0);
    num("battery.t_opt_c", sc.battery.t_opt_c);
    num("battery.delta_t", sc.battery.delta_t);
    num("battery.lambda0", sc.battery.lambda0);
    num("battery.delta", sc.battery.delta);
    num("battery.nu", sc.battery.nu);
    num("battery.t_thresh_c", sc.battery.t_thresh_c);
    num("battery.beta_thermal", sc.battery.beta_thermal);
    num("battery.h_floor", sc.battery.h_floor);
    num("initial.e0_wh", sc.e0_wh);
    num("initial.h0", sc.h0);
    num("initial.s0", sc.s0);
    num("step_hours", sc.step_h);
    num("horizon_days", sc.horizon_days);

    // Recovery coefficient defaults to half the accrual coefficient.
    if (kv.count("panel.mu2"))
        sc.panel.mu2 = parse_double(kv.at("panel.mu2"), "config key panel.mu2");
    else
        sc.panel.mu2 = 0.5 * sc.panel.mu1;

    if (kv.count("demand")) sc.demand = parse_demand_schedule(kv.at("demand"));

    sc.validate();
    return sc;
}

Scenario read_scenario_config_file(const std::string& path, WeatherSeries weather) {
    auto is = open_in(path);
    return read_scenario_config(is, std::move(weather));
}

Integrand parse_scalar_field(const std::string& spec) {
    const std::string s = strip(spec);
    if (s.rfind("const:", 0) == 0) {
        const double v = parse_double(strip(s.substr(6)), "const spec");
        return {[v](double) { return v; }, 0};
    }
    if (s.rfind("pwc:", 0) == 0) {
        std::vector<double> times, values;
        for (const auto& item : split(s.substr(4), ',')) {
            const auto parts = split(strip(item), ':');
            if (parts.size() != 2) throw SchemaError("pwc entries must look like time:value");
            times.push_back(parse_double(strip(parts[0]), "pwc spec"));
            values.push_back(parse_double(strip(parts[1]), "pwc spec"));
        }
        for (std::size_t k = 0; k + 1 < times.size(); ++k)
            if (!(times[k] < times[k + 1])) throw SchemaError("pwc times must increase");
        return {[times, values](double t) {
                    const auto it = std::upper_bound(times.begin(), times.end(), t);
                    const std::size_t k = static_cast<std::size_t>(it - times.begin());
                    return values[k == 0 ? 0 : k - 1];
                },
                std::nullopt};
    }
    if (s.rfind("expr:", 0) == 0) return {compile_expression(s.substr(5)), std::nullopt};

    // Bare number means a constant; otherwise treat as an expression.
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() + s.size() && !s.empty()) return {[v](double) { return v; }, 0};
    return {compile_expression(s), std::nullopt};
}

}  // namespace stieltjes
