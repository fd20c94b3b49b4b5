// Command line front end: derivator decomposition, Stieltjes integrals, the
// g-exponential, IVP solving, and the solar scenario tools.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "stieltjes/derivator.hpp"
#include "stieltjes/derivative.hpp"
#include "stieltjes/errors.hpp"
#include "stieltjes/exponential.hpp"
#include "stieltjes/expr.hpp"
#include "stieltjes/io.hpp"
#include "stieltjes/measure.hpp"
#include "stieltjes/pv_model.hpp"
#include "stieltjes/solver.hpp"

namespace {

using namespace stieltjes;

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size()) throw SchemaError("bad number '" + tok + "' in list");
        out.push_back(v);
    }
    if (out.empty()) throw SchemaError("empty number list");
    return out;
}

std::string stem_of(const std::string& path) {
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
    return path.substr(0, dot);
}

std::ostream& out_or_file(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw SchemaError("cannot open '" + path + "' for writing");
    return file;
}

// ---------------------------------------------------------------- decompose

int run_decompose(const std::string& input, std::string prefix) {
    const Derivator g = read_derivator_file(input);
    if (prefix.empty()) prefix = stem_of(input);

    const Derivator var = variation(g);
    const auto [g1, g2] = jordan(g);
    const auto comps = constancy_components(g);

    std::cout << "domain          [" << format_double(g.a()) << ", " << format_double(g.b()) << "]\n"
              << "anchor          " << format_double(g.anchor()) << '\n'
              << "breakpoints     " << g.breakpoints().size() << '\n'
              << "jumps           " << g.jumps().size() << '\n'
              << "total variation " << format_double(g.total_variation()) << '\n'
              << "constancy components " << comps.size() << '\n';
    if (g.b_in_ng_plus())
        std::cout << "warning: a constancy component abuts the right endpoint; "
                     "g-derivatives are not defined there\n";

    write_derivator_file(prefix + ".g1.deriv", g1);
    write_derivator_file(prefix + ".g2.deriv", g2);
    write_derivator_file(prefix + ".var.deriv", var);
    std::cout << "wrote " << prefix << ".g1.deriv, " << prefix << ".g2.deriv, " << prefix
              << ".var.deriv\n";
    return 0;
}

// ---------------------------------------------------------------- integrate

int run_integrate(const std::string& input, const std::string& fspec, double from, double to,
                  int hint, bool absolute) {
    const Derivator g = read_derivator_file(input);
    Integrand f = parse_scalar_field(fspec);
    if (hint >= 0) f.degree_hint = hint;
    const SignedMeasureView m{g};
    const double v = absolute ? integrate_abs(f, m, from, to) : integrate(f, m, from, to);
    std::cout << format_double(v) << '\n';
    return 0;
}

// ---------------------------------------------------------------- gexp

int run_gexp(const std::string& input, const std::string& hspec, double step,
             const std::string& route, const std::string& out) {
    const Derivator g = read_derivator_file(input);
    const Integrand h = parse_scalar_field(hspec);
    if (!(step > 0.0)) throw DomainError("grid step must be positive");

    std::ofstream file;
    std::ostream& os = out_or_file(file, out);
    os << "t,e_h";
    if (route == "both") os << ",e_h_hbar";
    os << '\n';
    for (std::size_t k = 0;; ++k) {
        double t = g.a() + step * static_cast<double>(k);
        if (t > g.b() - 1e-12 * (g.b() - g.a())) t = g.b();
        os << format_double(t);
        if (route == "direct" || route == "both") os << ',' << format_double(g_exp(h, g, t));
        if (route == "hbar" || route == "both") os << ',' << format_double(g_exp_via_hbar(h, g, t));
        os << '\n';
        if (t == g.b()) break;
    }
    return 0;
}

// ---------------------------------------------------------------- solve

Rhs make_rhs(const std::string& kind, const std::vector<double>& args, std::size_t n) {
    if (kind == "zero") {
        return [n](double, const std::vector<double>&) { return std::vector<double>(n, 0.0); };
    }
    if (kind == "constant") {
        if (args.size() != n) throw SchemaError("constant rhs needs n values");
        return [args](double, const std::vector<double>&) { return args; };
    }
    if (kind == "linear") {
        if (args.size() != n * n) throw SchemaError("linear rhs needs an n x n matrix, row-major");
        return [args, n](double, const std::vector<double>& x) {
            std::vector<double> f(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) f[i] += args[i * n + j] * x[j];
            return f;
        };
    }
    if (kind == "decay") {
        if (args.size() != n) throw SchemaError("decay rhs needs n rates");
        return [args, n](double, const std::vector<double>& x) {
            std::vector<double> f(n);
            for (std::size_t i = 0; i < n; ++i) f[i] = -args[i] * x[i];
            return f;
        };
    }
    if (kind == "logistic") {
        if (n != 1 || args.size() != 2) throw SchemaError("logistic rhs is scalar with r and K");
        return [r = args[0], K = args[1]](double, const std::vector<double>& x) {
            return std::vector<double>{r * x[0] * (1.0 - x[0] / K)};
        };
    }
    throw SchemaError("unknown rhs '" + kind + "' (known: zero constant linear decay logistic)");
}

StieltjesIVP read_ivp_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw SchemaError("cannot open '" + path + "' for reading");

    StieltjesIVP ivp;
    std::string rhs_kind;
    std::vector<double> rhs_args;
    std::vector<std::tuple<std::size_t, std::string, double, double, double>> guard_lines;

    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (!header_seen) {
            std::string version;
            if (key != "stieltjes-ivp" || !(ls >> version) || version != "v1")
                throw SchemaError("ivp file must start with 'stieltjes-ivp v1'");
            header_seen = true;
            continue;
        }
        if (key == "derivator") {
            std::string p;
            if (!(ls >> p)) throw SchemaError("derivator needs a path, line " + std::to_string(lineno));
            ivp.derivators.push_back(read_derivator_file(p));
        } else if (key == "rhs") {
            if (!(ls >> rhs_kind)) throw SchemaError("rhs needs a kind, line " + std::to_string(lineno));
            double v;
            while (ls >> v) rhs_args.push_back(v);
        } else if (key == "x0") {
            double v;
            while (ls >> v) ivp.x0.push_back(v);
        } else if (key == "guard") {
            std::size_t idx;
            std::string policy;
            double lo, hi, tol = 1e-9;
            if (!(ls >> idx >> policy >> lo >> hi))
                throw SchemaError("guard needs: index policy lo hi, line " + std::to_string(lineno));
            ls >> tol;
            guard_lines.emplace_back(idx, policy, lo, hi, tol);
        } else {
            throw SchemaError("unknown ivp directive '" + key + "', line " + std::to_string(lineno));
        }
    }
    if (!header_seen) throw SchemaError("ivp file must start with 'stieltjes-ivp v1'");
    if (ivp.derivators.empty()) throw SchemaError("ivp file lists no derivators");
    if (rhs_kind.empty()) throw SchemaError("ivp file lists no rhs");
    ivp.rhs = make_rhs(rhs_kind, rhs_args, ivp.derivators.size());

    if (!guard_lines.empty()) {
        ivp.guards.assign(ivp.derivators.size(), std::nullopt);
        for (const auto& [idx, policy, lo, hi, tol] : guard_lines) {
            if (idx >= ivp.guards.size()) throw SchemaError("guard index out of range");
            Guard gd{lo, hi, GuardPolicy::Clamp, tol};
            if (policy == "clamp")
                gd.policy = GuardPolicy::Clamp;
            else if (policy == "reject")
                gd.policy = GuardPolicy::Reject;
            else
                throw SchemaError("guard policy must be clamp or reject");
            ivp.guards[idx] = gd;
        }
    }
    return ivp;
}

int run_solve(const std::string& input, double step, const std::string& scheme, double tol,
              std::size_t max_iter, const std::string& out) {
    const StieltjesIVP ivp = read_ivp_file(input);

    Trajectory traj;
    if (scheme == "euler") {
        traj = euler_solve(ivp, step);
    } else if (scheme == "picard") {
        auto [t, report] = picard_solve(ivp, tol, max_iter, step);
        traj = std::move(t);
        std::cerr << "picard: iterations = " << report.iterations
                  << ", final delta = " << format_double(report.final_delta)
                  << ", L ~= " << format_double(report.lipschitz_estimate)
                  << ", weighted contraction = " << format_double(report.weighted_contraction)
                  << " under " << report.bielecki_weight << '\n';
        if (report.suggests_weighted_norm)
            std::cerr << "picard: plain sup-norm ratios exceeded 1; the weighted norm is the "
                         "meaningful contraction here\n";
    } else {
        throw SchemaError("scheme must be euler or picard");
    }

    std::ofstream file;
    std::ostream& os = out_or_file(file, out);
    write_trajectory_csv(os, traj);
    std::cerr << "nodes = " << traj.grid.size() << ", jump nodes = " << traj.meta.jump_nodes
              << ", rhs evaluations = " << traj.meta.rhs_evaluations << '\n';
    return 0;
}

// ---------------------------------------------------------------- simulate

struct SweepSpec {
    std::string key;
    std::vector<double> values;
};

SweepSpec parse_sweep(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw SchemaError("--sweep needs key=v1,v2,...");
    SweepSpec s;
    s.key = text.substr(0, eq);
    s.values = parse_list(text.substr(eq + 1));
    return s;
}

void apply_override(Scenario& sc, const std::string& key, double v) {
    if (key == "panel.area_m2") sc.panel.area_m2 = v;
    else if (key == "panel.alpha_ref") sc.panel.alpha_ref = v;
    else if (key == "panel.gamma_per_c") sc.panel.gamma_per_c = v;
    else if (key == "panel.rho") sc.panel.rho = v;
    else if (key == "panel.noct_c") sc.panel.noct_c = v;
    else if (key == "panel.mu1") sc.panel.mu1 = v;
    else if (key == "panel.mu2") sc.panel.mu2 = v;
    else if (key == "battery.e_max_wh") sc.battery.e_max_wh = v;
    else if (key == "battery.eta0") sc.battery.eta0 = v;
    else if (key == "battery.nu") sc.battery.nu = v;
    else if (key == "battery.lambda0") sc.battery.lambda0 = v;
    else if (key == "battery.beta_thermal") sc.battery.beta_thermal = v;
    else if (key == "battery.t_thresh_c") sc.battery.t_thresh_c = v;
    else if (key == "initial.e0_wh") sc.e0_wh = v;
    else if (key == "initial.h0") sc.h0 = v;
    else if (key == "initial.s0") sc.s0 = v;
    else if (key == "step_hours") sc.step_h = v;
    else if (key == "horizon_days") sc.horizon_days = v;
    else throw SchemaError("unknown sweep key '" + key + "'");
}

void write_one_simulation(const Scenario& sc, const std::string& traj_path,
                          const std::string& derived_path) {
    const SimulationResult r = simulate(sc);
    {
        std::ofstream os(traj_path);
        if (!os) throw SchemaError("cannot open '" + traj_path + "' for writing");
        write_simulation_csv(os, r);
    }
    if (!derived_path.empty()) {
        const double horizon = r.traj.grid.back();
        WeatherSeries w;
        if (r.traj.grid.size() > 1) {
            for (double t : r.traj.grid) {
                w.time_h.push_back(t);
                w.t_ambient_c.push_back(sc.weather.ambient_at(t));
                w.poa_wm2.push_back(sc.weather.poa_at(t));
            }
        } else {
            w = sc.weather;
        }
        const Derivator g2 = horizon > 0.0 && r.traj.grid.size() > 1
                                 ? build_g2(w, sc.battery)
                                 : Derivator::constant(0.0, 1.0, 0.0);
        const Derivator g3 = horizon > 0.0 && r.traj.grid.size() > 1
                                 ? build_g3(w, sc.panel)
                                 : Derivator::constant(0.0, 1.0, 0.0);
        std::ofstream os(derived_path);
        if (!os) throw SchemaError("cannot open '" + derived_path + "' for writing");
        write_derived_csv(os, r, g2, g3, sc.weather);
    }
}

int run_simulate(const std::string& config, const std::string& weather_path,
                 const std::string& synth, const std::string& out, const std::string& derived_out,
                 const std::string& sweep) {
    WeatherSeries weather;
    if (!synth.empty()) {
        const auto args = parse_list(synth);
        if (args.size() != 4) throw SchemaError("--synth needs days,peak,tmin,tmax");
        weather = synth_clear_sky(static_cast<int>(args[0]), args[1], args[2], args[3]);
    } else if (!weather_path.empty()) {
        weather = read_weather_csv_file(weather_path);
    } else {
        throw SchemaError("simulate needs --weather or --synth");
    }

    const Scenario base = read_scenario_config_file(config, std::move(weather));

    if (sweep.empty()) {
        write_one_simulation(base, out, derived_out);
        std::cout << "wrote " << out << '\n';
        return 0;
    }

    const SweepSpec spec = parse_sweep(sweep);
    const std::string stem = stem_of(out);
    std::vector<std::string> paths(spec.values.size());
    std::vector<std::exception_ptr> failures(spec.values.size());
    std::vector<std::thread> workers;
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        std::ostringstream name;
        name << stem << ".sweep" << i << ".csv";
        paths[i] = name.str();
        workers.emplace_back([&, i] {
            try {
                Scenario sc = base;
                apply_override(sc, spec.key, spec.values[i]);
                write_one_simulation(sc, paths[i], "");
            } catch (...) {
                failures[i] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (std::size_t i = 0; i < failures.size(); ++i)
        if (failures[i]) std::rethrow_exception(failures[i]);
    for (std::size_t i = 0; i < paths.size(); ++i)
        std::cout << "wrote " << paths[i] << " (" << spec.key << " = "
                  << format_double(spec.values[i]) << ")\n";
    return 0;
}

// ---------------------------------------------------------------- convergence

int run_convergence(const std::string& input, const std::string& hspec, double x0,
                    const std::string& steps_text) {
    const Derivator g = read_derivator_file(input);
    const Integrand h = parse_scalar_field(hspec);
    const std::vector<double> steps = parse_list(steps_text);

    StieltjesIVP ivp;
    ivp.derivators.push_back(g);
    ivp.x0 = {x0};
    ivp.rhs = [&h](double t, const std::vector<double>& x) {
        return std::vector<double>{h(t) * x[0]};
    };
    // Closed form of x'_g = h x for state-independent h(t).
    auto reference = [&](double t) { return std::vector<double>{linear_solution(x0, h, g, t)}; };

    const auto rows = convergence_study(ivp, steps, reference);
    std::cout << "step,final_error,observed_order\n";
    for (const auto& r : rows)
        std::cout << format_double(r.step) << ',' << format_double(r.error) << ','
                  << format_double(r.observed_order) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerics for Stieltjes differential equations"};
    app.require_subcommand(1);

    std::string input, fspec = "1", hspec = "const:1", out, derived_out, prefix, route = "direct";
    std::string weather_path, synth, sweep, scheme = "euler", steps_text;
    double from = 0.0, to = 0.0, step = 0.1, tol = 1e-10, x0 = 1.0;
    std::size_t max_iter = 200;
    int hint = -1;
    bool absolute = false;

    auto* dec = app.add_subcommand("decompose", "Jordan decomposition and variation of a derivator");
    dec->add_option("derivator", input, "derivator file")->required();
    dec->add_option("--out-prefix", prefix, "output path prefix");

    auto* integ = app.add_subcommand("integrate", "Lebesgue-Stieltjes integral over [from, to)");
    integ->add_option("derivator", input)->required();
    integ->add_option("--f", fspec, "integrand spec (const:v | pwc:t:v,... | expr:...)");
    integ->add_option("--from", from)->required();
    integ->add_option("--to", to)->required();
    integ->add_option("--hint", hint, "polynomial degree hint");
    integ->add_flag("--abs", absolute, "integrate against |mu_g|");

    auto* gexp_cmd = app.add_subcommand("gexp", "g-exponential e_h(.; a) on a grid");
    gexp_cmd->set_help_flag("--help", "print help");  // frees -h for the coefficient
    gexp_cmd->add_option("derivator", input)->required();
    gexp_cmd->add_option("--h", hspec, "coefficient spec");
    gexp_cmd->add_option("--grid-step", step, "output grid step")->required();
    gexp_cmd->add_option("--route", route)->check(CLI::IsMember({"direct", "hbar", "both"}));
    gexp_cmd->add_option("--out", out, "output CSV (default stdout)");

    auto* solve = app.add_subcommand("solve", "solve an IVP from a spec file");
    solve->add_option("ivp", input, "ivp spec file")->required();
    solve->add_option("--step", step, "grid step")->required();
    solve->add_option("--scheme", scheme)->check(CLI::IsMember({"euler", "picard"}));
    solve->add_option("--tol", tol, "picard tolerance");
    solve->add_option("--max-iter", max_iter, "picard iteration cap");
    solve->add_option("--out", out, "trajectory CSV (default stdout)");

    auto* sim = app.add_subcommand("simulate", "solar panel / battery scenario");
    sim->add_option("--config", input, "scenario config")->required();
    sim->add_option("--weather", weather_path, "weather CSV");
    sim->add_option("--synth", synth, "days,peak,tmin,tmax clear-sky synthesis");
    sim->add_option("--out", out, "trajectory CSV")->required();
    sim->add_option("--derived-out", derived_out, "derived series CSV");
    sim->add_option("--sweep", sweep, "key=v1,v2,... parameter sweep across threads");

    auto* synth_cmd = app.add_subcommand("synth-weather", "write a synthetic clear-sky CSV");
    double days = 1, peak = 800, tmin = 15, tmax = 30;
    synth_cmd->add_option("--days", days)->required();
    synth_cmd->add_option("--peak", peak, "peak irradiance W/m^2");
    synth_cmd->add_option("--t-min", tmin);
    synth_cmd->add_option("--t-max", tmax);
    synth_cmd->add_option("--out", out, "output CSV")->required();

    auto* conv = app.add_subcommand("convergence", "Euler error table for x'_g = h x");
    conv->set_help_flag("--help", "print help");  // frees -h for the coefficient
    conv->add_option("derivator", input)->required();
    conv->add_option("--h", hspec, "coefficient spec");
    conv->add_option("--x0", x0);
    conv->add_option("--steps", steps_text, "comma separated step sizes")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (dec->parsed()) return run_decompose(input, prefix);
        if (integ->parsed()) return run_integrate(input, fspec, from, to, hint, absolute);
        if (gexp_cmd->parsed()) return run_gexp(input, hspec, step, route, out);
        if (solve->parsed()) return run_solve(input, step, scheme, tol, max_iter, out);
        if (sim->parsed()) return run_simulate(input, weather_path, synth, out, derived_out, sweep);
        if (synth_cmd->parsed()) {
            const WeatherSeries w = synth_clear_sky(static_cast<int>(days), peak, tmin, tmax);
            write_weather_csv_file(out, w);
            std::cout << "wrote " << out << '\n';
            return 0;
        }
        if (conv->parsed()) return run_convergence(input, hspec, x0, steps_text);
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
