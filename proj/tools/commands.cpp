#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "fairdyn/analysis.hpp"
#include "plot.hpp"

namespace fairdyn::cli {

namespace fs = std::filesystem;

namespace {

std::string lower_name(Constraint c) {
    switch (c) {
    case Constraint::unconstrained: return "un";
    case Constraint::dp: return "dp";
    case Constraint::eqopt: return "eqopt";
    }
    return "x";
}

std::ofstream open_out(const RunOptions& run, const std::string& name) {
    fs::create_directories(run.out_dir);
    const fs::path p = fs::path(run.out_dir) / name;
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError("output: cannot write " + p.string());
    return os;
}

const Scenario& need_scenario(const ScenarioConfig& c, const char* cmd) {
    if (!c.scenario) throw ConfigError(std::string("groups: required by ") + cmd);
    return *c.scenario;
}

double revalidate(const Scenario& s, Constraint c, const QualState& q) {
    const ThresholdPair p = ThresholdMap(s, c)(q);
    return sup_distance(step(s, q, p), q);
}

void write_gen_trajectory(std::ostream& os, const GenTrajectory& t) {
    os << "step,zeta11,zeta10,zeta01,zeta00,alpha,theta\n";
    for (std::size_t i = 0; i < t.states.size(); ++i) {
        const GenState& z = t.states[i];
        os << i << ',' << format_real(z.zeta11) << ',' << format_real(z.zeta10) << ','
           << format_real(z.zeta01) << ',' << format_real(z.zeta00) << ',' << format_real(z.alpha())
           << ',' << format_real(i < t.thresholds.size() ? t.thresholds[i] : kNaN) << '\n';
    }
}

int gen_simulate_all(const GenerationSpec& g, const ScenarioConfig& c, const RunOptions& run,
                     std::ostream& log) {
    std::vector<double> starts = g.initial_alpha;
    if (starts.empty()) starts.push_back(0.5);
    std::ofstream summary = open_out(run, "gen_simulate_summary.csv");
    summary << "initial,alpha0,alpha,zeta00,termination,steps,residual,period\n";
    for (std::size_t i = 0; i < starts.size(); ++i) {
        const GenTrajectory t = gen_simulate(g.model, initial_gen_state(starts[i]), c.simulation);
        std::ofstream os = open_out(run, "gen_trajectory_" + std::to_string(i) + ".csv");
        write_gen_trajectory(os, t);
        const GenState& z = t.states.back();
        summary << i << ',' << format_real(starts[i]) << ',' << format_real(z.alpha()) << ','
                << format_real(z.zeta00) << ',' << to_string(t.termination.kind) << ','
                << t.states.size() - 1 << ',' << format_real(t.termination.residual) << ','
                << t.termination.period << '\n';
        log << "generation start " << format_real(starts[i]) << ": "
            << to_string(t.termination.kind) << " at alpha " << format_real(z.alpha()) << '\n';
    }
    return kOk;
}

}  // namespace

int cmd_simulate(const ScenarioConfig& c, const RunOptions& run, std::ostream& log) {
    if (c.generation) gen_simulate_all(*c.generation, c, run, log);
    if (!c.scenario) return kOk;
    const Scenario& s = *c.scenario;
    std::vector<QualState> starts = c.all_initial_states();
    if (starts.empty()) starts.push_back({0.5, 0.5});

    std::ofstream summary = open_out(run, "simulate_summary.csv");
    summary << "constraint,initial,alphaA0,alphaB0,alphaA,alphaB,termination,steps,residual,period\n";
    for (Constraint k : c.active_constraints()) {
        const PolicyFn policy = threshold_map(s, k);
        std::vector<Trajectory> trs;
        for (std::size_t i = 0; i < starts.size(); ++i) {
            Trajectory t = simulate(s, policy, starts[i], c.simulation);
            std::ofstream os =
                open_out(run, "trajectory_" + lower_name(k) + "_" + std::to_string(i) + ".csv");
            write_trajectory_csv(os, t);
            const QualState& f = t.final_state();
            summary << to_string(k) << ',' << i << ',' << format_real(starts[i].alpha_a) << ','
                    << format_real(starts[i].alpha_b) << ',' << format_real(f.alpha_a) << ','
                    << format_real(f.alpha_b) << ',' << to_string(t.termination.kind) << ','
                    << t.states.size() - 1 << ',' << format_real(t.termination.residual) << ','
                    << t.termination.period << '\n';
            trs.push_back(std::move(t));
        }
        int converged = 0;
        for (const Trajectory& t : trs) converged += t.termination.kind == Termination::converged;
        log << to_string(k) << ": " << converged << '/' << trs.size() << " trajectories converged\n";
        if (run.plot) {
            const BalancedFunctions bf = balanced_functions(s, policy, 101);
            EquilibriumOptions eo;
            eo.diagnostics = false;
            const EquilibriumReport r = find_equilibria(s, k, eo);
            std::ofstream svg = open_out(run, "phase_" + lower_name(k) + ".svg");
            write_phase_svg(svg, std::string(to_string(k)) + " phase portrait", bf, trs, r.equilibria);
            std::ofstream bcsv = open_out(run, "balanced_" + lower_name(k) + ".csv");
            write_balanced_csv(bcsv, bf);
        }
    }
    return kOk;
}

int cmd_equilibrium(const ScenarioConfig& c, const RunOptions& run, std::ostream& log) {
    int code = kOk;
    if (c.scenario) {
        const Scenario& s = *c.scenario;
        std::vector<EquilibriumReport> reports;
        for (Constraint k : c.active_constraints()) {
            EquilibriumReport r = find_equilibria(s, k);
            for (std::size_t i = 0; i < r.equilibria.size(); ++i) {
                const double res = revalidate(s, k, r.equilibria[i].state);
                if (!(res <= kRowResidual)) {
                    log << "violation: " << to_string(k) << " row " << i << " step residual "
                        << format_real(res) << '\n';
                    code = kViolation;
                }
            }
            log << to_string(k) << ": " << r.equilibria.size() << " equilibri"
                << (r.equilibria.size() == 1 ? "um" : "a") << ", uniqueness " << r.uniqueness;
            for (const EquilibriumPoint& e : r.equilibria)
                log << " (" << format_real(e.state.alpha_a) << ", " << format_real(e.state.alpha_b)
                    << (e.stable ? ", stable)" : ", unstable)");
            log << '\n';
            reports.push_back(std::move(r));
        }
        std::ofstream os = open_out(run, "equilibrium.csv");
        write_equilibria_csv(os, reports);
    }
    if (c.generation) {
        const GenerationSpec& g = *c.generation;
        if (!g.variant) {
            log << "generation: no variant given, equilibrium comparison skipped\n";
        } else {
            const GenComparison cmp = gen_equilibrium(g.model, *g.variant);
            std::ofstream os = open_out(run, "gen_equilibrium.csv");
            os << "variant,index,alpha,zeta11,zeta10,zeta01,zeta00,residual,feasible,baseline,"
                  "crossing,shape,ratio_bound,precondition,predicted,ordering_holds\n";
            const double base = cmp.baseline.empty() ? kNaN : cmp.baseline.front();
            for (std::size_t i = 0; i < cmp.equilibria.size(); ++i) {
                const GenEquilibrium& e = cmp.equilibria[i];
                os << to_string(cmp.variant) << ',' << i << ',' << format_real(e.alpha) << ','
                   << format_real(e.state.zeta11) << ',' << format_real(e.state.zeta10) << ','
                   << format_real(e.state.zeta01) << ',' << format_real(e.state.zeta00) << ','
                   << format_real(e.residual) << ',' << (e.feasible ? "true" : "false") << ','
                   << format_real(base) << ',' << format_real(cmp.crossing) << ',' << cmp.shape
                   << ',' << format_real(cmp.ratio_bound) << ','
                   << (cmp.precondition ? "true" : "false") << ',' << cmp.predicted << ','
                   << (cmp.ordering_holds ? "true" : "false") << '\n';
                if (!e.feasible || !(e.residual <= kRowResidual)) code = kViolation;
            }
            if (cmp.predicted != 0 && !cmp.ordering_holds) code = kViolation;
            log << "generation " << to_string(cmp.variant) << ": " << cmp.equilibria.size()
                << " equilibria, baseline " << format_real(base) << ", predicted sign "
                << cmp.predicted << (cmp.ordering_holds ? ", ordering holds" : "") << '\n';
        }
    }
    return code;
}

int cmd_sweep(const ScenarioConfig& c, const RunOptions& run, std::ostream& log) {
    const Scenario& base = need_scenario(c, "sweep");
    if (c.sweep.empty()) throw ConfigError("sweep: grid is empty");
    std::vector<QualState> starts = c.all_initial_states();
    if (starts.empty()) starts.push_back({0.5, 0.5});
    const auto points = sweep_points(c.sweep);
    const auto constraints = c.active_constraints();

    std::ofstream os = open_out(run, "sweep.csv");
    os << "point";
    for (const std::string& col : sweep_columns(c.sweep)) os << ',' << col;
    os << ",constraint,status,index,count,alphaA,alphaB,disparity,stable,uniqueness,oscillating,"
          "period\n";

    int code = kOk;
    int oscillating_points = 0;
    std::vector<ScatterSeries> series;
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c"};
    for (std::size_t k = 0; k < constraints.size(); ++k)
        series.push_back({to_string(constraints[k]), colors[k % 3], {}});

    for (std::size_t pi = 0; pi < points.size(); ++pi) {
        const Scenario s = apply_sweep_point(base, c.sweep, points[pi]);
        for (std::size_t k = 0; k < constraints.size(); ++k) {
            const Constraint con = constraints[k];
            const PolicyFn policy = threshold_map(s, con);
            int period = 0;
            for (const QualState& q : starts) {
                const Trajectory t = simulate(s, policy, q, c.simulation);
                if (t.termination.kind == Termination::oscillating) {
                    period = t.termination.period;
                    break;
                }
            }
            oscillating_points += period > 0;
            auto prefix = [&] {
                os << pi;
                for (double v : points[pi]) os << ',' << format_real(v);
                os << ',' << to_string(con);
            };
            std::optional<EquilibriumReport> r;
            try {
                r = find_equilibria(s, con);
            } catch (const NumericFailure& e) {
                prefix();
                os << ",no-equilibrium,0,0,nan,nan,nan,false,unknown," << (period > 0 ? "true" : "false")
                   << ',' << period << '\n';
                log << "point " << pi << ' ' << to_string(con) << ": " << e.what() << '\n';
                continue;
            }
            for (std::size_t i = 0; i < r->equilibria.size(); ++i) {
                const EquilibriumPoint& e = r->equilibria[i];
                if (!(revalidate(s, con, e.state) <= kRowResidual)) code = kViolation;
                prefix();
                os << ",ok," << i << ',' << r->equilibria.size() << ',' << format_real(e.state.alpha_a)
                   << ',' << format_real(e.state.alpha_b) << ','
                   << format_real(e.state.alpha_a - e.state.alpha_b) << ','
                   << (e.stable ? "true" : "false") << ',' << r->uniqueness << ','
                   << (period > 0 ? "true" : "false") << ',' << period << '\n';
            }
            if (!r->equilibria.empty()) series[k].points.push_back(r->equilibria.front().state);
        }
    }
    log << "sweep: " << points.size() << " points x " << constraints.size() << " constraints, "
        << oscillating_points << " oscillating\n";
    if (run.plot) {
        std::ofstream svg = open_out(run, "sweep.svg");
        write_scatter_svg(svg, "equilibria across the sweep grid", series);
    }
    return code;
}

int cmd_suite(const std::string& name, std::uint64_t seed, const RunOptions& run,
              std::ostream& log) {
    const SuiteResult r = run_suite(name, seed);
    std::ofstream os = open_out(run, "suite_" + r.name + ".csv");
    write_suite_csv(os, r);
    for (const SuiteCase& sc : r.cases)
        if (!sc.pass) log << "FAIL " << r.name << " case " << sc.index << ": " << sc.detail << '\n';
    for (const std::string& n : r.notes) log << "note: " << n << '\n';
    log << r.name << " seed " << seed << ": " << r.passed() << '/' << r.cases.size() << " passed\n";
    return r.ok() ? kOk : kViolation;
}

int cmd_check(const ScenarioConfig& c, std::ostream& log) {
    if (c.scenario) {
        const Scenario& s = *c.scenario;
        log << "groups: a class " << to_string(classify_transitions(s.a.transitions)) << ", b class "
            << to_string(classify_transitions(s.b.transitions)) << ", likelihood ratios increasing\n";
    }
    log << "constraints:";
    for (Constraint k : c.active_constraints()) log << ' ' << to_string(k);
    log << "\ninitial states: " << c.all_initial_states().size() << '\n';
    if (!c.sweep.empty()) log << "sweep points: " << sweep_points(c.sweep).size() << '\n';
    if (c.generation)
        log << "generation: "
            << (c.generation->variant ? to_string(*c.generation->variant) : "general") << '\n';
    // the normalized form must parse back to the same thing
    const nlohmann::json j = to_json(c);
    if (to_json(parse_config(j)) != j) {
        log << "config does not round-trip\n";
        return kViolation;
    }
    log << "config ok\n";
    return kOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Threshold-policy fairness dynamics"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::optional<int> max_steps;
    bool plot = false;
    std::string suite_name;

    auto scenario_opts = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Scenario config (JSON)")->required();
        sub->add_option("--seed", seed, "RNG seed");
        sub->add_option("--out", out_dir, "Output directory");
        sub->add_flag("--plot", plot, "Also write SVG plots");
        sub->add_option("--tol", tol, "Simulation convergence tolerance");
        sub->add_option("--max-steps", max_steps, "Simulation step cap");
    };
    CLI::App* sim = app.add_subcommand("simulate", "Trajectories per constraint and initial state");
    CLI::App* eq = app.add_subcommand("equilibrium", "Equilibria with uniqueness and stability");
    CLI::App* sw = app.add_subcommand("sweep", "Equilibria and oscillation over a parameter grid");
    CLI::App* su = app.add_subcommand("suite", "Seeded property suite");
    CLI::App* ck = app.add_subcommand("check", "Validate a config");
    for (CLI::App* sub : {sim, eq, sw}) scenario_opts(sub);
    ck->add_option("--config", config_path, "Scenario config (JSON)")->required();
    su->add_option("name", suite_name, "thm3, thm4, thm5, prop1, prop2, prop3 or gen")->required();
    su->add_option("--seed", seed, "RNG seed");
    su->add_option("--out", out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        RunOptions run;
        run.plot = plot;
        if (su->parsed()) {
            if (!known_suite(suite_name)) {
                err << "usage: unknown suite '" << suite_name << "'\n" << su->help();
                return kConfigError;
            }
            if (!out_dir.empty()) run.out_dir = out_dir;
            return cmd_suite(suite_name, seed.value_or(20240611), run, out);
        }

        std::ifstream in(config_path);
        if (!in) throw ConfigError(config_path + ": cannot open");
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(config_path + ": " + e.what());
        }
        if (!j.is_object()) throw ConfigError(config_path + ": expected a JSON object");
        if (seed) j["seed"] = *seed;
        if (tol) j["simulation"]["tol"] = *tol;
        if (max_steps) j["simulation"]["max_steps"] = *max_steps;
        const ScenarioConfig c = parse_config(j);
        run.out_dir = out_dir.empty() ? c.output : out_dir;

        if (ck->parsed()) return cmd_check(c, out);
        if (sim->parsed()) return cmd_simulate(c, run, out);
        if (eq->parsed()) return cmd_equilibrium(c, run, out);
        return cmd_sweep(c, run, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ModelError& e) {
        err << "model error: " << e.what() << '\n';
        return kConfigError;
    } catch (const NumericFailure& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNumericFailure;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "output error: " << e.what() << '\n';
        return kConfigError;
    }
}

}  // namespace fairdyn::cli
