#include "kgnr/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "kgnr/config.hpp"
#include "kgnr/csv.hpp"
#include "kgnr/errors.hpp"
#include "kgnr/experiment.hpp"
#include "kgnr/kg.hpp"
#include "kgnr/nls.hpp"
#include "kgnr/snapshot.hpp"
#include "kgnr/textio.hpp"

namespace kgnr {

namespace {

// every flag is a raw string fed through the config parser, so flag and file
// syntax stay identical; empty means "not given"
struct Overrides {
    std::string config_path;
    std::string kind, amp, width, center, seed, s_target;
    std::string lambda, eps, times, order_k, norm_s;
    std::string grid_n, grid_l, dt_safety, out;
    std::string solver = "kg";
};

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config_path, "config file; flags override its keys");
    sub->add_option("--kind", o.kind, "data.kind: gaussian | rough");
    sub->add_option("--amp", o.amp, "data.amp: one value or phi,psi pair");
    sub->add_option("--width", o.width, "data.width: one value or phi,psi pair");
    sub->add_option("--center", o.center, "data.center: x,y");
    sub->add_option("--seed", o.seed, "data.seed for rough data");
    sub->add_option("--s-target", o.s_target, "data.s_target for rough data");
    sub->add_option("--lambda", o.lambda, "cubic coefficient");
    sub->add_option("--eps", o.eps, "eps ladder, comma separated, strictly decreasing");
    sub->add_option("--t", o.times, "sample times, comma separated");
    sub->add_option("--k", o.order_k, "approximation order: 0 | 2");
    sub->add_option("--norm-s", o.norm_s, "Sobolev index of the error norm");
    sub->add_option("--n", o.grid_n, "grid points per side");
    sub->add_option("--l", o.grid_l, "torus side length");
    sub->add_option("--dt-safety", o.dt_safety, "wave step dt = dt-safety * eps^2");
    sub->add_option("--out", o.out, "output directory");
}

// Ladder commands refuse to fall back to the built-in eps ladder silently:
// the ladder must come from --eps or from a config file (which may omit eps
// to opt into the default deliberately).
HarnessConfig build_config(const Overrides& o, bool needs_ladder) {
    HarnessConfig cfg;
    if (!o.config_path.empty()) cfg = load_config(o.config_path);
    auto apply = [&](const char* key, const std::string& value) {
        if (!value.empty()) set_config_value(cfg, key, value);
    };
    apply("data.kind", o.kind);
    apply("data.amp", o.amp);
    apply("data.width", o.width);
    apply("data.center", o.center);
    apply("data.seed", o.seed);
    apply("data.s_target", o.s_target);
    apply("lambda", o.lambda);
    apply("eps", o.eps);
    apply("times", o.times);
    apply("order_k", o.order_k);
    apply("norm_s", o.norm_s);
    apply("grid.n", o.grid_n);
    apply("grid.l", o.grid_l);
    apply("dt.safety", o.dt_safety);
    apply("out.dir", o.out);
    if (needs_ladder && o.eps.empty() && o.config_path.empty()) {
        throw ValidationError("this command sweeps the eps ladder: pass --eps or --config");
    }
    return cfg;
}

std::string out_path(const HarnessConfig& cfg, const std::string& leaf) {
    return (std::filesystem::path(cfg.out_dir) / leaf).string();
}

std::vector<double> ascending_times(const HarnessConfig& cfg) {
    std::vector<double> t = cfg.times;
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

void run_solve_nls(const HarnessConfig& cfg) {
    ExperimentSpec spec = make_experiment(cfg);
    std::vector<double> times = ascending_times(cfg);
    NLSParams p;
    p.lambda = cfg.lambda;
    p.grid = spec.grid;
    p.dt = 5e-4;
    p.t_final = times.back();
    p.linear_mode = cfg.lambda == 0.0;
    const bool with_g2 = cfg.order_k == 2;
    ProfileSet set = solve_profiles(spec.phi, spec.psi, p, with_g2, times);

    std::string text = "# generated " + iso8601_now() + "\n" + profile_manifest(set);
    if (set.truncated) {
        text += "# truncated at t = " + format_double(set.truncation_time) +
                " (focusing monitor)\n";
    }
    write_text_file(out_path(cfg, "profiles.csv"), text);
    write_snapshot(out_path(cfg, "g0_final.snap"), set.g0.back(), set.times.back(), 0.0);
    if (with_g2) {
        write_snapshot(out_path(cfg, "g2_final.snap"), set.g2.back(), set.times.back(), 0.0);
    }
}

void run_solve_kg(const HarnessConfig& cfg) {
    ExperimentSpec spec = make_experiment(cfg);
    const double eps = cfg.eps.front();
    std::vector<double> times = ascending_times(cfg);
    KGParams p;
    p.eps = eps;
    p.lambda = cfg.lambda;
    p.grid = spec.grid;
    p.t_final = times.back();
    p.dt_safety = cfg.dt_safety;
    KGRunResult res = kg_solve(kg_init(spec.phi, spec.psi, eps), p, times);

    std::string text = "# generated " + iso8601_now() + "\n" + kg_manifest(res.samples, cfg.lambda);
    if (res.under_resolved) {
        text += "# under-resolved: peak spectral tail fraction " +
                format_double(res.max_tail) + "\n";
    }
    write_text_file(out_path(cfg, "kg.csv"), text);
    write_snapshot(out_path(cfg, "u_final.snap"), res.samples.back().u,
                   res.samples.back().t, eps);
}

void run_self_convergence(const HarnessConfig& cfg, const std::string& solver) {
    ExperimentSpec spec = make_experiment(cfg);
    SelfConvergence sc = self_convergence(solver, spec, cfg.eps.front());
    write_csv(out_path(cfg, "self_convergence.csv"), to_table(sc, cfg.norm_s));
    std::cout << solver << " observed order " << format_double(sc.observed_order) << "\n";
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"non-relativistic limit toolkit: modulation profiles, oscillatory"
                 " approximations, and the wave solves that check them"};
    app.require_subcommand(1);
    Overrides o;

    CLI::App* solve_nls = app.add_subcommand("solve-nls", "march the modulation profiles");
    CLI::App* solve_kg = app.add_subcommand("solve-kg", "march the wave equation at one eps");
    CLI::App* limit_rate =
        app.add_subcommand("limit-rate", "error vs the approximation over the eps ladder");
    CLI::App* residual =
        app.add_subcommand("residual-scaling", "system residual over the eps ladder");
    CLI::App* decay = app.add_subcommand("decay", "sup-norm decay of g0 out to t = 10");
    CLI::App* growth =
        app.add_subcommand("growth", "error growth in time at the ladder head eps");
    CLI::App* selfconv =
        app.add_subcommand("self-convergence", "step-halving order of one integrator");
    for (CLI::App* sub : {solve_nls, solve_kg, limit_rate, residual, decay, growth, selfconv}) {
        add_common(sub, o);
    }
    selfconv->add_option("--solver", o.solver, "nls | g2 | kg");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(solve_nls)) {
            run_solve_nls(build_config(o, false));
        } else if (app.got_subcommand(solve_kg)) {
            run_solve_kg(build_config(o, true));
        } else if (app.got_subcommand(limit_rate)) {
            const HarnessConfig cfg = build_config(o, true);
            write_csv(out_path(cfg, "limit_rate.csv"), to_table(run_limit_experiment(make_experiment(cfg))));
        } else if (app.got_subcommand(residual)) {
            const HarnessConfig cfg = build_config(o, true);
            write_csv(out_path(cfg, "residual_scaling.csv"),
                      to_table(residual_scaling(make_experiment(cfg))));
        } else if (app.got_subcommand(decay)) {
            const HarnessConfig cfg = build_config(o, false);
            write_csv(out_path(cfg, "decay.csv"), to_table(decay_experiment(make_experiment(cfg))));
        } else if (app.got_subcommand(growth)) {
            const HarnessConfig cfg = build_config(o, true);
            write_csv(out_path(cfg, "growth.csv"), to_table(growth_experiment(make_experiment(cfg))));
        } else if (app.got_subcommand(selfconv)) {
            run_self_convergence(build_config(o, false), o.solver);
        }
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

} // namespace kgnr
