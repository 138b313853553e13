#include "kgnr/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "kgnr/data.hpp"
#include "kgnr/errors.hpp"
#include "kgnr/kg.hpp"
#include "kgnr/nls.hpp"
#include "kgnr/spectral.hpp"
#include "kgnr/textio.hpp"
#include "kgnr/wkb.hpp"

namespace kgnr {

namespace {

// profile step for experiment solves: the modulation time error (~dt^2) sits
// two orders below the smallest order-2 targets on the default ladders
constexpr double kProfileDt = 5e-4;
// wave-solve tightening budget: dt halvings allowed to clear the guard
constexpr int kMaxHalvings = 3;

void validate_config(const HarnessConfig& cfg) {
    if (cfg.eps.empty()) {
        throw ValidationError("eps ladder is empty");
    }
    for (double e : cfg.eps) {
        if (!std::isfinite(e) || !(e > 0.0) || e > 0.5) {
            throw ValidationError("eps entries must lie in (0, 0.5]");
        }
    }
    for (std::size_t i = 1; i < cfg.eps.size(); ++i) {
        if (!(cfg.eps[i] < cfg.eps[i - 1])) {
            throw ValidationError("eps ladder must be strictly decreasing");
        }
    }
    if (cfg.times.empty()) {
        throw ValidationError("times list is empty");
    }
    for (double t : cfg.times) {
        if (!std::isfinite(t) || !(t > 0.0)) {
            throw ValidationError("times must be positive");
        }
    }
    validate(WKBOrder{cfg.order_k});
    if (!std::isfinite(cfg.norm_s) || !std::isfinite(cfg.lambda)) {
        throw ValidationError("norm_s and lambda must be finite");
    }
    if (!std::isfinite(cfg.dt_safety) || !(cfg.dt_safety > 0.0)) {
        throw ValidationError("dt.safety must be positive");
    }
}

std::vector<double> sorted_times(const HarnessConfig& cfg) {
    std::vector<double> t = cfg.times;
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

NLSParams profile_params(const ExperimentSpec& spec, double t_final, double dt) {
    NLSParams p;
    p.lambda = spec.config.lambda;
    p.grid = spec.grid;
    p.dt = dt;
    p.t_final = t_final;
    p.linear_mode = spec.config.lambda == 0.0;
    return p;
}

struct ProfileTables {
    ProfileSet profiles;
    std::map<double, HarmonicTable> tables;    // at the configured order
    std::map<double, HarmonicTable> tables_k0; // order 0, for the monotonicity flag
};

ProfileTables solve_tables(const ExperimentSpec& spec, const std::vector<double>& times,
                           LimitReport& rep) {
    const int k = spec.config.order_k;
    ProfileTables pt{solve_profiles(spec.phi, spec.psi,
                                    profile_params(spec, times.back(), kProfileDt), k == 2,
                                    times),
                     {}, {}};
    if (pt.profiles.truncated) {
        rep.notes.push_back("profiles truncated at t = " +
                            format_double(pt.profiles.truncation_time) +
                            " (focusing monitor); cells beyond it report truncation");
    }
    for (double t : times) {
        if (!pt.profiles.has_time(t)) continue;
        pt.tables.emplace(t, build_harmonics(pt.profiles, t, WKBOrder{k}));
        if (k == 2) pt.tables_k0.emplace(t, build_harmonics(pt.profiles, t, WKBOrder{0}));
    }
    return pt;
}

void append_flag(std::string& flags, const std::string& flag) {
    if (!flags.empty()) flags += ';';
    flags += flag;
}

LimitCell truncated_cell(double eps, double t) {
    LimitCell cell;
    cell.eps = eps;
    cell.time = t;
    cell.flags = "truncated";
    return cell;
}

// All cells of one eps: one wave solve pair over the reachable times,
// tightened until self-convergence clears error / 10 everywhere.
void run_eps_cells(const ExperimentSpec& spec, const ProfileTables& pt, double eps,
                   const std::vector<double>& times, LimitReport& rep) {
    const HarnessConfig& cfg = spec.config;
    const WKBOrder order{cfg.order_k};

    std::vector<double> live;
    for (double t : times) {
        if (pt.profiles.has_time(t)) live.push_back(t);
    }

    std::vector<Field> ua, ua_k0, lead;
    for (double t : live) {
        ua.push_back(evaluate_u_a(pt.tables.at(t), eps, order));
        lead.push_back(leading_order(pt.profiles, t, eps));
        if (cfg.order_k == 2) ua_k0.push_back(evaluate_u_a(pt.tables_k0.at(t), eps, WKBOrder{0}));
    }

    std::vector<LimitCell> cells;
    bool solver_failed = false;
    if (!live.empty()) {
        try {
            const KGState init = kg_init(spec.phi, spec.psi, eps);
            KGParams kp;
            kp.eps = eps;
            kp.lambda = cfg.lambda;
            kp.grid = spec.grid;
            kp.t_final = live.back();
            kp.dt_safety = cfg.dt_safety;
            auto solve_at = [&](double dt_step) {
                KGParams p = kp;
                p.dt = dt_step;
                return kg_solve(init, p, live);
            };

            double dt = cfg.dt_safety * eps * eps;
            KGRunResult coarse = solve_at(dt);
            KGRunResult fine = solve_at(dt / 2.0);
            std::vector<double> errs(live.size()), selfs(live.size());
            bool under_resolved = false;
            for (int halving = 0;; ++halving) {
                under_resolved = coarse.under_resolved || fine.under_resolved;
                bool guarded = true;
                for (std::size_t i = 0; i < live.size(); ++i) {
                    errs[i] = sobolev_norm(sub(fine.samples[i].u, ua[i]), cfg.norm_s);
                    selfs[i] =
                        sobolev_norm(sub(coarse.samples[i].u, fine.samples[i].u), cfg.norm_s);
                    if (selfs[i] > errs[i] / 10.0) guarded = false;
                }
                if (guarded || halving == kMaxHalvings) break;
                dt /= 2.0;
                coarse = std::move(fine);
                fine = solve_at(dt / 2.0);
            }

            for (std::size_t i = 0; i < live.size(); ++i) {
                LimitCell cell;
                cell.eps = eps;
                cell.time = live[i];
                cell.error = errs[i];
                cell.leading_error =
                    sobolev_norm(sub(fine.samples[i].u, lead[i]), cfg.norm_s);
                cell.residual = system_residual(pt.tables.at(live[i]), eps, cfg.norm_s);
                cell.self_conv = selfs[i];
                if (selfs[i] > errs[i] / 10.0) append_flag(cell.flags, "guard");
                if (under_resolved) append_flag(cell.flags, "under-resolved");
                if (cfg.order_k == 2 && errs[i] > sobolev_norm(sub(fine.samples[i].u, ua_k0[i]),
                                                               cfg.norm_s) *
                                                      (1.0 + 1e-9)) {
                    append_flag(cell.flags, "order-inversion");
                }
                cells.push_back(std::move(cell));
            }
        } catch (const NumericalError& e) {
            solver_failed = true;
            rep.notes.push_back("wave solve failed at eps = " + format_double(eps) + ": " +
                                e.what());
        }
    }

    // merge in time order; cells the profiles or the solver never reached are
    // labeled, not NaN-filled
    std::size_t live_idx = 0;
    for (double t : times) {
        if (!pt.profiles.has_time(t)) {
            rep.rows.push_back(truncated_cell(eps, t));
        } else if (solver_failed) {
            LimitCell cell;
            cell.eps = eps;
            cell.time = t;
            cell.flags = "solver-failed";
            rep.rows.push_back(cell);
        } else {
            rep.rows.push_back(cells[live_idx++]);
        }
    }
}

std::vector<std::array<double, 2>> column_points(const LimitReport& rep, double t,
                                                 std::optional<double> LimitCell::*member) {
    std::vector<std::array<double, 2>> pts;
    for (const LimitCell& row : rep.rows) {
        if (row.time != t) continue;
        const std::optional<double>& v = row.*member;
        if (v.has_value() && *v > 0.0) pts.push_back({row.eps, *v});
    }
    return pts;
}

void append_fits(LimitReport& rep, const std::vector<double>& times, std::size_t ladder_size) {
    if (ladder_size < 2) return;
    for (double t : times) {
        LimitFit fit;
        fit.time = t;
        bool have_r2 = false;
        auto slope_of = [&](std::optional<double> LimitCell::*member) -> std::optional<double> {
            auto pts = column_points(rep, t, member);
            if (pts.size() >= 3) {
                RateFit rf = fit_rate(pts);
                if (!have_r2) {
                    fit.r_squared = rf.r_squared;
                    have_r2 = true;
                }
                return rf.slope;
            }
            if (pts.size() == 2) {
                fit.two_point = true;
                return two_point_slope(pts[0], pts[1]);
            }
            return std::nullopt;
        };
        fit.error_slope = slope_of(&LimitCell::error);
        fit.leading_slope = slope_of(&LimitCell::leading_error);
        fit.residual_slope = slope_of(&LimitCell::residual);
        if (fit.error_slope || fit.leading_slope || fit.residual_slope) {
            rep.fits.push_back(fit);
        }
    }
}

std::string cell_text(const std::optional<double>& v) {
    return v.has_value() ? format_double(*v) : std::string();
}

} // namespace

ExperimentSpec make_experiment(const HarnessConfig& cfg) {
    validate_config(cfg);
    GridPtr grid = make_grid(cfg.grid_n, cfg.grid_l);
    if (cfg.data_kind == "gaussian") {
        return ExperimentSpec{
            cfg, grid,
            gaussian_data(cfg.data_amp[0], cfg.data_width[0], cfg.data_center, grid),
            gaussian_data(cfg.data_amp[1], cfg.data_width[1], cfg.data_center, grid)};
    }
    if (cfg.data_kind == "rough") {
        return ExperimentSpec{cfg, grid, rough_data(cfg.data_s_target, cfg.data_seed, grid),
                              rough_data(cfg.data_s_target, cfg.data_seed + 1, grid)};
    }
    throw ValidationError("unknown data.kind '" + cfg.data_kind + "' (gaussian | rough)");
}

ExperimentSpec make_experiment(const HarnessConfig& cfg, Field phi, Field psi) {
    validate_config(cfg);
    if (phi.grid() != psi.grid()) {
        throw ValidationError("phi and psi must share a grid");
    }
    GridPtr grid = phi.grid();
    return ExperimentSpec{cfg, grid, std::move(phi), std::move(psi)};
}

LimitReport run_limit_experiment(const ExperimentSpec& spec) {
    LimitReport rep;
    rep.order_k = spec.config.order_k;
    rep.norm_s = spec.config.norm_s;
    const std::vector<double> times = sorted_times(spec.config);
    ProfileTables pt = solve_tables(spec, times, rep);
    for (double eps : spec.config.eps) {
        run_eps_cells(spec, pt, eps, times, rep);
    }
    append_fits(rep, times, spec.config.eps.size());
    return rep;
}

LimitReport residual_scaling(const ExperimentSpec& spec) {
    LimitReport rep;
    rep.order_k = spec.config.order_k;
    rep.norm_s = spec.config.norm_s;
    const std::vector<double> times = sorted_times(spec.config);
    ProfileTables pt = solve_tables(spec, times, rep);
    for (double eps : spec.config.eps) {
        for (double t : times) {
            if (!pt.profiles.has_time(t)) {
                rep.rows.push_back(truncated_cell(eps, t));
                continue;
            }
            LimitCell cell;
            cell.eps = eps;
            cell.time = t;
            cell.residual = system_residual(pt.tables.at(t), eps, spec.config.norm_s);
            rep.rows.push_back(cell);
        }
    }
    append_fits(rep, times, spec.config.eps.size());
    return rep;
}

DecayReport decay_experiment(const ExperimentSpec& spec) {
    const HarnessConfig& cfg = spec.config;
    if (!(cfg.lambda > 0.0)) {
        throw ValidationError("decay experiment needs lambda > 0 (defocusing)");
    }
    if (cfg.grid_l < 48.0 * kPi - 1e-9) {
        throw ValidationError("decay experiment needs side length >= 48 pi");
    }

    DecayReport rep;
    std::vector<double> times;
    for (int i = 0; i <= 40; ++i) times.push_back(0.25 * i);
    rep.window_end = times.back();

    const double max0 = max_abs(init_g0(spec.phi, spec.psi));
    if (max0 == 0.0) {
        rep.degenerate = true;
        for (double t : times) rep.samples.push_back({t, 0.0, false});
        rep.notes.push_back("zero datum: degenerate report, nothing to fit");
        return rep;
    }

    ProfileSet profiles =
        solve_profiles(spec.phi, spec.psi, profile_params(spec, times.back(), kProfileDt),
                       false, times);
    if (profiles.truncated) {
        rep.notes.push_back("profiles truncated at t = " +
                            format_double(profiles.truncation_time));
    }

    const int n = spec.grid->n();
    auto seam_max = [&](const Field& f) {
        double m = 0.0;
        for (int j = 0; j < n; ++j) {
            m = std::max(m, std::abs(f.samples()[std::size_t(0) * n + j]));
            m = std::max(m, std::abs(f.samples()[std::size_t(j) * n + 0]));
        }
        return m;
    };

    const double wrap_level = 1e-8 * max0;
    double last_clean = 0.0;
    for (double t : times) {
        if (!profiles.has_time(t)) break;
        const Field& g = profiles.g0_at(t);
        const bool w = rep.wrapped || seam_max(g) > wrap_level;
        if (w && !rep.wrapped) {
            rep.wrapped = true;
            rep.window_end = last_clean;
            rep.notes.push_back("wrap-around at t = " + format_double(t) +
                                "; fit window shortened to [1, " + format_double(last_clean) +
                                "]");
        }
        rep.samples.push_back({t, max_abs(g), w});
        if (!w) last_clean = t;
    }
    if (!rep.wrapped) rep.window_end = last_clean;

    std::vector<std::array<double, 2>> pts;
    for (const DecaySample& s : rep.samples) {
        if (s.time >= 1.0 && !s.wrapped && s.max_abs > 0.0) pts.push_back({1.0 + s.time, s.max_abs});
    }
    if (pts.size() >= 3) {
        rep.fit = fit_rate(pts);
    } else {
        rep.notes.push_back("fewer than 3 usable samples in [1, " +
                            format_double(rep.window_end) + "]; no fit");
    }
    return rep;
}

GrowthReport growth_experiment(const ExperimentSpec& spec) {
    HarnessConfig sub = spec.config;
    sub.eps = {spec.config.eps.front()};
    sub.times = {1.0, 2.0, 4.0, 8.0};
    LimitReport lr = run_limit_experiment(ExperimentSpec{sub, spec.grid, spec.phi, spec.psi});

    GrowthReport rep;
    rep.eps = sub.eps.front();
    rep.order_k = sub.order_k;
    rep.norm_s = sub.norm_s;
    rep.rows = std::move(lr.rows);
    rep.notes = std::move(lr.notes);

    const double scale = std::pow(rep.eps, double(rep.order_k + 1));
    std::string listing = "normalized error/eps^(K+1):";
    for (const LimitCell& row : rep.rows) {
        if (!row.error.has_value()) continue;
        rep.normalized.push_back({row.time, *row.error / scale});
        listing += " t=" + format_double(row.time) + " -> " +
                   format_double(*row.error / scale) + ";";
    }
    if (!rep.normalized.empty()) rep.notes.push_back(listing);

    if (rep.normalized.size() >= 3) {
        std::vector<std::array<double, 2>> pts;
        for (const auto& s : rep.normalized) pts.push_back({1.0 + s[0], s[1]});
        RateFit rf = fit_rate(pts);
        rep.exponent = rf.slope;
        rep.r_squared = rf.r_squared;
    } else {
        rep.notes.push_back("fewer than 3 usable rows; no growth exponent");
    }
    return rep;
}

double growth_exponent(const std::vector<std::array<double, 2>>& samples) {
    std::vector<std::array<double, 2>> pts;
    pts.reserve(samples.size());
    for (const auto& s : samples) pts.push_back({1.0 + s[0], s[1]});
    return fit_rate(pts).slope;
}

SelfConvergence self_convergence(const std::string& solver, const ExperimentSpec& spec,
                                 double eps) {
    if (solver != "nls" && solver != "g2" && solver != "kg") {
        throw ValidationError("unknown solver '" + solver + "' (nls | g2 | kg)");
    }
    if (spec.config.lambda == 0.0) {
        throw ValidationError(
            "self-convergence needs lambda != 0: the lambda = 0 flows are exact per mode");
    }

    SelfConvergence sc;
    sc.solver = solver;
    sc.eps = eps;
    const double s = spec.config.norm_s;
    const double T = 0.25;

    if (solver == "kg") {
        const double dt0 = spec.config.dt_safety * eps * eps;
        const KGState init = kg_init(spec.phi, spec.psi, eps);
        auto final_u = [&](double dt) {
            KGParams p;
            p.eps = eps;
            p.lambda = spec.config.lambda;
            p.grid = spec.grid;
            p.dt = dt;
            p.t_final = T;
            p.dt_safety = spec.config.dt_safety;
            return kg_solve(init, p, {T}).samples.back().u;
        };
        const Field ref = final_u(dt0 / 16.0);
        for (double dt : {dt0, dt0 / 2.0, dt0 / 4.0}) {
            sc.dts.push_back(dt);
            sc.errors.push_back(sobolev_norm(sub(final_u(dt), ref), s));
        }
    } else {
        const double dt0 = 1.0 / 128.0;
        auto final_profile = [&](double dt) {
            ProfileSet set = solve_profiles(spec.phi, spec.psi, profile_params(spec, T, dt),
                                            solver == "g2", {T});
            if (set.truncated) {
                throw NumericalError("profiles truncated during self-convergence");
            }
            return solver == "g2" ? set.g2_at(T) : set.g0_at(T);
        };
        const Field ref = final_profile(dt0 / 16.0);
        for (double dt : {dt0, dt0 / 2.0, dt0 / 4.0}) {
            sc.dts.push_back(dt);
            sc.errors.push_back(sobolev_norm(sub(final_profile(dt), ref), s));
        }
    }

    std::vector<std::array<double, 2>> pts;
    for (std::size_t i = 0; i < sc.dts.size(); ++i) pts.push_back({sc.dts[i], sc.errors[i]});
    sc.observed_order = fit_rate(pts).slope;
    return sc;
}

CsvTable to_table(const LimitReport& rep) {
    CsvTable t;
    t.columns = kReportColumns;
    t.notes = rep.notes;
    const std::string k = std::to_string(rep.order_k);
    const std::string s = format_double(rep.norm_s);
    for (const LimitCell& row : rep.rows) {
        t.rows.push_back({format_double(row.eps), format_double(row.time), k, s,
                          cell_text(row.error), cell_text(row.leading_error),
                          cell_text(row.residual), cell_text(row.self_conv), row.flags});
    }
    for (const LimitFit& fit : rep.fits) {
        const std::string flags =
            fit.two_point ? "fit two-point" : "fit r2=" + format_double(fit.r_squared);
        t.rows.push_back({"fit", format_double(fit.time), k, s, cell_text(fit.error_slope),
                          cell_text(fit.leading_slope), cell_text(fit.residual_slope), "",
                          flags});
    }
    return t;
}

CsvTable to_table(const DecayReport& rep) {
    CsvTable t;
    t.columns = kReportColumns;
    t.notes = rep.notes;
    for (const DecaySample& s : rep.samples) {
        t.rows.push_back({"", format_double(s.time), "", "", format_double(s.max_abs), "", "",
                          "", s.wrapped ? "wrapped" : (rep.degenerate ? "degenerate" : "")});
    }
    if (rep.fit.has_value()) {
        t.rows.push_back({"fit", "", "", "", format_double(rep.fit->slope), "", "", "",
                          "fit r2=" + format_double(rep.fit->r_squared)});
    }
    return t;
}

CsvTable to_table(const GrowthReport& rep) {
    LimitReport as_limit;
    as_limit.order_k = rep.order_k;
    as_limit.norm_s = rep.norm_s;
    as_limit.rows = rep.rows;
    as_limit.notes = rep.notes;
    CsvTable t = to_table(as_limit);
    if (rep.exponent.has_value()) {
        t.rows.push_back({"fit", "", std::to_string(rep.order_k), format_double(rep.norm_s),
                          format_double(*rep.exponent), "", "", "",
                          "fit r2=" + format_double(rep.r_squared) + " growth-exponent"});
    }
    return t;
}

CsvTable to_table(const SelfConvergence& rep, double norm_s) {
    CsvTable t;
    t.columns = kReportColumns;
    const std::string s = format_double(norm_s);
    for (std::size_t i = 0; i < rep.dts.size(); ++i) {
        t.rows.push_back({format_double(rep.dts[i]), "", "", s, format_double(rep.errors[i]),
                          "", "", "", "dt-ladder " + rep.solver});
    }
    t.rows.push_back({"fit", "", "", s, format_double(rep.observed_order), "", "", "",
                      "fit self-convergence " + rep.solver});
    t.notes.push_back("eps column holds dt for self-convergence reports");
    return t;
}

} // namespace kgnr
