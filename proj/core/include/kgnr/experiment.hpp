#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "kgnr/config.hpp"
#include "kgnr/csv.hpp"
#include "kgnr/field.hpp"
#include "kgnr/ratefit.hpp"

namespace kgnr {

// A validated experiment: configuration plus grid and datum pair.
struct ExperimentSpec {
    HarnessConfig config;
    GridPtr grid;
    Field phi;
    Field psi;
};

// Builds the grid and data from the config and validates: eps ladder
// strictly decreasing within (0, 0.5], times positive, and the gaussian seam
// check (rough data is torus-native, no seam to check). The two-field
// overload injects caller-built data for oracle runs; the seam check is then
// the caller's responsibility.
ExperimentSpec make_experiment(const HarnessConfig& cfg);
ExperimentSpec make_experiment(const HarnessConfig& cfg, Field phi, Field psi);

// One (eps, t) measurement. Values are absent when the cell was cut short
// (flags says why); nothing is ever emitted as NaN.
struct LimitCell {
    double eps = 0.0;
    double time = 0.0;
    std::optional<double> error;         // vs the order-K approximation
    std::optional<double> leading_error; // vs 2 Re(e^{i theta} g0)
    std::optional<double> residual;      // system residual at (t, eps)
    std::optional<double> self_conv;     // wave solve at dt vs dt/2
    std::string flags;
};

// Per-time power-law fits over the eps ladder.
struct LimitFit {
    double time = 0.0;
    std::optional<double> error_slope;
    std::optional<double> leading_slope;
    std::optional<double> residual_slope;
    double r_squared = 0.0; // of the error fit (or residual fit when alone)
    bool two_point = false; // exact two-point slope, not a regression
};

struct LimitReport {
    int order_k = 0;
    double norm_s = 1.0;
    std::vector<LimitCell> rows; // eps descending, time ascending
    std::vector<LimitFit> fits;  // one per time once the ladder has >= 2 eps
    std::vector<std::string> notes;
};

// Wave solve vs approximation over the (eps, time) grid. Profiles are solved
// once; each eps gets a wave solve at dt = dt_safety * eps^2, halved (up to
// three times) until the self-convergence distance is at most error / 10;
// rows still missing the guard are flagged. Profile truncation (focusing
// monitor) and resolution warnings land in flags, never as NaN.
LimitReport run_limit_experiment(const ExperimentSpec& spec);

// System residual over the ladder only; no wave solves.
LimitReport residual_scaling(const ExperimentSpec& spec);

// max |g0| on [0, 10] sampled every 0.25, with a seam guard: once the edge
// ring of |g0| exceeds 1e-8 x the initial max the wave has wrapped around
// and later samples are excluded from the fit (and the report says so).
struct DecaySample {
    double time = 0.0;
    double max_abs = 0.0;
    bool wrapped = false;
};

struct DecayReport {
    std::vector<DecaySample> samples;
    std::optional<RateFit> fit; // log max|g0| vs log(1+t), t in [1, window_end]
    double window_end = 0.0;
    bool wrapped = false;
    bool degenerate = false; // zero datum: all-zero samples, nothing to fit
    std::vector<std::string> notes;
};

// Requires lambda > 0 and side length >= 48 pi.
DecayReport decay_experiment(const ExperimentSpec& spec);

// Error growth in time at fixed eps (the ladder head): limit rows at
// t in {1, 2, 4, 8} plus the exponent of error / eps^{K+1} against (1 + t).
// Report-only: no acceptance window is attached to the exponent.
struct GrowthReport {
    double eps = 0.0;
    int order_k = 0;
    double norm_s = 1.0;
    std::vector<LimitCell> rows;
    std::vector<std::array<double, 2>> normalized; // (t, error / eps^{K+1})
    std::optional<double> exponent;
    double r_squared = 0.0;
    std::vector<std::string> notes;
};

GrowthReport growth_experiment(const ExperimentSpec& spec);

// slope of log(value) vs log(1 + t) over (t, value) samples.
double growth_exponent(const std::vector<std::array<double, 2>>& samples);

// Step-halving study of one integrator: errors at {dt0, dt0/2, dt0/4}
// against a dt0/16 reference, order from the power-law fit.
struct SelfConvergence {
    std::string solver; // nls | g2 | kg
    double eps = 0.0;   // kg only
    std::vector<double> dts;
    std::vector<double> errors;
    double observed_order = 0.0;
};

SelfConvergence self_convergence(const std::string& solver, const ExperimentSpec& spec,
                                 double eps);

// Projections onto the shared report schema (column roles per command are
// documented in the README).
CsvTable to_table(const LimitReport& report);
CsvTable to_table(const DecayReport& report);
CsvTable to_table(const GrowthReport& report);
CsvTable to_table(const SelfConvergence& report, double norm_s);

} // namespace kgnr
