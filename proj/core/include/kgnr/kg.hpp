#pragma once

#include <string>
#include <vector>

#include "kgnr/field.hpp"
#include "kgnr/grid.hpp"

namespace kgnr {

// Reference solver parameters for the oscillatory wave equation
// eps^2 u_tt - lap u + u / eps^2 + lambda u^3 = 0. The exact Fourier-space
// propagator absorbs the eps^-2 stiffness, so dt is limited by splitting
// error only; the default constraint dt <= dt_safety * eps^2 keeps that
// error in the second-order regime.
struct KGParams {
    double eps = 0.1;
    double lambda = 1.0;
    GridPtr grid;
    double dt = 0.0; // 0 selects dt_safety * eps^2
    double t_final = 1.0;
    double dt_safety = 0.125;
    bool dt_override = false; // lifts the dt <= dt_safety * eps^2 check
};

double default_dt(const KGParams& params);
void validate(const KGParams& params);

struct KGState {
    Field u;
    Field ut;
    double t = 0.0;
    double eps = 0.0;
};

// u = phi, du/dt = psi / eps^2 at t = 0.
KGState kg_init(const Field& phi, const Field& psi, double eps);

// Exact per-mode flow of the linear equation over dt (negative dt runs the
// rotation backwards): with w = eps^-2 sqrt(1 + eps^2 |xi|^2),
// u <- cos(w dt) u + sin(w dt)/w ut, ut <- -w sin(w dt) u + cos(w dt) ut.
KGState kg_linear_flow(const KGState& state, double dt);

// Exact flow of the nonlinear part: ut -= dt lambda (dealiased u^3) / eps^2,
// u unchanged. lambda = 0 returns the state unchanged.
KGState kg_nonlinear_kick(const KGState& state, double lambda, double dt);

// Strang step: half kick, linear flow, half kick. |dt| must respect the
// params constraint unless dt_override is set.
KGState kg_step(const KGState& state, const KGParams& params, double dt);

struct KGRunResult {
    std::vector<KGState> samples; // one per requested sample time
    double max_tail = 0.0;        // peak top-octave mass of u over peak total mass
    bool under_resolved = false;  // max_tail crossed the resolution guard
};

// Marches from state.t to the last sample time, landing exactly on each
// requested time by shortening steps. Throws NumericalError with a time
// stamp when the fields stop being finite.
KGRunResult kg_solve(const KGState& state, const KGParams& params,
                     std::vector<double> sample_times);

// (eps^2/2) int ut^2 + (1/2) int |grad u|^2 + 1/(2 eps^2) int u^2
// + (lambda/4) int u^4.
double kg_energy(const KGState& state, double lambda);

// CSV rows time,energy,h1_norm,linf_norm,spectral_tail.
std::string kg_manifest(const std::vector<KGState>& samples, double lambda);

} // namespace kgnr
