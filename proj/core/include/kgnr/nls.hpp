#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kgnr/field.hpp"
#include "kgnr/grid.hpp"

namespace kgnr {

// Parameters for the modulation-profile solves. The limiting equation is the
// cubic Schrodinger equation 2i dg/dt - lap g + 3 lambda |g|^2 g = 0 and the
// second corrector solves the forced linear Schrodinger equation driven by g0.
struct NLSParams {
    double lambda = 1.0;
    GridPtr grid;
    double dt = 1e-3;
    double t_final = 1.0;
    bool linear_mode = false; // drops the cubic term; oracle tests only
};

// Throws ValidationError unless dt, t_final are positive with dt <= t_final
// and lambda != 0 (or linear_mode is set).
void validate(const NLSParams& params);

// (phi - i psi) / 2.
Field init_g0(const Field& phi, const Field& psi);

// One Strang step of the cubic Schrodinger flow: half nonlinear phase
// rotation, exact linear flow exp(i |xi|^2 dt / 2), half phase rotation.
Field nls_step(const Field& g, const NLSParams& params, double dt);

// dg/dt obtained from the equation itself: -(i/2) lap g + (3 i lambda / 2) |g|^2 g.
Field dt_g0(const Field& g, double lambda);
// Second and third time derivatives via the chain rule on dt_g0.
Field dtt_g0(const Field& g, double lambda);
Field dttt_g0(const Field& g, double lambda);

// Corrector datum: Re = -(lambda/64)(phi^3 - 3 phi psi^2),
// Im = -(1/4) lap psi + (21 lambda/64) phi^2 psi + (9 lambda/64) psi^3.
Field g2_initial(const Field& phi, const Field& psi, double lambda);

// 3 lambda (g0^2 conj(g2) + 2 |g0|^2 g2 + (lambda/8)|g0|^4 g0), dealiased; the
// quintic is staged as m = g0 conj(g0) followed by a cube of (m, m, g0).
Field f21(const Field& g0, const Field& g2, double lambda);

// One step of the corrector equation: half local update, exact linear flow,
// half local update. The local update integrates the coupling and source
// terms pointwise with one fourth-order explicit substep, coefficients frozen
// at g0_mid. include_source=false drops the g0-driven source; with a zero
// datum this keeps the iterate exactly zero.
Field g2_step(const Field& g2, const Field& g0_mid, const NLSParams& params, double dt,
              bool include_source = true);

// dg2/dt = (i/2)(dtt_g0 - lap g2 + f21).
Field dt_g2(const Field& g2, const Field& g0, double lambda);
// Second derivative via the chain rule on dt_g2.
Field dtt_g2(const Field& g2, const Field& g0, double lambda);

// Discrete mass h^2 sum |g|^2 and the conserved energy
// (1/4) int |grad g|^2 + (3 lambda / 8) int |g|^4.
double nls_mass(const Field& g);
double nls_energy(const Field& g, double lambda);

// Profile trajectory sampled at selected times. g2 is present only when the
// set was solved with the corrector. When the focusing monitor trips (H^1
// growth beyond 1e6x the initial value, spectral tail beyond 0.1, or
// non-finite values) the set is truncated: later times are absent and
// truncation_time records where marching stopped.
struct ProfileSet {
    std::vector<double> times;
    std::vector<Field> g0;
    std::vector<Field> g2;
    double lambda = 0.0;
    GridPtr grid;
    bool has_g2 = false;
    bool truncated = false;
    double truncation_time = 0.0;

    bool has_time(double t) const;
    const Field& g0_at(double t) const; // exact stored time; never interpolates
    const Field& g2_at(double t) const;
};

// Solves for g0 (and g2 when with_g2) from data (phi, psi), storing profiles
// at the requested times. Times must be non-decreasing, non-negative and are
// augmented with t = 0. An empty list marches to params.t_final storing every
// ceil(steps/256)-th step plus endpoints. Landing on a time shortens the step;
// nothing is interpolated.
ProfileSet solve_profiles(const Field& phi, const Field& psi, const NLSParams& params,
                          bool with_g2, std::vector<double> sample_times = {});

// Marches g0 alone from an already-built datum, invoking observe at t = 0 and
// after every step; stores nothing. Throws NumericalError on blow-up.
void march_g0(const Field& g0_init, const NLSParams& params,
              const std::function<void(double, const Field&)>& observe);

// CSV manifest of a trajectory: time,mass,energy,h1_norm,linf_norm.
std::string profile_manifest(const ProfileSet& profiles);

} // namespace kgnr
