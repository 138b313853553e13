#pragma once

#include <map>
#include <utility>
#include <vector>

#include "kgnr/field.hpp"
#include "kgnr/grid.hpp"
#include "kgnr/kg.hpp"
#include "kgnr/nls.hpp"

namespace kgnr {

// Expansion order of the oscillatory approximation. Only K = 0 and K = 2 are
// implemented; they are the orders with closed-form amplitude formulas given
// the modulation profiles g0 (and g2 for K = 2).
struct WKBOrder {
    int K = 0;
};

void validate(WKBOrder order);

// One harmonic amplitude of the first-order system vector (w, v, u), with
// w a 2-vector. Components are complex fields; the physical field sums
// conjugate pairs, so only the p > 0 amplitude is stored.
struct HarmonicTriple {
    Field wx, wy;
    Field v, u;
};

// Amplitudes U_{n,p} at a fixed time, keyed by (n, p) with n the epsilon
// order and p > 0 the odd harmonic index, together with their exact time
// derivatives (needed to evaluate d/dt of the approximation analytically).
class HarmonicTable {
public:
    double t() const { return t_; }
    double lambda() const { return lambda_; }
    int order_k() const { return k_; }
    const GridPtr& grid() const { return grid_; }

    bool has(int n, int p) const;
    const HarmonicTriple& entry(int n, int p) const;
    const HarmonicTriple& dt_entry(int n, int p) const;
    std::vector<std::pair<int, int>> keys() const;

private:
    friend HarmonicTable build_harmonics(const ProfileSet&, double, WKBOrder);

    double t_ = 0.0;
    double lambda_ = 0.0;
    int k_ = 0;
    GridPtr grid_;
    std::map<std::pair<int, int>, HarmonicTriple> entries_;
    std::map<std::pair<int, int>, HarmonicTriple> dt_entries_;
};

// Builds the amplitude table at time t from stored profiles. The profiles
// must have been solved with t as a sample time (no temporal interpolation);
// K = 2 additionally requires the corrector profile.
HarmonicTable build_harmonics(const ProfileSet& profiles, double t, WKBOrder order);

// theta = t / eps^2 reduced modulo 2 pi. Uses compensated two-term arithmetic
// for both the division and the reduction: at t ~ 1, eps = 0.05 the raw phase
// is ~400 and a naive fmod loses digits that would pollute rate fits.
// theta_offset is added to the raw phase before reduction (diagnostic hook
// for the periodicity check).
double reduce_theta(double t, double eps, double theta_offset = 0.0);

// u_a = sum_n eps^n sum_{p>0} 2 Re(e^{i p theta} u_{n,p}); real by
// construction. order must match the table.
Field evaluate_u_a(const HarmonicTable& table, double eps, WKBOrder order,
                   double theta_offset = 0.0);

// 2 Re(e^{i theta} g0(t)), the order-zero comparator.
Field leading_order(const ProfileSet& profiles, double t, double eps);

// First-order system vector (w, v, u) = (eps grad u, eps^2 du/dt, u).
struct SystemVector {
    Field wx, wy;
    Field v, u;
    double t = 0.0;
    double eps = 0.0;
};

SystemVector assemble_U_a(const HarmonicTable& table, double eps, WKBOrder order);

// View of a wave-solver state in system variables.
SystemVector to_system_vector(const KGState& state);

// H^{norm_s} size of dt U_a - (1/eps) A(dx) U_a + (1/eps^2) A0 U_a - F(U_a),
// evaluated with analytic time derivatives, spectral A(dx), pointwise A0,
// and a dealiased cube for F. Scales like eps^{K+1} as eps -> 0 at fixed t.
double system_residual(const HarmonicTable& table, double eps, double norm_s);
double system_residual(const ProfileSet& profiles, double t, double eps, WKBOrder order,
                       double norm_s);

} // namespace kgnr
