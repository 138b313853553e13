#include "kgnr/wkb.hpp"

#include <cmath>
#include <string>

#include "kgnr/errors.hpp"
#include "kgnr/spectral.hpp"

namespace kgnr {

namespace {

constexpr double kTwoPiHi = 6.283185307179586;
constexpr double kTwoPiLo = 2.4492935982947064e-16;

void check_eps(double eps) {
    if (!std::isfinite(eps) || eps <= 0.0 || eps >= 1.0) {
        throw ValidationError("eps must lie strictly between 0 and 1");
    }
}

} // namespace

void validate(WKBOrder order) {
    if (order.K != 0 && order.K != 2) {
        throw ValidationError("expansion order K must be 0 or 2");
    }
}

bool HarmonicTable::has(int n, int p) const { return entries_.count({n, p}) != 0; }

const HarmonicTriple& HarmonicTable::entry(int n, int p) const {
    auto it = entries_.find({n, p});
    if (it == entries_.end()) {
        throw ValidationError("harmonic (" + std::to_string(n) + ", " + std::to_string(p) +
                              ") is not part of this table");
    }
    return it->second;
}

const HarmonicTriple& HarmonicTable::dt_entry(int n, int p) const {
    auto it = dt_entries_.find({n, p});
    if (it == dt_entries_.end()) {
        throw ValidationError("harmonic (" + std::to_string(n) + ", " + std::to_string(p) +
                              ") is not part of this table");
    }
    return it->second;
}

std::vector<std::pair<int, int>> HarmonicTable::keys() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(entries_.size());
    for (const auto& kv : entries_) out.push_back(kv.first);
    return out;
}

HarmonicTable build_harmonics(const ProfileSet& profiles, double t, WKBOrder order) {
    validate(order);
    // The solver's pointwise substeps leave trace content on the unpaired
    // Nyquist lines, where div grad and the Laplacian disagree. Projecting it
    // out here keeps every derivative identity in the table exact.
    const Field g0 = drop_nyquist_lines(profiles.g0_at(t));
    const double lam = profiles.lambda;
    const GridPtr& grid = profiles.grid;

    HarmonicTable tab;
    tab.t_ = t;
    tab.lambda_ = lam;
    tab.k_ = order.K;
    tab.grid_ = grid;

    const Field zero = Field::zeros(grid, Field::Kind::Complex);
    auto emit = [&](int n, int p, HarmonicTriple e, HarmonicTriple de) {
        for (const Field* f : {&e.wx, &e.wy, &e.v, &e.u, &de.wx, &de.wy, &de.v, &de.u}) {
            if (!all_finite(*f)) {
                throw NumericalError("non-finite amplitude in harmonic (" + std::to_string(n) +
                                     ", " + std::to_string(p) + ")");
            }
        }
        tab.entries_.emplace(std::make_pair(n, p), std::move(e));
        tab.dt_entries_.emplace(std::make_pair(n, p), std::move(de));
    };

    const Field dg0 = dt_g0(g0, lam);
    const Field ddg0 = dtt_g0(g0, lam);
    const Field cube3 = dealiased_cube(g0, g0, g0);
    const Field cube3_dot = scaled(dealiased_cube(g0, g0, dg0), 3.0);
    const Complex iu(0.0, 1.0);

    emit(0, 1, {zero, zero, scaled(g0, iu), g0}, {zero, zero, scaled(dg0, iu), dg0});
    emit(1, 1, {grad_x(g0), grad_y(g0), zero, zero}, {grad_x(dg0), grad_y(dg0), zero, zero});
    emit(2, 3, {zero, zero, scaled(cube3, Complex(0.0, 0.375 * lam)), scaled(cube3, 0.125 * lam)},
         {zero, zero, scaled(cube3_dot, Complex(0.0, 0.375 * lam)),
          scaled(cube3_dot, 0.125 * lam)});

    if (order.K == 0) {
        emit(2, 1, {zero, zero, dg0, zero}, {zero, zero, ddg0, zero});
        return tab;
    }

    const Field g2 = drop_nyquist_lines(profiles.g2_at(t));
    const Field dg2 = dt_g2(g2, g0, lam);
    const Field ddg2 = dtt_g2(g2, g0, lam);

    emit(2, 1, {zero, zero, add_scaled(dg0, iu, g2), g2},
         {zero, zero, add_scaled(ddg0, iu, dg2), dg2});
    emit(3, 1, {grad_x(g2), grad_y(g2), zero, zero}, {grad_x(dg2), grad_y(dg2), zero, zero});
    emit(3, 3, {scaled(grad_x(cube3), 0.125 * lam), scaled(grad_y(cube3), 0.125 * lam), zero, zero},
         {scaled(grad_x(cube3_dot), 0.125 * lam), scaled(grad_y(cube3_dot), 0.125 * lam), zero,
          zero});
    emit(4, 1, {zero, zero, dg2, zero}, {zero, zero, ddg2, zero});

    // (4,3) mixes the third time derivative chain of g0^3 with the cubic
    // coefficient f_{2,3} = 3 lambda (g0^2 g2 + (lambda/4) |g0|^2 g0^3).
    const Field cube3_ddot = scaled(
        add(scaled(dealiased_cube(g0, dg0, dg0), 2.0), dealiased_cube(g0, g0, ddg0)), 3.0);
    const Field sq = dealiased_product(g0, g0);
    const Field sq_dot = scaled(dealiased_product(g0, dg0), 2.0);
    const Field g0c = conj_field(g0);
    const Field quint_mixed = dealiased_cube(sq, sq, g0c); // |g0|^2 g0^3
    const Field quint_mixed_dot =
        add(scaled(dealiased_cube(sq_dot, sq, g0c), 2.0), dealiased_cube(sq, sq, conj_field(dg0)));
    const Field f23 =
        scaled(add(dealiased_cube(g0, g0, g2), scaled(quint_mixed, 0.25 * lam)), 3.0 * lam);
    const Field f23_dot = scaled(
        add(add(scaled(dealiased_cube(dg0, g0, g2), 2.0), dealiased_cube(g0, g0, dg2)),
            scaled(quint_mixed_dot, 0.25 * lam)),
        3.0 * lam);
    const Field bb = sub(scaled(laplacian(cube3), 0.125 * lam), f23);
    const Field bb_dot = sub(scaled(laplacian(cube3_dot), 0.125 * lam), f23_dot);

    emit(4, 3,
         {zero, zero, add_scaled(scaled(cube3_dot, -0.15625 * lam), Complex(0.0, -0.375), bb),
          add_scaled(scaled(cube3_dot, Complex(0.0, 0.09375 * lam)), -0.125, bb)},
         {zero, zero, add_scaled(scaled(cube3_ddot, -0.15625 * lam), Complex(0.0, -0.375), bb_dot),
          add_scaled(scaled(cube3_ddot, Complex(0.0, 0.09375 * lam)), -0.125, bb_dot)});

    const Field quint = dealiased_cube(sq, sq, g0); // g0^5
    const Field quint_dot =
        add(scaled(dealiased_cube(sq_dot, sq, g0), 2.0), dealiased_cube(sq, sq, dg0));
    const double l2_64 = lam * lam / 64.0;
    emit(4, 5, {zero, zero, scaled(quint, Complex(0.0, 5.0 * l2_64)), scaled(quint, l2_64)},
         {zero, zero, scaled(quint_dot, Complex(0.0, 5.0 * l2_64)), scaled(quint_dot, l2_64)});

    return tab;
}

double reduce_theta(double t, double eps, double theta_offset) {
    check_eps(eps);
    if (!std::isfinite(t) || !std::isfinite(theta_offset)) {
        throw ValidationError("phase arguments must be finite");
    }
    const double e2 = eps * eps;
    const double q = t / e2;
    const double q_lo = std::fma(-q, e2, t) / e2; // residual of the division
    const double raw = q + theta_offset;
    const double k = std::nearbyint(raw / kTwoPiHi);
    double r = std::fma(-k, kTwoPiHi, raw);
    r -= k * kTwoPiLo;
    return r + q_lo;
}

namespace {

void check_table_order(const HarmonicTable& table, WKBOrder order) {
    validate(order);
    if (order.K != table.order_k()) {
        throw ValidationError("requested order does not match the harmonic table");
    }
}

// Sums eps^n e^{i p theta} over the stored (p > 0) amplitudes of one
// component; the physical field is twice the real part.
Field sum_component(const HarmonicTable& table, double eps, double theta,
                    const Field HarmonicTriple::*comp) {
    Field acc = Field::zeros(table.grid(), Field::Kind::Complex);
    for (const auto& [n, p] : table.keys()) {
        const Complex w = std::pow(eps, n) * std::polar(1.0, p * theta);
        acc = add_scaled(acc, w, table.entry(n, p).*comp);
    }
    return real_part(scaled(acc, 2.0));
}

} // namespace

Field evaluate_u_a(const HarmonicTable& table, double eps, WKBOrder order, double theta_offset) {
    check_table_order(table, order);
    check_eps(eps);
    const double theta = reduce_theta(table.t(), eps, theta_offset);
    return sum_component(table, eps, theta, &HarmonicTriple::u);
}

Field leading_order(const ProfileSet& profiles, double t, double eps) {
    check_eps(eps);
    const Field g0 = profiles.g0_at(t);
    const double theta = reduce_theta(t, eps);
    return real_part(scaled(g0, 2.0 * std::polar(1.0, theta)));
}

SystemVector assemble_U_a(const HarmonicTable& table, double eps, WKBOrder order) {
    check_table_order(table, order);
    check_eps(eps);
    const double theta = reduce_theta(table.t(), eps);
    return SystemVector{sum_component(table, eps, theta, &HarmonicTriple::wx),
                        sum_component(table, eps, theta, &HarmonicTriple::wy),
                        sum_component(table, eps, theta, &HarmonicTriple::v),
                        sum_component(table, eps, theta, &HarmonicTriple::u),
                        table.t(), eps};
}

SystemVector to_system_vector(const KGState& state) {
    return SystemVector{scaled(grad_x(state.u), state.eps), scaled(grad_y(state.u), state.eps),
                        scaled(state.ut, state.eps * state.eps), state.u, state.t, state.eps};
}

double system_residual(const HarmonicTable& table, double eps, double norm_s) {
    check_eps(eps);
    if (!std::isfinite(norm_s)) throw ValidationError("norm exponent must be finite");
    const GridPtr& grid = table.grid();
    const double theta = reduce_theta(table.t(), eps);
    const double inv_e = 1.0 / eps;
    const double inv_e2 = 1.0 / (eps * eps);

    Field rwx = Field::zeros(grid);
    Field rwy = Field::zeros(grid);
    Field rv = Field::zeros(grid);
    Field ru = Field::zeros(grid);

    for (int p : {1, 3, 5}) {
        Field wx = Field::zeros(grid, Field::Kind::Complex);
        Field wy = wx, v = wx, u = wx, dwx = wx, dwy = wx, dv = wx, du = wx;
        bool any = false;
        for (int n = 0; n <= table.order_k() + 2; ++n) {
            if (!table.has(n, p)) continue;
            any = true;
            const double en = std::pow(eps, n);
            const HarmonicTriple& e = table.entry(n, p);
            const HarmonicTriple& de = table.dt_entry(n, p);
            wx = add_scaled(wx, en, e.wx);
            wy = add_scaled(wy, en, e.wy);
            v = add_scaled(v, en, e.v);
            u = add_scaled(u, en, e.u);
            dwx = add_scaled(dwx, en, de.wx);
            dwy = add_scaled(dwy, en, de.wy);
            dv = add_scaled(dv, en, de.v);
            du = add_scaled(du, en, de.u);
        }
        if (!any) continue;

        // time derivative of e^{i p theta} X_p brings in (i p / eps^2) X_p
        const Complex ip(0.0, p * inv_e2);
        Field cwx = add_scaled(add_scaled(dwx, ip, wx), -inv_e, grad_x(v));
        Field cwy = add_scaled(add_scaled(dwy, ip, wy), -inv_e, grad_y(v));
        Field cv = add_scaled(add_scaled(add_scaled(dv, ip, v), -inv_e, add(grad_x(wx), grad_y(wy))),
                              inv_e2, u);
        Field cu = add_scaled(add_scaled(du, ip, u), -inv_e2, v);

        const Complex ph = 2.0 * std::polar(1.0, p * theta);
        rwx = add(rwx, real_part(scaled(cwx, ph)));
        rwy = add(rwy, real_part(scaled(cwy, ph)));
        rv = add(rv, real_part(scaled(cv, ph)));
        ru = add(ru, real_part(scaled(cu, ph)));
    }

    const Field ua = sum_component(table, eps, theta, &HarmonicTriple::u);
    rv = add(rv, scaled(dealiased_cube(ua, ua, ua), table.lambda()));

    double total = 0.0;
    for (const Field* row : {&rwx, &rwy, &rv, &ru}) {
        if (!all_finite(*row)) {
            throw NumericalError("system residual produced non-finite values");
        }
        const double nr = sobolev_norm(*row, norm_s);
        total += nr * nr;
    }
    return std::sqrt(total);
}

double system_residual(const ProfileSet& profiles, double t, double eps, WKBOrder order,
                       double norm_s) {
    return system_residual(build_harmonics(profiles, t, order), eps, norm_s);
}

} // namespace kgnr
