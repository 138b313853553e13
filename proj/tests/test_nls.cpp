#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "kgnr/errors.hpp"
#include "kgnr/field.hpp"
#include "kgnr/grid.hpp"
#include "kgnr/nls.hpp"
#include "kgnr/spectral.hpp"

using namespace kgnr;

namespace {

Field gaussian(GridPtr grid, double amp, double width) {
    const int n = grid->n();
    std::vector<double> s(grid->size());
    for (int j1 = 0; j1 < n; ++j1)
        for (int j2 = 0; j2 < n; ++j2) {
            double x = grid->x(j1), y = grid->x(j2);
            s[std::size_t(j1) * n + j2] = amp * std::exp(-(x * x + y * y) / (width * width));
        }
    return Field::from_real(grid, s);
}

Field constant_complex(GridPtr grid, Complex c) {
    return Field(grid, Field::Kind::Complex, std::vector<Complex>(grid->size(), c));
}

double rel_diff_field(const Field& a, const Field& b) {
    return max_abs_diff(a, b) / std::max(max_abs(b), 1e-300);
}

NLSParams base_params(GridPtr grid, double lambda = 1.0) {
    NLSParams p;
    p.lambda = lambda;
    p.grid = grid;
    p.dt = 1e-3;
    p.t_final = 1.0;
    return p;
}

// evolve by repeated stepping, exact landing on t_final
Field evolve(Field g, const NLSParams& params, double t_final, double dt) {
    double t = 0.0;
    while (t < t_final * (1.0 - 1e-12)) {
        double h = std::min(dt, t_final - t);
        g = nls_step(g, params, h);
        t = (t_final - t <= dt * (1.0 + 1e-9)) ? t_final : t + h;
    }
    return g;
}

} // namespace

TEST_CASE("init_g0 pins (phi - i psi) / 2") {
    GridPtr g = make_grid(16, 4.0);
    Field zero = Field::zeros(g, Field::Kind::Real);
    Field one = Field::from_real(g, std::vector<double>(g->size(), 1.0));

    Field a = init_g0(zero, zero);
    CHECK(max_abs(a) == 0.0);
    Field b = init_g0(one, zero);
    for (const Complex& v : b.samples()) CHECK(v == Complex(0.5, 0.0));
    Field c = init_g0(zero, one);
    for (const Complex& v : c.samples()) CHECK(v == Complex(0.0, -0.5));
}

TEST_CASE("linear-mode eigenmode advances with exact phase") {
    GridPtr g = make_grid(32, 2.0 * kPi);
    const int n = g->n();
    std::vector<Complex> s(g->size());
    const double k1 = 3.0, k2 = -2.0;
    for (int j1 = 0; j1 < n; ++j1)
        for (int j2 = 0; j2 < n; ++j2)
            s[std::size_t(j1) * n + j2] = std::exp(Complex(0.0, k1 * g->x(j1) + k2 * g->x(j2)));
    Field f(g, Field::Kind::Complex, std::move(s));

    NLSParams p = base_params(g, 0.0);
    p.linear_mode = true;
    const double dt = 1e-3;
    Field out = f;
    for (int step = 0; step < 1000; ++step) out = nls_step(out, p, dt);

    const double t = 1000 * dt;
    Field expect = scaled(f, std::polar(1.0, (k1 * k1 + k2 * k2) * t / 2.0));
    CHECK(max_abs_diff(out, expect) < 1e-10);
}

TEST_CASE("spatially constant datum rotates at the exact cubic rate") {
    GridPtr g = make_grid(8, 1.0);
    const Complex c0(0.4, -0.3);
    NLSParams p = base_params(g, 2.0);
    Field f = constant_complex(g, c0);
    const double dt = 1e-2;
    for (int step = 0; step < 500; ++step) f = nls_step(f, p, dt);
    const double t = 500 * dt;
    Complex expect = c0 * std::polar(1.0, 1.5 * p.lambda * std::norm(c0) * t);
    for (const Complex& v : f.samples()) CHECK(std::abs(v - expect) < 1e-11);
}

TEST_CASE("nls_step self-convergence is second order") {
    GridPtr g = make_grid(64, 8.0 * kPi);
    Field phi = gaussian(g, 1.0, 1.0);
    Field psi = gaussian(g, 0.5, 1.4);
    Field g0 = init_g0(phi, psi);
    NLSParams p = base_params(g);
    const double T = 0.25, h = 2e-3;

    Field ref = evolve(g0, p, T, h / 16.0);
    std::vector<double> errs;
    for (double dt : {4.0 * h, 2.0 * h, h})
        errs.push_back(max_abs_diff(evolve(g0, p, T, dt), ref));
    for (int i = 0; i + 1 < int(errs.size()); ++i) {
        double order = std::log2(errs[i] / errs[i + 1]);
        CHECK(order > 1.8);
        CHECK(order < 2.2);
    }
}

TEST_CASE("mass is conserved and energy drifts at second order") {
    // L = 6 pi resolves the cubed Gaussian fully; larger boxes at n = 64 leave
    // an aliasing floor ~1e-7 that masks the O(dt^2) drift.
    GridPtr g = make_grid(64, 6.0 * kPi);
    Field phi = gaussian(g, 1.0, 1.0);
    Field psi = Field::zeros(g, Field::Kind::Real);
    Field g0 = init_g0(phi, psi);
    NLSParams p = base_params(g);

    double mass0 = nls_mass(g0);
    double energy0 = nls_energy(g0, p.lambda);

    auto run_drift = [&](double dt) {
        Field f = g0;
        double max_mass = 0.0, max_energy = 0.0;
        double t = 0.0;
        int step = 0;
        while (t < 1.0 - 1e-12) {
            f = nls_step(f, p, dt);
            t += dt;
            ++step;
            max_mass = std::max(max_mass, std::abs(nls_mass(f) - mass0) / mass0);
            if (step % 10 == 0)
                max_energy = std::max(
                    max_energy, std::abs(nls_energy(f, p.lambda) - energy0) / std::abs(energy0));
        }
        return std::pair<double, double>(max_mass, max_energy);
    };

    auto [mass_drift, energy_drift] = run_drift(1e-3);
    CHECK(mass_drift <= 1e-10);
    CHECK(energy_drift < 1e-4);

    auto [mass_drift2, energy_drift2] = run_drift(5e-4);
    CHECK(mass_drift2 <= 1e-10);
    // second-order drift shrinks ~4x when dt halves
    CHECK(energy_drift / energy_drift2 > 2.5);
    CHECK(energy_drift / energy_drift2 < 6.0);
}

TEST_CASE("even data stays even along the flow") {
    GridPtr g = make_grid(64, 8.0 * kPi);
    Field phi = gaussian(g, 1.0, 1.2);
    Field psi = Field::zeros(g, Field::Kind::Real);
    Field f = init_g0(phi, psi);
    NLSParams p = base_params(g);
    for (int step = 0; step < 200; ++step) f = nls_step(f, p, 1e-3);

    const int n = g->n();
    double scale = max_abs(f), defect = 0.0;
    for (int j1 = 0; j1 < n; ++j1)
        for (int j2 = 0; j2 < n; ++j2) {
            Complex a = f.at(j1, j2);
            Complex b = f.at((n - j1) % n, (n - j2) % n);
            defect = std::max(defect, std::abs(a - b));
        }
    CHECK(defect <= 1e-10 * scale);
}

TEST_CASE("dt_g0 and friends reduce to closed forms on constants") {
    GridPtr g = make_grid(8, 1.0);
    const Complex c(0.7, 0.2);
    const double lambda = 1.3;
    Field f = constant_complex(g, c);

    Field d1 = dt_g0(f, lambda);
    Complex expect1 = Complex(0.0, 1.5 * lambda) * std::norm(c) * c;
    for (const Complex& v : d1.samples()) CHECK(std::abs(v - expect1) < 1e-13);

    // c(t) = c e^{i w t}, w = (3 lambda / 2)|c|^2: second derivative -w^2 c
    Field d2 = dtt_g0(f, lambda);
    double w = 1.5 * lambda * std::norm(c);
    Complex expect2 = -w * w * c;
    for (const Complex& v : d2.samples()) CHECK(std::abs(v - expect2) < 1e-12);

    Field d3 = dttt_g0(f, lambda);
    Complex expect3 = Complex(0.0, -1.0) * w * w * w * c;
    for (const Complex& v : d3.samples()) CHECK(std::abs(v - expect3) < 1e-12);

    Field z = Field::zeros(g, Field::Kind::Complex);
    CHECK(max_abs(dt_g0(z, lambda)) == 0.0);
    CHECK(max_abs(dtt_g0(z, lambda)) == 0.0);
}

TEST_CASE("time-derivative chains match finite differences of the solved flow") {
    GridPtr g = make_grid(64, 6.0 * kPi);
    Field phi = gaussian(g, 1.0, 1.0);
    Field psi = gaussian(g, 0.4, 1.3);
    NLSParams p = base_params(g);
    p.dt = 2.5e-4;

    const double t0 = 0.1;
    const double h = 0.02, h2 = 0.01;
    ProfileSet traj = solve_profiles(phi, psi, p, true,
                                     {t0 - h, t0 - h2, t0, t0 + h2, t0 + h});
    REQUIRE_FALSE(traj.truncated);

    const Field& gm = traj.g0_at(t0 - h);
    const Field& gm2 = traj.g0_at(t0 - h2);
    const Field& gc = traj.g0_at(t0);
    const Field& gp2 = traj.g0_at(t0 + h2);
    const Field& gp = traj.g0_at(t0 + h);

    SUBCASE("first derivative, centered, O(h^2)") {
        Field an = dt_g0(gc, p.lambda);
        double scale = max_abs(an);
        double e1 = max_abs_diff(scaled(sub(gp, gm), 1.0 / (2.0 * h)), an);
        double e2 = max_abs_diff(scaled(sub(gp2, gm2), 1.0 / (2.0 * h2)), an);
        CHECK(e2 < 2e-3 * scale);
        double ratio = e1 / e2;
        CHECK(ratio > 3.2);
        CHECK(ratio < 4.8);
    }

    SUBCASE("second derivative, centered, O(h^2)") {
        Field an = dtt_g0(gc, p.lambda);
        double scale = max_abs(an);
        auto second = [&](const Field& a, const Field& b, const Field& c, double step) {
            return scaled(add(sub(a, scaled(b, 2.0)), c), 1.0 / (step * step));
        };
        double e1 = max_abs_diff(second(gp, gc, gm, h), an);
        double e2 = max_abs_diff(second(gp2, gc, gm2, h2), an);
        CHECK(e2 < 5e-3 * scale);
        CHECK(e1 / e2 > 3.2);
        CHECK(e1 / e2 < 4.8);
    }

    SUBCASE("third derivative, centered five-point") {
        Field an = dttt_g0(gc, p.lambda);
        double scale = max_abs(an);
        // [g(+2k) - 2 g(+k) + 2 g(-k) - g(-2k)] / (2 k^3) with k = h2, 2k = h
        Field fd = scaled(add(sub(gp, scaled(gp2, 2.0)), sub(scaled(gm2, 2.0), gm)),
                          1.0 / (2.0 * h2 * h2 * h2));
        CHECK(max_abs_diff(fd, an) < 2e-2 * scale);
    }

    SUBCASE("corrector derivative matches its centered difference") {
        const Field& q_m2 = traj.g2_at(t0 - h2);
        const Field& q_c = traj.g2_at(t0);
        const Field& q_p2 = traj.g2_at(t0 + h2);
        const Field& q_m = traj.g2_at(t0 - h);
        const Field& q_p = traj.g2_at(t0 + h);

        Field an = dt_g2(q_c, gc, p.lambda);
        double scale = max_abs(an);
        double e1 = max_abs_diff(scaled(sub(q_p, q_m), 1.0 / (2.0 * h)), an);
        double e2 = max_abs_diff(scaled(sub(q_p2, q_m2), 1.0 / (2.0 * h2)), an);
        CHECK(e2 < 2e-2 * scale);
        CHECK(e1 / e2 > 3.2);
        CHECK(e1 / e2 < 4.8);

        Field an2 = dtt_g2(q_c, gc, p.lambda);
        double scale2 = max_abs(an2);
        Field fd2 = scaled(add(sub(q_p2, scaled(q_c, 2.0)), q_m2), 1.0 / (h2 * h2));
        CHECK(max_abs_diff(fd2, an2) < 2e-2 * scale2);
    }
}

TEST_CASE("g2_initial closed forms and independent reconstruction") {
    GridPtr g = make_grid(32, 2.0 * kPi);
    const double lambda = 1.7;

    SUBCASE("constant data") {
        Field one = Field::from_real(g, std::vector<double>(g->size(), 1.0));
        Field zero = Field::zeros(g, Field::Kind::Real);
        Field q = g2_initial(one, zero, lambda);
        for (const Complex& v : q.samples()) CHECK(std::abs(v - Complex(-lambda / 64.0, 0.0)) < 1e-13);
        CHECK(max_abs(g2_initial(zero, zero, lambda)) == 0.0);
    }

    SUBCASE("cosine data pins the Laplacian sign") {
        const int n = g->n();
        std::vector<double> s(g->size());
        for (int j1 = 0; j1 < n; ++j1)
            for (int j2 = 0; j2 < n; ++j2) s[std::size_t(j1) * n + j2] = std::cos(g->x(j1));
        Field psi = Field::from_real(g, s);
        Field phi = Field::zeros(g, Field::Kind::Real);
        Field q = g2_initial(phi, psi, lambda);
        double err = 0.0;
        for (int j1 = 0; j1 < n; ++j1)
            for (int j2 = 0; j2 < n; ++j2) {
                double c = std::cos(g->x(j1));
                Complex expect(0.0, 0.25 * c + (9.0 * lambda / 64.0) * c * c * c);
                err = std::max(err, std::abs(q.at(j1, j2) - expect));
            }
        CHECK(err < 1e-12);
    }

    SUBCASE("complex-arithmetic reconstruction on smooth data") {
        // n = 128 leaves no Nyquist content, so the two cube stagings agree
        // to roundoff instead of to the Nyquist-residue scale.
        GridPtr gg = make_grid(128, 8.0 * kPi);
        Field phi = gaussian(gg, 1.0, 1.0);
        Field psi = gaussian(gg, 0.6, 1.5);
        Field q = g2_initial(phi, psi, lambda);

        // Re g2(0) = -(lambda/8) Re(g0^3), Im g2(0) = Re(dt g0) - (3 lambda/8) Im(g0^3)
        Field g0 = init_g0(phi, psi);
        Field cube = dealiased_cube(g0, g0, g0);
        Field re = scaled(real_part(cube), -lambda / 8.0);
        Field im = sub(real_part(dt_g0(g0, lambda)),
                       scaled(imag_part(cube), 3.0 * lambda / 8.0));
        Field expect = complex_from(re, im);
        CHECK(rel_diff_field(q, expect) < 1e-12);
    }
}

TEST_CASE("f21 closed forms") {
    GridPtr g = make_grid(8, 1.0);
    const double lambda = 1.0;
    Field one = constant_complex(g, Complex(1.0, 0.0));
    Field zero = Field::zeros(g, Field::Kind::Complex);

    Field full = f21(one, one, lambda);
    for (const Complex& v : full.samples()) CHECK(std::abs(v - Complex(75.0 / 8.0, 0.0)) < 1e-12);

    Field no_g2 = f21(one, zero, lambda);
    for (const Complex& v : no_g2.samples()) CHECK(std::abs(v - Complex(3.0 / 8.0, 0.0)) < 1e-13);

    CHECK(max_abs(f21(zero, zero, lambda)) == 0.0);
}

TEST_CASE("g2_step: machine zeros, free flow, self-convergence") {
    GridPtr g = make_grid(32, 8.0 * kPi);
    NLSParams p = base_params(g);

    SUBCASE("zero source and zero datum stay exactly zero") {
        Field zero = Field::zeros(g, Field::Kind::Complex);
        Field g0 = init_g0(gaussian(g, 1.0, 1.0), Field::zeros(g, Field::Kind::Real));
        Field q = zero;
        for (int step = 0; step < 50; ++step) q = g2_step(q, g0, p, 1e-3, false);
        for (const Complex& v : q.samples()) {
            CHECK(v.real() == 0.0);
            CHECK(v.imag() == 0.0);
        }
    }

    SUBCASE("g0 = 0 reduces to the free flow") {
        Field zero = Field::zeros(g, Field::Kind::Complex);
        Field q0 = init_g0(gaussian(g, 0.5, 1.0), Field::zeros(g, Field::Kind::Real));
        const double dt = 1e-3;
        Field via_g2 = g2_step(q0, zero, p, dt);
        // free Schrodinger of q0 = linear part of an nls step with the phase off
        NLSParams lp = p;
        lp.lambda = 0.0;
        lp.linear_mode = true;
        Field via_nls = nls_step(q0, lp, dt);
        CHECK(max_abs_diff(via_g2, via_nls) <= 1e-14 * std::max(1.0, max_abs(via_nls)));
    }

    SUBCASE("co-evolved corrector converges at second order") {
        GridPtr gg = make_grid(32, 8.0 * kPi);
        Field phi = gaussian(gg, 1.0, 1.0);
        Field psi = gaussian(gg, 0.3, 1.2);
        NLSParams pp = base_params(gg);
        const double T = 0.2, h = 4e-3;

        auto solve_g2 = [&](double dt) {
            pp.dt = dt;
            ProfileSet s = solve_profiles(phi, psi, pp, true, {T});
            REQUIRE_FALSE(s.truncated);
            return s.g2_at(T);
        };
        Field ref = solve_g2(h / 16.0);
        std::vector<double> errs;
        for (double dt : {4.0 * h, 2.0 * h, h}) errs.push_back(max_abs_diff(solve_g2(dt), ref));
        for (int i = 0; i + 1 < int(errs.size()); ++i) {
            double order = std::log2(errs[i] / errs[i + 1]);
            CHECK(order > 1.8);
            CHECK(order < 2.2);
        }
    }
}

TEST_CASE("profile storage refuses interpolation and keeps exact times") {
    GridPtr g = make_grid(32, 8.0 * kPi);
    Field phi = gaussian(g, 1.0, 1.0);
    Field psi = Field::zeros(g, Field::Kind::Real);
    NLSParams p = base_params(g);
    p.dt = 1e-3;

    ProfileSet s = solve_profiles(phi, psi, p, false, {0.25, 0.5});
    CHECK(s.times.size() == 3); // 0 inserted
    CHECK(s.times[0] == 0.0);
    CHECK(s.times[1] == 0.25);
    CHECK(s.times[2] == 0.5);
    CHECK(s.has_time(0.25));
    CHECK_FALSE(s.has_time(0.3));
    CHECK_NOTHROW(s.g0_at(0.5));
    CHECK_THROWS_AS(s.g0_at(0.3), ValidationError);
    CHECK_THROWS_AS(s.g2_at(0.25), ValidationError); // solved without corrector

    // landing must not interpolate: value equals an independent direct evolve
    Field direct = evolve(init_g0(phi, psi), p, 0.25, p.dt);
    CHECK(max_abs_diff(s.g0_at(0.25), direct) <= 1e-13);
}

TEST_CASE("focusing monitor truncates a collapsing run without NaNs") {
    GridPtr g = make_grid(64, 8.0 * kPi);
    Field phi = gaussian(g, 4.0, 1.0);
    Field psi = Field::zeros(g, Field::Kind::Real);
    NLSParams p = base_params(g, -1.0);
    p.dt = 1e-3;
    p.t_final = 1.0;

    ProfileSet s = solve_profiles(phi, psi, p, false, {0.25, 0.5, 0.75, 1.0});
    CHECK(s.truncated);
    CHECK(s.truncation_time < 1.0);
    CHECK(s.times.back() <= s.truncation_time + 1e-12);
    for (const Field& f : s.g0) CHECK(all_finite(f));
}

TEST_CASE("march_g0 visits every step time exactly once") {
    GridPtr g = make_grid(16, 8.0 * kPi);
    Field g0 = init_g0(gaussian(g, 0.5, 1.5), Field::zeros(g, Field::Kind::Real));
    NLSParams p = base_params(g);
    p.dt = 0.01;
    p.t_final = 0.05;

    std::vector<double> seen;
    march_g0(g0, p, [&](double t, const Field&) { seen.push_back(t); });
    REQUIRE(seen.size() == 6);
    CHECK(seen.front() == 0.0);
    CHECK(seen.back() == 0.05);
    for (std::size_t i = 1; i < seen.size(); ++i) CHECK(seen[i] > seen[i - 1]);
}

TEST_CASE("manifest lists the stored samples with conserved mass") {
    GridPtr g = make_grid(32, 8.0 * kPi);
    Field phi = gaussian(g, 1.0, 1.0);
    Field psi = Field::zeros(g, Field::Kind::Real);
    NLSParams p = base_params(g);
    ProfileSet s = solve_profiles(phi, psi, p, false, {0.1, 0.2});
    std::string csv = profile_manifest(s);
    CHECK(csv.rfind("time,mass,energy,h1_norm,linf_norm\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4); // header + 3 rows
}

TEST_CASE("parameter validation") {
    GridPtr g = make_grid(16, 4.0);
    NLSParams p = base_params(g);
    p.dt = -1.0;
    CHECK_THROWS_AS(validate(p), ValidationError);
    p = base_params(g);
    p.dt = 2.0;
    p.t_final = 1.0;
    CHECK_THROWS_AS(validate(p), ValidationError);
    p = base_params(g);
    p.lambda = 0.0;
    CHECK_THROWS_AS(validate(p), ValidationError);
    p.linear_mode = true;
    CHECK_NOTHROW(validate(p));
}
