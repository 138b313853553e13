#include "kgnr/nls.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>

#include "kgnr/errors.hpp"
#include "kgnr/spectral.hpp"
#include "kgnr/textio.hpp"

namespace kgnr {

namespace {

constexpr double kMonitorH1Factor = 1e6;
constexpr double kMonitorTailBase = 0.1;
constexpr double kMonitorTailCap = 0.5;

// Exact flow of dg/dt = -(i/2) lap g over time dt: multiplier exp(i|xi|^2 dt/2),
// separable across the two axes.
Field linear_flow(const Field& g, double dt) {
    const TorusGrid& grid = *g.grid();
    const int n = grid.n();
    std::vector<Complex> axis(n);
    for (int a = 0; a < n; ++a) {
        double xi = grid.xi(a);
        axis[a] = std::polar(1.0, 0.5 * xi * xi * dt);
    }
    std::vector<Complex> spec = g.spectrum();
    for (int a1 = 0; a1 < n; ++a1) {
        Complex m1 = axis[a1];
        Complex* row = spec.data() + std::size_t(a1) * n;
        for (int a2 = 0; a2 < n; ++a2) row[a2] *= m1 * axis[a2];
    }
    return Field::from_spectrum_unchecked(g.grid(), Field::Kind::Complex, std::move(spec));
}

// Exact flow of dg/dt = (3 i lambda / 2) |g|^2 g over time dt (|g| invariant).
Field phase_rotation(const Field& g, double lambda, double dt) {
    if (lambda == 0.0) return g;
    std::vector<Complex> s = g.samples();
    const double c = 1.5 * lambda * dt;
    for (Complex& v : s) v *= std::polar(1.0, c * std::norm(v));
    return Field(g.grid(), Field::Kind::Complex, std::move(s));
}

Field quintic_g0(const Field& g0) {
    Field m = dealiased_product(g0, conj_field(g0));
    return dealiased_cube(m, m, g0); // |g0|^4 g0, staged
}

// d/dt of the staged quintic: 2 (dm) m g0 + m m dg0 with dm = d|g0|^2/dt.
Field dt_quintic_g0(const Field& g0, const Field& g0t) {
    Field cg0 = conj_field(g0);
    Field m = dealiased_product(g0, cg0);
    Field dm = add(dealiased_product(g0t, cg0), dealiased_product(g0, conj_field(g0t)));
    return add(scaled(dealiased_cube(dm, m, g0), 2.0), dealiased_cube(m, m, g0t));
}

struct MonitorState {
    double h1_initial = 0.0;
    double tail_limit = kMonitorTailBase;

    void arm(const Field& g0) {
        h1_initial = std::max(sobolev_norm(g0, 1.0), 1e-300);
        // Marginally resolved data can sit near the base threshold from the
        // start; scale the trip point off the initial tail, capped hard.
        tail_limit = std::min(kMonitorTailCap,
                              std::max(kMonitorTailBase, 3.0 * spectral_tail_fraction(g0)));
    }
    bool ok(const Field& g) const {
        if (!all_finite(g)) return false;
        if (sobolev_norm(g, 1.0) > kMonitorH1Factor * h1_initial) return false;
        if (spectral_tail_fraction(g) > tail_limit) return false;
        return true;
    }
};

} // namespace

void validate(const NLSParams& params) {
    if (!params.grid) throw ValidationError("profile solve requires a grid");
    if (!(params.dt > 0.0) || !std::isfinite(params.dt))
        throw ValidationError("profile solve requires dt > 0");
    if (!(params.t_final > 0.0) || !std::isfinite(params.t_final))
        throw ValidationError("profile solve requires t_final > 0");
    if (params.dt > params.t_final)
        throw ValidationError("profile solve requires dt <= t_final");
    if (params.lambda == 0.0 && !params.linear_mode)
        throw ValidationError("lambda must be nonzero unless linear mode is set");
}

Field init_g0(const Field& phi, const Field& psi) {
    detail::check_same_grid(phi, psi, "init_g0");
    std::vector<Complex> s(phi.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        s[i] = 0.5 * Complex(phi.samples()[i].real(), -psi.samples()[i].real());
    return Field(phi.grid(), Field::Kind::Complex, std::move(s));
}

Field nls_step(const Field& g, const NLSParams& params, double dt) {
    if (!(dt > 0.0)) throw ValidationError("nls_step requires dt > 0");
    const double lam = params.linear_mode ? 0.0 : params.lambda;
    Field out = phase_rotation(g, lam, 0.5 * dt);
    out = linear_flow(out, dt);
    out = phase_rotation(out, lam, 0.5 * dt);
    if (!all_finite(out))
        throw NumericalError("cubic Schrodinger step produced non-finite values");
    return out;
}

Field dt_g0(const Field& g, double lambda) {
    Field out = scaled(laplacian(g), Complex(0.0, -0.5));
    if (lambda != 0.0)
        out = add_scaled(out, Complex(0.0, 1.5 * lambda),
                         dealiased_cube(g, g, conj_field(g)));
    return out;
}

Field dtt_g0(const Field& g, double lambda) {
    Field gt = dt_g0(g, lambda);
    Field out = scaled(laplacian(gt), Complex(0.0, -0.5));
    if (lambda != 0.0) {
        Field cg = conj_field(g);
        Field nl = add_scaled(scaled(dealiased_cube(g, cg, gt), 2.0), Complex(1.0, 0.0),
                              dealiased_cube(g, g, conj_field(gt)));
        out = add_scaled(out, Complex(0.0, 1.5 * lambda), nl);
    }
    return out;
}

Field dttt_g0(const Field& g, double lambda) {
    Field gt = dt_g0(g, lambda);
    Field gtt = dtt_g0(g, lambda);
    Field out = scaled(laplacian(gtt), Complex(0.0, -0.5));
    if (lambda != 0.0) {
        Field cg = conj_field(g);
        Field cgt = conj_field(gt);
        Field nl = scaled(dealiased_cube(gt, gt, cg), 2.0);
        nl = add_scaled(nl, Complex(4.0, 0.0), dealiased_cube(g, gt, cgt));
        nl = add_scaled(nl, Complex(2.0, 0.0), dealiased_cube(g, cg, gtt));
        nl = add_scaled(nl, Complex(1.0, 0.0), dealiased_cube(g, g, conj_field(gtt)));
        out = add_scaled(out, Complex(0.0, 1.5 * lambda), nl);
    }
    return out;
}

Field g2_initial(const Field& phi, const Field& psi, double lambda) {
    detail::check_same_grid(phi, psi, "g2_initial");
    Field re = scaled(sub(dealiased_cube(phi, phi, phi),
                          scaled(dealiased_cube(phi, psi, psi), 3.0)),
                      -lambda / 64.0);
    Field im = scaled(laplacian(psi), -0.25);
    im = add_scaled(im, 21.0 * lambda / 64.0, dealiased_cube(phi, phi, psi));
    im = add_scaled(im, 9.0 * lambda / 64.0, dealiased_cube(psi, psi, psi));
    return complex_from(re, im);
}

Field f21(const Field& g0, const Field& g2, double lambda) {
    detail::check_same_grid(g0, g2, "f21");
    Field out = dealiased_cube(g0, g0, conj_field(g2));
    out = add_scaled(out, Complex(2.0, 0.0), dealiased_cube(g0, conj_field(g0), g2));
    out = add_scaled(out, Complex(lambda / 8.0, 0.0), quintic_g0(g0));
    return scaled(out, 3.0 * lambda);
}

Field g2_step(const Field& g2, const Field& g0_mid, const NLSParams& params, double dt,
              bool include_source) {
    if (!(dt > 0.0)) throw ValidationError("g2_step requires dt > 0");
    detail::check_same_grid(g2, g0_mid, "g2_step");
    const double lam = params.linear_mode ? 0.0 : params.lambda;

    // Frozen pointwise coefficients a = 3 i lam |g0|^2, b = (3 i lam / 2) g0^2
    // and source S = (i/2)(dtt_g0 + (3 lam^2 / 8) |g0|^4 g0).
    const std::size_t size = g2.size();
    std::vector<Complex> a(size), b(size), src(size, Complex(0, 0));
    const Complex i32(0.0, 1.5 * lam);
    for (std::size_t i = 0; i < size; ++i) {
        Complex g = g0_mid.samples()[i];
        a[i] = 2.0 * i32 * std::norm(g);
        b[i] = i32 * g * g;
    }
    if (include_source) {
        Field s = dtt_g0(g0_mid, lam);
        if (lam != 0.0) s = add_scaled(s, Complex(3.0 * lam * lam / 8.0, 0.0), quintic_g0(g0_mid));
        s = scaled(s, Complex(0.0, 0.5));
        for (std::size_t i = 0; i < size; ++i) src[i] = s.samples()[i];
    }

    auto local_update = [&](std::vector<Complex>& y, double h) {
        // one classical fourth-order substep of y' = a y + b conj(y) + src
        for (std::size_t i = 0; i < size; ++i) {
            auto rhs = [&](Complex v) { return a[i] * v + b[i] * std::conj(v) + src[i]; };
            Complex k1 = rhs(y[i]);
            Complex k2 = rhs(y[i] + 0.5 * h * k1);
            Complex k3 = rhs(y[i] + 0.5 * h * k2);
            Complex k4 = rhs(y[i] + h * k3);
            y[i] += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    };

    std::vector<Complex> y = g2.samples();
    local_update(y, 0.5 * dt);
    Field mid = linear_flow(Field(g2.grid(), Field::Kind::Complex, std::move(y)), dt);
    y = mid.samples();
    local_update(y, 0.5 * dt);
    Field out(g2.grid(), Field::Kind::Complex, std::move(y));
    if (!all_finite(out)) throw NumericalError("corrector step produced non-finite values");
    return out;
}

Field dt_g2(const Field& g2, const Field& g0, double lambda) {
    Field out = sub(dtt_g0(g0, lambda), laplacian(g2));
    out = add(out, f21(g0, g2, lambda));
    return scaled(out, Complex(0.0, 0.5));
}

Field dtt_g2(const Field& g2, const Field& g0, double lambda) {
    Field g0t = dt_g0(g0, lambda);
    Field g2t = dt_g2(g2, g0, lambda);
    // d f21 / dt by the product rule on each dealiased factor
    Field cg0 = conj_field(g0);
    Field cg0t = conj_field(g0t);
    Field df = scaled(dealiased_cube(g0, g0t, conj_field(g2)), 2.0);
    df = add_scaled(df, Complex(1.0, 0.0), dealiased_cube(g0, g0, conj_field(g2t)));
    df = add_scaled(df, Complex(2.0, 0.0), dealiased_cube(g0t, cg0, g2));
    df = add_scaled(df, Complex(2.0, 0.0), dealiased_cube(g0, cg0t, g2));
    df = add_scaled(df, Complex(2.0, 0.0), dealiased_cube(g0, cg0, g2t));
    df = add_scaled(df, Complex(lambda / 8.0, 0.0), dt_quintic_g0(g0, g0t));
    df = scaled(df, 3.0 * lambda);

    Field out = sub(dttt_g0(g0, lambda), laplacian(g2t));
    out = add(out, df);
    return scaled(out, Complex(0.0, 0.5));
}

double nls_mass(const Field& g) { return l2_mass(g); }

double nls_energy(const Field& g, double lambda) {
    const TorusGrid& grid = *g.grid();
    const int n = grid.n();
    detail::KahanSum kinetic;
    const std::vector<Complex>& spec = g.spectrum();
    for (int a1 = 0; a1 < n; ++a1) {
        double x1 = grid.xi(a1);
        for (int a2 = 0; a2 < n; ++a2) {
            double x2 = grid.xi(a2);
            kinetic.add((x1 * x1 + x2 * x2) * std::norm(spec[std::size_t(a1) * n + a2]));
        }
    }
    double l2 = grid.length() * grid.length();
    return 0.25 * kinetic.value() * l2 + (3.0 * lambda / 8.0) * integral_abs4(g);
}

bool ProfileSet::has_time(double t) const {
    for (double s : times)
        if (std::abs(s - t) <= 1e-12 * std::max(1.0, std::abs(t))) return true;
    return false;
}

namespace {

std::size_t profile_index(const std::vector<double>& times, double t, const char* what) {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return i;
    throw ValidationError(std::string(what) + " not stored at t = " + format_double(t) +
                          "; re-solve with this sample time (no interpolation)");
}

} // namespace

const Field& ProfileSet::g0_at(double t) const {
    return g0[profile_index(times, t, "profile g0")];
}

const Field& ProfileSet::g2_at(double t) const {
    if (!has_g2) throw ValidationError("profile set was solved without the corrector");
    return g2[profile_index(times, t, "profile g2")];
}

ProfileSet solve_profiles(const Field& phi, const Field& psi, const NLSParams& params,
                          bool with_g2, std::vector<double> sample_times) {
    validate(params);
    detail::check_same_grid(phi, psi, "solve_profiles");
    if (phi.grid()->n() != params.grid->n() || phi.grid()->length() != params.grid->length())
        throw ValidationError("data grid does not match solver grid");

    double t_end = params.t_final;
    bool cadence = sample_times.empty();
    if (!cadence) {
        for (double t : sample_times)
            if (!(t >= 0.0) || !std::isfinite(t))
                throw ValidationError("sample times must be non-negative");
        std::sort(sample_times.begin(), sample_times.end());
        t_end = sample_times.back();
        if (sample_times.front() > 0.0) sample_times.insert(sample_times.begin(), 0.0);
        // drop duplicates
        std::vector<double> unique;
        for (double t : sample_times)
            if (unique.empty() || t > unique.back() + 1e-12 * std::max(1.0, t))
                unique.push_back(t);
        sample_times = std::move(unique);
    }

    ProfileSet set;
    set.lambda = params.linear_mode ? 0.0 : params.lambda;
    set.grid = params.grid;
    set.has_g2 = with_g2;

    Field g0 = init_g0(phi, psi);
    Field g2 = with_g2 ? g2_initial(phi, psi, set.lambda) : Field::zeros(params.grid, Field::Kind::Complex);

    MonitorState mon;
    mon.arm(g0);

    long step_count = cadence ? std::lround(std::ceil(t_end / params.dt)) : 0;
    long stride = cadence ? std::max(1L, (step_count + 255) / 256) : 1;

    auto store = [&](double t) {
        set.times.push_back(t);
        set.g0.push_back(g0);
        if (with_g2) set.g2.push_back(g2);
    };

    store(0.0);
    if (t_end <= 0.0) return set;

    std::size_t next_target = cadence ? 0 : 1; // index into sample_times
    double t = 0.0;
    long step = 0;
    while (t < t_end * (1.0 - 1e-15)) {
        double h = params.dt;
        double landing = -1.0;
        if (!cadence) {
            double target = sample_times[next_target];
            if (t + h >= target * (1.0 - 1e-12) || target - t <= h * (1.0 + 1e-9)) {
                h = target - t;
                landing = target;
            }
        } else if (t + h >= t_end * (1.0 - 1e-15)) {
            h = t_end - t;
            landing = t_end;
        }
        if (h <= 0.0) { // target coincides with current time up to rounding
            if (!cadence) {
                store(sample_times[next_target]);
                ++next_target;
                if (next_target >= sample_times.size()) break;
                continue;
            }
            break;
        }

        try {
            if (with_g2) {
                Field g0_mid = nls_step(g0, params, 0.5 * h);
                g2 = g2_step(g2, g0_mid, params, h);
                g0 = nls_step(g0_mid, params, 0.5 * h);
            } else {
                g0 = nls_step(g0, params, h);
            }
        } catch (const NumericalError&) {
            set.truncated = true;
            set.truncation_time = t;
            return set;
        }
        t = landing >= 0.0 ? landing : t + h;
        ++step;

        if (!mon.ok(g0)) {
            set.truncated = true;
            set.truncation_time = t;
            return set;
        }

        if (landing >= 0.0 && !cadence) {
            store(landing);
            ++next_target;
            if (next_target >= sample_times.size()) break;
        } else if (cadence && (step % stride == 0 || landing >= 0.0)) {
            store(t);
        }
    }
    if (cadence && (set.times.empty() || set.times.back() != t_end) && t >= t_end * (1.0 - 1e-15))
        store(t_end);
    return set;
}

void march_g0(const Field& g0_init, const NLSParams& params,
              const std::function<void(double, const Field&)>& observe) {
    validate(params);
    Field g0 = g0_init;
    observe(0.0, g0);
    double t = 0.0;
    while (t < params.t_final * (1.0 - 1e-15)) {
        double h = std::min(params.dt, params.t_final - t);
        try {
            g0 = nls_step(g0, params, h);
        } catch (const NumericalError&) {
            throw NumericalError("cubic Schrodinger flow blew up at t = " + format_double(t));
        }
        t = (params.t_final - t <= params.dt * (1.0 + 1e-9)) ? params.t_final : t + h;
        observe(t, g0);
    }
}

std::string profile_manifest(const ProfileSet& profiles) {
    std::string out = "time,mass,energy,h1_norm,linf_norm\n";
    for (std::size_t i = 0; i < profiles.times.size(); ++i) {
        const Field& g = profiles.g0[i];
        out += format_double(profiles.times[i]);
        out += ',';
        out += format_double(nls_mass(g));
        out += ',';
        out += format_double(nls_energy(g, profiles.lambda));
        out += ',';
        out += format_double(sobolev_norm(g, 1.0));
        out += ',';
        out += format_double(max_abs(g));
        out += '\n';
    }
    return out;
}

} // namespace kgnr
