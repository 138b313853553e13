#include "kgnr/spectral.hpp"

#include <cmath>
#include <vector>

#include "kgnr/errors.hpp"

namespace kgnr {

namespace {

bool multiplier_is_hermitian(const TorusGrid& g, const std::vector<Complex>& m) {
    const int n = g.n();
    double max_mag = 0.0;
    for (const Complex& v : m) max_mag = std::max(max_mag, std::abs(v));
    const double tol = 1e-13 * (1.0 + max_mag);
    for (int a1 = 0; a1 < n; ++a1)
        for (int a2 = 0; a2 < n; ++a2) {
            int b1 = (n - a1) % n;
            int b2 = (n - a2) % n;
            Complex v = m[std::size_t(a1) * n + a2];
            Complex w = std::conj(m[std::size_t(b1) * n + b2]);
            if (std::abs(v - w) > tol) return false;
        }
    return true;
}

// Trusted path: the caller vouches for the result kind (real-kind results
// require an Hermitian-symmetric product, guaranteed for e.g. real input with
// an Hermitian multiplier).
Field apply_multiplier_values_as(const Field& f, const std::vector<Complex>& m,
                                 Field::Kind kind) {
    const std::vector<Complex>& spec = f.spectrum();
    std::vector<Complex> out(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) out[i] = spec[i] * m[i];
    return Field::from_spectrum_unchecked(f.grid(), kind, std::move(out));
}

Field apply_multiplier_values(const Field& f, const std::vector<Complex>& m) {
    Field::Kind kind = Field::Kind::Complex;
    if (f.is_real() && multiplier_is_hermitian(*f.grid(), m)) kind = Field::Kind::Real;
    return apply_multiplier_values_as(f, m, kind);
}

// Embeds an n-grid spectrum into the 2n grid (zero padding).
std::vector<Complex> embed2(const TorusGrid& g, const std::vector<Complex>& spec) {
    const int n = g.n();
    const int m = 2 * n;
    std::vector<Complex> out(std::size_t(m) * m, Complex(0.0, 0.0));
    for (int a1 = 0; a1 < n; ++a1) {
        int k1 = g.mode(a1);
        int f1 = k1 >= 0 ? k1 : k1 + m;
        for (int a2 = 0; a2 < n; ++a2) {
            int k2 = g.mode(a2);
            int f2 = k2 >= 0 ? k2 : k2 + m;
            out[std::size_t(f1) * m + f2] = spec[std::size_t(a1) * n + a2];
        }
    }
    return out;
}

// Retains the symmetric (-n/2, n/2) window of a 2n-grid spectrum. The unpaired
// -n/2 line is dropped: it has no conjugate partner on the coarse grid, so any
// product content landing there would make first derivatives inconsistent with
// the Laplacian (grad zeroes that line, the |xi|^2 multiplier does not).
std::vector<Complex> restrict2(const TorusGrid& coarse, const std::vector<Complex>& fine_spec) {
    const int n = coarse.n();
    const int m = 2 * n;
    std::vector<Complex> out(coarse.size());
    for (int a1 = 0; a1 < n; ++a1) {
        int k1 = coarse.mode(a1);
        int f1 = k1 >= 0 ? k1 : k1 + m;
        for (int a2 = 0; a2 < n; ++a2) {
            int k2 = coarse.mode(a2);
            if (k1 == -n / 2 || k2 == -n / 2) continue;
            int f2 = k2 >= 0 ? k2 : k2 + m;
            out[std::size_t(a1) * n + a2] = fine_spec[std::size_t(f1) * m + f2];
        }
    }
    return out;
}

} // namespace

Field apply_multiplier(const Field& f, const std::function<Complex(double, double)>& m) {
    const TorusGrid& g = *f.grid();
    const int n = g.n();
    std::vector<Complex> values(g.size());
    for (int a1 = 0; a1 < n; ++a1)
        for (int a2 = 0; a2 < n; ++a2) {
            Complex v = m(g.xi(a1), g.xi(a2));
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw NumericalError("multiplier evaluated to a non-finite value");
            values[std::size_t(a1) * n + a2] = v;
        }
    return apply_multiplier_values(f, values);
}

double sobolev_norm(const Field& f, double s) {
    const TorusGrid& g = *f.grid();
    const int n = g.n();
    const std::vector<Complex>& spec = f.spectrum();
    detail::KahanSum sum;
    for (int a1 = 0; a1 < n; ++a1) {
        const double xi1 = g.xi(a1);
        for (int a2 = 0; a2 < n; ++a2) {
            const double xi2 = g.xi(a2);
            const double r2 = 1.0 + xi1 * xi1 + xi2 * xi2;
            double w;
            if (s == 0.0)
                w = 1.0;
            else if (s == 1.0)
                w = r2;
            else
                w = std::pow(r2, s);
            sum.add(w * std::norm(spec[std::size_t(a1) * n + a2]));
        }
    }
    return std::sqrt(sum.value() * g.length() * g.length());
}

Field upsample2(const Field& f) {
    const TorusGrid& g = *f.grid();
    const int n = g.n();
    const int m = 2 * n;
    GridPtr fine = make_grid(m, g.length());
    std::vector<Complex> spec = embed2(g, f.spectrum());
    if (f.is_real()) {
        // A coarse Nyquist mode -n/2 is self-paired there but unpaired on the
        // fine grid. The real trigonometric interpolant splits it evenly
        // across the fine +-n/2 pair, which reproduces the coarse samples
        // exactly and keeps the interpolant real.
        auto split = [&](int f1, int f2) {
            Complex half = 0.5 * spec[std::size_t(f1) * m + f2];
            if (half == Complex(0.0, 0.0)) return;
            int p1 = f1 == m - n / 2 ? n / 2 : f1;
            int p2 = f2 == m - n / 2 ? n / 2 : f2;
            spec[std::size_t(f1) * m + f2] = half;
            spec[std::size_t(p1) * m + p2] += half;
        };
        const int neg = m - n / 2; // fine index of coarse mode -n/2
        for (int a = 0; a < n; ++a) {
            int k = g.mode(a);
            int fa = k >= 0 ? k : k + m;
            if (fa != neg) split(neg, fa);
            split(fa, neg);
        }
        return Field::from_spectrum_unchecked(fine, Field::Kind::Real, std::move(spec));
    }
    return Field::from_spectrum(fine, f.kind(), std::move(spec));
}

namespace {

Field dealiased_pointwise(const std::vector<const Field*>& factors) {
    const Field& first = *factors.front();
    const TorusGrid& g = *first.grid();
    GridPtr fine = make_grid(2 * g.n(), g.length());

    // Transform each distinct factor once.
    std::vector<const Field*> distinct;
    std::vector<Field> fine_fields;
    std::vector<int> slot(factors.size());
    for (std::size_t i = 0; i < factors.size(); ++i) {
        detail::check_same_grid(first, *factors[i], "dealiased product");
        int found = -1;
        for (std::size_t j = 0; j < distinct.size(); ++j)
            if (distinct[j] == factors[i]) { found = int(j); break; }
        if (found < 0) {
            distinct.push_back(factors[i]);
            // Fine-grid intermediates stay complex-kind: a coarse Nyquist mode
            // embeds to a single unpaired fine mode, so real factors may pick
            // up tiny imaginary sample parts there. The product theorem does
            // not need real samples and the final truncation is unaffected.
            fine_fields.push_back(Field::from_spectrum_unchecked(
                fine, Field::Kind::Complex, embed2(g, factors[i]->spectrum())));
            found = int(distinct.size()) - 1;
        }
        slot[i] = found;
    }

    std::vector<Complex> w(fine->size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        Complex prod = fine_fields[slot[0]].samples()[i];
        for (std::size_t f = 1; f < factors.size(); ++f)
            prod *= fine_fields[slot[f]].samples()[i];
        w[i] = prod;
    }

    bool real_out = true;
    for (const Field* f : factors) real_out = real_out && f->is_real();

    Field fine_prod(fine, Field::Kind::Complex, std::move(w));
    return Field::from_spectrum_unchecked(first.grid(),
                                          real_out ? Field::Kind::Real : Field::Kind::Complex,
                                          restrict2(g, fine_prod.spectrum()));
}

} // namespace

Field dealiased_product(const Field& a, const Field& b) {
    return dealiased_pointwise({&a, &b});
}

Field dealiased_cube(const Field& a, const Field& b, const Field& c) {
    return dealiased_pointwise({&a, &b, &c});
}

namespace {

Field derivative(const Field& f, int axis) {
    const TorusGrid& g = *f.grid();
    const int n = g.n();
    std::vector<Complex> m(g.size());
    for (int a1 = 0; a1 < n; ++a1)
        for (int a2 = 0; a2 < n; ++a2) {
            int a = axis == 0 ? a1 : a2;
            // Zero the Nyquist row: keeps the multiplier exactly
            // Hermitian-symmetric and real fields exactly real.
            double xi = (g.mode(a) == -n / 2) ? 0.0 : g.xi(a);
            m[std::size_t(a1) * n + a2] = Complex(0.0, xi);
        }
    return apply_multiplier_values_as(f, m, f.kind());
}

} // namespace

Field grad_x(const Field& f) { return derivative(f, 0); }

Field grad_y(const Field& f) { return derivative(f, 1); }

Field laplacian(const Field& f) {
    const TorusGrid& g = *f.grid();
    const int n = g.n();
    std::vector<Complex> m(g.size());
    for (int a1 = 0; a1 < n; ++a1) {
        const double xi1 = g.xi(a1);
        for (int a2 = 0; a2 < n; ++a2) {
            const double xi2 = g.xi(a2);
            m[std::size_t(a1) * n + a2] = Complex(-(xi1 * xi1 + xi2 * xi2), 0.0);
        }
    }
    return apply_multiplier_values_as(f, m, f.kind());
}

double l2_mass(const Field& f) {
    detail::KahanSum sum;
    for (const Complex& s : f.samples()) sum.add(std::norm(s));
    const double h = f.grid()->spacing();
    return sum.value() * h * h;
}

double integral_abs4(const Field& f) {
    Field fine = upsample2(f);
    detail::KahanSum sum;
    for (const Complex& s : fine.samples()) {
        double a2 = std::norm(s);
        sum.add(a2 * a2);
    }
    const double h = fine.grid()->spacing();
    return sum.value() * h * h;
}

SpectralMass spectral_mass_split(const Field& f) {
    const TorusGrid& g = *f.grid();
    const int n = g.n();
    const std::vector<Complex>& spec = f.spectrum();
    detail::KahanSum total;
    detail::KahanSum tail;
    for (int a1 = 0; a1 < n; ++a1) {
        int k1 = std::abs(g.mode(a1));
        for (int a2 = 0; a2 < n; ++a2) {
            int k2 = std::abs(g.mode(a2));
            double p = std::norm(spec[std::size_t(a1) * n + a2]);
            total.add(p);
            if (std::max(k1, k2) >= n / 4) tail.add(p);
        }
    }
    return SpectralMass{tail.value(), total.value()};
}

double spectral_tail_fraction(const Field& f) {
    const SpectralMass m = spectral_mass_split(f);
    if (m.total <= 0.0) return 0.0;
    return m.tail / m.total;
}

Field drop_nyquist_lines(const Field& f) {
    const TorusGrid& g = *f.grid();
    const int n = g.n();
    std::vector<Complex> spec = f.spectrum();
    for (int a1 = 0; a1 < n; ++a1) {
        for (int a2 = 0; a2 < n; ++a2) {
            if (g.mode(a1) == -n / 2 || g.mode(a2) == -n / 2) {
                spec[std::size_t(a1) * n + a2] = Complex(0.0, 0.0);
            }
        }
    }
    // Zeroing the self-paired line preserves Hermitian symmetry.
    return Field::from_spectrum_unchecked(f.grid(), f.kind(), std::move(spec));
}

} // namespace kgnr
