#include "kgnr/field.hpp"

#include <cmath>
#include <utility>

#include "kgnr/errors.hpp"
#include "kgnr/fft.hpp"

namespace kgnr {

namespace {

// c_k = (-1)^{k1+k2} F_k / n^2 maps the raw DFT onto coefficients of
// e^{i xi_k . x} for x starting at -L/2; the sign flip equals e^{-i pi (k1+k2)}
// and index parity matches mode parity for even n.
void samples_to_spectrum(int n, std::vector<Complex>& buf) {
    fft::forward(n, buf.data());
    const double scale = 1.0 / (double(n) * double(n));
    for (int a1 = 0; a1 < n; ++a1)
        for (int a2 = 0; a2 < n; ++a2) {
            double s = ((a1 + a2) & 1) ? -scale : scale;
            buf[std::size_t(a1) * n + a2] *= s;
        }
}

void spectrum_to_samples(int n, std::vector<Complex>& buf) {
    for (int a1 = 0; a1 < n; ++a1)
        for (int a2 = 0; a2 < n; ++a2)
            if ((a1 + a2) & 1) buf[std::size_t(a1) * n + a2] = -buf[std::size_t(a1) * n + a2];
    fft::backward(n, buf.data());
}

void check_hermitian(const TorusGrid& g, const std::vector<Complex>& spec) {
    const int n = g.n();
    double max_mag = 0.0;
    for (const Complex& c : spec) max_mag = std::max(max_mag, std::abs(c));
    const double tol = 1e-13 * std::max(max_mag, 1e-300);
    for (int a1 = 0; a1 < n; ++a1) {
        for (int a2 = 0; a2 < n; ++a2) {
            int b1 = (n - a1) % n;
            int b2 = (n - a2) % n;
            Complex c = spec[std::size_t(a1) * n + a2];
            Complex d = std::conj(spec[std::size_t(b1) * n + b2]);
            if (std::abs(c - d) > tol)
                throw NumericalError("real-kind field has a non-Hermitian spectrum");
        }
    }
}

} // namespace

Field::Field(GridPtr grid, Kind kind, std::vector<Complex> samples)
    : grid_(std::move(grid)), kind_(kind), samples_(std::move(samples)) {
    if (!grid_) throw ValidationError("field requires a grid");
    if (samples_.size() != grid_->size())
        throw ValidationError("field sample count does not match grid");
    if (kind_ == Kind::Real)
        for (Complex& s : samples_) s = Complex(s.real(), 0.0);
}

Field Field::zeros(GridPtr grid, Kind kind) {
    std::vector<Complex> samples(grid->size(), Complex(0.0, 0.0));
    return Field(std::move(grid), kind, std::move(samples));
}

Field Field::from_real(GridPtr grid, const std::vector<double>& samples) {
    std::vector<Complex> c(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) c[i] = Complex(samples[i], 0.0);
    return Field(std::move(grid), Kind::Real, std::move(c));
}

Field Field::from_spectrum(GridPtr grid, Kind kind, std::vector<Complex> spectrum) {
    if (!grid) throw ValidationError("field requires a grid");
    if (spectrum.size() != grid->size())
        throw ValidationError("spectrum size does not match grid");
    if (kind == Kind::Real) check_hermitian(*grid, spectrum);
    return from_spectrum_unchecked(std::move(grid), kind, std::move(spectrum));
}

Field Field::from_spectrum_unchecked(GridPtr grid, Kind kind, std::vector<Complex> spectrum) {
    std::vector<Complex> samples = spectrum;
    spectrum_to_samples(grid->n(), samples);
    Field f(std::move(grid), kind, std::move(samples));
    f.spectrum_ = std::move(spectrum);
    return f;
}

Field::Field(const Field& other) : grid_(other.grid_), kind_(other.kind_) {
    std::scoped_lock lock(other.cache_mutex_);
    samples_ = other.samples_;
    spectrum_ = other.spectrum_;
}

Field::Field(Field&& other) noexcept
    : grid_(std::move(other.grid_)), kind_(other.kind_),
      samples_(std::move(other.samples_)), spectrum_(std::move(other.spectrum_)) {}

Field& Field::operator=(const Field& other) {
    if (this == &other) return *this;
    Field tmp(other);
    *this = std::move(tmp);
    return *this;
}

Field& Field::operator=(Field&& other) noexcept {
    grid_ = std::move(other.grid_);
    kind_ = other.kind_;
    samples_ = std::move(other.samples_);
    spectrum_ = std::move(other.spectrum_);
    return *this;
}

const std::vector<Complex>& Field::spectrum() const {
    std::scoped_lock lock(cache_mutex_);
    if (!spectrum_) {
        std::vector<Complex> buf = samples_;
        samples_to_spectrum(grid_->n(), buf);
        spectrum_ = std::move(buf);
    }
    return *spectrum_;
}

namespace detail {
void check_same_grid(const Field& a, const Field& b, const char* op) {
    const TorusGrid& ga = *a.grid();
    const TorusGrid& gb = *b.grid();
    if (ga.n() != gb.n() || ga.length() != gb.length())
        throw ValidationError(std::string(op) + ": fields live on different grids");
}
} // namespace detail

namespace {
Field::Kind join(const Field& a, const Field& b) {
    return (a.is_real() && b.is_real()) ? Field::Kind::Real : Field::Kind::Complex;
}
} // namespace

Field add(const Field& a, const Field& b) {
    detail::check_same_grid(a, b, "add");
    std::vector<Complex> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.samples()[i] + b.samples()[i];
    return Field(a.grid(), join(a, b), std::move(out));
}

Field sub(const Field& a, const Field& b) {
    detail::check_same_grid(a, b, "sub");
    std::vector<Complex> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.samples()[i] - b.samples()[i];
    return Field(a.grid(), join(a, b), std::move(out));
}

Field scaled(const Field& a, double s) {
    std::vector<Complex> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.samples()[i] * s;
    return Field(a.grid(), a.kind(), std::move(out));
}

Field scaled(const Field& a, Complex s) {
    std::vector<Complex> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.samples()[i] * s;
    bool real_out = a.is_real() && s.imag() == 0.0;
    return Field(a.grid(), real_out ? Field::Kind::Real : Field::Kind::Complex, std::move(out));
}

Field add_scaled(const Field& a, Complex s, const Field& b) {
    detail::check_same_grid(a, b, "add_scaled");
    std::vector<Complex> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.samples()[i] + s * b.samples()[i];
    bool real_out = a.is_real() && b.is_real() && s.imag() == 0.0;
    return Field(a.grid(), real_out ? Field::Kind::Real : Field::Kind::Complex, std::move(out));
}

Field conj_field(const Field& a) {
    std::vector<Complex> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::conj(a.samples()[i]);
    Field f(a.grid(), a.kind(), std::move(out));
    // conj in physical space is conjugate reflection in mode space; reuse the
    // cache instead of paying another transform later.
    std::scoped_lock lock(a.cache_mutex_);
    if (a.spectrum_) {
        const int n = a.n();
        std::vector<Complex> spec(a.spectrum_->size());
        for (int a1 = 0; a1 < n; ++a1)
            for (int a2 = 0; a2 < n; ++a2) {
                int b1 = (n - a1) % n;
                int b2 = (n - a2) % n;
                spec[std::size_t(a1) * n + a2] =
                    std::conj((*a.spectrum_)[std::size_t(b1) * n + b2]);
            }
        f.spectrum_ = std::move(spec);
    }
    return f;
}

Field real_part(const Field& a) {
    std::vector<Complex> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = Complex(a.samples()[i].real(), 0.0);
    return Field(a.grid(), Field::Kind::Real, std::move(out));
}

Field imag_part(const Field& a) {
    std::vector<Complex> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = Complex(a.samples()[i].imag(), 0.0);
    return Field(a.grid(), Field::Kind::Real, std::move(out));
}

Field complex_from(const Field& re, const Field& im) {
    detail::check_same_grid(re, im, "complex_from");
    if (!re.is_real() || !im.is_real())
        throw ValidationError("complex_from expects real-kind parts");
    std::vector<Complex> out(re.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = Complex(re.samples()[i].real(), im.samples()[i].real());
    return Field(re.grid(), Field::Kind::Complex, std::move(out));
}

double max_abs(const Field& a) {
    double m = 0.0;
    for (const Complex& s : a.samples()) m = std::max(m, std::abs(s));
    return m;
}

bool all_finite(const Field& a) {
    for (const Complex& s : a.samples())
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) return false;
    return true;
}

double max_abs_diff(const Field& a, const Field& b) {
    detail::check_same_grid(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.samples()[i] - b.samples()[i]));
    return m;
}

} // namespace kgnr
