#pragma once

#include <complex>
#include <mutex>
#include <optional>
#include <vector>

#include "kgnr/grid.hpp"

namespace kgnr {

using Complex = std::complex<double>;

// A sampled field on a TorusGrid. Samples are authoritative and row-major:
// sample (j1, j2) lives at index j1*n + j2 and point (x(j1), x(j2)). The
// spectrum (coefficients c_k of e^{i xi_k . x}, same row-major layout in FFT
// index order) is computed on demand and cached; the cache fill is mutex
// guarded, so a const Field may be shared across threads.
//
// Real-kind fields carry exactly zero imaginary parts and Hermitian-symmetric
// spectra; constructing one from a spectrum checks the symmetry.
class Field {
public:
    enum class Kind { Real, Complex };

    Field(GridPtr grid, Kind kind, std::vector<Complex> samples);

    static Field zeros(GridPtr grid, Kind kind = Kind::Real);
    static Field from_real(GridPtr grid, const std::vector<double>& samples);
    static Field from_spectrum(GridPtr grid, Kind kind, std::vector<Complex> spectrum);
    // Skips the Hermitian-symmetry check; for internal construction where the
    // symmetry is guaranteed by the producing operation.
    static Field from_spectrum_unchecked(GridPtr grid, Kind kind, std::vector<Complex> spectrum);

    Field(const Field& other);
    Field(Field&& other) noexcept;
    Field& operator=(const Field& other);
    Field& operator=(Field&& other) noexcept;

    const GridPtr& grid() const { return grid_; }
    Kind kind() const { return kind_; }
    bool is_real() const { return kind_ == Kind::Real; }
    std::size_t size() const { return samples_.size(); }
    int n() const { return grid_->n(); }

    const std::vector<Complex>& samples() const { return samples_; }
    const std::vector<Complex>& spectrum() const;

    Complex at(int j1, int j2) const { return samples_[std::size_t(j1) * n() + j2]; }

    friend Field conj_field(const Field& a);

private:
    GridPtr grid_;
    Kind kind_;
    std::vector<Complex> samples_;
    mutable std::mutex cache_mutex_;
    mutable std::optional<std::vector<Complex>> spectrum_;
};

// Pointwise arithmetic. Results are real-kind only when every operand is.
Field add(const Field& a, const Field& b);
Field sub(const Field& a, const Field& b);
Field scaled(const Field& a, double s);
Field scaled(const Field& a, Complex s);
Field add_scaled(const Field& a, Complex s, const Field& b); // a + s*b
Field conj_field(const Field& a);
Field real_part(const Field& a);
Field imag_part(const Field& a);
// re + i*im from two real-kind fields.
Field complex_from(const Field& re, const Field& im);

double max_abs(const Field& a);
bool all_finite(const Field& a);

// Largest pointwise deviation max |a - b|.
double max_abs_diff(const Field& a, const Field& b);

namespace detail {
// Compensated accumulation for the long quadratic reductions.
class KahanSum {
public:
    void add(double x) {
        double y = x - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

void check_same_grid(const Field& a, const Field& b, const char* op);
} // namespace detail

} // namespace kgnr
