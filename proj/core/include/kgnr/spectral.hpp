#pragma once

#include <functional>

#include "kgnr/field.hpp"

namespace kgnr {

// Multiplies the spectrum by m(xi1, xi2) evaluated on each grid mode.
// Non-finite multiplier values raise NumericalError. When the input is
// real-kind and the sampled multiplier satisfies m(-xi) = conj(m(xi)) on the
// grid (self-paired modes real), the output stays real-kind.
Field apply_multiplier(const Field& f, const std::function<Complex(double, double)>& m);

// sqrt( sum_k (1 + |xi_k|^2)^s |c_k|^2 * L^2 ); the L^2 factor matches the
// continuum integral normalization, so Parseval reads
// h^2 sum |f_j|^2 = L^2 sum |c_k|^2.
double sobolev_norm(const Field& f, double s);

// Pointwise products computed exactly for band-limited inputs via factor-2
// zero padding: wrapped images of modes up to 3*(n/2) land outside the
// retained window [-n/2, n/2), so the projection is alias-free.
Field dealiased_product(const Field& a, const Field& b);
Field dealiased_cube(const Field& a, const Field& b, const Field& c);

// Spectral derivatives. The odd-order multipliers (gradients, divergence)
// zero the Nyquist row so real fields stay exactly real; the Laplacian keeps
// the full band.
Field grad_x(const Field& f);
Field grad_y(const Field& f);
Field laplacian(const Field& f);

// h^2 sum |f|^2, the torus integral of |f|^2.
double l2_mass(const Field& f);

// integral of |f|^4, computed on the factor-2 fine grid where the quadrature
// is exact for band-limited f (up to the negligible corner-mode alias).
double integral_abs4(const Field& f);

// Fraction of spectral mass carried by the top octave: modes with
// max(|k1|, |k2|) >= n/4. Zero field reports 0.
double spectral_tail_fraction(const Field& f);

// Zeroes the unpaired -n/2 spectral lines. On the symmetric remainder of the
// band, gradients, divergence and the Laplacian obey the exact multiplier
// identities (div grad = laplacian), which the unpaired line breaks.
Field drop_nyquist_lines(const Field& f);

// Top-octave (max(|k1|, |k2|) >= n/4) and total spectral mass, as squared DFT
// moduli. tail / total is spectral_tail_fraction.
struct SpectralMass {
    double tail = 0.0;
    double total = 0.0;
};
SpectralMass spectral_mass_split(const Field& f);

// Interpolates f onto the factor-2 refined grid (exact for band-limited f).
Field upsample2(const Field& f);

} // namespace kgnr
