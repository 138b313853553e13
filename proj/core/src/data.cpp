#include "kgnr/data.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "kgnr/errors.hpp"
#include "kgnr/textio.hpp"

namespace kgnr {

Field gaussian_data(double amp, double width, std::array<double, 2> center, const GridPtr& grid) {
    if (!(width > 0.0) || !std::isfinite(width) || !std::isfinite(amp) ||
        !std::isfinite(center[0]) || !std::isfinite(center[1])) {
        throw ValidationError("gaussian datum needs finite amp/center and width > 0");
    }
    const int n = grid->n();
    std::vector<double> samples(grid->size());
    for (int j1 = 0; j1 < n; ++j1) {
        const double dx = grid->x(j1) - center[0];
        for (int j2 = 0; j2 < n; ++j2) {
            const double dy = grid->x(j2) - center[1];
            samples[std::size_t(j1) * n + j2] = amp * std::exp(-(dx * dx + dy * dy) / (width * width));
        }
    }

    // seam check: the torus identifies x = -L/2 with x = +L/2, so the datum
    // must be negligible on those sample lines or the plane problem is not
    // being represented
    double peak = 0.0;
    for (double v : samples) peak = std::max(peak, std::abs(v));
    if (peak > 0.0) {
        double seam = 0.0;
        for (int j = 0; j < n; ++j) {
            seam = std::max(seam, std::abs(samples[std::size_t(0) * n + j]));
            seam = std::max(seam, std::abs(samples[std::size_t(j) * n + 0]));
        }
        if (seam >= 1e-12 * peak) {
            throw ValidationError(
                "gaussian datum does not vanish at the domain edge (|f| = " + format_double(seam) +
                " vs max " + format_double(peak) + "); enlarge the side length");
        }
    }
    return Field::from_real(grid, samples);
}

Field rough_data(double s_target, std::uint64_t seed, const GridPtr& grid) {
    if (!(s_target > 1.0) || !std::isfinite(s_target)) {
        throw ValidationError("rough datum needs s_target > 1");
    }
    const int n = grid->n();
    std::mt19937_64 rng(seed);
    // phases drawn explicitly from the raw stream so the bits do not depend
    // on a library distribution's implementation
    auto phase = [&rng]() { return 2.0 * kPi * (double(rng() >> 11) * 0x1.0p-53); };

    std::vector<Complex> spectrum(grid->size(), Complex(0.0, 0.0));
    auto at = [&](int k1, int k2) -> Complex& {
        int a1 = k1 < 0 ? k1 + n : k1;
        int a2 = k2 < 0 ? k2 + n : k2;
        return spectrum[std::size_t(a1) * n + a2];
    };

    // canonical half of the symmetric band in a fixed order; the mirror mode
    // takes the conjugate so the field is exactly real. The unpaired -n/2
    // lines stay zero. (0,0) is self-paired and must be real.
    at(0, 0) = Complex(1.0, 0.0);
    for (int k1 = -n / 2 + 1; k1 < n / 2; ++k1) {
        for (int k2 = -n / 2 + 1; k2 < n / 2; ++k2) {
            const bool canonical = k1 > 0 || (k1 == 0 && k2 > 0);
            if (!canonical) continue;
            const double mag = std::pow(1.0 + std::hypot(double(k1), double(k2)), -(s_target + 1.0));
            const Complex c = std::polar(mag, phase());
            at(k1, k2) = c;
            at(-k1, -k2) = std::conj(c);
        }
    }
    return Field::from_spectrum_unchecked(grid, Field::Kind::Real, std::move(spectrum));
}

} // namespace kgnr
