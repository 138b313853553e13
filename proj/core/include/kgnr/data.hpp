#pragma once

#include <array>
#include <cstdint>

#include "kgnr/field.hpp"
#include "kgnr/grid.hpp"

namespace kgnr {

// Samples amp * exp(-|x - center|^2 / width^2). The torus stands in for the
// plane, so the datum must be negligible at the seam: the magnitude on the
// x = -L/2 and y = -L/2 sample lines must stay below 1e-12 x the global max,
// otherwise ValidationError asks for a larger side length. amp = 0 is the
// zero field. Closed form: the H^0 norm is |amp| * width * sqrt(pi / 2).
Field gaussian_data(double amp, double width, std::array<double, 2> center, const GridPtr& grid);

// Real field with deterministic spectrum |c_k| = (1 + |k|)^{-(s_target + 1)}
// (|k| the Euclidean length of the integer mode vector) and Hermitian random
// phases drawn from seed, so the same seed reproduces the same bits. H^sigma
// norms stay bounded under grid refinement for sigma < s_target and grow for
// sigma > s_target. The unpaired -n/2 lines stay zero. Requires s_target > 1.
Field rough_data(double s_target, std::uint64_t seed, const GridPtr& grid);

} // namespace kgnr
