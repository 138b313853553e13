#include "kgnr/grid.hpp"

#include <cmath>
#include <string>

#include "kgnr/errors.hpp"

namespace kgnr {

TorusGrid::TorusGrid(int n, double length) : n_(n), length_(length), h_(length / n) {
    xi_.resize(n_);
    x_.resize(n_);
    for (int a = 0; a < n_; ++a) {
        xi_[a] = 2.0 * kPi * double(mode(a)) / length_;
        x_[a] = -0.5 * length_ + double(a) * h_;
    }
}

GridPtr make_grid(int n, double length) {
    if (n < 8 || n % 2 != 0)
        throw ValidationError("grid n must be even and >= 8, got " + std::to_string(n));
    if (!std::isfinite(length) || length <= 0.0)
        throw ValidationError("grid side length must be finite and positive");
    return std::make_shared<const TorusGrid>(n, length);
}

} // namespace kgnr
