#pragma once

#include <memory>
#include <vector>

namespace kgnr {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Uniform n x n sampling of the square torus [-L/2, L/2)^2.
//
// Sample points: x_j = -L/2 + j h with h = L/n. Wavenumbers follow FFT index
// order: index a in [0, n) carries the integer mode k = a for a < n/2 and
// k = a - n otherwise, i.e. the modes {-n/2, ..., n/2 - 1} per dimension, and
// xi_k = 2 pi k / L.
class TorusGrid {
public:
    TorusGrid(int n, double length); // prefer make_grid, which validates

    int n() const { return n_; }
    double length() const { return length_; }
    double spacing() const { return h_; }
    std::size_t size() const { return std::size_t(n_) * std::size_t(n_); }

    int mode(int a) const { return a < n_ / 2 ? a : a - n_; }
    double xi(int a) const { return xi_[a]; }
    double x(int j) const { return x_[j]; }
    const std::vector<double>& wavenumbers() const { return xi_; }

private:
    int n_;
    double length_;
    double h_;
    std::vector<double> xi_;
    std::vector<double> x_;
};

using GridPtr = std::shared_ptr<const TorusGrid>;

// Validates n (even, >= 8) and length (finite, > 0).
GridPtr make_grid(int n, double length);

} // namespace kgnr
