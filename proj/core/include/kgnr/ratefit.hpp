#pragma once

#include <array>
#include <vector>

namespace kgnr {

// Least-squares power law error ~ C * eps^slope, fitted on
// (log eps, log error). r_squared is always reported; a constant data set
// (zero variance) counts as a perfect fit of the constant line.
struct RateFit {
    double slope = 0.0;
    double intercept = 0.0; // log C
    double r_squared = 1.0;
    std::vector<std::array<double, 2>> points; // (log eps, log error)
};

// samples are raw (eps, error) pairs: >= 3 of them, abscissae distinct, all
// entries positive and finite so the logs exist. Slope convention:
// error proportional to eps^slope (decay toward small eps gives slope > 0).
RateFit fit_rate(const std::vector<std::array<double, 2>>& samples);

// log(e_a / e_b) / log(x_a / x_b) for degenerate two-point ladders; rows
// derived from it are labeled, never passed off as a regression.
double two_point_slope(const std::array<double, 2>& a, const std::array<double, 2>& b);

} // namespace kgnr
