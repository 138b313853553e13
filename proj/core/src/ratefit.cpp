#include "kgnr/ratefit.hpp"

#include <cmath>

#include "kgnr/errors.hpp"

namespace kgnr {

namespace {

void check_sample(double x, double y) {
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
        throw ValidationError("rate fit needs positive finite samples (logs must exist)");
    }
}

} // namespace

RateFit fit_rate(const std::vector<std::array<double, 2>>& samples) {
    if (samples.size() < 3) {
        throw ValidationError("rate fit needs at least 3 samples");
    }
    RateFit fit;
    fit.points.reserve(samples.size());
    for (const auto& s : samples) {
        check_sample(s[0], s[1]);
        for (const auto& p : fit.points) {
            if (p[0] == std::log(s[0])) {
                throw ValidationError("rate fit needs distinct abscissae");
            }
        }
        fit.points.push_back({std::log(s[0]), std::log(s[1])});
    }

    const double inv_n = 1.0 / double(fit.points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : fit.points) {
        mx += p[0];
        my += p[1];
    }
    mx *= inv_n;
    my *= inv_n;

    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : fit.points) {
        const double dx = p[0] - mx, dy = p[1] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;

    double ss_res = 0.0;
    for (const auto& p : fit.points) {
        const double r = p[1] - (fit.intercept + fit.slope * p[0]);
        ss_res += r * r;
    }
    // zero variance means the constant line already fits perfectly
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

double two_point_slope(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    check_sample(a[0], a[1]);
    check_sample(b[0], b[1]);
    if (a[0] == b[0]) {
        throw ValidationError("two-point slope needs distinct abscissae");
    }
    return std::log(a[1] / b[1]) / std::log(a[0] / b[0]);
}

} // namespace kgnr
