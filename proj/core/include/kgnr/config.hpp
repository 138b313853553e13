#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kgnr/grid.hpp"

namespace kgnr {

// Harness configuration, one field per config key:
//   data.kind, data.amp, data.width, data.center, data.seed, data.s_target,
//   lambda, eps, times, order_k, norm_s, grid.n, grid.l, dt.safety, out.dir
// data.amp and data.width take one value shared by both data components or a
// "phi,psi" pair; data.center is the shared "x,y" center; eps and times are
// comma lists. Any other key is rejected.
struct HarnessConfig {
    std::string data_kind = "gaussian"; // gaussian | rough
    std::array<double, 2> data_amp = {1.0, 1.0};
    std::array<double, 2> data_width = {1.0, 1.0};
    std::array<double, 2> data_center = {0.0, 0.0};
    std::uint64_t data_seed = 1;
    double data_s_target = 6.0;
    double lambda = 1.0;
    std::vector<double> eps = {0.2, 0.1414, 0.1, 0.0707, 0.05};
    std::vector<double> times = {1.0};
    int order_k = 0;
    double norm_s = 1.0;
    int grid_n = 128;
    double grid_l = 16.0 * kPi;
    double dt_safety = 0.125;
    std::string out_dir = "out";
};

// Applies one key=value assignment. Unknown keys and malformed values throw
// ValidationError naming the key.
void set_config_value(HarnessConfig& cfg, const std::string& key, const std::string& value);

// key=value lines; blank lines and lines starting with '#' are skipped.
HarnessConfig parse_config_text(const std::string& text);
HarnessConfig load_config(const std::string& path);

// Shared comma-list parser ("0.2,0.1" -> {0.2, 0.1}); throws on empty or
// non-numeric entries.
std::vector<double> parse_double_list(const std::string& text, const std::string& what);

} // namespace kgnr
