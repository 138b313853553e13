#include "kgnr/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "kgnr/errors.hpp"

namespace kgnr {

namespace {

std::string trim(const std::string& s) {
    const char* ws = " \t\r";
    auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw ValidationError("");
        return v;
    } catch (const std::exception&) {
        throw ValidationError("expected a number for " + what + ", got '" + text + "'");
    }
}

std::uint64_t parse_uint(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        unsigned long long v = std::stoull(text, &used);
        if (used != text.size()) throw ValidationError("");
        return v;
    } catch (const std::exception&) {
        throw ValidationError("expected a non-negative integer for " + what + ", got '" + text +
                              "'");
    }
}

int parse_int(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        int v = std::stoi(text, &used);
        if (used != text.size()) throw ValidationError("");
        return v;
    } catch (const std::exception&) {
        throw ValidationError("expected an integer for " + what + ", got '" + text + "'");
    }
}

// one value (applied to both slots) or a "phi,psi" pair
std::array<double, 2> parse_pair(const std::string& text, const std::string& what) {
    std::vector<double> vals = parse_double_list(text, what);
    if (vals.size() == 1) return {vals[0], vals[0]};
    if (vals.size() == 2) return {vals[0], vals[1]};
    throw ValidationError(what + " takes one value or a pair, got '" + text + "'");
}

} // namespace

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        out.push_back(parse_double(trim(item), what));
    }
    if (out.empty()) {
        throw ValidationError("expected a comma list of numbers for " + what);
    }
    return out;
}

void set_config_value(HarnessConfig& cfg, const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "data.kind") {
        cfg.data_kind = v;
    } else if (key == "data.amp") {
        cfg.data_amp = parse_pair(v, key);
    } else if (key == "data.width") {
        cfg.data_width = parse_pair(v, key);
    } else if (key == "data.center") {
        cfg.data_center = parse_pair(v, key);
    } else if (key == "data.seed") {
        cfg.data_seed = parse_uint(v, key);
    } else if (key == "data.s_target") {
        cfg.data_s_target = parse_double(v, key);
    } else if (key == "lambda") {
        cfg.lambda = parse_double(v, key);
    } else if (key == "eps") {
        cfg.eps = parse_double_list(v, key);
    } else if (key == "times") {
        cfg.times = parse_double_list(v, key);
    } else if (key == "order_k") {
        cfg.order_k = parse_int(v, key);
    } else if (key == "norm_s") {
        cfg.norm_s = parse_double(v, key);
    } else if (key == "grid.n") {
        cfg.grid_n = parse_int(v, key);
    } else if (key == "grid.l") {
        cfg.grid_l = parse_double(v, key);
    } else if (key == "dt.safety") {
        cfg.dt_safety = parse_double(v, key);
    } else if (key == "out.dir") {
        cfg.out_dir = v;
    } else {
        throw ValidationError("unknown config key '" + key + "'");
    }
}

HarnessConfig parse_config_text(const std::string& text) {
    HarnessConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(lineno) +
                                  " is not key=value: '" + t + "'");
        }
        set_config_value(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
}

HarnessConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) {
        throw ValidationError("cannot read config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

} // namespace kgnr
