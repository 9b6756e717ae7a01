#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "conjloc/cli.hpp"
#include "conjloc/errors.hpp"

namespace conjloc::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

void set_pair(KeyValues& kv, const std::string& line, const std::string& where) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
        throw ConfigError(where + ": unknown key '" + key + "'");
    kv[key] = value;
}

double as_double(const KeyValues& kv, const std::string& key, double fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(it->second, &used);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': not a number: '" + it->second + "'");
    }
    if (used != it->second.size() || !std::isfinite(v))
        throw ConfigError("key '" + key + "': not a finite number: '" + it->second + "'");
    return v;
}

long long as_integer(const KeyValues& kv, const std::string& key, long long fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(it->second, &used);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': not an integer: '" + it->second + "'");
    }
    if (used != it->second.size()) throw ConfigError("key '" + key + "': not an integer: '" + it->second + "'");
    return v;
}

std::size_t as_count(const KeyValues& kv, const std::string& key, std::size_t fallback, long long min) {
    const long long v = as_integer(kv, key, static_cast<long long>(fallback));
    if (v < min) throw ConfigError("key '" + key + "' must be >= " + std::to_string(min));
    return static_cast<std::size_t>(v);
}

std::string as_string(const KeyValues& kv, const std::string& key, const std::string& fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

bool as_bool(const KeyValues& kv, const std::string& key, bool fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError("key '" + key + "': expected true or false");
}

}  // namespace

const char* to_string(Mode m) noexcept {
    switch (m) {
        case Mode::locus: return "locus";
        case Mode::contours: return "contours";
        case Mode::path_scan: return "path-scan";
        case Mode::region_map: return "region-map";
        case Mode::beta: return "beta";
    }
    return "?";
}

Mode mode_from_string(const std::string& name) {
    for (Mode m : {Mode::locus, Mode::contours, Mode::path_scan, Mode::region_map, Mode::beta})
        if (name == to_string(m)) return m;
    throw ConfigError("unknown mode '" + name + "'");
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys{
        "family",    "a",         "b",       "c",         "n",        "epsilon",     "theta",
        "phi",       "n_psi",     "atol",    "rtol",      "s_max",    "threads",     "output_dir",
        "svg",       "path",      "direction", "t_begin", "t_end",    "n_samples",   "theta_min",
        "theta_max", "phi_min",   "phi_max", "n_theta",   "n_phi",    "rho_branch",
    };
    return keys;
}

KeyValues parse_config_text(const std::string& text) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        set_pair(kv, line, "line " + std::to_string(lineno));
    }
    return kv;
}

KeyValues load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void apply_override(KeyValues& kv, const std::string& assignment) {
    set_pair(kv, trim(assignment), "--set");
}

RunConfig resolve(Mode mode, const KeyValues& kv) {
    RunConfig c;
    c.mode = mode;
    c.family = as_string(kv, "family", c.family);
    c.a = as_double(kv, "a", c.a);
    c.b = as_double(kv, "b", c.b);
    c.c = as_double(kv, "c", c.c);
    c.n = static_cast<int>(as_integer(kv, "n", c.n));
    c.epsilon = as_double(kv, "epsilon", c.epsilon);
    c.theta = as_double(kv, "theta", c.theta);
    c.phi = as_double(kv, "phi", c.phi);
    c.n_psi = as_count(kv, "n_psi", c.n_psi, 64);
    c.atol = as_double(kv, "atol", c.atol);
    c.rtol = as_double(kv, "rtol", c.rtol);
    c.s_max = as_double(kv, "s_max", c.s_max);
    c.threads = static_cast<unsigned>(as_count(kv, "threads", c.threads, 1));
    c.output_dir = as_string(kv, "output_dir", c.output_dir);
    c.svg = as_bool(kv, "svg", c.svg);
    c.direction = as_string(kv, "direction", c.direction);
    c.t_begin = as_double(kv, "t_begin", c.t_begin);
    c.t_end = as_double(kv, "t_end", c.t_end);
    c.n_samples = as_count(kv, "n_samples", c.n_samples, 2);
    c.theta_min = as_double(kv, "theta_min", c.theta_min);
    c.theta_max = as_double(kv, "theta_max", c.theta_max);
    c.phi_min = as_double(kv, "phi_min", c.phi_min);
    c.phi_max = as_double(kv, "phi_max", c.phi_max);
    c.n_theta = as_count(kv, "n_theta", c.n_theta, 1);
    c.n_phi = as_count(kv, "n_phi", c.n_phi, 1);

    const std::string path = as_string(kv, "path", "equator");
    if (path == "equator")
        c.path = PathKind::equator;
    else if (path == "meridian")
        c.path = PathKind::meridian;
    else
        throw ConfigError("key 'path' must be equator or meridian");

    const std::string branch = as_string(kv, "rho_branch", "nearest_conjugate");
    if (branch == "first")
        c.rho_branch = RhoBranch::first;
    else if (branch == "nearest_conjugate")
        c.rho_branch = RhoBranch::nearest_conjugate;
    else
        throw ConfigError("key 'rho_branch' must be first or nearest_conjugate");

    if (c.direction != "forward" && c.direction != "backward" && c.direction != "both")
        throw ConfigError("key 'direction' must be forward, backward or both");
    if (!(c.atol > 0.0) || !(c.rtol > 0.0)) throw ConfigError("tolerances must be positive");
    if (!(c.s_max > 0.1)) throw ConfigError("key 's_max' must exceed 0.1");
    if (!(c.theta > 0.0 && c.theta < std::numbers::pi)) throw ConfigError("key 'theta' must lie in (0, pi)");
    if (!(c.t_end > c.t_begin)) throw ConfigError("t_end must exceed t_begin");
    if (!(c.theta_min > 0.0 && c.theta_max < std::numbers::pi && c.theta_min < c.theta_max))
        throw ConfigError("theta range must satisfy 0 < theta_min < theta_max < pi");
    if (!(c.phi_min < c.phi_max)) throw ConfigError("phi_min must be below phi_max");
    try {
        (void)c.surface();
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    }
    return c;
}

SurfaceModel RunConfig::surface() const {
    if (family == "sphere") return SurfaceModel::sphere();
    if (family == "ellipsoid") return SurfaceModel::ellipsoid(a, b, c);
    if (family == "sectoral_harmonic") return SurfaceModel::sectoral_harmonic(n, epsilon);
    throw ConfigError("key 'family' must be sphere, ellipsoid or sectoral_harmonic");
}

ChartPoint RunConfig::base_point() const {
    ChartPoint p = normalized({ChartId::standard, theta, phi});
    if (pole_clearance(p) < kChartSwitchThreshold) p = to_other_chart(p);
    return p;
}

IntegratorOptions RunConfig::integrator() const {
    IntegratorOptions o;
    o.atol = atol;
    o.rtol = rtol;
    o.s_max = s_max;
    return o;
}

}  // namespace conjloc::cli
