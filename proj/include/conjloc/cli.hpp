#pragma once

#include <cstddef>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "conjloc/locus.hpp"
#include "conjloc/scan.hpp"
#include "conjloc/surfaces.hpp"

namespace conjloc::cli {

enum class Mode { locus, contours, path_scan, region_map, beta };

const char* to_string(Mode m) noexcept;
Mode mode_from_string(const std::string& name);

// Raw flat key=value pairs, in the order they were last set.
using KeyValues = std::map<std::string, std::string>;

// '#' starts a comment; blank lines are ignored. Throws ConfigError on malformed lines.
KeyValues parse_config_text(const std::string& text);
KeyValues load_config_file(const std::string& path);
void apply_override(KeyValues& kv, const std::string& assignment);

const std::vector<std::string>& known_keys();

struct RunConfig {
    Mode mode = Mode::locus;

    std::string family = "sphere";
    double a = 1.05, b = 1.0, c = 0.95;
    int n = 3;
    double epsilon = 0.1;

    double theta = 1.2;  // base point, spherical angles of the parameter direction
    double phi = 0.4;

    std::size_t n_psi = 256;
    double atol = 1e-10;
    double rtol = 1e-10;
    double s_max = 6.283185307179586;
    unsigned threads = 1;
    std::string output_dir = ".";
    bool svg = true;

    PathKind path = PathKind::equator;
    std::string direction = "both";  // forward | backward | both
    double t_begin = 0.0;
    double t_end = 6.283185307179586;
    std::size_t n_samples = 96;

    double theta_min = 1.0707963267948966;
    double theta_max = 2.0707963267948966;
    double phi_min = 0.0;
    double phi_max = 6.283185307179586;
    std::size_t n_theta = 24;
    std::size_t n_phi = 96;

    RhoBranch rho_branch = RhoBranch::nearest_conjugate;

    SurfaceModel surface() const;
    ChartPoint base_point() const;
    IntegratorOptions integrator() const;
};

// Validates every value; throws ConfigError naming the offending key.
RunConfig resolve(Mode mode, const KeyValues& kv);

enum ExitCode : int { kSuccess = 0, kNumericalFailure = 1, kPartial = 2, kConfigError = 64 };

// Runs one experiment and writes its artifacts into cfg.output_dir.
int run(const RunConfig& cfg, std::ostream& log);

// CSV number rendering: 17 significant digits.
std::string fmt17(double v);

// Minimal deterministic SVG writer.
class SvgPlot {
public:
    SvgPlot(double width, double height, double xmin, double xmax, double ymin, double ymax,
            bool equal_aspect);

    void polyline(const std::vector<std::array<double, 2>>& pts, const std::string& color,
                  double stroke = 1.5, bool closed = false);
    void marker(double x, double y, const std::string& color, double radius = 4.0,
                const std::string& css_class = "marker");
    void rect(double x0, double y0, double x1, double y1, const std::string& fill,
              const std::string& stroke = "none");
    void axes(const std::string& xlabel, const std::string& ylabel);
    void text(double px, double py, const std::string& s, double size = 12.0);
    std::string str() const;

    double px(double x) const;
    double py(double y) const;

private:
    double w_, h_, margin_ = 40.0;
    double xmin_, xmax_, ymin_, ymax_;
    std::vector<std::string> body_;
};

}  // namespace conjloc::cli
