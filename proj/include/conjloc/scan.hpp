#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "conjloc/locus.hpp"

namespace conjloc {

// Base-point curves lying on a mirror plane.
//   equator:  standard chart (pi/2, t), t = longitude
//   meridian: the y = 0 section, d = (sin t, 0, cos t); t is the polar angle from +z
//             toward +x, so t = theta for phi = 0. Uses the rotated chart (never polar there).
enum class PathKind { equator, meridian };
enum class ScanDirection { forward, backward };

const char* to_string(PathKind k) noexcept;
const char* to_string(ScanDirection d) noexcept;

ChartPoint path_point(PathKind kind, double t) noexcept;

// Direction angle at path_point(kind, t) of the geodesic running along the path.
double path_direction(const SurfaceModel& surface, PathKind kind, double t, ScanDirection dir);

struct PathSample {
    double t = 0.0;
    ChartPoint base;
    double theta = 0.0;  // spherical angles of the base direction
    double phi = 0.0;
    ScanDirection direction = ScanDirection::forward;
    double psi = 0.0;
    std::optional<double> R;
    std::optional<double> xi3_at_R;
};

struct PathScanOptions {
    double t_begin = 0.0;
    double t_end = 6.283185307179586;
    std::size_t n_samples = 96;
    // Endpoint excluded when the path is closed (full turn).
    bool periodic = true;
    double zero_tol = 1e-7;
    // Below this everywhere, xi3(R) is reported as identically zero.
    double degenerate_xi3 = 1e-7;
    IntegratorOptions integrator{};
    unsigned threads = 1;
};

struct PathScanResult {
    PathKind kind = PathKind::equator;
    ScanDirection direction = ScanDirection::forward;
    std::vector<PathSample> samples;
    std::vector<double> zeros;
    bool degenerate = false;
    bool partial = false;
};

PathScanResult path_scan(const SurfaceModel& surface, PathKind kind, ScanDirection dir,
                         const PathScanOptions& opts = {});

struct RegionMapOptions {
    double theta_min = 1.0707963267948966;
    double theta_max = 2.0707963267948966;
    double phi_min = 0.0;
    double phi_max = 6.283185307179586;
    std::size_t n_theta = 24;
    std::size_t n_phi = 96;
    LocusOptions locus{};
    unsigned threads = 1;
};

struct RegionCell {
    double theta = 0.0;
    double phi = 0.0;
    int cusp_count = -1;  // -1: unknown (partial locus)
    bool boundary = false;
};

struct RegionMap {
    std::size_t n_theta = 0;
    std::size_t n_phi = 0;
    bool phi_periodic = false;
    std::vector<RegionCell> cells;  // row-major: theta outer, phi inner

    const RegionCell& at(std::size_t i, std::size_t j) const { return cells[i * n_phi + j]; }
    RegionCell& at(std::size_t i, std::size_t j) { return cells[i * n_phi + j]; }
};

RegionMap region_map(const SurfaceModel& surface, const RegionMapOptions& opts = {});

// Cusp count of the locus at p in counting mode; -1 when the locus is partial.
int cusp_count_at(const SurfaceModel& surface, const ChartPoint& p, const LocusOptions& opts);

enum class BifurcationKind { none, count_change, degenerate_point };
const char* to_string(BifurcationKind k) noexcept;

struct BifurcationResult {
    BifurcationKind kind = BifurcationKind::none;
    ChartPoint lo, hi;  // final bracket; lo keeps the count of the first endpoint
    int count_lo = -1;
    int count_hi = -1;
    std::vector<double> widths;  // bracket width (chart distance) per iteration
    ChartPoint point;            // midpoint of the final bracket
    // Classifier output for the most degenerate cusp or tangency at the final bracket.
    std::optional<CuspRecord> candidate;
    double diameter = 0.0;  // locus diameter at `point` (degenerate_point case)
};

struct BifurcationOptions {
    // Stop once the bracket is this fraction of the initial separation.
    double relative_width = 1e-5;
    LocusOptions locus{};
    // Degenerate-point special case: diameter below this fraction of the endpoint value.
    double collapse_ratio = 1e-3;
};

// a and b must share a chart; points in between are interpolated linearly in it.
BifurcationResult bifurcation_locate(const SurfaceModel& surface, const ChartPoint& a,
                                     const ChartPoint& b, const BifurcationOptions& opts = {});

}  // namespace conjloc
