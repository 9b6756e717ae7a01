#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "conjloc/ode.hpp"
#include "conjloc/surfaces.hpp"

namespace conjloc {

// Singularity class of R(psi) at a point: A_k means the first k derivatives vanish.
enum class AClass { A0, A1, A2, A3 };
enum class Orientation { toward_p, away_from_p, undetermined };

const char* to_string(AClass c) noexcept;
const char* to_string(Orientation o) noexcept;

// Leading orders (n, m) of the locus expansion along (T, N) for an A_k point: (k + 1, k + 2).
std::array<int, 2> local_type(AClass c) noexcept;

struct CuspRecord {
    double psi_star = 0.0;
    double R_star = 0.0;
    AClass a_class = AClass::A1;
    std::array<int, 2> local_type{2, 3};
    Orientation orientation = Orientation::undetermined;
    bool symmetric = false;
    double xi3_value = 0.0;     // xi3(R) at psi_star
    double xi3_relative = 0.0;  // |xi3| / max over the curve
    double d2R_fd = 0.0;        // five-point finite difference of R
    double d2R = 0.0;           // -(xi3 + 2 xi2' R') / xi1' at R
    double dR_fd = 0.0;         // centered finite difference, Prop-1 cross-check
    bool near_bifurcation = false;
    // Set for a tangency of the R and rho contours that did not produce a cusp pair.
    bool tangency = false;
    Vec3 xyz{};
};

struct LocusOptions {
    std::size_t n_psi = 256;
    IntegratorOptions integrator{};
    // Localize cusps and classify them; false only counts.
    bool refine = true;
    double psi_tol = 1e-10;
    // Adaptive subdivision of the psi grid stops at this interval width.
    double min_interval = 1e-9;
    double tol_class = 1e-5;
    double fd_step = 1e-3;
    // Curves whose max |xi2(R)| is below this are treated as a single point.
    double degenerate_xi2 = 1e-8;
    unsigned threads = 1;
};

struct LocusCurve {
    SurfacePoint base;
    ChartPoint antipode;
    std::vector<double> psi_grid;                         // sorted, in [0, 2 pi)
    std::vector<std::optional<ConjugateRecord>> records;  // parallel to psi_grid
    std::vector<CuspRecord> cusps;
    std::vector<CuspRecord> candidates;  // tangencies without a sign change
    std::vector<double> symmetric_psis;
    bool partial = false;
    bool degenerate = false;
    double diameter = 0.0;  // embedding diameter of the locus
    double xi2_scale = 0.0;
    double xi3_scale = 0.0;

    std::size_t cusp_count() const noexcept { return cusps.size(); }
};

// Conjugate record for one direction, with tangent-plane projection filled in.
ConjugateRecord locus_record(const SurfaceModel& surface, const ChartPoint& p, double psi,
                             const IntegratorOptions& opts);

LocusCurve sweep_R(const SurfaceModel& surface, const ChartPoint& p, const LocusOptions& opts = {});

// Adds psi samples where needed, locates every sign change of psi -> xi2(R(psi)).
std::vector<CuspRecord> detect_cusps(const SurfaceModel& surface, LocusCurve& curve,
                                     const LocusOptions& opts);

CuspRecord classify_cusp(const SurfaceModel& surface, const CuspRecord& cusp,
                         const LocusCurve& curve, const LocusOptions& opts);

// Orthonormal frame of the tangent plane at the antipode of `base`.
struct ProjectionFrame {
    Vec3 origin{};
    Vec3 e1{};
    Vec3 e2{};
    Vec2 project(const Vec3& x) const noexcept { return {dot(x - origin, e1), dot(x - origin, e2)}; }
};
ProjectionFrame antipodal_frame(const SurfaceModel& surface, const ChartPoint& base);
std::vector<Vec2> project_tangent_plane(const LocusCurve& curve, const ProjectionFrame& frame);

// --- xi2 = 0 contour and its image ---

struct RhoRecord {
    double psi = 0.0;
    double rho = 0.0;
    double xi1 = 0.0;        // at s = rho
    double dxi1 = 0.0;
    double dxi2 = 0.0;
    double xi3 = 0.0;
    SurfacePoint point;
    Vec2 polar_uv{};
    // rho'(psi) = -(xi3 + xi1 xi1'^2) / xi2'
    double drho() const noexcept { return -(xi3 + xi1 * dxi1 * dxi1) / dxi2; }
};

// Which zero of xi2 along each geodesic defines rho(psi).
enum class RhoBranch {
    first,             // first zero past the event skip
    nearest_conjugate  // zero closest to R(psi); continuous through the cusps of the locus
};

struct RhoOptions {
    std::size_t n_psi = 256;
    IntegratorOptions integrator{};
    RhoBranch branch = RhoBranch::first;
    // xi2 magnitudes below this along a whole geodesic count as identically zero.
    double undefined_xi2 = 1e-10;
    unsigned threads = 1;
};

struct RhoContour {
    RhoOptions options;
    std::vector<double> psi_grid;
    std::vector<std::optional<RhoRecord>> records;
    bool undefined = false;  // xi2 vanishes identically (e.g. the round sphere)
    bool partial = false;
};

RhoContour sweep_rho(const SurfaceModel& surface, const ChartPoint& p, const RhoOptions& opts = {});
std::optional<RhoRecord> rho_record(const SurfaceModel& surface, const ChartPoint& p, double psi,
                                    const RhoOptions& opts);

// Points where the R and rho contours meet, refined in psi.
struct ContourIntersection {
    double psi = 0.0;
    double R = 0.0;
    double rho = 0.0;
};
std::vector<ContourIntersection> contour_intersections(const SurfaceModel& surface,
                                                       const ChartPoint& p, const LocusCurve& locus,
                                                       const RhoContour& rho,
                                                       const RhoOptions& opts);

struct BetaLoop {
    double psi_begin = 0.0;  // self-intersection parameters bounding the loop
    double psi_end = 0.0;
    std::vector<std::size_t> cusp_indices;  // cusps of the locus inside the loop
    double cusp_distance = 0.0;             // closest approach of the loop to its cusp
    std::size_t branch_jumps = 0;           // discontinuities of rho inside the loop
};

struct BetaCurve {
    std::vector<double> psi;
    std::vector<Vec3> xyz;
    std::vector<Vec2> projected;
    std::vector<double> drho;
    std::vector<double> xi1;
    std::vector<BetaLoop> loops;
    // min over psi of max(|rho'|, |xi1(rho)|): vanishes where beta has a cusp.
    double singularity_measure = 0.0;
    double singularity_psi = 0.0;
    bool undefined = false;
};

// Loops are the arcs of beta between consecutive passages through cusps of the locus;
// rho should use the nearest_conjugate branch so that beta is continuous there.
BetaCurve beta_curve(const SurfaceModel& surface, const ChartPoint& p, const RhoContour& rho,
                     const LocusCurve& locus);

}  // namespace conjloc
