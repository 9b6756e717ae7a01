#pragma once

#include <array>
#include <string>
#include <vector>

#include "conjloc/geodesic_state.hpp"
#include "conjloc/geometry_types.hpp"
#include "conjloc/jet.hpp"

namespace conjloc {

enum class Family { sphere, ellipsoid, sectoral_harmonic };

struct SurfacePoint {
    ChartPoint chart;
    Vec3 xyz{};
};

// Reflection of R^3 through a plane containing the origin that maps the surface
// onto itself. Its fixed-point curve on the surface is a line of symmetry.
struct MirrorPlane {
    Vec3 normal{};
    std::string name;
};

// Star-shaped surfaces written as a map of the unit direction sphere:
//   sphere             X(d) = d
//   ellipsoid          X(d) = (a dx, b dy, c dz)
//   sectoral harmonic  X(d) = (1 + eps Re((dx + i dy)^n)) d
// The last one is the radial graph r = 1 + eps sin^n(theta) cos(n phi).
class SurfaceModel {
public:
    static SurfaceModel sphere();
    static SurfaceModel ellipsoid(double a, double b, double c);
    static SurfaceModel sectoral_harmonic(int n, double epsilon);

    Family family() const noexcept { return family_; }
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double c() const noexcept { return c_; }
    int n() const noexcept { return n_; }
    double epsilon() const noexcept { return epsilon_; }
    std::string describe() const;

    Vec3 embed_direction(const Vec3& d) const;
    std::array<Jet2, 3> embed_direction(const std::array<Jet2, 3>& d) const;

    const std::vector<MirrorPlane>& mirrors() const noexcept { return mirrors_; }

    // Ellipsoid umbilics in the standard chart (empty for other families).
    const std::vector<ChartPoint>& umbilics() const noexcept { return umbilics_; }

private:
    SurfaceModel() = default;

    Family family_ = Family::sphere;
    double a_ = 1.0, b_ = 1.0, c_ = 1.0;
    int n_ = 0;
    double epsilon_ = 0.0;
    std::vector<MirrorPlane> mirrors_;
    std::vector<ChartPoint> umbilics_;
};

// Below this value of sin(u1) the jet machinery refuses to evaluate.
inline constexpr double kPoleThreshold = 0.15;
// Integrators leave a chart when sin(u1) drops below this value.
inline constexpr double kChartSwitchThreshold = 0.2;
// A freshly entered chart is always at least this far from its poles.
inline constexpr double kChartHysteresis = 0.4;

ChartId other_chart(ChartId id) noexcept;
double pole_clearance(const ChartPoint& p) noexcept;  // sin(u1)
ChartPoint normalized(ChartPoint p) noexcept;        // u2 wrapped into [0, 2 pi)

// Unit direction d(u1, u2) on the parameter sphere and its chart partials.
Vec3 chart_direction(const ChartPoint& p) noexcept;
std::array<Vec3, 2> chart_direction_partials(const ChartPoint& p) noexcept;
std::array<Jet2, 3> chart_direction_jet(const ChartPoint& p) noexcept;
ChartPoint chart_from_direction(const Vec3& d, ChartId chart) noexcept;

// Same point in the other chart, and a tangent vector re-expressed there.
ChartPoint to_other_chart(const ChartPoint& p) noexcept;
Vec2 transfer_vector(const ChartPoint& from, const Vec2& v, const ChartPoint& to) noexcept;

// Position in embedding space. Throws DomainError for u1 outside [0, pi].
SurfacePoint embed(const SurfaceModel& surface, const ChartPoint& p);

// Re-expresses position and velocity in the other chart. Frame scalars are copied untouched.
GeodesicState chart_switch(const SurfaceModel& surface, const GeodesicState& state);

// Parameter antipode (pi - u1, u2 + pi), which maps d to -d.
ChartPoint antipode(const SurfaceModel& surface, const ChartPoint& p) noexcept;

// Mirrors whose fixed curve contains p (within 1e-10 in direction space).
std::vector<const MirrorPlane*> mirrors_through(const SurfaceModel& surface, const ChartPoint& p);

// Direction angles psi of geodesics from p that stay on a line of symmetry,
// sorted ascending in [0, 2 pi). Empty when p is on no symmetry line.
std::vector<double> symmetry_directions(const SurfaceModel& surface, const ChartPoint& p);

// Reflect a point through a mirror plane, staying in the same chart.
ChartPoint reflect(const MirrorPlane& mirror, const ChartPoint& p) noexcept;

}  // namespace conjloc
