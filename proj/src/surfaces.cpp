#include "conjloc/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "conjloc/diffgeo.hpp"
#include "conjloc/errors.hpp"

namespace conjloc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Rotation by pi/2 about x, mapping rotated-chart directions to embedding directions.
Vec3 rotate_x(const Vec3& v) noexcept { return {v[0], -v[2], v[1]}; }
Vec3 unrotate_x(const Vec3& v) noexcept { return {v[0], v[2], -v[1]}; }

std::vector<MirrorPlane> coordinate_mirrors() {
    return {{{0.0, 0.0, 1.0}, "z=0"}, {{0.0, 1.0, 0.0}, "y=0"}, {{1.0, 0.0, 0.0}, "x=0"}};
}

}  // namespace

SurfaceModel SurfaceModel::sphere() {
    SurfaceModel s;
    s.family_ = Family::sphere;
    s.mirrors_ = coordinate_mirrors();
    return s;
}

SurfaceModel SurfaceModel::ellipsoid(double a, double b, double c) {
    if (!(a > b && b > c && c > 0.0))
        throw PreconditionError("ellipsoid axes must satisfy a > b > c > 0");
    SurfaceModel s;
    s.family_ = Family::ellipsoid;
    s.a_ = a;
    s.b_ = b;
    s.c_ = c;
    s.mirrors_ = coordinate_mirrors();
    // Umbilics lie on the y = 0 ellipse at sin^2(theta) = (a^2 - b^2) / (a^2 - c^2).
    const double theta = std::asin(std::sqrt((a * a - b * b) / (a * a - c * c)));
    for (double phi : {0.0, std::numbers::pi})
        for (double th : {theta, std::numbers::pi - theta})
            s.umbilics_.push_back({ChartId::standard, th, phi});
    return s;
}

SurfaceModel SurfaceModel::sectoral_harmonic(int n, double epsilon) {
    if (n < 1) throw PreconditionError("sectoral harmonic order n must be >= 1");
    if (!(epsilon >= 0.0 && epsilon < 1.0))
        throw PreconditionError("sectoral harmonic epsilon must lie in [0, 1)");
    SurfaceModel s;
    s.family_ = Family::sectoral_harmonic;
    s.n_ = n;
    s.epsilon_ = epsilon;
    s.mirrors_.push_back({{0.0, 0.0, 1.0}, "z=0"});
    // cos(n phi) is even about phi = k pi / n.
    for (int k = 0; k < n; ++k) {
        const double phi = k * std::numbers::pi / n;
        std::ostringstream name;
        name << "meridian phi=" << k << "pi/" << n;
        s.mirrors_.push_back({{-std::sin(phi), std::cos(phi), 0.0}, name.str()});
    }
    return s;
}

std::string SurfaceModel::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (family_) {
        case Family::sphere: os << "sphere"; break;
        case Family::ellipsoid: os << "ellipsoid(" << a_ << ", " << b_ << ", " << c_ << ")"; break;
        case Family::sectoral_harmonic:
            os << "sectoral_harmonic(" << n_ << ", " << epsilon_ << ")";
            break;
    }
    return os.str();
}

Vec3 SurfaceModel::embed_direction(const Vec3& d) const {
    switch (family_) {
        case Family::sphere: return d;
        case Family::ellipsoid: return {a_ * d[0], b_ * d[1], c_ * d[2]};
        case Family::sectoral_harmonic: {
            double re = 1.0, im = 0.0;
            for (int k = 0; k < n_; ++k) {
                const double r2 = re * d[0] - im * d[1];
                im = re * d[1] + im * d[0];
                re = r2;
            }
            return (1.0 + epsilon_ * re) * d;
        }
    }
    return d;
}

std::array<Jet2, 3> SurfaceModel::embed_direction(const std::array<Jet2, 3>& d) const {
    switch (family_) {
        case Family::sphere: return d;
        case Family::ellipsoid: return {a_ * d[0], b_ * d[1], c_ * d[2]};
        case Family::sectoral_harmonic: {
            Jet2 re = d[0], im = d[1];
            for (int k = 1; k < n_; ++k) {
                Jet2 r2 = re * d[0] - im * d[1];
                im = re * d[1] + im * d[0];
                re = r2;
            }
            const Jet2 r = 1.0 + epsilon_ * re;
            return {r * d[0], r * d[1], r * d[2]};
        }
    }
    return d;
}

ChartId other_chart(ChartId id) noexcept {
    return id == ChartId::standard ? ChartId::rotated : ChartId::standard;
}

double pole_clearance(const ChartPoint& p) noexcept { return std::sin(p.u1); }

ChartPoint normalized(ChartPoint p) noexcept {
    p.u2 = std::fmod(p.u2, kTwoPi);
    if (p.u2 < 0.0) p.u2 += kTwoPi;
    if (p.u2 >= kTwoPi) p.u2 = 0.0;
    return p;
}

Vec3 chart_direction(const ChartPoint& p) noexcept {
    const double s1 = std::sin(p.u1), c1 = std::cos(p.u1);
    const double s2 = std::sin(p.u2), c2 = std::cos(p.u2);
    const Vec3 d{s1 * c2, s1 * s2, c1};
    return p.chart == ChartId::standard ? d : rotate_x(d);
}

std::array<Vec3, 2> chart_direction_partials(const ChartPoint& p) noexcept {
    const double s1 = std::sin(p.u1), c1 = std::cos(p.u1);
    const double s2 = std::sin(p.u2), c2 = std::cos(p.u2);
    const Vec3 d1{c1 * c2, c1 * s2, -s1};
    const Vec3 d2{-s1 * s2, s1 * c2, 0.0};
    if (p.chart == ChartId::standard) return {d1, d2};
    return {rotate_x(d1), rotate_x(d2)};
}

std::array<Jet2, 3> chart_direction_jet(const ChartPoint& p) noexcept {
    auto sin_cos = [](double u, int k) {
        const double s = std::sin(u), c = std::cos(u);
        return std::pair{Jet2::univariate(k, {s, c, -s / 2, -c / 6, s / 24}),
                         Jet2::univariate(k, {c, -s, -c / 2, s / 6, c / 24})};
    };
    const auto [s1, c1] = sin_cos(p.u1, 0);
    const auto [s2, c2] = sin_cos(p.u2, 1);
    if (p.chart == ChartId::standard) return {s1 * c2, s1 * s2, c1};
    return {s1 * c2, -c1, s1 * s2};
}

ChartPoint chart_from_direction(const Vec3& d, ChartId chart) noexcept {
    const Vec3 local = chart == ChartId::standard ? d : unrotate_x(d);
    const double z = std::clamp(local[2] / norm(local), -1.0, 1.0);
    return normalized({chart, std::acos(z), std::atan2(local[1], local[0])});
}

ChartPoint to_other_chart(const ChartPoint& p) noexcept {
    return chart_from_direction(chart_direction(p), other_chart(p.chart));
}

Vec2 transfer_vector(const ChartPoint& from, const Vec2& v, const ChartPoint& to) noexcept {
    const auto df = chart_direction_partials(from);
    const Vec3 w = v[0] * df[0] + v[1] * df[1];
    // Columns of the target chart's direction Jacobian are orthogonal.
    const auto dt = chart_direction_partials(to);
    return {dot(w, dt[0]) / dot(dt[0], dt[0]), dot(w, dt[1]) / dot(dt[1], dt[1])};
}

SurfacePoint embed(const SurfaceModel& surface, const ChartPoint& p) {
    if (!std::isfinite(p.u1) || !std::isfinite(p.u2) || p.u1 < 0.0 || p.u1 > std::numbers::pi)
        throw DomainError("chart coordinate u1 outside [0, pi]");
    return {p, surface.embed_direction(chart_direction(p))};
}

GeodesicState chart_switch(const SurfaceModel& surface, const GeodesicState& state) {
    (void)surface;  // the atlas lives on the parameter sphere; every family shares it
    GeodesicState out = state;
    out.pos = to_other_chart(state.pos);
    if (pole_clearance(out.pos) < kPoleThreshold)
        throw GeometryError("both charts degenerate at the same point");
    out.vel = transfer_vector(state.pos, state.vel, out.pos);
    return out;
}

ChartPoint antipode(const SurfaceModel&, const ChartPoint& p) noexcept {
    return normalized({p.chart, std::numbers::pi - p.u1, p.u2 + std::numbers::pi});
}

std::vector<const MirrorPlane*> mirrors_through(const SurfaceModel& surface, const ChartPoint& p) {
    std::vector<const MirrorPlane*> out;
    const Vec3 d = chart_direction(p);
    for (const auto& m : surface.mirrors())
        if (std::abs(dot(d, m.normal)) < 1e-10) out.push_back(&m);
    return out;
}

std::vector<double> symmetry_directions(const SurfaceModel& surface, const ChartPoint& p) {
    std::vector<double> psis;
    const auto through = mirrors_through(surface, p);
    if (through.empty()) return psis;
    const auto geom = local_geometry(surface, p);
    for (const MirrorPlane* m : through) {
        // Tangent vector alpha X_1 + beta X_2 lying in the mirror plane.
        const Vec2 w{dot(geom.tangents[1], m->normal), -dot(geom.tangents[0], m->normal)};
        const double len = std::sqrt(geom.metric.dot(w, w));
        const Vec2 unit{w[0] / len, w[1] / len};
        for (double sign : {1.0, -1.0}) {
            double psi = angle_of_direction(geom.metric, {sign * unit[0], sign * unit[1]});
            psis.push_back(normalized({ChartId::standard, 0.0, psi}).u2);
        }
    }
    std::sort(psis.begin(), psis.end());
    psis.erase(std::unique(psis.begin(), psis.end(),
                           [](double x, double y) { return std::abs(x - y) < 1e-12; }),
               psis.end());
    return psis;
}

ChartPoint reflect(const MirrorPlane& mirror, const ChartPoint& p) noexcept {
    const Vec3 d = chart_direction(p);
    const Vec3 r = d - (2.0 * dot(d, mirror.normal)) * mirror.normal;
    return chart_from_direction(r, p.chart);
}

}  // namespace conjloc
