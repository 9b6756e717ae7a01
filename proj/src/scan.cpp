#include "conjloc/scan.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "conjloc/diffgeo.hpp"
#include "conjloc/errors.hpp"
#include "conjloc/parallel.hpp"

namespace conjloc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Xi3Sample {
    std::optional<double> R;
    std::optional<double> xi3;
};

Xi3Sample xi3_along(const SurfaceModel& surface, PathKind kind, double t, ScanDirection dir,
                    const IntegratorOptions& opts) {
    const double psi = path_direction(surface, kind, t, dir);
    try {
        const auto rec = conjugate_point(surface, path_point(kind, t), psi, opts);
        return {rec.R, rec.xi3_at_R};
    } catch (const NoConjugatePoint&) {
        return {};
    }
}

ChartPoint off_pole(ChartPoint p) {
    if (pole_clearance(p) < kChartSwitchThreshold) p = to_other_chart(p);
    return p;
}

ChartPoint lerp(const ChartPoint& a, const ChartPoint& b, double s) {
    double du2 = b.u2 - a.u2;
    if (du2 > std::numbers::pi) du2 -= kTwoPi;
    if (du2 < -std::numbers::pi) du2 += kTwoPi;
    return normalized({a.chart, a.u1 + s * (b.u1 - a.u1), a.u2 + s * du2});
}

double chart_distance(const ChartPoint& a, const ChartPoint& b) {
    double du2 = std::abs(b.u2 - a.u2);
    du2 = std::min(du2, kTwoPi - du2);
    return std::hypot(b.u1 - a.u1, du2);
}

}  // namespace

const char* to_string(PathKind k) noexcept { return k == PathKind::equator ? "equator" : "meridian"; }
const char* to_string(ScanDirection d) noexcept {
    return d == ScanDirection::forward ? "forward" : "backward";
}
const char* to_string(BifurcationKind k) noexcept {
    switch (k) {
        case BifurcationKind::none: return "none";
        case BifurcationKind::count_change: return "count_change";
        case BifurcationKind::degenerate_point: return "degenerate_point";
    }
    return "?";
}

ChartPoint path_point(PathKind kind, double t) noexcept {
    if (kind == PathKind::equator) return normalized({ChartId::standard, std::numbers::pi / 2, t});
    return normalized({ChartId::rotated, std::numbers::pi / 2, std::numbers::pi / 2 - t});
}

double path_direction(const SurfaceModel& surface, PathKind kind, double t, ScanDirection dir) {
    const ChartPoint p = path_point(kind, t);
    const auto g = fundamental_forms(surface, p);
    // Increasing t is +u2 on the equator and -u2 on the meridian.
    double sign = kind == PathKind::equator ? 1.0 : -1.0;
    if (dir == ScanDirection::backward) sign = -sign;
    const Vec2 v{0.0, sign / std::sqrt(g.G)};
    return normalized({ChartId::standard, 0.0, angle_of_direction(g, v)}).u2;
}

PathScanResult path_scan(const SurfaceModel& surface, PathKind kind, ScanDirection dir,
                         const PathScanOptions& opts) {
    if (opts.n_samples < 2) throw PreconditionError("path_scan needs at least 2 samples");
    PathScanResult out;
    out.kind = kind;
    out.direction = dir;
    const std::size_t n = opts.n_samples;
    const double span = opts.t_end - opts.t_begin;
    const double dt = span / static_cast<double>(opts.periodic ? n : n - 1);

    // The path must run through mirror planes; check once at the start.
    if (mirrors_through(surface, path_point(kind, opts.t_begin)).empty())
        throw PreconditionError("path does not lie on a symmetry line of this surface");

    out.samples.resize(n);
    parallel_for(n, opts.threads, [&](std::size_t k) {
        PathSample& s = out.samples[k];
        s.t = opts.t_begin + dt * static_cast<double>(k);
        s.base = path_point(kind, s.t);
        const Vec3 d = chart_direction(s.base);
        s.theta = std::acos(std::clamp(d[2], -1.0, 1.0));
        s.phi = normalized({ChartId::standard, 0.0, std::atan2(d[1], d[0])}).u2;
        s.direction = dir;
        s.psi = path_direction(surface, kind, s.t, dir);
        const auto x = xi3_along(surface, kind, s.t, dir, opts.integrator);
        s.R = x.R;
        s.xi3_at_R = x.xi3;
    });

    double max_xi3 = 0.0;
    for (const auto& s : out.samples) {
        if (!s.xi3_at_R) {
            out.partial = true;
            continue;
        }
        max_xi3 = std::max(max_xi3, std::abs(*s.xi3_at_R));
    }
    if (max_xi3 < opts.degenerate_xi3) {
        out.degenerate = true;
        return out;
    }

    const std::size_t pairs = opts.periodic ? n : n - 1;
    for (std::size_t k = 0; k < pairs; ++k) {
        const PathSample& a = out.samples[k];
        const PathSample& b = out.samples[(k + 1) % n];
        if (!a.xi3_at_R || !b.xi3_at_R) continue;  // never bridge a gap
        double fa = *a.xi3_at_R, fb = *b.xi3_at_R;
        if ((fa < 0.0) == (fb < 0.0)) continue;
        double lo = a.t, hi = a.t + dt;
        bool lost = false;
        while (hi - lo > opts.zero_tol) {
            const double mid = 0.5 * (lo + hi);
            const auto x = xi3_along(surface, kind, mid, dir, opts.integrator);
            if (!x.xi3) {
                lost = true;
                break;
            }
            if ((*x.xi3 < 0.0) == (fa < 0.0)) {
                lo = mid;
                fa = *x.xi3;
            } else {
                hi = mid;
            }
        }
        if (lost) {
            out.partial = true;
            continue;
        }
        double t = 0.5 * (lo + hi);
        if (opts.periodic) t = opts.t_begin + std::fmod(t - opts.t_begin, span);
        out.zeros.push_back(t);
    }
    std::sort(out.zeros.begin(), out.zeros.end());
    return out;
}

int cusp_count_at(const SurfaceModel& surface, const ChartPoint& p, const LocusOptions& opts) {
    LocusOptions o = opts;
    o.refine = false;
    const LocusCurve c = sweep_R(surface, p, o);
    return c.partial ? -1 : static_cast<int>(c.cusp_count());
}

RegionMap region_map(const SurfaceModel& surface, const RegionMapOptions& opts) {
    if (opts.n_theta == 0 || opts.n_phi == 0) throw PreconditionError("empty region-map grid");
    RegionMap map;
    map.n_theta = opts.n_theta;
    map.n_phi = opts.n_phi;
    map.phi_periodic = std::abs(opts.phi_max - opts.phi_min - kTwoPi) < 1e-9;
    map.cells.resize(opts.n_theta * opts.n_phi);
    const double dth = (opts.theta_max - opts.theta_min) / static_cast<double>(opts.n_theta);
    const double dph = (opts.phi_max - opts.phi_min) / static_cast<double>(opts.n_phi);
    for (std::size_t i = 0; i < opts.n_theta; ++i)
        for (std::size_t j = 0; j < opts.n_phi; ++j) {
            RegionCell& c = map.at(i, j);
            c.theta = opts.theta_min + (static_cast<double>(i) + 0.5) * dth;
            c.phi = opts.phi_min + (static_cast<double>(j) + 0.5) * dph;
            if (!(c.theta > 0.0 && c.theta < std::numbers::pi))
                throw PreconditionError("region-map theta range must lie inside (0, pi)");
        }

    LocusOptions lo = opts.locus;
    lo.threads = 1;  // parallelism is over cells
    parallel_for(map.cells.size(), opts.threads, [&](std::size_t k) {
        RegionCell& c = map.cells[k];
        c.cusp_count = cusp_count_at(surface, off_pole({ChartId::standard, c.theta, c.phi}), lo);
    });

    for (std::size_t i = 0; i < map.n_theta; ++i)
        for (std::size_t j = 0; j < map.n_phi; ++j) {
            RegionCell& c = map.at(i, j);
            auto differs = [&](std::size_t a, std::size_t b) {
                const int other = map.at(a, b).cusp_count;
                return c.cusp_count >= 0 && other >= 0 && other != c.cusp_count;
            };
            bool edge = false;
            if (i > 0) edge = edge || differs(i - 1, j);
            if (i + 1 < map.n_theta) edge = edge || differs(i + 1, j);
            if (j > 0 || map.phi_periodic) edge = edge || differs(i, (j + map.n_phi - 1) % map.n_phi);
            if (j + 1 < map.n_phi || map.phi_periodic) edge = edge || differs(i, (j + 1) % map.n_phi);
            c.boundary = edge;
        }
    return map;
}

BifurcationResult bifurcation_locate(const SurfaceModel& surface, const ChartPoint& a,
                                     const ChartPoint& b, const BifurcationOptions& opts) {
    if (a.chart != b.chart) throw PreconditionError("bifurcation_locate endpoints must share a chart");
    BifurcationResult res;
    res.lo = a;
    res.hi = b;
    res.count_lo = cusp_count_at(surface, a, opts.locus);
    res.count_hi = cusp_count_at(surface, b, opts.locus);
    const double separation = chart_distance(a, b);
    res.point = lerp(a, b, 0.5);

    if (res.count_lo == res.count_hi) {
        // Umbilic-type degeneration: the locus shrinks to a point without a count change.
        if (surface.family() != Family::ellipsoid) return res;
        LocusOptions lo = opts.locus;
        lo.refine = false;
        auto diameter_at = [&](double s) { return sweep_R(surface, lerp(a, b, s), lo).diameter; };
        const double ends = std::max(diameter_at(0.0), diameter_at(1.0));
        std::uintmax_t iters = 100;
        const auto m = boost::math::tools::brent_find_minima(diameter_at, 0.0, 1.0, 40, iters);
        if (m.second < opts.collapse_ratio * ends) {
            res.kind = BifurcationKind::degenerate_point;
            res.point = lerp(a, b, m.first);
            res.diameter = m.second;
        }
        return res;
    }
    if (res.count_lo < 0 || res.count_hi < 0) return res;

    double s_lo = 0.0, s_hi = 1.0;
    res.widths.push_back(separation);
    while ((s_hi - s_lo) > opts.relative_width) {
        const double mid = 0.5 * (s_lo + s_hi);
        const int c = cusp_count_at(surface, lerp(a, b, mid), opts.locus);
        if (c == res.count_lo)
            s_lo = mid;
        else
            s_hi = mid;
        res.widths.push_back((s_hi - s_lo) * separation);
    }
    res.lo = lerp(a, b, s_lo);
    res.hi = lerp(a, b, s_hi);
    res.point = lerp(a, b, 0.5 * (s_lo + s_hi));
    res.kind = BifurcationKind::count_change;

    // Most degenerate cusp or tangency on either side of the final bracket.
    LocusOptions full = opts.locus;
    full.refine = true;
    for (const ChartPoint& q : {res.lo, res.hi}) {
        const LocusCurve c = sweep_R(surface, q, full);
        for (const auto* list : {&c.cusps, &c.candidates})
            for (const auto& rec : *list)
                if (!res.candidate || rec.xi3_relative < res.candidate->xi3_relative)
                    res.candidate = rec;
    }
    return res;
}

}  // namespace conjloc
