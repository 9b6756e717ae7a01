#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "conjloc/errors.hpp"
#include "conjloc/locus.hpp"
#include "conjloc/parallel.hpp"

namespace conjloc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double psi) noexcept { return normalized({ChartId::standard, 0.0, psi}).u2; }

struct RhoEval {
    std::optional<RhoRecord> rec;
    double max_xi2 = 0.0;
    bool null_ray = false;  // xi2 vanishes along the whole geodesic (symmetry line)
};

RhoEval eval_rho(const SurfaceModel& surface, const ChartPoint& p, double psi, const RhoOptions& opts) {
    IntegratorOptions io = opts.integrator;
    io.stop = opts.branch == RhoBranch::first ? StopRule::after_first_xi2_zero : StopRule::at_s_max;
    const Trajectory traj = integrate(surface, p, psi, io);

    RhoEval out;
    for (const auto& st : traj.steps) out.max_xi2 = std::max(out.max_xi2, std::abs(st.y0[kXi2]));
    out.max_xi2 = std::max(out.max_xi2, std::abs(traj.final.xi2));
    out.null_ray = out.max_xi2 < opts.undefined_xi2;

    std::optional<GeodesicState> chosen;
    if (out.null_ray) {
        // The whole ray lies in the zero set; the point nearest R is R itself.
        if (opts.branch == RhoBranch::first) return out;
        const Event* ev1 = traj.first_event(Event::Kind::xi1_zero);
        if (ev1 == nullptr) return out;
        chosen = refine_event(surface, traj, *ev1);
    } else if (opts.branch == RhoBranch::first) {
        if (const Event* ev = traj.first_event(Event::Kind::xi2_zero))
            chosen = refine_event(surface, traj, *ev);
    } else {
        const Event* ev1 = traj.first_event(Event::Kind::xi1_zero);
        if (ev1 == nullptr) return out;
        const double R = refine_event(surface, traj, *ev1).s;
        for (const auto& ev : traj.events) {
            if (ev.kind != Event::Kind::xi2_zero) continue;
            const GeodesicState st = refine_event(surface, traj, ev);
            if (!chosen || std::abs(st.s - R) < std::abs(chosen->s - R)) chosen = st;
        }
    }
    if (!chosen) return out;

    RhoRecord r;
    r.psi = wrap(psi);
    r.rho = chosen->s;
    r.xi1 = chosen->xi1;
    r.dxi1 = chosen->dxi1;
    r.dxi2 = chosen->dxi2;
    r.xi3 = chosen->xi3;
    r.point = embed(surface, chosen->pos);
    r.polar_uv = {r.rho * std::cos(psi), r.rho * std::sin(psi)};
    out.rec = r;
    return out;
}

double singularity(const RhoRecord& r) { return std::max(std::abs(r.drho()), std::abs(r.xi1)); }

}  // namespace

std::optional<RhoRecord> rho_record(const SurfaceModel& surface, const ChartPoint& p, double psi,
                                    const RhoOptions& opts) {
    return eval_rho(surface, p, psi, opts).rec;
}

RhoContour sweep_rho(const SurfaceModel& surface, const ChartPoint& p, const RhoOptions& opts) {
    if (opts.n_psi < 8) throw PreconditionError("sweep_rho needs at least 8 directions");
    RhoContour c;
    c.options = opts;
    const std::size_t n = opts.n_psi;
    c.psi_grid.resize(n);
    c.records.resize(n);
    std::vector<char> null_ray(n, 0);
    for (std::size_t i = 0; i < n; ++i) c.psi_grid[i] = kTwoPi * static_cast<double>(i) / n;
    parallel_for(n, opts.threads, [&](std::size_t i) {
        auto e = eval_rho(surface, p, c.psi_grid[i], opts);
        c.records[i] = e.rec;
        null_ray[i] = e.null_ray;
    });
    c.undefined = std::all_of(null_ray.begin(), null_ray.end(), [](char z) { return z != 0; });
    if (c.undefined) {
        for (auto& r : c.records) r.reset();
        return c;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!c.records[i] && !null_ray[i]) c.partial = true;
    return c;
}

std::vector<ContourIntersection> contour_intersections(const SurfaceModel& surface,
                                                       const ChartPoint& p, const LocusCurve& locus,
                                                       const RhoContour& rho,
                                                       const RhoOptions& opts) {
    std::vector<ContourIntersection> out;
    if (rho.undefined || locus.degenerate) return out;
    // The contours meet exactly where xi2(R) = 0, i.e. at the cusps already localized on
    // the locus; the rho branch through R is re-evaluated there as a cross-check.
    RhoOptions near = opts;
    near.branch = RhoBranch::nearest_conjugate;
    for (const auto& c : locus.cusps) {
        const auto r = rho_record(surface, p, c.psi_star, near);
        if (!r) continue;
        out.push_back({c.psi_star, c.R_star, r->rho});
    }
    return out;
}

BetaCurve beta_curve(const SurfaceModel& surface, const ChartPoint& p, const RhoContour& rho,
                     const LocusCurve& locus) {
    BetaCurve beta;
    if (rho.undefined) {
        beta.undefined = true;
        return beta;
    }
    const ProjectionFrame frame = antipodal_frame(surface, p);
    const std::size_t n = rho.psi_grid.size();
    std::vector<std::size_t> valid;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = rho.records[i];
        if (!r) continue;
        valid.push_back(i);
        beta.psi.push_back(r->psi);
        beta.xyz.push_back(r->point.xyz);
        beta.projected.push_back(frame.project(r->point.xyz));
        beta.drho.push_back(r->drho());
        beta.xi1.push_back(r->xi1);
    }
    if (valid.empty()) return beta;

    const RhoOptions& ro = rho.options;
    auto measure_at = [&](double psi) {
        const auto r = rho_record(surface, p, psi, ro);
        return r ? singularity(*r) : 1e300;
    };

    // Coarse minimum over the grid, then Brent on the neighbouring cells.
    std::size_t best = 0;
    for (std::size_t k = 1; k < valid.size(); ++k)
        if (std::max(std::abs(beta.drho[k]), std::abs(beta.xi1[k])) <
            std::max(std::abs(beta.drho[best]), std::abs(beta.xi1[best])))
            best = k;
    const double dpsi = kTwoPi / static_cast<double>(n);
    {
        std::uintmax_t iters = 60;
        const auto m = boost::math::tools::brent_find_minima(measure_at, beta.psi[best] - dpsi,
                                                             beta.psi[best] + dpsi, 40, iters);
        const double grid = std::max(std::abs(beta.drho[best]), std::abs(beta.xi1[best]));
        beta.singularity_psi = m.second < grid ? wrap(m.first) : beta.psi[best];
        beta.singularity_measure = std::min(m.second, grid);
    }

    if (locus.cusps.empty()) return beta;

    // Passages through the cusps split beta into loops.
    std::vector<std::size_t> order(locus.cusps.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return locus.cusps[a].psi_star < locus.cusps[b].psi_star;
    });

    auto is_jump = [&](std::size_t a, std::size_t b) {
        const auto& ra = *rho.records[a];
        const auto& rb = *rho.records[b];
        const double slope = std::max(std::abs(ra.drho()), std::abs(rb.drho()));
        return std::abs(rb.rho - ra.rho) > std::max(0.25, 4.0 * slope * dpsi);
    };

    for (std::size_t k = 0; k < order.size(); ++k) {
        const CuspRecord& cusp = locus.cusps[order[k]];
        const double begin = cusp.psi_star;
        double end = locus.cusps[order[(k + 1) % order.size()]].psi_star;
        if (end <= begin) end += kTwoPi;

        BetaLoop loop;
        loop.psi_begin = begin;
        loop.psi_end = wrap(end);
        loop.cusp_indices.push_back(order[k]);

        auto dist_at = [&](double psi) {
            const auto r = rho_record(surface, p, psi, ro);
            return r ? distance(r->point.xyz, cusp.xyz) : 1e300;
        };
        std::uintmax_t iters = 60;
        const auto m =
            boost::math::tools::brent_find_minima(dist_at, begin - dpsi, begin + dpsi, 40, iters);
        loop.cusp_distance = m.second;

        std::vector<std::pair<double, std::size_t>> inside;
        for (std::size_t i = 0; i < n; ++i) {
            double psi = rho.psi_grid[i];
            if (psi < begin) psi += kTwoPi;
            if (psi <= end && rho.records[i]) inside.emplace_back(psi, i);
        }
        std::sort(inside.begin(), inside.end());
        for (std::size_t j = 1; j < inside.size(); ++j)
            if (is_jump(inside[j - 1].second, inside[j].second)) ++loop.branch_jumps;
        beta.loops.push_back(loop);
    }
    return beta;
}

}  // namespace conjloc
