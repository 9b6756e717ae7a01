#include "conjloc/locus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "conjloc/diffgeo.hpp"
#include "conjloc/errors.hpp"
#include "conjloc/parallel.hpp"

namespace conjloc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double psi) noexcept { return normalized({ChartId::standard, 0.0, psi}).u2; }

double cyclic_distance(double a, double b) noexcept {
    const double d = std::abs(wrap(a) - wrap(b));
    return std::min(d, kTwoPi - d);
}

struct Sample {
    double psi = 0.0;  // unwrapped: intervals may straddle 2 pi
    std::optional<ConjugateRecord> rec;

    double f() const { return rec->xi2_at_R; }
    // d/dpsi xi2(R(psi), psi) = xi2' R' + xi3 + xi1 xi1'^2, and xi1 = 0 at R.
    double df() const { return rec->dxi2_at_R * rec->dR() + rec->xi3_at_R; }
};

// Cubic Hermite interpolant of f on [a, b] in the local variable t in [0, 1].
struct Cubic {
    double c0 = 0, c1 = 0, c2 = 0, c3 = 0;
    double f1 = 0;  // exact value at t = 1; the polynomial can round to the wrong sign there

    double operator()(double t) const noexcept {
        return t == 1.0 ? f1 : c0 + t * (c1 + t * (c2 + t * c3));
    }

    std::vector<double> critical_points() const {
        std::vector<double> out;
        const double qa = 3 * c3, qb = 2 * c2, qc = c1;
        if (std::abs(qa) < 1e-300) {
            if (qb != 0.0) out.push_back(-qc / qb);
        } else {
            const double disc = qb * qb - 4 * qa * qc;
            if (disc >= 0.0) {
                const double sq = std::sqrt(disc);
                const double q = -0.5 * (qb + std::copysign(sq, qb));
                if (q != 0.0) out.push_back(q / qa);
                out.push_back(q != 0.0 ? qc / q : -qb / (2 * qa));
            }
        }
        std::erase_if(out, [](double t) { return !(t > 0.0 && t < 1.0); });
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<double> roots() const {
        std::vector<double> knots{0.0};
        for (double t : critical_points()) knots.push_back(t);
        knots.push_back(1.0);
        std::vector<double> out;
        // An exact zero at t = 0 belongs to this interval, one at t = 1 to the next
        // (happens on symmetric geodesics, where xi2 vanishes identically).
        if (c0 == 0.0) out.push_back(0.0);
        for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
            double lo = knots[k], hi = knots[k + 1];
            double flo = (*this)(lo), fhi = (*this)(hi);
            if (flo == 0.0) continue;
            if ((flo < 0.0) == (fhi < 0.0) || fhi == 0.0) {
                if (fhi == 0.0 && hi < 1.0) out.push_back(hi);
                continue;
            }
            for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = (*this)(mid);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            out.push_back(0.5 * (lo + hi));
        }
        return out;
    }
};

Cubic hermite(const Sample& a, const Sample& b) {
    const double w = b.psi - a.psi;
    const double fa = a.f(), fb = b.f(), da = w * a.df(), db = w * b.df();
    return {fa, da, 3 * (fb - fa) - 2 * da - db, 2 * (fa - fb) + da + db, fb};
}

struct Bracket {
    Sample a, b;
    std::vector<double> root_psis;  // cubic estimates
    bool at_floor = false;
};

class CuspFinder {
public:
    CuspFinder(const SurfaceModel& surface, const ChartPoint& p, const ProjectionFrame& frame,
               const LocusOptions& opts, double xi2_scale)
        : surface_(surface), p_(p), frame_(frame), opts_(opts), xi2_scale_(xi2_scale) {}

    Sample evaluate(double psi) {
        Sample s{psi, std::nullopt};
        try {
            auto rec = conjugate_point(surface_, p_, wrap(psi), opts_.integrator);
            rec.tangent_plane_uv = frame_.project(rec.point.xyz);
            s.rec = rec;
        } catch (const NoConjugatePoint&) {
            partial = true;
        }
        added.push_back(s);
        return s;
    }

    // Splits [a, b] until each piece has an unambiguous number of zeros of xi2(R(psi)).
    void analyze(const Sample& a0, const Sample& b0) {
        std::vector<std::pair<Sample, Sample>> stack{{a0, b0}};
        while (!stack.empty()) {
            auto [a, b] = stack.back();
            stack.pop_back();
            if (!a.rec || !b.rec) {
                partial = true;
                continue;
            }
            const Cubic cubic = hermite(a, b);
            const auto crit = cubic.critical_points();
            const auto roots = cubic.roots();
            const double margin = 0.1 * std::max(std::abs(a.f()), std::abs(b.f()));
            bool ambiguous = roots.size() >= 2;
            for (double t : crit)
                if (std::abs(cubic(t)) < margin) ambiguous = true;
            const double width = b.psi - a.psi;
            if (ambiguous && width > opts_.min_interval) {
                const Sample m = evaluate(0.5 * (a.psi + b.psi));
                stack.push_back({m, b});
                stack.push_back({a, m});
                continue;
            }
            Bracket br{a, b, {}, ambiguous};
            for (double t : roots) br.root_psis.push_back(a.psi + t * width);
            if (!br.root_psis.empty()) brackets.push_back(br);
            if (roots.empty())
                for (double t : crit)
                    if (std::abs(cubic(t)) < 1e-2 * xi2_scale_)
                        tangencies.push_back(a.psi + t * width);
        }
    }

    // Newton on psi -> xi2(R(psi)) with the analytic slope, safeguarded by the bracket.
    Sample localize(const Bracket& br) {
        Sample lo = br.a, hi = br.b;
        Sample cur = evaluate(br.root_psis.front());
        for (int it = 0; it < 60 && cur.rec; ++it) {
            const double f = cur.f();
            if (f == 0.0) break;
            if ((f < 0.0) == (lo.f() < 0.0))
                lo = cur;
            else
                hi = cur;
            double next = cur.psi - f / cur.df();
            if (!(next > lo.psi && next < hi.psi) || !std::isfinite(next))
                next = 0.5 * (lo.psi + hi.psi);
            const bool done = std::abs(next - cur.psi) < opts_.psi_tol || hi.psi - lo.psi < opts_.psi_tol;
            cur = evaluate(next);
            if (done) break;
        }
        return cur;
    }

    bool partial = false;
    std::vector<Sample> added;
    std::vector<Bracket> brackets;
    std::vector<double> tangencies;

private:
    const SurfaceModel& surface_;
    ChartPoint p_;
    ProjectionFrame frame_;
    const LocusOptions& opts_;
    double xi2_scale_;
};

CuspRecord cusp_from(const ConjugateRecord& rec) {
    CuspRecord c;
    c.psi_star = wrap(rec.psi);
    c.R_star = rec.R;
    c.xi3_value = rec.xi3_at_R;
    c.d2R = rec.d2R();
    c.xyz = rec.point.xyz;
    return c;
}

double locus_diameter(const std::vector<std::optional<ConjugateRecord>>& records) {
    double best = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!records[i]) continue;
        for (std::size_t j = i + 1; j < records.size(); ++j)
            if (records[j])
                best = std::max(best, distance(records[i]->point.xyz, records[j]->point.xyz));
    }
    return best;
}

}  // namespace

const char* to_string(AClass c) noexcept {
    switch (c) {
        case AClass::A0: return "A0";
        case AClass::A1: return "A1";
        case AClass::A2: return "A2";
        case AClass::A3: return "A3";
    }
    return "?";
}

const char* to_string(Orientation o) noexcept {
    switch (o) {
        case Orientation::toward_p: return "toward_p";
        case Orientation::away_from_p: return "away_from_p";
        case Orientation::undetermined: return "undetermined";
    }
    return "?";
}

std::array<int, 2> local_type(AClass c) noexcept {
    const int k = static_cast<int>(c);
    return {k + 1, k + 2};
}

ProjectionFrame antipodal_frame(const SurfaceModel& surface, const ChartPoint& base) {
    const ChartPoint a = antipode(surface, base);
    const auto geom = local_geometry(surface, a);
    const Vec3 n = cross(geom.tangents[0], geom.tangents[1]);
    const Vec3 normal = (1.0 / norm(n)) * n;
    const Vec3 t = geom.tangents[1];
    const Vec3 e1 = (1.0 / norm(t)) * t;
    return {geom.xyz, e1, cross(normal, e1)};
}

std::vector<Vec2> project_tangent_plane(const LocusCurve& curve, const ProjectionFrame& frame) {
    std::vector<Vec2> out;
    for (const auto& r : curve.records)
        if (r) out.push_back(frame.project(r->point.xyz));
    return out;
}

ConjugateRecord locus_record(const SurfaceModel& surface, const ChartPoint& p, double psi,
                             const IntegratorOptions& opts) {
    auto rec = conjugate_point(surface, p, psi, opts);
    rec.tangent_plane_uv = antipodal_frame(surface, p).project(rec.point.xyz);
    return rec;
}

LocusCurve sweep_R(const SurfaceModel& surface, const ChartPoint& p, const LocusOptions& opts) {
    if (opts.n_psi < 8) throw PreconditionError("sweep_R needs at least 8 directions");
    LocusCurve curve;
    curve.base = embed(surface, p);
    curve.antipode = antipode(surface, p);
    curve.symmetric_psis = symmetry_directions(surface, p);
    const ProjectionFrame frame = antipodal_frame(surface, p);

    const std::size_t n = opts.n_psi;
    curve.psi_grid.resize(n);
    curve.records.resize(n);
    for (std::size_t i = 0; i < n; ++i) curve.psi_grid[i] = kTwoPi * static_cast<double>(i) / n;
    parallel_for(n, opts.threads, [&](std::size_t i) {
        try {
            auto rec = conjugate_point(surface, p, curve.psi_grid[i], opts.integrator);
            rec.tangent_plane_uv = frame.project(rec.point.xyz);
            curve.records[i] = rec;
        } catch (const NoConjugatePoint&) {
        }
    });
    for (const auto& r : curve.records)
        if (!r) curve.partial = true;

    curve.cusps = detect_cusps(surface, curve, opts);
    return curve;
}

std::vector<CuspRecord> detect_cusps(const SurfaceModel& surface, LocusCurve& curve,
                                     const LocusOptions& opts) {
    curve.xi2_scale = 0.0;
    curve.xi3_scale = 0.0;
    for (const auto& r : curve.records) {
        if (!r) continue;
        curve.xi2_scale = std::max(curve.xi2_scale, std::abs(r->xi2_at_R));
        curve.xi3_scale = std::max(curve.xi3_scale, std::abs(r->xi3_at_R));
    }
    curve.diameter = locus_diameter(curve.records);
    curve.candidates.clear();
    if (curve.xi2_scale < opts.degenerate_xi2) {
        curve.degenerate = true;
        return {};
    }

    const ChartPoint p = curve.base.chart;
    const ProjectionFrame frame = antipodal_frame(surface, p);
    CuspFinder finder(surface, p, frame, opts, curve.xi2_scale);

    const std::size_t n = curve.psi_grid.size();
    for (std::size_t i = 0; i < n; ++i) {
        Sample a{curve.psi_grid[i], curve.records[i]};
        Sample b = i + 1 < n ? Sample{curve.psi_grid[i + 1], curve.records[i + 1]}
                             : Sample{curve.psi_grid[0] + kTwoPi, curve.records[0]};
        finder.analyze(a, b);
    }

    std::vector<CuspRecord> cusps;
    for (const auto& br : finder.brackets) {
        if (br.root_psis.size() == 1 && opts.refine && !br.at_floor) {
            const Sample s = finder.localize(br);
            if (s.rec) cusps.push_back(cusp_from(*s.rec));
            continue;
        }
        for (double psi : br.root_psis) {
            if (opts.refine || br.at_floor) {
                const Sample s = finder.evaluate(psi);
                if (s.rec) {
                    cusps.push_back(cusp_from(*s.rec));
                    cusps.back().near_bifurcation = br.at_floor;
                }
            } else {
                // Counting only: interpolate R linearly inside the bracket.
                CuspRecord c;
                c.psi_star = wrap(psi);
                const double t = (psi - br.a.psi) / (br.b.psi - br.a.psi);
                c.R_star = (1 - t) * br.a.rec->R + t * br.b.rec->R;
                c.near_bifurcation = br.at_floor;
                cusps.push_back(c);
            }
        }
    }
    curve.partial = curve.partial || finder.partial;

    // Merge the adaptive samples into the grid.
    std::vector<std::pair<double, std::optional<ConjugateRecord>>> merged;
    for (std::size_t i = 0; i < n; ++i) merged.emplace_back(curve.psi_grid[i], curve.records[i]);
    for (auto& s : finder.added) {
        if (s.rec) s.rec->psi = wrap(s.psi);
        merged.emplace_back(wrap(s.psi), s.rec);
    }
    std::sort(merged.begin(), merged.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    merged.erase(std::unique(merged.begin(), merged.end(),
                             [](const auto& x, const auto& y) { return x.first == y.first; }),
                 merged.end());
    curve.psi_grid.clear();
    curve.records.clear();
    for (auto& [psi, rec] : merged) {
        curve.psi_grid.push_back(psi);
        curve.records.push_back(rec);
    }

    std::sort(cusps.begin(), cusps.end(),
              [](const CuspRecord& x, const CuspRecord& y) { return x.psi_star < y.psi_star; });
    // A root sitting on a grid node is seen from both neighbouring intervals.
    const double same = std::max(1e-7, 10 * opts.psi_tol);
    cusps.erase(std::unique(cusps.begin(), cusps.end(),
                            [&](const CuspRecord& x, const CuspRecord& y) {
                                return cyclic_distance(x.psi_star, y.psi_star) < same;
                            }),
                cusps.end());
    if (cusps.size() > 1 && cyclic_distance(cusps.front().psi_star, cusps.back().psi_star) < same)
        cusps.pop_back();
    if (opts.refine) {
        for (auto& c : cusps) c = classify_cusp(surface, c, curve, opts);
        for (double psi : finder.tangencies) {
            Sample s = finder.evaluate(psi);
            if (!s.rec) continue;
            CuspRecord cand = classify_cusp(surface, cusp_from(*s.rec), curve, opts);
            cand.tangency = true;
            cand.near_bifurcation = true;
            if (cand.a_class == AClass::A1) cand.a_class = AClass::A0;
            cand.local_type = local_type(cand.a_class);
            cand.orientation = Orientation::undetermined;
            curve.candidates.push_back(cand);
        }
    }
    return cusps;
}

CuspRecord classify_cusp(const SurfaceModel& surface, const CuspRecord& cusp,
                         const LocusCurve& curve, const LocusOptions& opts) {
    CuspRecord out = cusp;
    const ChartPoint p = curve.base.chart;
    for (double s : curve.symmetric_psis)
        if (cyclic_distance(s, cusp.psi_star) < 1e-6) out.symmetric = true;

    const double h = opts.fd_step;
    std::array<std::optional<ConjugateRecord>, 4> side;
    const std::array<double, 4> offsets{-2 * h, -h, h, 2 * h};
    for (std::size_t k = 0; k < 4; ++k) {
        try {
            side[k] = conjugate_point(surface, p, wrap(cusp.psi_star + offsets[k]), opts.integrator);
        } catch (const NoConjugatePoint&) {
        }
    }
    const bool have_fd = side[0] && side[1] && side[2] && side[3];
    if (have_fd) {
        const double rm2 = side[0]->R, rm1 = side[1]->R, rp1 = side[2]->R, rp2 = side[3]->R;
        out.dR_fd = (rm2 - 8 * rm1 + 8 * rp1 - rp2) / (12 * h);
        out.d2R_fd = (-rm2 + 16 * rm1 - 30 * cusp.R_star + 16 * rp1 - rp2) / (12 * h * h);
    }

    out.xi3_relative = curve.xi3_scale > 0.0 ? std::abs(cusp.xi3_value) / curve.xi3_scale : 0.0;
    if (out.xi3_relative > opts.tol_class) {
        out.a_class = AClass::A1;
        out.orientation = !have_fd            ? Orientation::undetermined
                          : out.d2R_fd > 0.0 ? Orientation::toward_p
                                             : Orientation::away_from_p;
    } else {
        out.near_bifurcation = true;
        out.orientation = Orientation::undetermined;
        const bool crossing = have_fd && (side[1]->xi3_at_R < 0.0) != (side[2]->xi3_at_R < 0.0);
        if (out.symmetric)
            out.a_class = AClass::A3;
        else if (crossing)
            out.a_class = AClass::A2;
        else
            out.a_class = AClass::A1;
    }
    out.local_type = local_type(out.a_class);
    return out;
}

}  // namespace conjloc
