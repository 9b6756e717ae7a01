#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "conjloc/cli.hpp"
#include "conjloc/errors.hpp"

namespace conjloc::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void write_file(const RunConfig& cfg, const std::string& name, const std::string& content) {
    fs::create_directories(cfg.output_dir);
    const fs::path path = fs::path(cfg.output_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

json cusp_json(const CuspRecord& c) {
    return {
        {"psi_star", c.psi_star},
        {"R_star", c.R_star},
        {"a_class", to_string(c.a_class)},
        {"local_type", {c.local_type[0], c.local_type[1]}},
        {"orientation", to_string(c.orientation)},
        {"symmetric", c.symmetric},
        {"xi3_value", c.xi3_value},
        {"xi3_relative", c.xi3_relative},
        {"d2R", c.d2R},
        {"d2R_fd", c.d2R_fd},
        {"dR_fd", c.dR_fd},
        {"near_bifurcation", c.near_bifurcation},
        {"tangency", c.tangency},
        {"xyz", {c.xyz[0], c.xyz[1], c.xyz[2]}},
    };
}

json surface_json(const RunConfig& cfg) {
    json s{{"family", cfg.family}, {"description", cfg.surface().describe()}};
    if (cfg.family == "ellipsoid") s.update({{"a", cfg.a}, {"b", cfg.b}, {"c", cfg.c}});
    if (cfg.family == "sectoral_harmonic") s.update({{"n", cfg.n}, {"epsilon", cfg.epsilon}});
    return s;
}

json base_json(const RunConfig& cfg) { return {{"theta", cfg.theta}, {"phi", cfg.phi}}; }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct Box {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    void add(double x, double y) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    bool empty() const { return xmin > xmax; }
};

using Polyline = std::vector<std::array<double, 2>>;

LocusOptions locus_options(const RunConfig& cfg) {
    LocusOptions o;
    o.n_psi = cfg.n_psi;
    o.integrator = cfg.integrator();
    o.threads = cfg.threads;
    return o;
}

RhoOptions rho_options(const RunConfig& cfg) {
    RhoOptions o;
    o.n_psi = cfg.n_psi;
    o.integrator = cfg.integrator();
    o.branch = cfg.rho_branch;
    o.threads = cfg.threads;
    return o;
}

// rho samples split into continuous runs; a jump starts a new run.
std::vector<std::vector<std::size_t>> rho_runs(const RhoContour& rho) {
    std::vector<std::vector<std::size_t>> runs;
    std::vector<std::size_t> cur;
    const std::size_t n = rho.psi_grid.size();
    auto joined = [&](std::size_t a, std::size_t b) {
        return rho.records[a] && rho.records[b] && std::abs(rho.records[a]->rho - rho.records[b]->rho) <= 0.5;
    };
    for (std::size_t k = 0; k < n; ++k) {
        if (!rho.records[k]) {
            if (!cur.empty()) runs.push_back(cur);
            cur.clear();
            continue;
        }
        if (!cur.empty() && !joined(cur.back(), k)) {
            runs.push_back(cur);
            cur.clear();
        }
        cur.push_back(k);
    }
    if (!cur.empty()) runs.push_back(cur);
    // Close up across psi = 2 pi.
    if (runs.size() > 1 && runs.front().front() == 0 && runs.back().back() == n - 1 && joined(n - 1, 0)) {
        runs.back().insert(runs.back().end(), runs.front().begin(), runs.front().end());
        runs.erase(runs.begin());
    } else if (runs.size() == 1 && runs[0].size() == n && joined(n - 1, 0)) {
        runs[0].push_back(0);
    }
    std::erase_if(runs, [](const auto& r) { return r.size() < 2; });
    return runs;
}

int run_locus(const RunConfig& cfg, std::ostream& log) {
    const SurfaceModel surface = cfg.surface();
    const ChartPoint p = cfg.base_point();
    const LocusCurve curve = sweep_R(surface, p, locus_options(cfg));

    std::ostringstream csv;
    csv << "psi,R,dxi1_R,xi2_R,xi3_R,x,y,z,proj_u,proj_v,polar_u,polar_v\n";
    double rmin = 1e300, rmax = -1e300;
    std::size_t rows = 0;
    for (const auto& r : curve.records) {
        if (!r) continue;
        ++rows;
        rmin = std::min(rmin, r->R);
        rmax = std::max(rmax, r->R);
        csv << fmt17(r->psi) << ',' << fmt17(r->R) << ',' << fmt17(r->dxi1_at_R) << ','
            << fmt17(r->xi2_at_R) << ',' << fmt17(r->xi3_at_R) << ',' << fmt17(r->point.xyz[0]) << ','
            << fmt17(r->point.xyz[1]) << ',' << fmt17(r->point.xyz[2]) << ','
            << fmt17(r->tangent_plane_uv[0]) << ',' << fmt17(r->tangent_plane_uv[1]) << ','
            << fmt17(r->polar_uv[0]) << ',' << fmt17(r->polar_uv[1]) << '\n';
    }
    write_file(cfg, "locus.csv", csv.str());

    json cusps = json::array();
    for (const auto& c : curve.cusps) cusps.push_back(cusp_json(c));
    write_file(cfg, "cusps.json", dump(cusps));
    json cands = json::array();
    for (const auto& c : curve.candidates) cands.push_back(cusp_json(c));

    json summary{
        {"mode", "locus"},
        {"surface", surface_json(cfg)},
        {"base", base_json(cfg)},
        {"n_psi", cfg.n_psi},
        {"rows", rows},
        {"cusp_count", curve.cusp_count()},
        {"candidates", cands},
        {"partial", curve.partial},
        {"degenerate", curve.degenerate},
        {"diameter", curve.diameter},
        {"R_min", rows ? rmin : 0.0},
        {"R_max", rows ? rmax : 0.0},
    };
    write_file(cfg, "summary.json", dump(summary));

    if (cfg.svg) {
        const ProjectionFrame frame = antipodal_frame(surface, p);
        Polyline pts;
        Box box;
        for (const auto& r : curve.records)
            if (r) {
                pts.push_back({r->tangent_plane_uv[0], r->tangent_plane_uv[1]});
                box.add(r->tangent_plane_uv[0], r->tangent_plane_uv[1]);
            }
        if (box.empty()) box.add(0, 0);
        SvgPlot svg(600, 600, box.xmin, box.xmax, box.ymin, box.ymax, true);
        svg.axes("u (antipodal tangent plane)", "v");
        if (curve.diameter < 1e-6) {
            // A locus collapsed to a point is drawn as that point.
            double u = 0, v = 0;
            for (const auto& q : pts) {
                u += q[0] / pts.size();
                v += q[1] / pts.size();
            }
            svg.marker(u, v, "#1f4fbf", 5.0, "point");
        } else {
            svg.polyline(pts, "#1f4fbf", 1.5, true);
            for (const auto& c : curve.cusps) {
                const Vec2 uv = frame.project(c.xyz);
                svg.marker(uv[0], uv[1], "#c0392b", 4.0, "cusp");
            }
        }
        svg.text(50, 30, surface.describe() + "  cusps: " + std::to_string(curve.cusp_count()));
        write_file(cfg, "locus.svg", svg.str());
    }
    log << "locus: " << rows << " directions, " << curve.cusp_count() << " cusps"
        << (curve.partial ? " (partial)" : "") << '\n';
    return curve.partial ? kPartial : kSuccess;
}

int run_contours(const RunConfig& cfg, std::ostream& log) {
    const SurfaceModel surface = cfg.surface();
    const ChartPoint p = cfg.base_point();
    LocusOptions lo = locus_options(cfg);
    const LocusCurve curve = sweep_R(surface, p, lo);
    const RhoOptions ro = rho_options(cfg);
    const RhoContour rho = sweep_rho(surface, p, ro);
    const auto hits = contour_intersections(surface, p, curve, rho, ro);

    std::ostringstream csv;
    csv << "psi,contour,s,polar_u,polar_v\n";
    for (const auto& r : curve.records)
        if (r) csv << fmt17(r->psi) << ",R," << fmt17(r->R) << ',' << fmt17(r->polar_uv[0]) << ','
                   << fmt17(r->polar_uv[1]) << '\n';
    for (const auto& r : rho.records)
        if (r) csv << fmt17(r->psi) << ",rho," << fmt17(r->rho) << ',' << fmt17(r->polar_uv[0]) << ','
                   << fmt17(r->polar_uv[1]) << '\n';
    write_file(cfg, "contours.csv", csv.str());

    json jh = json::array();
    for (const auto& h : hits) jh.push_back({{"psi", h.psi}, {"R", h.R}, {"rho", h.rho}});
    write_file(cfg, "intersections.json", dump(jh));

    const bool partial = curve.partial || rho.partial || rho.undefined;
    json summary{
        {"mode", "contours"},
        {"surface", surface_json(cfg)},
        {"base", base_json(cfg)},
        {"n_psi", cfg.n_psi},
        {"rho_branch", cfg.rho_branch == RhoBranch::first ? "first" : "nearest_conjugate"},
        {"cusp_count", curve.cusp_count()},
        {"intersection_count", hits.size()},
        {"rho_undefined", rho.undefined},
        {"partial", partial},
    };
    write_file(cfg, "summary.json", dump(summary));

    if (cfg.svg) {
        Box box;
        Polyline rp;
        for (const auto& r : curve.records)
            if (r) {
                rp.push_back({r->polar_uv[0], r->polar_uv[1]});
                box.add(r->polar_uv[0], r->polar_uv[1]);
            }
        std::vector<Polyline> rhos;
        if (!rho.undefined)
            for (const auto& run : rho_runs(rho)) {
                Polyline pl;
                for (std::size_t k : run) {
                    pl.push_back({rho.records[k]->polar_uv[0], rho.records[k]->polar_uv[1]});
                    box.add(pl.back()[0], pl.back()[1]);
                }
                rhos.push_back(pl);
            }
        if (box.empty()) box.add(0, 0);
        SvgPlot svg(600, 600, box.xmin, box.xmax, box.ymin, box.ymax, true);
        svg.axes("s cos(psi)", "s sin(psi)");
        svg.polyline(rp, "#1f4fbf", 1.5, true);
        for (const auto& pl : rhos) svg.polyline(pl, "#c0392b", 1.5);
        for (const auto& h : hits)
            svg.marker(h.R * std::cos(h.psi), h.R * std::sin(h.psi), "#000", 4.0, "intersection");
        svg.text(50, 30, "xi1=0 (blue), xi2=0 (red): " + std::to_string(hits.size()) + " intersections");
        write_file(cfg, "contours.svg", svg.str());
    }
    log << "contours: " << hits.size() << " intersections" << (partial ? " (partial)" : "") << '\n';
    return partial ? kPartial : kSuccess;
}

int run_path_scan(const RunConfig& cfg, std::ostream& log) {
    const SurfaceModel surface = cfg.surface();
    PathScanOptions o;
    o.t_begin = cfg.t_begin;
    o.t_end = cfg.t_end;
    o.n_samples = cfg.n_samples;
    o.periodic = std::abs(cfg.t_end - cfg.t_begin - kTwoPi) < 1e-9;
    o.integrator = cfg.integrator();
    o.threads = cfg.threads;

    std::vector<ScanDirection> dirs;
    if (cfg.direction != "backward") dirs.push_back(ScanDirection::forward);
    if (cfg.direction != "forward") dirs.push_back(ScanDirection::backward);
    std::vector<PathScanResult> results;
    for (auto d : dirs) results.push_back(path_scan(surface, cfg.path, d, o));

    std::ostringstream csv;
    csv << "t,theta,phi,direction,R,xi3_R\n";
    json zeros = json::array();
    bool partial = false, degenerate = false;
    for (const auto& r : results) {
        partial = partial || r.partial;
        degenerate = degenerate || r.degenerate;
        for (const auto& s : r.samples)
            csv << fmt17(s.t) << ',' << fmt17(s.theta) << ',' << fmt17(s.phi) << ',' << to_string(s.direction)
                << ',' << (s.R ? fmt17(*s.R) : "") << ',' << (s.xi3_at_R ? fmt17(*s.xi3_at_R) : "") << '\n';
        for (double t : r.zeros) {
            const Vec3 d = chart_direction(path_point(cfg.path, t));
            zeros.push_back({{"direction", to_string(r.direction)},
                             {"t", t},
                             {"theta", std::acos(std::clamp(d[2], -1.0, 1.0))},
                             {"phi", normalized({ChartId::standard, 0.0, std::atan2(d[1], d[0])}).u2}});
        }
    }
    write_file(cfg, "path_scan.csv", csv.str());
    write_file(cfg, "zeros.json", dump(zeros));
    json summary{
        {"mode", "path-scan"},
        {"surface", surface_json(cfg)},
        {"path", to_string(cfg.path)},
        {"direction", cfg.direction},
        {"n_samples", cfg.n_samples},
        {"zero_count", zeros.size()},
        {"degenerate", degenerate},
        {"partial", partial},
    };
    write_file(cfg, "summary.json", dump(summary));

    if (cfg.svg) {
        Box box;
        for (const auto& r : results)
            for (const auto& s : r.samples)
                if (s.xi3_at_R) box.add(s.t, *s.xi3_at_R);
        box.add(cfg.t_begin, 0.0);
        box.add(cfg.t_end, 0.0);
        SvgPlot svg(800, 400, box.xmin, box.xmax, box.ymin, box.ymax, false);
        svg.axes("t", "xi3(R)");
        const char* colors[] = {"#1f4fbf", "#c0392b"};
        for (std::size_t k = 0; k < results.size(); ++k) {
            Polyline pl;
            for (const auto& s : results[k].samples) {
                if (!s.xi3_at_R) {
                    svg.polyline(pl, colors[k]);
                    pl.clear();
                    continue;
                }
                pl.push_back({s.t, *s.xi3_at_R});
            }
            svg.polyline(pl, colors[k]);
            for (double t : results[k].zeros) svg.marker(t, 0.0, colors[k], 4.0, "zero");
        }
        svg.text(50, 30, surface.describe() + " " + to_string(cfg.path) + ": forward blue, backward red");
        write_file(cfg, "path_scan.svg", svg.str());
    }
    log << "path-scan: " << zeros.size() << " zeros" << (degenerate ? " (degenerate)" : "")
        << (partial ? " (partial)" : "") << '\n';
    return partial || degenerate ? kPartial : kSuccess;
}

int run_region_map(const RunConfig& cfg, std::ostream& log) {
    const SurfaceModel surface = cfg.surface();
    RegionMapOptions o;
    o.theta_min = cfg.theta_min;
    o.theta_max = cfg.theta_max;
    o.phi_min = cfg.phi_min;
    o.phi_max = cfg.phi_max;
    o.n_theta = cfg.n_theta;
    o.n_phi = cfg.n_phi;
    o.locus = locus_options(cfg);
    o.threads = cfg.threads;
    const RegionMap map = region_map(surface, o);

    std::ostringstream csv;
    csv << "theta,phi,cusp_count,boundary_flag\n";
    std::map<int, std::size_t> histogram;
    for (const auto& c : map.cells) {
        ++histogram[c.cusp_count];
        csv << fmt17(c.theta) << ',' << fmt17(c.phi) << ',' << c.cusp_count << ',' << (c.boundary ? 1 : 0) << '\n';
    }
    write_file(cfg, "region_map.csv", csv.str());

    json counts = json::object();
    for (const auto& [k, v] : histogram) counts[std::to_string(k)] = v;
    const bool partial = histogram.count(-1) > 0;
    json summary{
        {"mode", "region-map"},
        {"surface", surface_json(cfg)},
        {"n_theta", cfg.n_theta},
        {"n_phi", cfg.n_phi},
        {"n_psi", cfg.n_psi},
        {"counts", counts},
        {"partial", partial},
    };
    write_file(cfg, "summary.json", dump(summary));

    if (cfg.svg) {
        SvgPlot svg(900, 400, cfg.phi_min, cfg.phi_max, cfg.theta_min, cfg.theta_max, false);
        const double dth = (cfg.theta_max - cfg.theta_min) / cfg.n_theta;
        const double dph = (cfg.phi_max - cfg.phi_min) / cfg.n_phi;
        const char* palette[] = {"#f7f7f7", "#d9e7f5", "#9ecae1", "#4292c6", "#fdae6b", "#e6550d", "#a63603"};
        for (const auto& c : map.cells) {
            // theta grows downward, as in a map with the north pole on top
            const double y = cfg.theta_min + cfg.theta_max - c.theta;
            std::string fill = "#777";
            if (c.cusp_count >= 0) fill = palette[std::min<std::size_t>(c.cusp_count / 2, 6)];
            svg.rect(c.phi - dph / 2, y - dth / 2, c.phi + dph / 2, y + dth / 2, fill,
                     c.boundary ? "#000" : "none");
        }
        svg.axes("phi", "theta (north up)");
        std::string legend = "counts:";
        for (const auto& [k, v] : histogram) legend += " " + std::to_string(k) + "x" + std::to_string(v);
        svg.text(50, 30, legend);
        write_file(cfg, "region_map.svg", svg.str());
    }
    log << "region-map: " << map.cells.size() << " cells" << (partial ? " (some unknown)" : "") << '\n';
    return partial ? kPartial : kSuccess;
}

int run_beta(const RunConfig& cfg, std::ostream& log) {
    const SurfaceModel surface = cfg.surface();
    const ChartPoint p = cfg.base_point();
    const LocusCurve curve = sweep_R(surface, p, locus_options(cfg));
    const RhoContour rho = sweep_rho(surface, p, rho_options(cfg));
    const BetaCurve beta = beta_curve(surface, p, rho, curve);

    std::ostringstream csv;
    csv << "psi,x,y,z,proj_u,proj_v,drho,xi1\n";
    for (std::size_t k = 0; k < beta.psi.size(); ++k)
        csv << fmt17(beta.psi[k]) << ',' << fmt17(beta.xyz[k][0]) << ',' << fmt17(beta.xyz[k][1]) << ','
            << fmt17(beta.xyz[k][2]) << ',' << fmt17(beta.projected[k][0]) << ','
            << fmt17(beta.projected[k][1]) << ',' << fmt17(beta.drho[k]) << ',' << fmt17(beta.xi1[k]) << '\n';
    write_file(cfg, "beta.csv", csv.str());

    json loops = json::array();
    for (const auto& l : beta.loops)
        loops.push_back({{"psi_begin", l.psi_begin},
                         {"psi_end", l.psi_end},
                         {"cusp_indices", l.cusp_indices},
                         {"cusp_distance", l.cusp_distance},
                         {"branch_jumps", l.branch_jumps}});
    write_file(cfg, "loops.json", dump(loops));
    const bool partial = beta.undefined || rho.partial || curve.partial;
    json summary{
        {"mode", "beta"},
        {"surface", surface_json(cfg)},
        {"base", base_json(cfg)},
        {"n_psi", cfg.n_psi},
        {"undefined", beta.undefined},
        {"cusp_count", curve.cusp_count()},
        {"loop_count", beta.loops.size()},
        {"singularity_measure", beta.singularity_measure},
        {"singularity_psi", beta.singularity_psi},
        {"partial", partial},
    };
    write_file(cfg, "summary.json", dump(summary));

    if (cfg.svg) {
        Box box;
        Polyline lp;
        for (const auto& r : curve.records)
            if (r) {
                lp.push_back({r->tangent_plane_uv[0], r->tangent_plane_uv[1]});
                box.add(lp.back()[0], lp.back()[1]);
            }
        std::vector<Polyline> bs;
        if (!beta.undefined)
            for (const auto& run : rho_runs(rho)) {
                Polyline pl;
                const ProjectionFrame frame = antipodal_frame(surface, p);
                for (std::size_t k : run) {
                    const Vec2 uv = frame.project(rho.records[k]->point.xyz);
                    pl.push_back({uv[0], uv[1]});
                    box.add(uv[0], uv[1]);
                }
                bs.push_back(pl);
            }
        if (box.empty()) box.add(0, 0);
        SvgPlot svg(600, 600, box.xmin, box.xmax, box.ymin, box.ymax, true);
        svg.axes("u (antipodal tangent plane)", "v");
        svg.polyline(lp, "#1f4fbf", 1.5, true);
        for (const auto& pl : bs) svg.polyline(pl, "#c0392b", 1.2);
        const ProjectionFrame frame = antipodal_frame(surface, p);
        for (const auto& c : curve.cusps) {
            const Vec2 uv = frame.project(c.xyz);
            svg.marker(uv[0], uv[1], "#000", 4.0, "cusp");
        }
        svg.text(50, 30, "beta (red), conjugate locus (blue): " + std::to_string(beta.loops.size()) + " loops");
        write_file(cfg, "beta.svg", svg.str());
    }
    log << "beta: " << beta.loops.size() << " loops" << (beta.undefined ? " (undefined)" : "") << '\n';
    return partial ? kPartial : kSuccess;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& log) {
    switch (cfg.mode) {
        case Mode::locus: return run_locus(cfg, log);
        case Mode::contours: return run_contours(cfg, log);
        case Mode::path_scan: return run_path_scan(cfg, log);
        case Mode::region_map: return run_region_map(cfg, log);
        case Mode::beta: return run_beta(cfg, log);
    }
    return kConfigError;
}

}  // namespace conjloc::cli
