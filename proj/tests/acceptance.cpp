// Acceptance runs at full size. One PASS/FAIL line per criterion; exit status 1 if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "conjloc/locus.hpp"
#include "conjloc/scan.hpp"
#include "draws.hpp"
#include "tensor_oracle.hpp"

using namespace conjloc;

namespace {

constexpr double kPi = std::numbers::pi;
int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("criterion %2d %s  %s: %s\n", id, pass ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

IntegratorOptions tol(double t) {
    IntegratorOptions o;
    o.atol = o.rtol = t;
    return o;
}

void sphere_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    LocusOptions o;
    o.n_psi = 256;
    o.integrator = tol(1e-10);
    o.threads = 1;
    const auto c = sweep_R(SurfaceModel::sphere(), {ChartId::standard, 1.2, 0.4}, o);
    const double secs = seconds_since(t0);
    double err = 0.0;
    bool complete = !c.partial;
    for (const auto& r : c.records) {
        if (!r) complete = false;
        else err = std::max(err, std::abs(r->R - kPi));
    }
    const bool pass = complete && err < 1e-6 && c.diameter < 1e-6 && c.cusps.empty() && secs < 10.0;
    report(1, "sphere oracle", pass,
           fmt("max|R-pi|=%.2e diameter=%.2e cusps=%zu time=%.2fs", err, c.diameter, c.cusps.size(), secs));
}

void ellipsoid_counts() {
    const auto s = SurfaceModel::ellipsoid(1.05, 1.0, 0.95);
    const ChartPoint pts[] = {{ChartId::standard, 1.2, 0.4},
                              {ChartId::standard, 0.5, 2.0},
                              {ChartId::standard, 2.2, 4.0},
                              {ChartId::standard, 1.0, 5.3},
                              {ChartId::standard, 1.8, 2.9}};
    bool pass = true;
    std::string detail;
    double worst = 0.0;
    for (const auto& p : pts) {
        const auto t0 = std::chrono::steady_clock::now();
        LocusOptions o;
        const auto c = sweep_R(s, p, o);
        const double secs = seconds_since(t0);
        worst = std::max(worst, secs);
        bool ok = c.cusps.size() == 4 && !c.partial && secs < 60.0;
        for (const auto& k : c.cusps) ok = ok && k.a_class == AClass::A1 && k.local_type == std::array<int, 2>{2, 3};
        pass = pass && ok;
        detail += fmt("(%.1f,%.1f):%zu%s ", p.u1, p.u2, c.cusps.size(), ok ? "" : "!");
    }
    report(2, "ellipsoid cusp count", pass, detail + fmt("all A1 (2,3); slowest %.2fs", worst));
}

void umbilic() {
    const double a = 1.05, b = 1.0, c = 0.95;
    const auto s = SurfaceModel::ellipsoid(a, b, c);
    // Polar angle of the umbilic direction on the y = 0 section.
    const double t_u = std::asin(std::sqrt((a * a - b * b) / (a * a - c * c)));
    PathScanOptions o;
    o.t_begin = 0.3;
    o.t_end = 1.3;
    o.n_samples = 41;
    o.periodic = false;
    bool pass = true;
    std::string detail;
    for (auto dir : {ScanDirection::forward, ScanDirection::backward}) {
        const auto r = path_scan(s, PathKind::meridian, dir, o);
        int changes = 0;
        for (std::size_t k = 1; k < r.samples.size(); ++k)
            if (*r.samples[k - 1].xi3_at_R * *r.samples[k].xi3_at_R < 0) ++changes;
        const double err = r.zeros.size() == 1 ? std::abs(r.zeros[0] - t_u) : 1.0;
        pass = pass && changes == 1 && r.zeros.size() == 1 && err < 1e-4 && !r.partial;
        detail += fmt("%s: %d sign change, |t*-t_u|=%.1e; ", to_string(dir), changes, err);
    }
    const auto locus = sweep_R(s, path_point(PathKind::meridian, t_u), {});
    pass = pass && locus.diameter < 1e-3;
    report(3, "umbilic degeneration", pass, detail + fmt("diameter at umbilic %.1e", locus.diameter));
}

void region_structure() {
    const auto t0 = std::chrono::steady_clock::now();
    RegionMapOptions o;  // theta in [pi/2 - 0.5, pi/2 + 0.5], full phi, 24 x 96
    o.locus.n_psi = 64;
    o.threads = 8;
    o.locus.threads = 1;
    const auto m = region_map(SurfaceModel::sectoral_harmonic(3, 0.1), o);
    const double secs = seconds_since(t0);

    std::set<int> seen;
    for (const auto& c : m.cells) seen.insert(c.cusp_count);
    const bool members = std::all_of(seen.begin(), seen.end(), [](int k) { return k == 6 || k == 8; });

    // Period 2 pi / 3 is exactly 32 columns; a mismatch is tolerated only on boundary cells.
    std::size_t mismatches = 0, hard = 0;
    for (std::size_t i = 0; i < m.n_theta; ++i)
        for (std::size_t j = 0; j < m.n_phi; ++j) {
            const auto& x = m.at(i, j);
            const auto& y = m.at(i, (j + m.n_phi / 3) % m.n_phi);
            if (x.cusp_count != y.cusp_count) {
                ++mismatches;
                if (!x.boundary || !y.boundary) ++hard;
            }
        }

    // Connected 8-regions, periodic in phi; each must cover both hemispheres.
    std::vector<int> label(m.cells.size(), -1);
    int regions = 0;
    bool straddle = true;
    for (std::size_t start = 0; start < m.cells.size(); ++start) {
        if (label[start] >= 0 || m.cells[start].cusp_count != 8) continue;
        bool north = false, south = false;
        std::vector<std::size_t> stack{start};
        label[start] = regions;
        while (!stack.empty()) {
            const std::size_t k = stack.back();
            stack.pop_back();
            const std::size_t i = k / m.n_phi, j = k % m.n_phi;
            (m.cells[k].theta < kPi / 2 ? north : south) = true;
            const std::size_t nb[4] = {i > 0 ? k - m.n_phi : k, i + 1 < m.n_theta ? k + m.n_phi : k,
                                       i * m.n_phi + (j + 1) % m.n_phi, i * m.n_phi + (j + m.n_phi - 1) % m.n_phi};
            for (std::size_t q : nb)
                if (label[q] < 0 && m.cells[q].cusp_count == 8) {
                    label[q] = regions;
                    stack.push_back(q);
                }
        }
        straddle = straddle && north && south;
        ++regions;
    }
    std::string counts;
    for (int k : seen) counts += std::to_string(k) + " ";
    const bool pass = members && hard == 0 && straddle && regions > 0 && secs < 1800.0;
    report(4, "sectoral harmonic region structure", pass,
           fmt("counts {%s} 8-regions=%d straddling=%s period mismatches=%zu (off-boundary %zu) time=%.0fs",
               counts.c_str(), regions, straddle ? "yes" : "no", mismatches, hard, secs));
}

std::vector<double> scan_zeros(ScanDirection dir) {
    PathScanOptions o;
    o.n_samples = 96;
    return path_scan(SurfaceModel::sectoral_harmonic(3, 0.1), PathKind::equator, dir, o).zeros;
}

double cyclic_gap(double a, double b) { return std::abs(std::remainder(a - b, 2 * kPi)); }

double nearest(const std::vector<double>& set, double x) {
    double best = 1e9;
    for (double y : set) best = std::min(best, cyclic_gap(x, y));
    return best;
}

void equatorial_scan() {
    const auto fw = scan_zeros(ScanDirection::forward);
    const auto bw = scan_zeros(ScanDirection::backward);
    double shift_err = 0.0, apart = 1e9;
    for (const auto* z : {&fw, &bw})
        for (double t : *z) shift_err = std::max(shift_err, nearest(*z, t + 2 * kPi / 3));
    for (double t : fw) apart = std::min(apart, nearest(bw, t));
    const bool pass = !fw.empty() && !bw.empty() && fw.size() < 96 && bw.size() < 96 && apart > 1e-3 &&
                      shift_err < 1e-3;
    std::string zs;
    for (double t : fw) zs += fmt("%.4f ", t);
    report(5, "equatorial scan structure", pass,
           fmt("forward %zu zeros [%s] backward %zu zeros; min gap between sets %.3f; max shift error %.1e",
               fw.size(), zs.c_str(), bw.size(), apart, shift_err));
}

void tangential() {
    double e2 = 0.0, e3 = 0.0;
    for (const auto& d : testing::random_draws(20, 2024)) {
        auto o = tol(1e-10);
        o.tangential = true;
        o.stop = StopRule::after_first_xi1_zero;
        const auto traj = integrate(d.surface, d.p, d.psi, o);
        const double R = first_conjugate(d.surface, traj).R;
        for (int k = 0; k <= 1000; ++k) {
            const auto st = traj.state_at(R * k / 1000.0);
            e2 = std::max(e2, std::abs(st.eta2 + st.xi1 * st.dxi1));
            e3 = std::max(e3, std::abs(st.eta3 + st.xi1 * st.dxi2 + 2 * st.dxi1 * st.xi2));
        }
    }
    report(6, "exact tangential solutions", e2 < 1e-7 && e3 < 1e-6,
           fmt("20 draws: max|eta2 + xi1 xi1'|=%.1e max|eta3 + xi1 xi2' + 2 xi1' xi2|=%.1e", e2, e3));
}

void gauge() {
    double d2 = 0.0, d3 = 0.0, cross = 0.0;
    for (const auto& d : testing::random_draws(10, 77)) {
        LocusOptions lo;
        lo.n_psi = 64;
        lo.refine = false;
        const auto curve = sweep_R(d.surface, d.p, lo);
        // Degenerate curves (sphere) have zero scale; fall back to an absolute measure.
        const double s2 = std::max(curve.xi2_scale, 1e-3), s3 = std::max(curve.xi3_scale, 1e-3);
        const auto base = conjugate_point(d.surface, d.p, d.psi, tol(1e-11));
        for (double c : {-1.0, 0.0, 2.0}) {
            auto o = tol(1e-11);
            o.dxi2_initial = c;
            const auto r2 = conjugate_point(d.surface, d.p, d.psi, o);
            d2 = std::max(d2, std::abs(r2.xi2_at_R - base.xi2_at_R) / s2);
            cross = std::max(cross, std::abs(r2.xi3_at_R - base.xi3_at_R - 3 * c * base.xi2_at_R) / s3);
            o = tol(1e-11);
            o.dxi3_initial = -1.0 + c;
            const auto r3 = conjugate_point(d.surface, d.p, d.psi, o);
            d3 = std::max(d3, std::abs(r3.xi3_at_R - base.xi3_at_R) / s3);
            d2 = std::max(d2, std::abs(r3.xi2_at_R - base.xi2_at_R) / s2);
        }
    }
    report(7, "gauge invariance", d2 < 1e-8 && d3 < 1e-8,
           fmt("10 draws, shifts {-1,0,2}: rel. change xi2(R)=%.1e xi3(R) under xi3' shift=%.1e "
               "(xi2' shift moves xi3(R) by 3c xi2(R); residual %.1e)",
               d2, d3, cross));
}

void oracle() {
    double dev = 0.0;
    for (const auto& d : testing::random_draws(10, 99)) {
        auto o = tol(1e-11);
        o.tangential = true;
        o.stop = StopRule::after_first_xi1_zero;
        const auto traj = integrate(d.surface, d.p, d.psi, o);
        const double R = first_conjugate(d.surface, traj).R;
        std::vector<double> ss;
        for (int k = 1; k <= 16; ++k) ss.push_back(R * k / 16.0);
        for (const auto& r : testing::tensor_jacobi2_oracle(d.surface, d.p, d.psi, ss)) {
            const auto st = traj.state_at(r.s);
            dev = std::max({dev, std::abs(r.xi1 - st.xi1), std::abs(r.eta1), std::abs(r.xi2 - st.xi2),
                            std::abs(r.eta2 - st.eta2)});
        }
    }
    report(8, "oracle equivalence", dev < 1e-6, fmt("10 draws: max deviation of (xi1, eta1, xi2, eta2) %.1e", dev));
}

const CuspRecord* symmetric_cusp_near(const LocusCurve& c, double psi) {
    const CuspRecord* best = nullptr;
    for (const auto& k : c.cusps)
        if (k.symmetric && cyclic_gap(k.psi_star, psi) < 1e-6) best = &k;
    return best;
}

void classification() {
    const auto s = SurfaceModel::sectoral_harmonic(3, 0.1);
    BifurcationOptions bo;
    bo.locus.n_psi = 64;

    // Cusp bifurcation on the equator.
    const ChartPoint a = path_point(PathKind::equator, 0.2), b = path_point(PathKind::equator, 0.4);
    const auto eq = bifurcation_locate(s, a, b, bo);
    bool cusp_ok = eq.kind == BifurcationKind::count_change && eq.candidate && eq.candidate->symmetric &&
                   eq.candidate->a_class == AClass::A3;
    std::string seq = "?";
    double scan_gap = 1.0;
    if (eq.candidate) {
        const double psi = eq.candidate->psi_star;
        LocusOptions lo;
        lo.n_psi = 64;
        const auto ca = sweep_R(s, a, lo), cb = sweep_R(s, b, lo);
        const CuspRecord* ka = symmetric_cusp_near(ca, psi);
        const CuspRecord* kb = symmetric_cusp_near(cb, psi);
        cusp_ok = cusp_ok && ka && kb && ka->a_class == AClass::A1 && kb->a_class == AClass::A1 &&
                  ka->xi3_value * kb->xi3_value < 0;
        if (ka && kb)
            seq = fmt("%s(xi3=%+.1e) -> %s(rel %.1e) -> %s(xi3=%+.1e)", to_string(ka->a_class), ka->xi3_value,
                      to_string(eq.candidate->a_class), eq.candidate->xi3_relative, to_string(kb->a_class),
                      kb->xi3_value);
        // The same boundary seen by the equatorial path scan.
        std::vector<double> zeros = scan_zeros(ScanDirection::forward);
        for (double z : scan_zeros(ScanDirection::backward)) zeros.push_back(z);
        scan_gap = nearest(zeros, eq.point.u2);
    }
    const double bracket = std::abs(eq.hi.u2 - eq.lo.u2);
    cusp_ok = cusp_ok && scan_gap <= std::max(bracket, 1e-6);

    // Arc bifurcation off the symmetry lines.
    const ChartPoint c{ChartId::standard, 1.3, 0.708}, d{ChartId::standard, 1.3, 1.057};
    const auto arc = bifurcation_locate(s, c, d, bo);
    const bool arc_ok = arc.kind == BifurcationKind::count_change && std::abs(arc.count_hi - arc.count_lo) == 2 &&
                        arc.candidate && !arc.candidate->symmetric && arc.candidate->a_class == AClass::A2;

    report(9, "classification sequences", cusp_ok && arc_ok,
           fmt("equator phi*=%.7f counts %d->%d: %s, scan zero within %.1e; "
               "off-symmetry (1.3, %.7f) counts %d->%d: candidate %s rel %.1e",
               eq.point.u2, eq.count_lo, eq.count_hi, seq.c_str(), scan_gap, arc.point.u2, arc.count_lo,
               arc.count_hi, arc.candidate ? to_string(arc.candidate->a_class) : "none",
               arc.candidate ? arc.candidate->xi3_relative : 0.0));
}

void beta_loops() {
    const auto s = SurfaceModel::ellipsoid(1.05, 1.0, 0.95);
    const ChartPoint p{ChartId::standard, 1.2, 0.4};
    const auto locus = sweep_R(s, p, {});
    RhoOptions ro;
    ro.branch = RhoBranch::nearest_conjugate;
    const auto beta = beta_curve(s, p, sweep_rho(s, p, ro), locus);
    double worst = 0.0;
    for (const auto& l : beta.loops) worst = std::max(worst, l.cusp_distance);
    const bool pass = beta.loops.size() == 4 && locus.cusps.size() == 4 && worst < 1e-3;
    report(10, "beta-curve loops", pass,
           fmt("loops=%zu cusps=%zu max cusp distance %.1e", beta.loops.size(), locus.cusps.size(), worst));
}

}  // namespace

// Optional arguments select criteria by number; no arguments runs all of them.
int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    const std::vector<std::function<void()>> runs{sphere_oracle, ellipsoid_counts, umbilic,  region_structure,
                                                  equatorial_scan, tangential,      gauge,    oracle,
                                                  classification,  beta_loops};
    for (std::size_t k = 0; k < runs.size(); ++k) {
        if (!only.empty() && !only.count(static_cast<int>(k + 1))) continue;
        try {
            runs[k]();
        } catch (const std::exception& e) {
            report(static_cast<int>(k + 1), "(exception)", false, e.what());
        }
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
