#include "conjloc/ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "conjloc/errors.hpp"

namespace conjloc {

namespace {

// Dormand-Prince 5(4) tableau and Hairer's continuous extension.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

constexpr std::size_t kGeodesicEnd = kXi1;
constexpr std::size_t kScalarEnd = kEta2;

struct Evaluation {
    StateVector dy{};
    double speed2 = 1.0;
};

Evaluation evaluate(const SurfaceModel& surface, ChartId chart, const StateVector& y,
                    bool tangential) {
    const ChartPoint pos{chart, y[kU1], y[kU2]};
    const LocalGeometry geom = local_geometry(surface, pos);
    const Vec2 v{y[kV1], y[kV2]};
    const auto& gam = geom.metric.christoffel;

    Evaluation out;
    auto& dy = out.dy;
    out.speed2 = geom.metric.dot(v, v);
    dy[kU1] = v[0];
    dy[kU2] = v[1];
    for (int c = 0; c < 2; ++c)
        dy[kV1 + c] = -(gam[c][0][0] * v[0] * v[0] + 2.0 * gam[c][0][1] * v[0] * v[1] +
                        gam[c][1][1] * v[1] * v[1]);

    const CurvatureSample k = contract(geom, v);
    const double x1 = y[kXi1], dx1 = y[kDXi1], x2 = y[kXi2], dx2 = y[kDXi2], x3 = y[kXi3];
    const double x1sq = x1 * x1;
    dy[kXi1] = dx1;
    dy[kDXi1] = -k.K * x1;
    dy[kXi2] = dx2;
    dy[kDXi2] = -k.K * x2 - k.K_N * x1sq;
    dy[kXi3] = y[kDXi3];
    dy[kDXi3] = -k.K * x3 - k.K_NN * x1sq * x1 - 2.0 * k.K * k.K * x1sq * x1 -
                3.0 * k.K_N * x1 * x2 + 3.0 * k.K_T * x1sq * dx1 + 6.0 * k.K * x1 * dx1 * dx1;
    if (tangential) {
        dy[kEta2] = y[kDEta2];
        dy[kDEta2] = 4.0 * k.K * x1 * dx1 + k.K_T * x1sq;
        dy[kEta3] = y[kDEta3];
        dy[kDEta3] = 6.0 * k.K * (dx1 * x2 + x1 * dx2) + 3.0 * k.K_T * x1 * x2 +
                     6.0 * k.K_N * x1sq * dx1 + k.K_TN * x1sq * x1;
    }
    return out;
}

struct StepResult {
    StateVector y1{};
    StateVector k7{};
    double speed2 = 1.0;
    double err = 0.0;
    std::array<StateVector, 5> rcont{};
};

StateVector combine(const StateVector& y, double h, std::initializer_list<std::pair<double, const StateVector*>> terms) {
    StateVector out = y;
    for (const auto& [coef, k] : terms)
        if (coef != 0.0)
            for (std::size_t i = 0; i < kStateSize; ++i) out[i] += h * coef * (*k)[i];
    return out;
}

StepResult dopri_step(const SurfaceModel& surface, ChartId chart, const StateVector& y,
                      const StateVector& k1, double h, const IntegratorOptions& opts) {
    const bool tan = opts.tangential;
    const auto k2 = evaluate(surface, chart, combine(y, h, {{a21, &k1}}), tan).dy;
    const auto k3 = evaluate(surface, chart, combine(y, h, {{a31, &k1}, {a32, &k2}}), tan).dy;
    const auto k4 =
        evaluate(surface, chart, combine(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}), tan).dy;
    const auto k5 = evaluate(surface, chart,
                             combine(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}), tan)
                        .dy;
    const auto k6 =
        evaluate(surface, chart,
                 combine(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}), tan)
            .dy;
    StepResult r;
    r.y1 = combine(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    const auto last = evaluate(surface, chart, r.y1, tan);
    r.k7 = last.dy;
    r.speed2 = last.speed2;

    const std::size_t n = tan ? kStateSize : kScalarEnd;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e =
            h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * r.k7[i]);
        const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(r.y1[i]));
        sum += (e / sc) * (e / sc);
    }
    r.err = std::sqrt(sum / static_cast<double>(n));

    for (std::size_t i = 0; i < kStateSize; ++i) {
        const double dy = r.y1[i] - y[i];
        const double bspl = h * k1[i] - dy;
        r.rcont[0][i] = y[i];
        r.rcont[1][i] = dy;
        r.rcont[2][i] = bspl;
        r.rcont[3][i] = dy - h * r.k7[i] - bspl;
        r.rcont[4][i] =
            h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * r.k7[i]);
    }
    return r;
}

bool sign_change(double a, double b) noexcept { return (a < 0.0) != (b < 0.0) && a != 0.0; }

StateVector switch_chart(const SurfaceModel& surface, const StateVector& y, ChartId& chart) {
    GeodesicState st = unpack(y, chart, 0.0);
    st = chart_switch(surface, st);
    chart = st.pos.chart;
    return pack(st);
}

}  // namespace

StateVector pack(const GeodesicState& s) noexcept {
    return {s.pos.u1, s.pos.u2, s.vel[0], s.vel[1], s.xi1, s.dxi1, s.xi2, s.dxi2,
            s.xi3,    s.dxi3,   s.eta2,   s.deta2,  s.eta3, s.deta3};
}

GeodesicState unpack(const StateVector& y, ChartId chart, double s) noexcept {
    GeodesicState st;
    st.pos = normalized({chart, y[kU1], y[kU2]});
    st.vel = {y[kV1], y[kV2]};
    st.s = s;
    st.xi1 = y[kXi1];
    st.dxi1 = y[kDXi1];
    st.xi2 = y[kXi2];
    st.dxi2 = y[kDXi2];
    st.xi3 = y[kXi3];
    st.dxi3 = y[kDXi3];
    st.eta2 = y[kEta2];
    st.deta2 = y[kDEta2];
    st.eta3 = y[kEta3];
    st.deta3 = y[kDEta3];
    return st;
}

StateVector DenseStep::interpolate(double s) const noexcept {
    const double theta = (s - s0) / h;
    const double theta1 = 1.0 - theta;
    StateVector out;
    for (std::size_t i = 0; i < kStateSize; ++i)
        out[i] = rcont[0][i] +
                 theta * (rcont[1][i] +
                          theta1 * (rcont[2][i] + theta * (rcont[3][i] + theta1 * rcont[4][i])));
    return out;
}

GeodesicState Trajectory::state_at(double s) const {
    if (steps.empty() || s >= final.s) return final;
    if (s <= steps.front().s0) return initial;
    auto it = std::upper_bound(steps.begin(), steps.end(), s,
                               [](double v, const DenseStep& st) { return v < st.s0; });
    const DenseStep& step = *std::prev(it);
    return unpack(step.interpolate(s), step.chart, s);
}

const Event* Trajectory::first_event(Event::Kind kind) const noexcept {
    for (const auto& e : events)
        if (e.kind == kind) return &e;
    return nullptr;
}

StateVector rhs(const SurfaceModel& surface, ChartId chart, const StateVector& y, bool tangential) {
    return evaluate(surface, chart, y, tangential).dy;
}

GeodesicState rhs(const SurfaceModel& surface, const GeodesicState& state) {
    const auto dy = rhs(surface, state.pos.chart, pack(state), true);
    GeodesicState d;
    d.pos = {state.pos.chart, dy[kU1], dy[kU2]};
    d.vel = {dy[kV1], dy[kV2]};
    d.s = 1.0;
    d.xi1 = dy[kXi1];
    d.dxi1 = dy[kDXi1];
    d.xi2 = dy[kXi2];
    d.dxi2 = dy[kDXi2];
    d.xi3 = dy[kXi3];
    d.dxi3 = dy[kDXi3];
    d.eta2 = dy[kEta2];
    d.deta2 = dy[kDEta2];
    d.eta3 = dy[kEta3];
    d.deta3 = dy[kDEta3];
    return d;
}

GeodesicState initial_state(const SurfaceModel& surface, const ChartPoint& p, double psi,
                            const IntegratorOptions& opts) {
    const auto g = fundamental_forms(surface, p);
    GeodesicState st;
    st.pos = normalized(p);
    st.vel = direction_from_angle(g, psi);
    st.s = 0.0;
    st.xi1 = 0.0;
    st.dxi1 = 1.0;
    st.xi2 = 0.0;
    st.dxi2 = opts.dxi2_initial;
    st.xi3 = 0.0;
    st.dxi3 = opts.dxi3_initial;
    st.eta2 = 0.0;
    st.deta2 = -1.0;
    st.eta3 = 0.0;
    st.deta3 = -3.0 * opts.dxi2_initial;
    return st;
}

Trajectory integrate(const SurfaceModel& surface, const ChartPoint& p, double psi,
                     const IntegratorOptions& opts) {
    auto traj = integrate_from(surface, initial_state(surface, p, psi, opts), opts);
    traj.psi = psi;
    return traj;
}

Trajectory integrate_from(const SurfaceModel& surface, const GeodesicState& start,
                          const IntegratorOptions& opts) {
    Trajectory traj;
    traj.options = opts;
    traj.initial = start;

    ChartId chart = start.pos.chart;
    StateVector y = pack(start);
    double s = start.s;
    if (pole_clearance(start.pos) < kChartSwitchThreshold) {
        y = switch_chart(surface, y, chart);
        ++traj.chart_switches;
    }
    auto first = evaluate(surface, chart, y, opts.tangential);
    StateVector k1 = first.dy;
    bool forced_done = !opts.forced_switch_at.has_value();

    double h = std::min(opts.initial_step, opts.s_max - s);
    std::size_t attempts = 0;
    bool stop = false;
    while (!stop && s < opts.s_max) {
        if (++attempts > opts.max_steps) {
            std::ostringstream os;
            os << "integration exceeded " << opts.max_steps << " steps at s = " << s;
            throw IntegrationError(os.str());
        }
        h = std::min(h, opts.s_max - s);
        if (h < 1e-12) {
            if (opts.s_max - s < 1e-12) break;
            std::ostringstream os;
            os << "step size underflow at s = " << s << " (chart u1 = " << y[kU1] << ")";
            throw IntegrationError(os.str());
        }
        StepResult r;
        try {
            r = dopri_step(surface, chart, y, k1, h, opts);
        } catch (const DomainError&) {
            h *= 0.5;
            continue;
        }
        if (!std::isfinite(r.err)) {
            h *= 0.25;
            continue;
        }
        if (r.err > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(r.err, -0.2));
            continue;
        }

        DenseStep step;
        step.s0 = s;
        step.h = h;
        step.chart = chart;
        step.y0 = y;
        step.k1 = k1;
        step.rcont = r.rcont;
        traj.steps.push_back(step);
        const std::size_t idx = traj.steps.size() - 1;

        const StateVector y_old = y;
        y = r.y1;
        s += h;
        k1 = r.k7;

        const double drift = std::abs(r.speed2 - 1.0);
        traj.max_speed_drift = std::max(traj.max_speed_drift, drift);
        if (drift > 1e-6) {
            std::ostringstream os;
            os << "unit-speed drift " << drift << " exceeds 1e-6 at s = " << s;
            throw IntegrationError(os.str());
        }

        if (s > opts.event_skip && sign_change(y_old[kXi1], y[kXi1])) {
            const bool first_xi1 = traj.first_event(Event::Kind::xi1_zero) == nullptr;
            traj.events.push_back({Event::Kind::xi1_zero, idx});
            if (first_xi1 && opts.stop == StopRule::after_first_xi1_zero) stop = true;
        }
        if (s > opts.event_skip && y_old[kXi2] * y[kXi2] < 0.0) {
            const bool first_xi2 = traj.first_event(Event::Kind::xi2_zero) == nullptr;
            traj.events.push_back({Event::Kind::xi2_zero, idx});
            if (first_xi2 && opts.stop == StopRule::after_first_xi2_zero) stop = true;
        }

        const double two_pi = 2.0 * std::numbers::pi;
        if (y[kU2] >= two_pi || y[kU2] < 0.0) y[kU2] = normalized({chart, 0.0, y[kU2]}).u2;

        const bool forced = !forced_done && s >= *opts.forced_switch_at;
        if (forced || pole_clearance({chart, y[kU1], y[kU2]}) < kChartSwitchThreshold) {
            if (forced) forced_done = true;
            y = switch_chart(surface, y, chart);
            k1 = evaluate(surface, chart, y, opts.tangential).dy;
            ++traj.chart_switches;
        }
        h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(r.err, 1e-10), -0.2)));
    }
    traj.final = unpack(y, chart, s);
    return traj;
}

GeodesicState refine_event(const SurfaceModel& surface, const Trajectory& traj, const Event& event) {
    const DenseStep& step = traj.steps.at(event.step);
    const std::size_t comp = event.kind == Event::Kind::xi1_zero ? kXi1 : kXi2;
    const std::size_t dcomp = comp + 1;

    auto f = [&](double s) { return step.interpolate(s)[comp]; };
    double lo = step.s0, hi = step.s0 + step.h;
    double flo = f(lo), fhi = f(hi);
    double root = lo;
    if (flo == 0.0) {
        root = lo;
    } else if (fhi == 0.0) {
        root = hi;
    } else {
        std::uintmax_t iters = 100;
        auto tol = [](double a, double b) { return std::abs(a - b) <= 1e-15 * std::max(1.0, std::abs(a)); };
        const auto bracket = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
        root = 0.5 * (bracket.first + bracket.second);
    }

    // Newton polish on a single full-accuracy step from the start of the bracketing step.
    auto state_at = [&](double s) {
        if (s == step.s0) return step.y0;
        return dopri_step(surface, step.chart, step.y0, step.k1, s - step.s0, traj.options).y1;
    };
    StateVector y = state_at(root);
    for (int it = 0; it < 4; ++it) {
        if (std::abs(y[comp]) < 1e-14 || y[dcomp] == 0.0) break;
        const double next = root - y[comp] / y[dcomp];
        if (std::abs(next - root) > step.h) break;
        root = next;
        y = state_at(root);
    }
    return unpack(y, step.chart, root);
}

ConjugateRecord first_conjugate(const SurfaceModel& surface, const Trajectory& traj) {
    const Event* ev = traj.first_event(Event::Kind::xi1_zero);
    if (ev == nullptr) {
        std::ostringstream os;
        os << "no conjugate point found before s = " << traj.s_end();
        throw NoConjugatePoint(os.str());
    }
    const GeodesicState st = refine_event(surface, traj, *ev);
    ConjugateRecord rec;
    rec.psi = traj.psi;
    rec.R = st.s;
    rec.dxi1_at_R = st.dxi1;
    rec.xi2_at_R = st.xi2;
    rec.dxi2_at_R = st.dxi2;
    rec.xi3_at_R = st.xi3;
    rec.point = embed(surface, st.pos);
    rec.polar_uv = {rec.R * std::cos(rec.psi), rec.R * std::sin(rec.psi)};
    rec.state = st;
    return rec;
}

ConjugateRecord conjugate_point(const SurfaceModel& surface, const ChartPoint& p, double psi,
                                IntegratorOptions opts) {
    opts.stop = StopRule::after_first_xi1_zero;
    return first_conjugate(surface, integrate(surface, p, psi, opts));
}

}  // namespace conjloc
