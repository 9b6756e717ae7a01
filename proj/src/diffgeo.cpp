#include "conjloc/diffgeo.hpp"

#include <algorithm>
#include <cmath>

#include "conjloc/errors.hpp"

namespace conjloc {

namespace {

using JetVec = std::array<Jet2, 3>;

// Second-order bivariate Taylor polynomial. Once the embedding jet has been
// differentiated twice only degrees <= 2 carry information, so the metric and
// curvature algebra runs in this smaller ring.
struct Taylor2 {
    // 1, u, v, u^2, uv, v^2 (Taylor coefficients, same layout as Jet2)
    std::array<double, 6> c{};

    static Taylor2 from(const Jet2& j) {
        Taylor2 t;
        for (std::size_t k = 0; k < 6; ++k) t.c[k] = j[k];
        return t;
    }
    double value() const { return c[0]; }
    Vec2 gradient() const { return {c[1], c[2]}; }
    // partial_a partial_b
    std::array<Vec2, 2> hessian() const { return {Vec2{2 * c[3], c[4]}, Vec2{c[4], 2 * c[5]}}; }

    friend Taylor2 operator+(Taylor2 a, const Taylor2& b) {
        for (std::size_t k = 0; k < 6; ++k) a.c[k] += b.c[k];
        return a;
    }
    friend Taylor2 operator-(Taylor2 a, const Taylor2& b) {
        for (std::size_t k = 0; k < 6; ++k) a.c[k] -= b.c[k];
        return a;
    }
    friend Taylor2 operator*(const Taylor2& a, const Taylor2& b) {
        const auto& x = a.c;
        const auto& y = b.c;
        return {{x[0] * y[0], x[0] * y[1] + x[1] * y[0], x[0] * y[2] + x[2] * y[0],
                 x[0] * y[3] + x[1] * y[1] + x[3] * y[0],
                 x[0] * y[4] + x[1] * y[2] + x[2] * y[1] + x[4] * y[0],
                 x[0] * y[5] + x[2] * y[2] + x[5] * y[0]}};
    }
    friend Taylor2 reciprocal(const Taylor2& a) {
        // 1/(a0 + h) = (1 - h/a0 + (h/a0)^2) / a0 with h of degree >= 1
        const double inv = 1.0 / a.c[0];
        Taylor2 h = a;
        h.c[0] = 0.0;
        for (auto& v : h.c) v *= inv;
        Taylor2 h2 = h * h;
        Taylor2 out;
        for (std::size_t k = 0; k < 6; ++k) out.c[k] = inv * (-h.c[k] + h2.c[k]);
        out.c[0] = inv;
        return out;
    }
};

using Vec3T = std::array<Taylor2, 3>;

Vec3T derivative(const JetVec& x, int k) {
    return {Taylor2::from(x[0].derivative(k)), Taylor2::from(x[1].derivative(k)),
            Taylor2::from(x[2].derivative(k))};
}

JetVec derivative_jet(const JetVec& x, int k) {
    return {x[0].derivative(k), x[1].derivative(k), x[2].derivative(k)};
}

Taylor2 dot(const Vec3T& a, const Vec3T& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3T cross(const Vec3T& a, const Vec3T& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace

std::array<Jet2, 3> jet_eval_embedding(const SurfaceModel& surface, const ChartPoint& p) {
    if (!std::isfinite(p.u1) || !std::isfinite(p.u2))
        throw DomainError("non-finite chart coordinates");
    if (pole_clearance(p) < kPoleThreshold)
        throw DomainError("chart point too close to a chart pole; switch to the other chart");
    return surface.embed_direction(chart_direction_jet(p));
}

LocalGeometry local_geometry(const SurfaceModel& surface, const ChartPoint& p) {
    const JetVec X = jet_eval_embedding(surface, p);
    const JetVec X1j = derivative_jet(X, 0), X2j = derivative_jet(X, 1);
    const Vec3T X1 = derivative(X, 0), X2 = derivative(X, 1);
    const Vec3T X11 = derivative(X1j, 0), X12 = derivative(X1j, 1), X22 = derivative(X2j, 1);

    const Taylor2 E = dot(X1, X1), F = dot(X1, X2), G = dot(X2, X2);
    const Taylor2 det = E * G - F * F;
    if (!(det.value() > 0.0)) throw GeometryError("degenerate metric (EG - F^2 <= 0)");

    // Unnormalized second fundamental form: l = X11 . (X1 x X2), etc.
    const Vec3T C = cross(X1, X2);
    const Taylor2 l = dot(X11, C), m = dot(X12, C), n = dot(X22, C);
    const Taylor2 inv_det = reciprocal(det);
    const Taylor2 K = (l * n - m * m) * inv_det * inv_det;

    LocalGeometry out;
    auto& g = out.metric;
    g.E = E.value();
    g.F = F.value();
    g.G = G.value();
    g.dE = E.gradient();
    g.dF = F.gradient();
    g.dG = G.gradient();

    // Gamma^c_ab = 1/2 g^cd (d_a g_db + d_b g_da - d_d g_ab)
    const double idet = 1.0 / det.value();
    const double ginv[2][2] = {{g.G * idet, -g.F * idet}, {-g.F * idet, g.E * idet}};
    // dg[d][a][b] = partial_d g_ab
    double dg[2][2][2];
    for (int d = 0; d < 2; ++d) {
        dg[d][0][0] = g.dE[d];
        dg[d][0][1] = dg[d][1][0] = g.dF[d];
        dg[d][1][1] = g.dG[d];
    }
    for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double sum = 0.0;
                for (int d = 0; d < 2; ++d)
                    sum += ginv[c][d] * (dg[a][d][b] + dg[b][d][a] - dg[d][a][b]);
                g.christoffel[c][a][b] = 0.5 * sum;
            }

    const double area = std::sqrt(det.value());
    out.L = l.value() / area;
    out.M = m.value() / area;
    out.N = n.value() / area;
    out.K = K.value();
    out.dK = K.gradient();
    out.ddK = K.hessian();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            out.hessK[a][b] = out.ddK[a][b] - g.christoffel[0][a][b] * out.dK[0] -
                              g.christoffel[1][a][b] * out.dK[1];
    out.xyz = {X[0].value(), X[1].value(), X[2].value()};
    out.tangents = {Vec3{X1[0].value(), X1[1].value(), X1[2].value()},
                    Vec3{X2[0].value(), X2[1].value(), X2[2].value()}};
    return out;
}

FirstFundamental fundamental_forms(const SurfaceModel& surface, const ChartPoint& p) {
    return local_geometry(surface, p).metric;
}

Vec2 rotate_to_normal(const FirstFundamental& g, const Vec2& T) {
    if (T[0] == 0.0 && T[1] == 0.0) throw PreconditionError("rotate_to_normal: zero tangent");
    const double inv_area = 1.0 / std::sqrt(g.det());
    return {-(g.F * T[0] + g.G * T[1]) * inv_area, (g.E * T[0] + g.F * T[1]) * inv_area};
}

Vec2 rotate_to_normal(const SurfaceModel& surface, const ChartPoint& p, const Vec2& T) {
    return rotate_to_normal(fundamental_forms(surface, p), T);
}

CurvatureSample contract(const LocalGeometry& geom, const Vec2& T_in) noexcept {
    const auto& g = geom.metric;
    const double scale = 1.0 / std::sqrt(g.dot(T_in, T_in));
    const Vec2 T{T_in[0] * scale, T_in[1] * scale};
    const double inv_area = 1.0 / std::sqrt(g.det());
    const Vec2 N{-(g.F * T[0] + g.G * T[1]) * inv_area, (g.E * T[0] + g.F * T[1]) * inv_area};

    auto hess = [&](const Vec2& x, const Vec2& y) {
        double sum = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) sum += geom.hessK[a][b] * x[a] * y[b];
        return sum;
    };
    CurvatureSample out;
    out.K = geom.K;
    out.K_T = geom.dK[0] * T[0] + geom.dK[1] * T[1];
    out.K_N = geom.dK[0] * N[0] + geom.dK[1] * N[1];
    out.K_TN = hess(T, N);
    out.K_NN = hess(N, N);
    return out;
}

CurvatureSample curvature_sample(const SurfaceModel& surface, const ChartPoint& p, const Vec2& T) {
    const auto geom = local_geometry(surface, p);
    if (std::abs(geom.metric.dot(T, T) - 1.0) > 1e-8)
        throw PreconditionError("curvature_sample: tangent is not metric-unit");
    return contract(geom, T);
}

std::array<double, 2> principal_curvatures(const LocalGeometry& geom) noexcept {
    const auto& g = geom.metric;
    const double H = (g.E * geom.N - 2.0 * g.F * geom.M + g.G * geom.L) / (2.0 * g.det());
    const double disc = std::sqrt(std::max(0.0, H * H - geom.K));
    return {H - disc, H + disc};
}

std::array<Vec2, 2> reference_frame(const FirstFundamental& g) {
    const Vec2 e1{0.0, 1.0 / std::sqrt(g.G)};
    return {e1, rotate_to_normal(g, e1)};
}

Vec2 direction_from_angle(const FirstFundamental& g, double psi) {
    const auto [e1, e2] = reference_frame(g);
    const double c = std::cos(psi), s = std::sin(psi);
    return {c * e1[0] + s * e2[0], c * e1[1] + s * e2[1]};
}

double angle_of_direction(const FirstFundamental& g, const Vec2& T) {
    const auto [e1, e2] = reference_frame(g);
    return std::atan2(g.dot(T, e2), g.dot(T, e1));
}

}  // namespace conjloc
