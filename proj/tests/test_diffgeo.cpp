#include <cmath>
#include <numbers>

#include <doctest.h>

#include "conjloc/diffgeo.hpp"
#include "conjloc/errors.hpp"
#include "draws.hpp"

using namespace conjloc;

namespace {

// Finite-difference geometry straight from the embedding, no jets involved.
struct FdGeometry {
    const SurfaceModel& s;
    ChartId chart;
    double h = 1e-4;

    Vec3 X(double u, double v) const { return embed(s, {chart, u, v}).xyz; }
    Vec3 Xu(double u, double v) const { return (1.0 / (2 * h)) * (X(u + h, v) - X(u - h, v)); }
    Vec3 Xv(double u, double v) const { return (1.0 / (2 * h)) * (X(u, v + h) - X(u, v - h)); }

    std::array<double, 3> metric(double u, double v) const {
        const Vec3 a = Xu(u, v), b = Xv(u, v);
        return {dot(a, a), dot(a, b), dot(b, b)};
    }

    double gauss(double u, double v) const {
        const Vec3 a = Xu(u, v), b = Xv(u, v);
        Vec3 n = cross(a, b);
        n = (1.0 / norm(n)) * n;
        const double H = 1e-3;  // coarser step for second differences
        auto P = [&](double du, double dv) { return X(u + du, v + dv); };
        const Vec3 Xuu = (1.0 / (H * H)) * (P(H, 0) - 2.0 * P(0, 0) + P(-H, 0));
        const Vec3 Xvv = (1.0 / (H * H)) * (P(0, H) - 2.0 * P(0, 0) + P(0, -H));
        const Vec3 Xuv = (1.0 / (4 * H * H)) * (P(H, H) - P(H, -H) - P(-H, H) + P(-H, -H));
        const double L = dot(Xuu, n), M = dot(Xuv, n), N = dot(Xvv, n);
        const double E = dot(a, a), F = dot(a, b), G = dot(b, b);
        return (L * N - M * M) / (E * G - F * F);
    }
};

double ellipsoid_K(const SurfaceModel& s, const Vec3& x) {
    const double a = s.a(), b = s.b(), c = s.c();
    const double q = x[0] * x[0] / std::pow(a, 4) + x[1] * x[1] / std::pow(b, 4) + x[2] * x[2] / std::pow(c, 4);
    return 1.0 / (a * a * b * b * c * c * q * q);
}

}  // namespace

TEST_CASE("sphere metric, connection and curvature") {
    const auto s = SurfaceModel::sphere();
    const double th = 1.1;
    const auto g = local_geometry(s, {ChartId::standard, th, 0.3});
    CHECK(g.metric.E == doctest::Approx(1.0));
    CHECK(g.metric.F == doctest::Approx(0.0).scale(1.0));
    CHECK(g.metric.G == doctest::Approx(std::sin(th) * std::sin(th)));
    CHECK(g.metric.christoffel[0][1][1] == doctest::Approx(-std::sin(th) * std::cos(th)));
    CHECK(g.metric.christoffel[1][0][1] == doctest::Approx(std::cos(th) / std::sin(th)));
    CHECK(g.K == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(g.dK[0]) + std::abs(g.dK[1]) < 1e-12);
}

TEST_CASE("ellipsoid Gauss curvature matches the closed form") {
    const auto s = SurfaceModel::ellipsoid(1.05, 1.0, 0.95);
    for (auto chart : {ChartId::standard, ChartId::rotated})
        for (double th : {0.5, 1.2, 2.3})
            for (double ph : {0.0, 1.0, 4.0}) {
                const ChartPoint p{chart, th, ph};
                const auto g = local_geometry(s, p);
                CHECK(g.K == doctest::Approx(ellipsoid_K(s, g.xyz)).epsilon(1e-12));
            }
}

TEST_CASE("metric, Christoffel symbols and K against finite differences of the embedding") {
    for (const auto& d : testing::random_draws(12, 7)) {
        CAPTURE(d.label);
        const FdGeometry fd{d.surface, d.p.chart};
        const double u = d.p.u1, v = d.p.u2, h = 1e-4;
        const auto geom = local_geometry(d.surface, d.p);
        const auto m = fd.metric(u, v);
        CHECK(geom.metric.E == doctest::Approx(m[0]).epsilon(1e-7));
        CHECK(geom.metric.F == doctest::Approx(m[1]).epsilon(1e-7).scale(1.0));
        CHECK(geom.metric.G == doctest::Approx(m[2]).epsilon(1e-7));

        // Gamma^c_ab = 1/2 g^cd (d_a g_db + d_b g_da - d_d g_ab)
        const auto mu = [&](double du, double dv) { return fd.metric(u + du, v + dv); };
        const auto p1 = mu(h, 0), m1 = mu(-h, 0), p2 = mu(0, h), m2 = mu(0, -h);
        double dg[2][2][2];  // dg[k][a][b] = d_k g_ab
        for (int k = 0; k < 2; ++k) {
            const auto& P = k == 0 ? p1 : p2;
            const auto& M = k == 0 ? m1 : m2;
            dg[k][0][0] = (P[0] - M[0]) / (2 * h);
            dg[k][0][1] = dg[k][1][0] = (P[1] - M[1]) / (2 * h);
            dg[k][1][1] = (P[2] - M[2]) / (2 * h);
        }
        const double det = m[0] * m[2] - m[1] * m[1];
        const double inv[2][2] = {{m[2] / det, -m[1] / det}, {-m[1] / det, m[0] / det}};
        for (int c = 0; c < 2; ++c)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    double expect = 0.0;
                    for (int e = 0; e < 2; ++e)
                        expect += 0.5 * inv[c][e] * (dg[a][e][b] + dg[b][e][a] - dg[e][a][b]);
                    CHECK(geom.metric.christoffel[c][a][b] == doctest::Approx(expect).epsilon(1e-5).scale(1.0));
                }

        CHECK(geom.K == doctest::Approx(fd.gauss(u, v)).epsilon(1e-4));
    }
}

TEST_CASE("derivatives of K against central differences of K") {
    for (const auto& d : testing::random_draws(12, 11)) {
        CAPTURE(d.label);
        const double h = 1e-4;
        auto at = [&](double du, double dv) { return local_geometry(d.surface, {d.p.chart, d.p.u1 + du, d.p.u2 + dv}); };
        const auto g0 = at(0, 0);
        const auto gp1 = at(h, 0), gm1 = at(-h, 0), gp2 = at(0, h), gm2 = at(0, -h);
        CHECK(g0.dK[0] == doctest::Approx((gp1.K - gm1.K) / (2 * h)).epsilon(1e-6).scale(1.0));
        CHECK(g0.dK[1] == doctest::Approx((gp2.K - gm2.K) / (2 * h)).epsilon(1e-6).scale(1.0));
        for (int a = 0; a < 2; ++a) {
            CHECK(g0.ddK[a][0] == doctest::Approx((gp1.dK[a] - gm1.dK[a]) / (2 * h)).epsilon(1e-6).scale(1.0));
            CHECK(g0.ddK[a][1] == doctest::Approx((gp2.dK[a] - gm2.dK[a]) / (2 * h)).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("K is the same in both charts") {
    for (const auto& d : testing::random_draws(9, 3)) {
        const ChartPoint q = to_other_chart(d.p);
        if (pole_clearance(q) < kPoleThreshold) continue;
        const auto a = local_geometry(d.surface, d.p), b = local_geometry(d.surface, q);
        CHECK(a.K == doctest::Approx(b.K).epsilon(1e-11));
        CHECK(distance(a.xyz, b.xyz) < 1e-12);
        // d_a K transforms as a covector: contraction with a transferred vector is invariant.
        const Vec2 v{0.3, -0.7};
        const Vec2 w = transfer_vector(d.p, v, q);
        CHECK(a.dK[0] * v[0] + a.dK[1] * v[1] == doctest::Approx(b.dK[0] * w[0] + b.dK[1] * w[1]).scale(1.0));
    }
}

TEST_CASE("frame contraction: K_T is the directional derivative along T") {
    for (const auto& d : testing::random_draws(9, 5)) {
        const auto g = fundamental_forms(d.surface, d.p);
        const Vec2 T = direction_from_angle(g, d.psi);
        const auto cs = curvature_sample(d.surface, d.p, T);
        const Vec2 N = rotate_to_normal(g, T);
        const double h = 1e-5;
        auto K_at = [&](const Vec2& dir, double t) {
            return local_geometry(d.surface, {d.p.chart, d.p.u1 + t * dir[0], d.p.u2 + t * dir[1]}).K;
        };
        CHECK(cs.K_T == doctest::Approx((K_at(T, h) - K_at(T, -h)) / (2 * h)).epsilon(1e-6).scale(1.0));
        CHECK(cs.K_N == doctest::Approx((K_at(N, h) - K_at(N, -h)) / (2 * h)).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("reference frame is orthonormal and angles round-trip") {
    const auto s = SurfaceModel::ellipsoid(1.2, 1.0, 0.7);
    const auto g = fundamental_forms(s, {ChartId::standard, 0.9, 2.0});
    const auto e = reference_frame(g);
    CHECK(g.dot(e[0], e[0]) == doctest::Approx(1.0));
    CHECK(g.dot(e[1], e[1]) == doctest::Approx(1.0));
    CHECK(g.dot(e[0], e[1]) == doctest::Approx(0.0).scale(1.0));
    CHECK(e[0][0] == 0.0);  // along d/du2
    for (double psi : {0.1, 1.7, 3.0, 5.9}) {
        const double back = angle_of_direction(g, direction_from_angle(g, psi));
        CHECK(std::abs(std::remainder(back - psi, 2 * std::numbers::pi)) < 1e-13);
    }
    const Vec2 N = rotate_to_normal(g, e[0]);
    CHECK(N[0] == doctest::Approx(e[1][0]));
    CHECK(N[1] == doctest::Approx(e[1][1]));
}

TEST_CASE("checked contraction rejects a non-unit tangent") {
    const auto s = SurfaceModel::sphere();
    CHECK_THROWS_AS(curvature_sample(s, {ChartId::standard, 1.0, 0.0}, {2.0, 0.0}), PreconditionError);
    CHECK_THROWS_AS(local_geometry(s, {ChartId::standard, 0.05, 0.0}), DomainError);
}

TEST_CASE("normal derivative of K vanishes along a mirror") {
    const auto s = SurfaceModel::sectoral_harmonic(3, 0.1);
    for (double phi : {0.2, std::numbers::pi / 6, 1.0, 2.5}) {
        const ChartPoint p{ChartId::standard, std::numbers::pi / 2, phi};
        const auto g = fundamental_forms(s, p);
        const Vec2 along{0.0, 1.0 / std::sqrt(g.G)};
        CHECK(std::abs(curvature_sample(s, p, along).K_N) < 1e-12);
    }
}

TEST_CASE("ellipsoid umbilics have equal principal curvatures") {
    const auto s = SurfaceModel::ellipsoid(1.05, 1.0, 0.95);
    REQUIRE(s.umbilics().size() == 4);
    for (const auto& u : s.umbilics()) {
        const auto k = principal_curvatures(local_geometry(s, u));
        // The splitting is sqrt(H^2 - K), so rounding in H^2 - K shows up near 1e-8.
        CHECK(std::abs(k[0] - k[1]) < 1e-7);
    }
    const auto k = principal_curvatures(local_geometry(s, {ChartId::standard, 1.2, 0.4}));
    CHECK(k[1] - k[0] > 1e-3);
}

TEST_CASE("embedding jets: hand values on the sphere, differences on the harmonic") {
    const ChartPoint eq{ChartId::standard, std::numbers::pi / 2, 0.0};
    const auto xs = jet_eval_embedding(SurfaceModel::sphere(), eq);
    CHECK(xs[0].value() == doctest::Approx(1.0));
    CHECK(std::abs(xs[0].partial(1, 0)) < 1e-15);
    CHECK(std::abs(xs[0].partial(0, 1)) < 1e-15);
    CHECK(xs[0].partial(0, 2) == doctest::Approx(-1.0));

    // Five-point stencils on the embedding itself, step 1e-3.
    const auto s = SurfaceModel::sectoral_harmonic(3, 0.1);
    const auto jets = jet_eval_embedding(s, eq);
    const double h = 1e-3;
    auto X = [&](double du, double dv, int k) { return embed(s, {eq.chart, eq.u1 + du, eq.u2 + dv}).xyz[k]; };
    for (int k = 0; k < 3; ++k) {
        CAPTURE(k);
        auto d1 = [&](double eu, double ev) {
            return (-X(2 * h * eu, 2 * h * ev, k) + 8 * X(h * eu, h * ev, k) - 8 * X(-h * eu, -h * ev, k) +
                    X(-2 * h * eu, -2 * h * ev, k)) / (12 * h);
        };
        auto d2 = [&](double eu, double ev) {
            return (-X(2 * h * eu, 2 * h * ev, k) + 16 * X(h * eu, h * ev, k) - 30 * X(0, 0, k) +
                    16 * X(-h * eu, -h * ev, k) - X(-2 * h * eu, -2 * h * ev, k)) / (12 * h * h);
        };
        const double duv = (X(h, h, k) - X(h, -h, k) - X(-h, h, k) + X(-h, -h, k)) / (4 * h * h);
        CHECK(jets[k].partial(1, 0) == doctest::Approx(d1(1, 0)).epsilon(1e-6).scale(1.0));
        CHECK(jets[k].partial(0, 1) == doctest::Approx(d1(0, 1)).epsilon(1e-6).scale(1.0));
        CHECK(jets[k].partial(2, 0) == doctest::Approx(d2(1, 0)).epsilon(1e-6).scale(1.0));
        CHECK(jets[k].partial(0, 2) == doctest::Approx(d2(0, 1)).epsilon(1e-6).scale(1.0));
        CHECK(jets[k].partial(1, 1) == doctest::Approx(duv).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("textbook Christoffel symbol and the ellipsoid vertex curvature") {
    const auto g = fundamental_forms(SurfaceModel::sphere(), {ChartId::standard, std::numbers::pi / 3, 0.7});
    CHECK(g.christoffel[1][0][1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
    // The a-axis vertex (pi/2, 0): K = a^2 / (b c)^2.
    const auto e = local_geometry(SurfaceModel::ellipsoid(1.05, 1.0, 0.95), {ChartId::standard, std::numbers::pi / 2, 0.0});
    CHECK(e.K == doctest::Approx(1.05 * 1.05 / (0.95 * 0.95)).epsilon(1e-13));
    CHECK(e.K == doctest::Approx(1.2215).epsilon(1e-4));
}

TEST_CASE("curvature samples: sphere is flat in every derivative, reversal flips odd terms") {
    for (const auto& d : testing::random_draws(15, 13)) {
        CAPTURE(d.label);
        const auto g = fundamental_forms(d.surface, d.p);
        const Vec2 T = direction_from_angle(g, d.psi);
        const auto a = curvature_sample(d.surface, d.p, T);
        const auto b = curvature_sample(d.surface, d.p, Vec2{-T[0], -T[1]});
        CHECK(b.K == a.K);
        // N turns with T, so K_T and K_N are odd while K_TN and K_NN are even.
        CHECK(b.K_T == doctest::Approx(-a.K_T).scale(1.0));
        CHECK(b.K_N == doctest::Approx(-a.K_N).scale(1.0));
        CHECK(b.K_TN == doctest::Approx(a.K_TN).scale(1.0));
        CHECK(b.K_NN == doctest::Approx(a.K_NN).scale(1.0));
        // With N held fixed the mixed term is odd in T.
        const auto geom = local_geometry(d.surface, d.p);
        const Vec2 N = rotate_to_normal(g, T);
        double tn = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                double hess = geom.ddK[i][j];
                for (int c = 0; c < 2; ++c) hess -= geom.metric.christoffel[c][i][j] * geom.dK[c];
                tn += T[i] * N[j] * hess;
            }
        CHECK(tn == doctest::Approx(a.K_TN).scale(1.0));
        if (d.surface.family() == Family::sphere) {
            CHECK(a.K == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(std::abs(a.K_T) + std::abs(a.K_N) + std::abs(a.K_TN) + std::abs(a.K_NN) < 1e-10);
        }
    }
}

TEST_CASE("zero amplitude harmonic and sphere give the same curvature samples") {
    const auto sphere = SurfaceModel::sphere();
    for (int n : {2, 3}) {
        const auto flat = SurfaceModel::sectoral_harmonic(n, 0.0);
        for (const auto& d : testing::random_draws(100, 17 + n)) {
            const auto g = fundamental_forms(sphere, d.p);
            const Vec2 T = direction_from_angle(g, d.psi);
            const auto a = curvature_sample(sphere, d.p, T), b = curvature_sample(flat, d.p, T);
            CHECK(std::abs(a.K - b.K) < 1e-12);
            CHECK(std::abs(a.K_T - b.K_T) + std::abs(a.K_N - b.K_N) < 1e-12);
            CHECK(std::abs(a.K_TN - b.K_TN) + std::abs(a.K_NN - b.K_NN) < 1e-12);
        }
    }
}

TEST_CASE("rotate_to_normal is an orthonormal quarter turn") {
    const auto sg = fundamental_forms(SurfaceModel::sphere(), {ChartId::standard, std::numbers::pi / 2, 0.0});
    const Vec2 n0 = rotate_to_normal(sg, {0.0, 1.0});
    CHECK(std::abs(std::abs(n0[0]) - 1.0) < 1e-15);
    CHECK(std::abs(n0[1]) < 1e-15);

    const auto s = SurfaceModel::ellipsoid(1.05, 1.0, 0.95);
    for (const auto& d : testing::random_draws(1000, 41)) {
        const auto g = fundamental_forms(s, d.p);
        const Vec2 T = direction_from_angle(g, d.psi);
        const Vec2 N = rotate_to_normal(g, T);
        CHECK(std::abs(g.dot(N, N) - 1.0) < 1e-12);
        CHECK(std::abs(g.dot(T, N)) < 1e-12);
        const Vec2 back = rotate_to_normal(g, N);
        CHECK(std::abs(back[0] + T[0]) + std::abs(back[1] + T[1]) < 1e-12);
        // Positive orientation: det(T, N) has the sign of the area form.
        CHECK(T[0] * N[1] - T[1] * N[0] > 0);
    }
    CHECK_THROWS_AS(rotate_to_normal(sg, {0.0, 0.0}), PreconditionError);
}
