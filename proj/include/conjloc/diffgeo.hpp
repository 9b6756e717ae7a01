#pragma once

#include <array>

#include "conjloc/geometry_types.hpp"
#include "conjloc/jet.hpp"
#include "conjloc/surfaces.hpp"

namespace conjloc {

// christoffel[c][a][b] = Gamma^c_{ab}
using Christoffel = std::array<std::array<Vec2, 2>, 2>;

struct FirstFundamental {
    double E = 0.0, F = 0.0, G = 0.0;
    Vec2 dE{}, dF{}, dG{};
    Christoffel christoffel{};

    double det() const noexcept { return E * G - F * F; }
    double dot(const Vec2& x, const Vec2& y) const noexcept {
        return E * x[0] * y[0] + F * (x[0] * y[1] + x[1] * y[0]) + G * x[1] * y[1];
    }
};

// Everything the integrators need at one chart point, from a single jet pass.
struct LocalGeometry {
    FirstFundamental metric;
    double L = 0.0, M = 0.0, N = 0.0;  // second fundamental form, outward normal
    double K = 0.0;
    Vec2 dK{};                         // partial_a K
    std::array<Vec2, 2> ddK{};         // partial_a partial_b K
    std::array<Vec2, 2> hessK{};       // nabla_a partial_b K
    Vec3 xyz{};
    std::array<Vec3, 2> tangents{};    // dX/du1, dX/du2
};

// K and its derivative contractions in the frame {T, N = rotate_to_normal(T)}.
struct CurvatureSample {
    double K = 0.0;
    double K_T = 0.0;
    double K_N = 0.0;
    double K_TN = 0.0;
    double K_NN = 0.0;
};

std::array<Jet2, 3> jet_eval_embedding(const SurfaceModel& surface, const ChartPoint& p);

FirstFundamental fundamental_forms(const SurfaceModel& surface, const ChartPoint& p);

LocalGeometry local_geometry(const SurfaceModel& surface, const ChartPoint& p);

// Checked entry point: T must be metric-unit to 1e-8.
CurvatureSample curvature_sample(const SurfaceModel& surface, const ChartPoint& p, const Vec2& T);

// Unchecked contraction used on the integrator hot path; T is rescaled to unit length.
CurvatureSample contract(const LocalGeometry& geom, const Vec2& T) noexcept;

// Unit normal to T with (T, N) positively oriented in the chart. Both charts
// are oriented by the outward surface normal, so the convention is global.
Vec2 rotate_to_normal(const FirstFundamental& g, const Vec2& T);
Vec2 rotate_to_normal(const SurfaceModel& surface, const ChartPoint& p, const Vec2& T);

// Principal curvatures (k_min, k_max).
std::array<double, 2> principal_curvatures(const LocalGeometry& geom) noexcept;

// Orthonormal reference frame at p used to measure direction angles:
// e1 along d/du2, e2 = rotate_to_normal(e1).
std::array<Vec2, 2> reference_frame(const FirstFundamental& g);
Vec2 direction_from_angle(const FirstFundamental& g, double psi);
double angle_of_direction(const FirstFundamental& g, const Vec2& T);

}  // namespace conjloc
