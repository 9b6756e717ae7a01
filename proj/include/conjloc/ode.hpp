#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <optional>
#include <vector>

#include "conjloc/diffgeo.hpp"
#include "conjloc/geodesic_state.hpp"
#include "conjloc/surfaces.hpp"

namespace conjloc {

// Packed integration state: u1 u2 v1 v2 | xi1 dxi1 xi2 dxi2 xi3 dxi3 | eta2 deta2 eta3 deta3
inline constexpr std::size_t kStateSize = 14;
using StateVector = std::array<double, kStateSize>;

enum StateIndex : std::size_t {
    kU1 = 0, kU2, kV1, kV2,
    kXi1, kDXi1, kXi2, kDXi2, kXi3, kDXi3,
    kEta2, kDEta2, kEta3, kDEta3,
};

StateVector pack(const GeodesicState& state) noexcept;
GeodesicState unpack(const StateVector& y, ChartId chart, double s) noexcept;

enum class StopRule { at_s_max, after_first_xi1_zero, after_first_xi2_zero };

struct IntegratorOptions {
    double atol = 1e-10;
    double rtol = 1e-10;
    double s_max = 2.0 * std::numbers::pi;
    std::size_t max_steps = 1'000'000;
    double initial_step = 1e-2;
    // Evolve eta2, eta3 as well (test mode).
    bool tangential = false;
    // Initial slopes of xi2 and xi3; alternative values probe gauge invariance.
    double dxi2_initial = 0.0;
    double dxi3_initial = -1.0;
    // xi1 events inside [0, event_skip] are ignored (trivial zero at the base point).
    double event_skip = 0.1;
    StopRule stop = StopRule::at_s_max;
    // Test hook: perform one extra chart switch at the first step boundary past this s.
    std::optional<double> forced_switch_at;
};

struct Event {
    enum class Kind { xi1_zero, xi2_zero };
    Kind kind;
    std::size_t step;  // index of the step whose endpoints bracket the zero
};

// One accepted Dormand-Prince step with its continuous extension.
struct DenseStep {
    double s0 = 0.0;
    double h = 0.0;
    ChartId chart = ChartId::standard;
    StateVector y0{};
    StateVector k1{};
    std::array<StateVector, 5> rcont{};

    StateVector interpolate(double s) const noexcept;
};

class Trajectory {
public:
    double psi = 0.0;
    GeodesicState initial;
    GeodesicState final;
    IntegratorOptions options;
    std::vector<DenseStep> steps;
    std::vector<Event> events;
    std::size_t chart_switches = 0;
    double max_speed_drift = 0.0;

    double s_end() const noexcept { return final.s; }
    GeodesicState state_at(double s) const;
    const Event* first_event(Event::Kind kind) const noexcept;
};

// Right-hand side of the geodesic equation coupled to the scalar Jacobi hierarchy:
//   xi1'' = -K xi1
//   xi2'' = -K xi2 - K_N xi1^2
//   xi3'' = -K xi3 - K_NN xi1^3 - 2 K^2 xi1^3 - 3 K_N xi1 xi2 + 3 K_T xi1^2 xi1' + 6 K xi1 xi1'^2
//   eta2'' = 4 K xi1 xi1' + K_T xi1^2
//   eta3'' = 6 K (xi1 xi2)' + 3 K_T xi1 xi2 + 6 K_N xi1^2 xi1' + K_TN xi1^3
StateVector rhs(const SurfaceModel& surface, ChartId chart, const StateVector& y, bool tangential);
GeodesicState rhs(const SurfaceModel& surface, const GeodesicState& state);

// State at s = 0 for the geodesic leaving p at angle psi (see reference_frame).
GeodesicState initial_state(const SurfaceModel& surface, const ChartPoint& p, double psi,
                            const IntegratorOptions& opts = {});

Trajectory integrate(const SurfaceModel& surface, const ChartPoint& p, double psi,
                     const IntegratorOptions& opts = {});
Trajectory integrate_from(const SurfaceModel& surface, const GeodesicState& start,
                          const IntegratorOptions& opts);

// Per-psi data at the first conjugate point.
struct ConjugateRecord {
    double psi = 0.0;
    double R = 0.0;
    double dxi1_at_R = 0.0;
    double xi2_at_R = 0.0;
    double dxi2_at_R = 0.0;
    double xi3_at_R = 0.0;
    SurfacePoint point;
    Vec2 tangent_plane_uv{};  // filled by the locus sweep
    Vec2 polar_uv{};
    GeodesicState state;

    // R'(psi) = -xi2/xi1' and R''(psi) = -(xi3 + 2 xi2' R')/xi1' at s = R.
    double dR() const noexcept { return -xi2_at_R / dxi1_at_R; }
    double d2R() const noexcept { return -(xi3_at_R + 2.0 * dxi2_at_R * dR()) / dxi1_at_R; }
};

// Refines the zero bracketed by `event` to full step accuracy.
GeodesicState refine_event(const SurfaceModel& surface, const Trajectory& traj, const Event& event);

// Throws NoConjugatePoint when xi1 has no sign change in (event_skip, s_end].
ConjugateRecord first_conjugate(const SurfaceModel& surface, const Trajectory& traj);

// Convenience: integrate up to the first conjugate point and extract it.
ConjugateRecord conjugate_point(const SurfaceModel& surface, const ChartPoint& p, double psi,
                                IntegratorOptions opts = {});

}  // namespace conjloc
