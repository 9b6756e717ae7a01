#pragma once

#include "conjloc/geometry_types.hpp"

namespace conjloc {

// Position and velocity along a unit-speed geodesic plus the scalar Jacobi
// hierarchy. xi_k and eta_k are the normal and tangential components of the
// k-th psi-derivative of the exponential map in the parallel frame {T, N};
// they are frame scalars and do not depend on the chart.
struct GeodesicState {
    ChartPoint pos;
    Vec2 vel{};
    double s = 0.0;

    double xi1 = 0.0, dxi1 = 1.0;
    double xi2 = 0.0, dxi2 = 0.0;
    double xi3 = 0.0, dxi3 = -1.0;

    // Tangential components; only evolved when tangential output is requested.
    double eta2 = 0.0, deta2 = -1.0;
    double eta3 = 0.0, deta3 = 0.0;
};

}  // namespace conjloc
