#pragma once

#include <vector>

#include "conjloc/surfaces.hpp"

namespace conjloc::testing {

// Jacobi fields J1 = d exp / d psi and J2 = D J1 / d psi integrated as chart vectors
// from the tensor equations, with R^a_bcd = K (delta^a_c g_bd - delta^a_d g_bc):
//   D^2 J1 + R(v, J1) v = 0
//   D^2 J2 + R(v, J2) v = (R^a_bcd;e + R^a_ecd;b) v^b v^c J1^d J1^e + 4 R^a_bcd (D J1)^b v^c J1^d
// Classic RK4 with a fixed step, chart switch near the poles. The frame components
// are taken only at output time.
struct OracleSample {
    double s = 0.0;
    double xi1 = 0.0;   // g(J1, N)
    double eta1 = 0.0;  // g(J1, T)
    double xi2 = 0.0;   // g(J2, N)
    double eta2 = 0.0;  // g(J2, T)
};

std::vector<OracleSample> tensor_jacobi2_oracle(const SurfaceModel& surface, const ChartPoint& p,
                                                double psi, const std::vector<double>& s_out,
                                                double h = 1e-3);

}  // namespace conjloc::testing
