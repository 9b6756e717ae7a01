#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "conjloc/surfaces.hpp"

namespace conjloc::testing {

struct Draw {
    SurfaceModel surface;
    ChartPoint p;
    double psi = 0.0;
    std::string label;
};

// Deterministic pseudo-random (surface, base point, direction) triples cycling
// through sphere, ellipsoid and sectoral harmonic. Base points keep clear of the
// standard chart's poles.
std::vector<Draw> random_draws(std::size_t count, std::uint32_t seed);

}  // namespace conjloc::testing
