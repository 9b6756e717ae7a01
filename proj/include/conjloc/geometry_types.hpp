#pragma once

#include <array>
#include <cmath>

namespace conjloc {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

enum class ChartId { standard, rotated };

// Angular chart coordinates. The standard chart is the usual (theta, phi)
// spherical parameterization; the rotated chart is the same parameterization
// rotated by pi/2 about the embedding x-axis, so its poles sit on the +-y axis.
struct ChartPoint {
    ChartId chart = ChartId::standard;
    double u1 = 0.0;
    double u2 = 0.0;
};

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

}  // namespace conjloc
