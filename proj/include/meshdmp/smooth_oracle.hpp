#pragma once

#include <array>
#include <functional>
#include <vector>

#include "meshdmp/mesh.hpp"
#include "meshdmp/surface_gen.hpp"

namespace meshdmp {

/// Regular parameterised surface used as a smooth reference: geodesics
/// integrated on these are ground truth for the mesh operators.
struct ParametricSurface {
    std::function<Vec3(double, double)> map;
    std::function<Vec3(double, double)> d1;  // analytic partial in u1
    std::function<Vec3(double, double)> d2;  // analytic partial in u2
    Eigen::Vector2d u_min{0, 0};
    Eigen::Vector2d u_max{1, 1};
    std::array<bool, 2> periodic{false, false};  // formulas extend past the box
};

/// Unit-speed spherical chart (theta, phi) -> R (sin t cos p, sin t sin p, cos t),
/// theta in (0, pi), phi periodic.
ParametricSurface sphere_surface(double radius);

/// Torus chart (u, v) -> ((R + r cos v) cos u, (R + r cos v) sin u, r sin v),
/// both parameters periodic. Requires R > r > 0.
ParametricSurface torus_surface(double R, double r);

/// Graph chart (x, y) -> (x, y, f(x, y)) over the given box.
ParametricSurface graph_surface(SurfacePreset preset, const GridDomain& domain);

struct MetricData {
    Eigen::Matrix2d g;      // g_ij = <d_i, d_j>
    Eigen::Matrix2d g_inv;  // g^{ij}
};

MetricData metric(const ParametricSurface& surface, const Eigen::Vector2d& u);

/// Christoffel symbols of the second kind; result[i](j, k) = Gamma^i_{jk}.
/// Metric derivatives by central differences, step 1e-5 of the domain
/// extent per dimension.
std::array<Eigen::Matrix2d, 2> christoffel(const ParametricSurface& surface,
                                           const Eigen::Vector2d& u);

struct GeodesicShot {
    Eigen::Vector2d u_end;
    Eigen::Vector2d du_end;       // parameter velocity at the endpoint
    std::vector<Vec3> samples;    // 3D curve, steps + 1 points
    double speed_drift = 0.0;     // max relative metric-speed deviation
};

/// Integrates the geodesic equation u'' = -Gamma(u') u' by classical RK4
/// from u0 with initial direction du0 (rescaled to unit metric speed), for
/// the given arc length. The step count is raised to at least 1000 per
/// unit length. Throws DomainError when the curve leaves a non-periodic
/// parameter direction or the start direction is degenerate.
GeodesicShot shoot_geodesic(const ParametricSurface& surface, const Eigen::Vector2d& u0,
                            const Eigen::Vector2d& du0, double length, int steps);

}  // namespace meshdmp
