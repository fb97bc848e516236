#pragma once

#include <string>
#include <vector>

#include "meshdmp/mesh.hpp"

namespace meshdmp {

/// Height-field presets used by the synthetic benchmarks.
/// twin_gauss is f(x,y) = exp(-(x-1)^2 y^2) - 0.5 exp(-(x+1)^2 y^2).
enum class SurfacePreset { flat, twin_gauss };

SurfacePreset surface_preset_from_name(const std::string& name);
double surface_height(SurfacePreset preset, double x, double y);
Eigen::Vector2d surface_gradient(SurfacePreset preset, double x, double y);

struct GridDomain {
    double x0 = -2.0, x1 = 2.0;
    double y0 = -2.0, y1 = 2.0;
};

/// Uniform-grid graph mesh of z = f(x,y); nx, ny are vertex counts per
/// axis. Cells split into two triangles wound counter-clockwise from +z.
Mesh generate_graph_mesh(SurfacePreset preset, const GridDomain& domain, int nx, int ny);

/// Closed torus with major/minor radii R, r on an n_u x n_v vertex grid
/// (2 n_u n_v faces, outward normals).
Mesh generate_torus(double R, double r, int n_u, int n_v);

/// Icosahedron subdivided `subdivisions` times, vertices on the sphere of
/// the given radius.
Mesh generate_icosphere(double radius, int subdivisions);

struct CurveSpec {
    enum class Kind { circle, ellipse, lemniscate } kind = Kind::circle;
    // circle: a = radius; ellipse: a, b semi-axes; lemniscate: a = scale
    double a = 1.0;
    double b = 1.0;

    static CurveSpec circle(double rho) { return {Kind::circle, rho, rho}; }
    static CurveSpec ellipse(double a, double b) { return {Kind::ellipse, a, b}; }
    static CurveSpec lemniscate(double scale) { return {Kind::lemniscate, scale, scale}; }
};

struct DemoSamplePoint {
    double t;
    Vec3 position;
    Vec3 velocity;
};

/// One period of a planar curve lifted onto the height field:
/// chi(t) = (eta(tau), f(eta(tau))) with tau = 2*pi*t/period, sampled
/// uniformly; velocities by the analytic chain rule.
std::vector<DemoSamplePoint> generate_demo_curve(const CurveSpec& curve, SurfacePreset surface,
                                                 int n_samples, double period);

void save_demo_csv(const std::vector<DemoSamplePoint>& samples, const std::string& path);
std::vector<DemoSamplePoint> load_demo_csv(const std::string& path);

}  // namespace meshdmp
