#pragma once

// Reference implementations used to cross-check the library. Everything
// here is written independently of the code under test: closest points by
// exhaustive scan, sphere geometry in closed form, and a plain Euclidean
// rhythmic DMP for the planar-reduction checks.

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "meshdmp/mesh.hpp"

namespace oracles {

using Vec3 = Eigen::Vector3d;

// --- closest point -------------------------------------------------------

// Closest point on triangle (a, b, c) to p; region-based case analysis.
Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Exhaustive scan over every face of the mesh.
Vec3 brute_force_closest(const meshdmp::Mesh& mesh, const Vec3& p);

// --- unit-sphere geometry (closed form) ----------------------------------

// Great-circle distance between two points on the sphere of given radius.
double sphere_arc(const Vec3& a, const Vec3& b, double radius);

// Unit tangent at a pointing along the great circle toward b.
Vec3 sphere_initial_dir(const Vec3& a, const Vec3& b);

// Walk arc length L from a along unit tangent dir on the sphere.
Vec3 sphere_exp(const Vec3& a, const Vec3& dir, double L, double radius);

// Spherical excess (= area / R^2) of the geodesic triangle abc,
// l'Huilier's theorem on the angular side lengths.
double spherical_excess(const Vec3& a, const Vec3& b, const Vec3& c, double radius);

// --- linear spring-damper ------------------------------------------------

// Distance-to-goal envelope of the critically damped second-order system
// started at distance d0 with zero velocity: d0 (1 + s t) e^{-s t}.
double critically_damped_envelope(double d0, double s, double t);

// --- planar rhythmic DMP --------------------------------------------------

// Self-contained Euclidean periodic DMP living in the z = const plane.
// Mirrors the published update equations with Log_y(g) = g - y, identity
// transport and the velocity-aligned local frame; shares no code with the
// library.
class PlanarRhythmicDmp {
public:
    PlanarRhythmicDmp(double alpha, double beta, int n_basis);

    // Fit from one period of planar samples (uniform dt). Velocities are
    // the analytic ones; accelerations by forward difference with wrap.
    void fit(const std::vector<Vec3>& positions, const std::vector<Vec3>& velocities, double dt,
             const Vec3& goal);

    struct State {
        Vec3 y;
        Vec3 z;
        double phi;
    };

    State initial_state(const Vec3& y0, const Vec3& v0) const;
    State step(const State& s, double dt) const;

    double omega() const { return omega_; }
    Vec3 forcing_at(double phi) const;

private:
    double alpha_, beta_, omega_ = 1.0, r_ = 1.0;
    int n_;
    Eigen::VectorXd centers_, widths_;
    Eigen::Matrix3Xd weights_;
    Vec3 goal_ = Vec3::Zero();

    Eigen::VectorXd basis_at(double phi) const;
};

// --- misc helpers ----------------------------------------------------------

// Max distance of the face's vertices from their best-fit plane.
double plane_fit_residual(const Vec3& a, const Vec3& b, const Vec3& c);

// Deterministic random surface point: uniform face id, uniform barycentric.
meshdmp::SurfacePoint random_surface_point(const meshdmp::Mesh& mesh, std::mt19937& rng);

// Deterministic random unit vector in the tangent plane of m's face.
Vec3 random_tangent_dir(const meshdmp::Mesh& mesh, const meshdmp::SurfacePoint& m,
                        std::mt19937& rng);

// --- seeded-defect fixtures ------------------------------------------------

// Two tetrahedra glued along one edge: that edge has four incident faces.
meshdmp::Mesh make_nonmanifold_mesh();

// Flat grid with one interior face's winding flipped; returns the mesh and
// the id of the flipped face.
meshdmp::Mesh make_flipped_grid(int* flipped_face = nullptr);

}  // namespace oracles
