#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "meshdmp/smooth_oracle.hpp"
#include "oracles.hpp"

using namespace meshdmp;

namespace {

// graph chart over the flat preset: the plane z = 0 with identity metric
ParametricSurface plane() { return graph_surface(SurfacePreset::flat, GridDomain{}); }

}  // namespace

TEST_CASE("plane metric is the identity with vanishing symbols") {
    ParametricSurface s = plane();
    Eigen::Vector2d u(0.3, -0.7);
    MetricData m = metric(s, u);
    CHECK((m.g - Eigen::Matrix2d::Identity()).norm() < 1e-12);
    CHECK((m.g_inv - Eigen::Matrix2d::Identity()).norm() < 1e-12);
    auto gamma = christoffel(s, u);
    CHECK(gamma[0].norm() < 1e-7);
    CHECK(gamma[1].norm() < 1e-7);
}

TEST_CASE("plane geodesics are straight lines") {
    ParametricSurface s = plane();
    GeodesicShot shot = shoot_geodesic(s, {-1.0, -0.5}, {3.0, 4.0}, 1.5, 1500);
    CHECK((shot.u_end - Eigen::Vector2d(-1.0 + 1.5 * 0.6, -0.5 + 1.5 * 0.8)).norm() < 1e-9);
    CHECK(shot.speed_drift < 1e-9);
    CHECK(shot.samples.size() == 1501);
    // 3D samples fall on the segment
    Vec3 a = shot.samples.front(), b = shot.samples.back();
    Vec3 mid = shot.samples[750];
    CHECK((mid - 0.5 * (a + b)).norm() < 1e-9);
}

TEST_CASE("sphere metric and symbols match the closed forms") {
    const double R = 1.0;
    ParametricSurface s = sphere_surface(R);
    for (double theta : {0.4, 1.0, 1.3, 2.2}) {
        Eigen::Vector2d u(theta, 0.9);
        MetricData m = metric(s, u);
        CHECK(m.g(0, 0) == doctest::Approx(R * R).epsilon(1e-12));
        CHECK(m.g(1, 1) == doctest::Approx(R * R * std::sin(theta) * std::sin(theta))
                              .epsilon(1e-12));
        CHECK(std::abs(m.g(0, 1)) < 1e-12);

        auto gamma = christoffel(s, u);
        // Gamma^theta_{phi phi} = -sin(theta) cos(theta)
        CHECK(gamma[0](1, 1) ==
              doctest::Approx(-std::sin(theta) * std::cos(theta)).epsilon(1e-6));
        // Gamma^phi_{theta phi} = cot(theta)
        CHECK(gamma[1](0, 1) == doctest::Approx(1.0 / std::tan(theta)).epsilon(1e-6));
        // symmetry in the lower indices
        CHECK(std::abs(gamma[0](0, 1) - gamma[0](1, 0)) < 1e-9);
        CHECK(std::abs(gamma[1](0, 1) - gamma[1](1, 0)) < 1e-9);
        // the remaining symbols vanish
        CHECK(std::abs(gamma[0](0, 0)) < 1e-6);
        CHECK(std::abs(gamma[1](0, 0)) < 1e-6);
        CHECK(std::abs(gamma[1](1, 1)) < 1e-6);
    }
}

TEST_CASE("sphere geodesic from the equator reaches the pole") {
    ParametricSurface s = sphere_surface(1.0);
    // head from (theta=pi/2, phi=0) straight toward decreasing theta
    GeodesicShot shot = shoot_geodesic(s, {M_PI / 2, 0.0}, {-1.0, 0.0}, M_PI / 2 - 1e-4, 4000);
    CHECK(shot.u_end[0] == doctest::Approx(1e-4).epsilon(1e-4));
    CHECK(shot.speed_drift < 1e-6);
    // 3D endpoint near the north pole
    CHECK((shot.samples.back() - Vec3(0, 0, 1)).norm() < 2e-4);
}

TEST_CASE("sphere great circle along the equator") {
    ParametricSurface s = sphere_surface(2.0);
    // phi direction at the equator; arc length pi R is half the circle
    GeodesicShot shot = shoot_geodesic(s, {M_PI / 2, 0.0}, {0.0, 1.0}, 2.0 * M_PI, 8000);
    CHECK((shot.samples.back() - Vec3(-2, 0, 0)).norm() < 1e-6);
    CHECK(shot.speed_drift < 1e-8);
}

TEST_CASE("torus metric matches the closed form") {
    const double R = 0.5, r = 0.2;
    ParametricSurface s = torus_surface(R, r);
    for (double v : {0.0, 1.1, 2.5, 4.0}) {
        MetricData m = metric(s, {0.7, v});
        double ring = R + r * std::cos(v);
        CHECK(m.g(0, 0) == doctest::Approx(ring * ring).epsilon(1e-12));
        CHECK(m.g(1, 1) == doctest::Approx(r * r).epsilon(1e-12));
        CHECK(std::abs(m.g(0, 1)) < 1e-12);
    }
    // inner/outer equators and meridians are geodesics: symbols match
    auto gamma = christoffel(s, {0.3, 0.0});
    // Gamma^v_{uu} = (R + r cos v) sin v / r = 0 at v = 0
    CHECK(std::abs(gamma[1](0, 0)) < 1e-6);
}

TEST_CASE("graph chart metric uses the analytic gradient") {
    GridDomain dom;
    ParametricSurface s = graph_surface(SurfacePreset::twin_gauss, dom);
    for (double x : {-1.3, -0.2, 0.8}) {
        Eigen::Vector2d u(x, 0.4 * x);
        Eigen::Vector2d grad = surface_gradient(SurfacePreset::twin_gauss, u[0], u[1]);
        MetricData m = metric(s, u);
        CHECK(m.g(0, 0) == doctest::Approx(1 + grad[0] * grad[0]).epsilon(1e-12));
        CHECK(m.g(0, 1) == doctest::Approx(grad[0] * grad[1]).epsilon(1e-12));
        CHECK(m.g(1, 1) == doctest::Approx(1 + grad[1] * grad[1]).epsilon(1e-12));
        CHECK((m.g * m.g_inv - Eigen::Matrix2d::Identity()).norm() < 1e-12);
    }
}

TEST_CASE("geodesic shots preserve metric speed on curved charts") {
    ParametricSurface s = graph_surface(SurfacePreset::twin_gauss, GridDomain{});
    GeodesicShot shot = shoot_geodesic(s, {-1.5, -1.0}, {1.0, 0.8}, 3.0, 6000);
    CHECK(shot.speed_drift < 1e-6);
    // chord length of the 3D polyline approximates the requested arc length
    double poly = 0.0;
    for (size_t k = 1; k < shot.samples.size(); ++k)
        poly += (shot.samples[k] - shot.samples[k - 1]).norm();
    CHECK(poly == doctest::Approx(3.0).epsilon(1e-5));
}

TEST_CASE("domain exits and degenerate starts are rejected") {
    ParametricSurface g = graph_surface(SurfacePreset::flat, GridDomain{});
    // running off the non-periodic box is an error
    CHECK_THROWS_AS(shoot_geodesic(g, {1.9, 0.0}, {1.0, 0.0}, 1.0, 1000), DomainError);
    // zero start direction cannot be normalised
    CHECK_THROWS_AS(shoot_geodesic(g, {0.0, 0.0}, {0.0, 0.0}, 1.0, 1000), DomainError);
    // the sphere chart collapses at the poles
    ParametricSurface s = sphere_surface(1.0);
    CHECK_THROWS_AS(shoot_geodesic(s, {M_PI / 2, 0.0}, {-1.0, 0.0}, 2.0, 2000), DomainError);
}

TEST_CASE("periodic directions wrap instead of throwing") {
    ParametricSurface s = torus_surface(0.5, 0.2);
    GeodesicShot shot = shoot_geodesic(s, {0.0, 0.0}, {1.0, 0.0}, 2 * M_PI * 0.7 * 1.5, 8000);
    CHECK(shot.speed_drift < 1e-6);  // more than a full outer loop, no throw
}
