#include "meshdmp/smooth_oracle.hpp"

#include <cmath>

#include "meshdmp/errors.hpp"

namespace meshdmp {

ParametricSurface sphere_surface(double radius) {
    if (radius <= 0) throw DomainError("sphere radius must be positive");
    ParametricSurface s;
    s.map = [radius](double t, double p) {
        return Vec3(radius * std::sin(t) * std::cos(p), radius * std::sin(t) * std::sin(p),
                    radius * std::cos(t));
    };
    s.d1 = [radius](double t, double p) {
        return Vec3(radius * std::cos(t) * std::cos(p), radius * std::cos(t) * std::sin(p),
                    -radius * std::sin(t));
    };
    s.d2 = [radius](double t, double p) {
        return Vec3(-radius * std::sin(t) * std::sin(p), radius * std::sin(t) * std::cos(p), 0.0);
    };
    s.u_min = {0.0, -M_PI};
    s.u_max = {M_PI, M_PI};
    s.periodic = {false, true};  // poles are chart singularities
    return s;
}

ParametricSurface torus_surface(double R, double r) {
    if (!(R > r && r > 0)) throw DomainError("torus radii must satisfy R > r > 0");
    ParametricSurface s;
    s.map = [R, r](double u, double v) {
        double w = R + r * std::cos(v);
        return Vec3(w * std::cos(u), w * std::sin(u), r * std::sin(v));
    };
    s.d1 = [R, r](double u, double v) {
        double w = R + r * std::cos(v);
        return Vec3(-w * std::sin(u), w * std::cos(u), 0.0);
    };
    s.d2 = [r](double u, double v) {
        return Vec3(-r * std::sin(v) * std::cos(u), -r * std::sin(v) * std::sin(u),
                    r * std::cos(v));
    };
    s.u_min = {0.0, 0.0};
    s.u_max = {2.0 * M_PI, 2.0 * M_PI};
    s.periodic = {true, true};
    return s;
}

ParametricSurface graph_surface(SurfacePreset preset, const GridDomain& domain) {
    ParametricSurface s;
    s.map = [preset](double x, double y) {
        return Vec3(x, y, surface_height(preset, x, y));
    };
    s.d1 = [preset](double x, double y) {
        return Vec3(1.0, 0.0, surface_gradient(preset, x, y)[0]);
    };
    s.d2 = [preset](double x, double y) {
        return Vec3(0.0, 1.0, surface_gradient(preset, x, y)[1]);
    };
    s.u_min = {domain.x0, domain.y0};
    s.u_max = {domain.x1, domain.y1};
    return s;
}

MetricData metric(const ParametricSurface& surface, const Eigen::Vector2d& u) {
    Vec3 e1 = surface.d1(u[0], u[1]);
    Vec3 e2 = surface.d2(u[0], u[1]);
    MetricData m;
    m.g(0, 0) = e1.dot(e1);
    m.g(0, 1) = m.g(1, 0) = e1.dot(e2);
    m.g(1, 1) = e2.dot(e2);
    double det = m.g(0, 0) * m.g(1, 1) - m.g(0, 1) * m.g(1, 0);
    double scale = m.g(0, 0) + m.g(1, 1);
    if (m.g(0, 0) <= 0 || det <= 1e-14 * scale * scale)
        throw DomainError("metric is singular at this parameter point");
    m.g_inv << m.g(1, 1) / det, -m.g(0, 1) / det, -m.g(1, 0) / det, m.g(0, 0) / det;
    return m;
}

std::array<Eigen::Matrix2d, 2> christoffel(const ParametricSurface& surface,
                                           const Eigen::Vector2d& u) {
    Eigen::Vector2d h;
    for (int i = 0; i < 2; ++i) h[i] = 1e-5 * (surface.u_max[i] - surface.u_min[i]);

    // dg[k](i, j) = d g_ij / d u_k by central differences
    std::array<Eigen::Matrix2d, 2> dg;
    for (int k = 0; k < 2; ++k) {
        Eigen::Vector2d up = u, um = u;
        up[k] += h[k];
        um[k] -= h[k];
        dg[k] = (metric(surface, up).g - metric(surface, um).g) / (2.0 * h[k]);
    }

    Eigen::Matrix2d g_inv = metric(surface, u).g_inv;
    std::array<Eigen::Matrix2d, 2> gamma;
    for (int l = 0; l < 2; ++l) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                double sum = 0.0;
                for (int i = 0; i < 2; ++i)
                    sum += g_inv(l, i) * (dg[j](i, k) + dg[k](i, j) - dg[i](j, k));
                gamma[l](j, k) = 0.5 * sum;
            }
        }
    }
    return gamma;
}

namespace {

// geodesic ODE right-hand side on the state (u, du)
void ode_rhs(const ParametricSurface& s, const Eigen::Vector4d& state, Eigen::Vector4d& out) {
    Eigen::Vector2d u = state.head<2>();
    Eigen::Vector2d du = state.tail<2>();
    auto gamma = christoffel(s, u);
    out.head<2>() = du;
    for (int i = 0; i < 2; ++i) out[2 + i] = -du.dot(gamma[i] * du);
}

}  // namespace

GeodesicShot shoot_geodesic(const ParametricSurface& surface, const Eigen::Vector2d& u0,
                            const Eigen::Vector2d& du0, double length, int steps) {
    if (length < 0) throw DomainError("geodesic length must be nonnegative");
    for (int i = 0; i < 2; ++i)
        if (!surface.periodic[i] && (u0[i] < surface.u_min[i] || u0[i] > surface.u_max[i]))
            throw DomainError("start point outside the parameter domain");

    MetricData m0 = metric(surface, u0);
    double speed0 = std::sqrt(du0.dot(m0.g * du0));
    if (speed0 <= 1e-14) throw DomainError("degenerate start direction");

    int n = std::max({steps, static_cast<int>(std::ceil(1000.0 * length)), 1});
    double dt = length / n;

    Eigen::Vector4d state;
    state << u0, du0 / speed0;

    GeodesicShot shot;
    shot.samples.reserve(n + 1);
    shot.samples.push_back(surface.map(u0[0], u0[1]));

    Eigen::Vector4d k1, k2, k3, k4;
    for (int step_i = 0; step_i < n; ++step_i) {
        ode_rhs(surface, state, k1);
        ode_rhs(surface, state + 0.5 * dt * k1, k2);
        ode_rhs(surface, state + 0.5 * dt * k2, k3);
        ode_rhs(surface, state + dt * k3, k4);
        state += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        for (int i = 0; i < 2; ++i)
            if (!surface.periodic[i] &&
                (state[i] < surface.u_min[i] || state[i] > surface.u_max[i]))
                throw DomainError("geodesic left the parameter domain");

        Eigen::Vector2d u = state.head<2>();
        Eigen::Vector2d du = state.tail<2>();
        double spd = std::sqrt(du.dot(metric(surface, u).g * du));
        shot.speed_drift = std::max(shot.speed_drift, std::abs(spd - 1.0));
        shot.samples.push_back(surface.map(u[0], u[1]));
    }
    shot.u_end = state.head<2>();
    shot.du_end = state.tail<2>();
    return shot;
}

}  // namespace meshdmp
