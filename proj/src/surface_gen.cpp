#include "meshdmp/surface_gen.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace meshdmp {

namespace {
constexpr double kPi = std::numbers::pi;
}

SurfacePreset surface_preset_from_name(const std::string& name) {
    if (name == "flat") return SurfacePreset::flat;
    if (name == "twin_gauss") return SurfacePreset::twin_gauss;
    throw DomainError("unknown surface preset: " + name);
}

double surface_height(SurfacePreset preset, double x, double y) {
    switch (preset) {
        case SurfacePreset::flat:
            return 0.0;
        case SurfacePreset::twin_gauss: {
            double a = (x - 1.0) * y, b = (x + 1.0) * y;
            return std::exp(-a * a) - 0.5 * std::exp(-b * b);
        }
    }
    return 0.0;
}

Eigen::Vector2d surface_gradient(SurfacePreset preset, double x, double y) {
    switch (preset) {
        case SurfacePreset::flat:
            return Eigen::Vector2d::Zero();
        case SurfacePreset::twin_gauss: {
            // d/dx exp(-(x-1)^2 y^2) = -2 (x-1) y^2 exp(...)
            double u = x - 1.0, v = x + 1.0, y2 = y * y;
            double ea = std::exp(-u * u * y2), eb = std::exp(-v * v * y2);
            double fx = -2.0 * u * y2 * ea + v * y2 * eb;
            double fy = -2.0 * u * u * y * ea + v * v * y * eb;
            return {fx, fy};
        }
    }
    return Eigen::Vector2d::Zero();
}

Mesh generate_graph_mesh(SurfacePreset preset, const GridDomain& domain, int nx, int ny) {
    if (nx < 2 || ny < 2) throw DomainError("graph mesh needs a grid of at least 2x2 vertices");
    std::vector<Vec3> vertices;
    vertices.reserve(static_cast<size_t>(nx) * ny);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            double x = domain.x0 + (domain.x1 - domain.x0) * ix / (nx - 1);
            double y = domain.y0 + (domain.y1 - domain.y0) * iy / (ny - 1);
            vertices.emplace_back(x, y, surface_height(preset, x, y));
        }
    std::vector<std::array<int, 3>> faces;
    faces.reserve(2 * static_cast<size_t>(nx - 1) * (ny - 1));
    auto vid = [nx](int ix, int iy) { return iy * nx + ix; };
    for (int iy = 0; iy + 1 < ny; ++iy)
        for (int ix = 0; ix + 1 < nx; ++ix) {
            int a = vid(ix, iy), b = vid(ix + 1, iy);
            int c = vid(ix + 1, iy + 1), d = vid(ix, iy + 1);
            faces.push_back({a, b, c});
            faces.push_back({a, c, d});
        }
    return Mesh::build(std::move(vertices), std::move(faces));
}

Mesh generate_torus(double R, double r, int n_u, int n_v) {
    if (R <= 0 || r <= 0 || R <= r) throw DomainError("torus needs R > r > 0");
    if (n_u < 3 || n_v < 3) throw DomainError("torus grid needs at least 3x3 vertices");
    std::vector<Vec3> vertices;
    vertices.reserve(static_cast<size_t>(n_u) * n_v);
    for (int iu = 0; iu < n_u; ++iu)
        for (int iv = 0; iv < n_v; ++iv) {
            double u = 2.0 * kPi * iu / n_u;
            double v = 2.0 * kPi * iv / n_v;
            double w = R + r * std::cos(v);
            vertices.emplace_back(w * std::cos(u), w * std::sin(u), r * std::sin(v));
        }
    auto vid = [n_v](int iu, int iv) { return iu * n_v + iv; };
    std::vector<std::array<int, 3>> faces;
    faces.reserve(2 * static_cast<size_t>(n_u) * n_v);
    for (int iu = 0; iu < n_u; ++iu)
        for (int iv = 0; iv < n_v; ++iv) {
            int a = vid(iu, iv);
            int b = vid((iu + 1) % n_u, iv);
            int c = vid((iu + 1) % n_u, (iv + 1) % n_v);
            int d = vid(iu, (iv + 1) % n_v);
            faces.push_back({a, b, c});
            faces.push_back({a, c, d});
        }
    return Mesh::build(std::move(vertices), std::move(faces));
}

Mesh generate_icosphere(double radius, int subdivisions) {
    if (radius <= 0) throw DomainError("icosphere radius must be positive");
    if (subdivisions < 0 || subdivisions > 8) throw DomainError("icosphere subdivisions in [0,8]");
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> vertices = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
        {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},  {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},
        {3, 8, 9},   {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (auto& v : vertices) v.normalize();

    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            Vec3 m = (vertices[a] + vertices[b]).normalized();
            int id = static_cast<int>(vertices.size());
            vertices.push_back(m);
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(4 * faces.size());
        for (const auto& f : faces) {
            int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }
    for (auto& v : vertices) v *= radius;
    return Mesh::build(std::move(vertices), std::move(faces));
}

namespace {

Eigen::Vector2d curve_point(const CurveSpec& c, double tau) {
    switch (c.kind) {
        case CurveSpec::Kind::circle:
            return {c.a * std::cos(tau), c.a * std::sin(tau)};
        case CurveSpec::Kind::ellipse:
            return {c.a * std::cos(tau), c.b * std::sin(tau)};
        case CurveSpec::Kind::lemniscate:
            return {c.a * std::cos(tau), c.a * std::sin(tau) * std::cos(tau)};
    }
    return {0, 0};
}

Eigen::Vector2d curve_tangent(const CurveSpec& c, double tau) {
    switch (c.kind) {
        case CurveSpec::Kind::circle:
            return {-c.a * std::sin(tau), c.a * std::cos(tau)};
        case CurveSpec::Kind::ellipse:
            return {-c.a * std::sin(tau), c.b * std::cos(tau)};
        case CurveSpec::Kind::lemniscate:
            return {-c.a * std::sin(tau), c.a * std::cos(2.0 * tau)};
    }
    return {0, 0};
}

}  // namespace

std::vector<DemoSamplePoint> generate_demo_curve(const CurveSpec& curve, SurfacePreset surface,
                                                 int n_samples, double period) {
    if (n_samples < 16) throw DomainError("demo curve needs at least 16 samples");
    if (period <= 0) throw DomainError("demo curve period must be positive");
    std::vector<DemoSamplePoint> out;
    out.reserve(n_samples);
    const double rate = 2.0 * kPi / period;  // d tau / d t
    for (int k = 0; k < n_samples; ++k) {
        double t = period * k / n_samples;
        double tau = rate * t;
        Eigen::Vector2d p = curve_point(curve, tau);
        Eigen::Vector2d dp = curve_tangent(curve, tau) * rate;
        Eigen::Vector2d g = surface_gradient(surface, p.x(), p.y());
        DemoSamplePoint s;
        s.t = t;
        s.position = {p.x(), p.y(), surface_height(surface, p.x(), p.y())};
        s.velocity = {dp.x(), dp.y(), g.dot(dp)};
        out.push_back(s);
    }
    return out;
}

void save_demo_csv(const std::vector<DemoSamplePoint>& samples, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open file for writing: " + path);
    out << "t,x,y,z,vx,vy,vz\n";
    char buf[256];
    for (const auto& s : samples) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t,
                      s.position[0], s.position[1], s.position[2], s.velocity[0], s.velocity[1],
                      s.velocity[2]);
        out << buf;
    }
}

std::vector<DemoSamplePoint> load_demo_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open demo file: " + path);
    std::vector<DemoSamplePoint> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("t,", 0) == 0) continue;  // header
        std::istringstream ss(line);
        DemoSamplePoint s;
        char comma;
        if (!(ss >> s.t >> comma >> s.position[0] >> comma >> s.position[1] >> comma >>
              s.position[2] >> comma >> s.velocity[0] >> comma >> s.velocity[1] >> comma >>
              s.velocity[2]))
            throw ParseError(path + " line " + std::to_string(line_no) + ": malformed demo row");
        out.push_back(s);
    }
    if (out.size() < 2) throw ParseError(path + ": demo needs at least 2 samples");
    return out;
}

}  // namespace meshdmp
