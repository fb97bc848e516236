// Generates the bundled test assets: two bunny-like closed meshes and a
// fender-like genus-16 plate, sized to match the benchmark suite exactly.
#include <array>
#include <cmath>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "meshdmp/mesh.hpp"

namespace md = meshdmp;
using md::Vec3;

namespace {

struct RawMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
};

double signed_volume(const RawMesh& m) {
    double v = 0.0;
    for (const auto& f : m.faces)
        v += m.vertices[f[0]].dot(m.vertices[f[1]].cross(m.vertices[f[2]])) / 6.0;
    return v;
}

md::Mesh finalize(RawMesh raw, int want_v, int want_f, const std::string& name,
                  bool check_volume = true) {
    if (static_cast<int>(raw.vertices.size()) != want_v ||
        static_cast<int>(raw.faces.size()) != want_f)
        throw std::runtime_error(name + ": got " + std::to_string(raw.vertices.size()) + "/" +
                                 std::to_string(raw.faces.size()) + " vertices/faces, want " +
                                 std::to_string(want_v) + "/" + std::to_string(want_f));
    if (check_volume && signed_volume(raw) <= 0)
        throw std::runtime_error(name + ": inward orientation");
    return md::Mesh::build(std::move(raw.vertices), std::move(raw.faces));
}

// --- bunny ------------------------------------------------------------------

double lobe(const Vec3& d, Vec3 c, double k) {
    c.normalize();
    return std::exp(k * (d.dot(c) - 1.0));
}

// Smooth radial bumps on a sphere: body with head, ears, snout and tail.
double bunny_radius(const Vec3& d) {
    double r = 1.0;
    r += 0.30 * lobe(d, {0.35, 0.0, 1.0}, 5.0);    // head
    r += 0.55 * lobe(d, {0.22, 0.20, 1.0}, 28.0);  // left ear
    r += 0.55 * lobe(d, {0.22, -0.20, 1.0}, 28.0); // right ear
    r += 0.12 * lobe(d, {1.0, 0.0, 0.1}, 7.0);     // snout
    r += 0.16 * lobe(d, {-1.0, 0.0, -0.3}, 9.0);   // tail
    r += 0.10 * lobe(d, {0.0, 0.0, -1.0}, 2.0);    // haunches
    return r;
}

// UV sphere of m segments x p rings deformed by bunny_radius.
// V = m*p + 2, F = 2*m*p.
RawMesh make_bunny(int m, int p, double scale) {
    RawMesh out;
    auto place = [&](const Vec3& d) { return scale * bunny_radius(d) * d; };

    out.vertices.push_back(place({0, 0, 1}));  // north pole, id 0
    for (int j = 1; j <= p; ++j) {
        double theta = M_PI * j / (p + 1);
        for (int i = 0; i < m; ++i) {
            double phi = 2.0 * M_PI * i / m;
            out.vertices.push_back(place({std::sin(theta) * std::cos(phi),
                                          std::sin(theta) * std::sin(phi), std::cos(theta)}));
        }
    }
    out.vertices.push_back(place({0, 0, -1}));  // south pole
    const int south = m * p + 1;
    auto ring = [m](int j, int i) { return 1 + (j - 1) * m + (i % m); };

    for (int i = 0; i < m; ++i) out.faces.push_back({0, ring(1, i), ring(1, i + 1)});
    for (int j = 1; j < p; ++j) {
        for (int i = 0; i < m; ++i) {
            int u0 = ring(j, i), u1 = ring(j, i + 1);
            int l0 = ring(j + 1, i), l1 = ring(j + 1, i + 1);
            out.faces.push_back({u0, l0, l1});
            out.faces.push_back({u0, l1, u1});
        }
    }
    for (int i = 0; i < m; ++i) out.faces.push_back({south, ring(p, i + 1), ring(p, i)});
    return out;
}

// --- fender -----------------------------------------------------------------

// Gentle doubly curved base with a cusp-shaped crest running across.
double fender_base(double x, double y, double lx, double ly) {
    double u = x / lx, v = y / ly;
    return 0.10 * std::sin(M_PI * u) + 0.03 * std::cos(M_PI * (v - 0.5));
}

double fender_crest(double x, double y, double lx, double ly) {
    double u = x / lx, v = y / ly;
    double vc = 0.55 + 0.12 * std::sin(2.0 * M_PI * u);
    double d = (v - vc) / 0.12;
    return 0.030 * std::exp(-d * d);
}

// Closed plate on an n x n cell grid with a 4 x 4 pattern of square
// holes, top and bottom sheets joined by walls: genus 16.
RawMesh make_fender(int n, double lx, double ly, double thickness) {
    const std::vector<int> offsets = {13, 41, 69, 97};
    const int hole_cells = 10;
    auto in_range = [&](int q) {
        for (int o : offsets)
            if (q >= o && q < o + hole_cells) return true;
        return false;
    };
    auto hole_cell = [&](int ix, int iy) { return in_range(ix) && in_range(iy); };
    auto in_interior = [&](int q) {
        for (int o : offsets)
            if (q > o && q < o + hole_cells) return true;
        return false;
    };
    auto removed_vertex = [&](int ix, int iy) { return in_interior(ix) && in_interior(iy); };

    RawMesh out;
    std::vector<int> top_id((n + 1) * (n + 1), -1), bot_id((n + 1) * (n + 1), -1);
    auto grid = [n](int ix, int iy) { return iy * (n + 1) + ix; };

    for (int iy = 0; iy <= n; ++iy) {
        for (int ix = 0; ix <= n; ++ix) {
            if (removed_vertex(ix, iy)) continue;
            double x = lx * ix / n, y = ly * iy / n;
            double zb = fender_base(x, y, lx, ly);
            double zt = zb + thickness + fender_crest(x, y, lx, ly);
            top_id[grid(ix, iy)] = static_cast<int>(out.vertices.size());
            out.vertices.push_back({x, y, zt});
        }
    }
    for (int iy = 0; iy <= n; ++iy) {
        for (int ix = 0; ix <= n; ++ix) {
            if (removed_vertex(ix, iy)) continue;
            double x = lx * ix / n, y = ly * iy / n;
            bot_id[grid(ix, iy)] = static_cast<int>(out.vertices.size());
            out.vertices.push_back({x, y, fender_base(x, y, lx, ly)});
        }
    }

    // top sheet CCW from above, bottom mirrored
    std::map<std::pair<int, int>, int> half_edges;  // directed top edges
    auto add_top = [&](int a, int b, int c) {
        out.faces.push_back({a, b, c});
        half_edges[{a, b}] = 1;
        half_edges[{b, c}] = 1;
        half_edges[{c, a}] = 1;
    };
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            if (hole_cell(ix, iy)) continue;
            int a = top_id[grid(ix, iy)], b = top_id[grid(ix + 1, iy)];
            int c = top_id[grid(ix + 1, iy + 1)], d = top_id[grid(ix, iy + 1)];
            add_top(a, b, c);
            add_top(a, c, d);
            int a2 = bot_id[grid(ix, iy)], b2 = bot_id[grid(ix + 1, iy)];
            int c2 = bot_id[grid(ix + 1, iy + 1)], d2 = bot_id[grid(ix, iy + 1)];
            out.faces.push_back({a2, c2, b2});
            out.faces.push_back({a2, d2, c2});
        }
    }

    // walls along every top boundary half-edge (no reverse partner)
    std::map<int, int> top_to_bot;
    for (int i = 0; i < (n + 1) * (n + 1); ++i)
        if (top_id[i] >= 0) top_to_bot[top_id[i]] = bot_id[i];
    for (const auto& [edge, _] : half_edges) {
        auto [a, b] = edge;
        if (half_edges.count({b, a})) continue;
        int ba = top_to_bot.at(a), bb = top_to_bot.at(b);
        out.faces.push_back({b, a, ba});
        out.faces.push_back({b, ba, bb});
    }
    return out;
}

// Midpoint split of the longest edge, repeated; each split adds one
// vertex and two faces without moving the surface.
void split_longest_edges(RawMesh& mesh, int n_splits) {
    for (int s = 0; s < n_splits; ++s) {
        double best_len = -1.0;
        int best_u = -1, best_v = -1;
        for (const auto& f : mesh.faces) {
            for (int k = 0; k < 3; ++k) {
                int u = f[k], v = f[(k + 1) % 3];
                if (u > v) continue;
                double len = (mesh.vertices[u] - mesh.vertices[v]).squaredNorm();
                if (len > best_len) {
                    best_len = len;
                    best_u = u;
                    best_v = v;
                }
            }
        }
        int mid = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(0.5 * (mesh.vertices[best_u] + mesh.vertices[best_v]));
        size_t n_faces = mesh.faces.size();
        for (size_t fi = 0; fi < n_faces; ++fi) {
            auto f = mesh.faces[fi];
            for (int k = 0; k < 3; ++k) {
                int u = f[k], v = f[(k + 1) % 3], w = f[(k + 2) % 3];
                if ((u == best_u && v == best_v) || (u == best_v && v == best_u)) {
                    mesh.faces[fi] = {u, mid, w};
                    mesh.faces.push_back({mid, v, w});
                    break;
                }
            }
        }
    }
}

void write_asset(const md::Mesh& mesh, const std::string& dir, const std::string& name) {
    std::string path = dir + "/" + name + ".obj";
    md::save_obj(mesh, path);
    std::cout << path << ": " << mesh.num_vertices() << " vertices, " << mesh.num_faces()
              << " faces\n";
}

}  // namespace

int main(int argc, char** argv) {
    std::string dir = argc > 1 ? argv[1] : "assets";
    try {
        write_asset(finalize(make_bunny(50, 40, 0.075), 2002, 4000, "bunny_simple"), dir,
                    "bunny_simple");
        write_asset(finalize(make_bunny(165, 211, 0.075), 34817, 69630, "bunny"), dir, "bunny");

        RawMesh fender = make_fender(128, 1.4, 0.5, 0.03);
        split_longest_edges(fender, 229);
        write_asset(finalize(std::move(fender), 30919, 61898, "fender"), dir, "fender");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
