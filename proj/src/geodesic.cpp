#include "meshdmp/geodesic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <mutex>
#include <optional>
#include <queue>
#include <set>
#include <unordered_map>

namespace meshdmp {

namespace {

using Vec2 = Eigen::Vector2d;
constexpr double kInf = std::numeric_limits<double>::max();

// ---------------------------------------------------------------------------
// edge-subdivision graph shared by all solvers on one mesh

struct SteinerGraph {
    static constexpr int kPerEdge = 4;
    int nv = 0;
    int ne = 0;
    std::vector<Vec3> pos;                        // node id -> position
    std::vector<std::array<int, 15>> face_nodes;  // 3 vertices + 12 steiner per face

    int num_nodes() const { return nv + kPerEdge * ne; }

    static std::shared_ptr<SteinerGraph> build(const Mesh& mesh) {
        auto g = std::make_shared<SteinerGraph>();
        g->nv = mesh.num_vertices();
        g->ne = mesh.num_edges();
        g->pos.resize(g->num_nodes());
        for (int v = 0; v < g->nv; ++v) g->pos[v] = mesh.vertex(v);
        for (int e = 0; e < g->ne; ++e) {
            const Vec3& a = mesh.vertex(mesh.edges()[e][0]);
            const Vec3& b = mesh.vertex(mesh.edges()[e][1]);
            for (int j = 0; j < kPerEdge; ++j) {
                double t = static_cast<double>(j + 1) / (kPerEdge + 1);
                g->pos[g->nv + kPerEdge * e + j] = (1.0 - t) * a + t * b;
            }
        }
        g->face_nodes.resize(mesh.num_faces());
        for (int f = 0; f < mesh.num_faces(); ++f) {
            const auto& tri = mesh.face(f);
            auto& nodes = g->face_nodes[f];
            for (int k = 0; k < 3; ++k) nodes[k] = tri[k];
            for (int k = 0; k < 3; ++k) {
                int e = mesh.edge_between(tri[k], tri[(k + 1) % 3]);
                for (int j = 0; j < kPerEdge; ++j)
                    nodes[3 + 4 * k + j] = g->nv + kPerEdge * e + j;
            }
        }
        return g;
    }
};

// faces a SurfacePoint touches (1 interior, 2 on an edge, fan at a vertex)
std::vector<int> face_set(const Mesh& mesh, const SurfacePoint& sp) {
    constexpr double kZero = 1e-12;
    int zeros = 0;
    for (int k = 0; k < 3; ++k)
        if (sp.bary[k] <= kZero) ++zeros;
    if (zeros == 0) return {sp.face};
    const auto& tri = mesh.face(sp.face);
    if (zeros == 1) {
        for (int k = 0; k < 3; ++k)
            if (sp.bary[k] <= kZero) {
                int e = mesh.edge_between(tri[(k + 1) % 3], tri[(k + 2) % 3]);
                auto faces = mesh.edge_faces(e);
                std::sort(faces.begin(), faces.end());
                return faces;
            }
    }
    for (int k = 0; k < 3; ++k)
        if (sp.bary[k] > kZero) {
            auto faces = mesh.vertex_faces(tri[k]);
            std::sort(faces.begin(), faces.end());
            return faces;
        }
    return {sp.face};
}

bool sets_intersect(const std::vector<int>& a, const std::vector<int>& b, int* common) {
    for (int x : a)
        for (int y : b)
            if (x == y) {
                if (common) *common = x;
                return true;
            }
    return false;
}

// neighbor of `face` across one of its two v-incident edges, skipping `from`
int v_step(const Mesh& mesh, int face, int v, int from) {
    const auto& tri = mesh.face(face);
    int out[2] = {-1, -1};
    int n = 0;
    for (int k = 0; k < 3; ++k) {
        if (tri[k] == v || tri[(k + 1) % 3] == v) {
            if (n < 2) out[n++] = mesh.face_neighbor(face, k);
        }
    }
    if (out[0] != from && out[0] != -1) return out[0];
    if (out[1] != from) return out[1];
    return -1;
}

// faces strictly between f and g walking around v, entering via `first`
std::optional<std::vector<int>> fan_walk(const Mesh& mesh, int v, int f, int first, int g) {
    std::vector<int> fan;
    int limit = static_cast<int>(mesh.vertex_faces(v).size()) + 2;
    int prev = f, cur = first;
    while (cur != g) {
        if (cur == -1 || static_cast<int>(fan.size()) > limit) return std::nullopt;
        fan.push_back(cur);
        int nxt = v_step(mesh, cur, v, prev);
        prev = cur;
        cur = nxt;
    }
    return fan;
}

// shortest fan around v connecting edge-nonadjacent faces f -> g
std::optional<std::vector<int>> fan_between(const Mesh& mesh, int v, int f, int g) {
    const auto& tri = mesh.face(f);
    std::optional<std::vector<int>> best;
    for (int k = 0; k < 3; ++k) {
        if (tri[k] != v && tri[(k + 1) % 3] != v) continue;
        int first = mesh.face_neighbor(f, k);
        if (first == -1) continue;
        auto fan = fan_walk(mesh, v, f, first, g);
        if (!fan) continue;
        if (!best || fan->size() < best->size() ||
            (fan->size() == best->size() && !fan->empty() && !best->empty() &&
             fan->front() < best->front()))
            best = fan;
    }
    return best;
}

// ---------------------------------------------------------------------------
// strip unfolding + funnel straightening

struct Hinge {
    int lv = -1;  // mesh vertex left of travel (head of the exit edge)
    int rv = -1;
    Vec2 l2 = Vec2::Zero();
    Vec2 r2 = Vec2::Zero();
};

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }
// negatively oriented on purpose: the funnel comparisons below assume
// triarea2(a, b, c) > 0 means c lies right of a->b
double triarea2(const Vec2& a, const Vec2& b, const Vec2& c) { return cross2(c - a, b - a); }

Vec3 bary_in_triangle(const Mesh& mesh, int f, const Vec3& p) {
    const auto& tri = mesh.face(f);
    Vec3 q, bc;
    closest_point_triangle(p, mesh.vertex(tri[0]), mesh.vertex(tri[1]), mesh.vertex(tri[2]), q,
                           bc);
    return bc;
}

struct Unfolded {
    std::vector<std::array<Vec2, 3>> coords;  // per strip face, stored vertex order
    std::vector<Hinge> hinges;                // strip.size()-1 entries
    Vec2 s2, t2;
    bool ok = true;
};

Unfolded unfold_strip(const Mesh& mesh, const std::vector<int>& strip, const SurfacePoint& s,
                      const SurfacePoint& t) {
    Unfolded u;
    const int m = static_cast<int>(strip.size());
    u.coords.resize(m);
    u.hinges.resize(m - 1);

    {
        const auto& tri = mesh.face(strip[0]);
        Vec3 e1 = mesh.vertex(tri[1]) - mesh.vertex(tri[0]);
        Vec3 e2 = mesh.vertex(tri[2]) - mesh.vertex(tri[0]);
        double l1 = e1.norm();
        u.coords[0][0] = Vec2(0, 0);
        u.coords[0][1] = Vec2(l1, 0);
        u.coords[0][2] = Vec2(e1.dot(e2) / l1, e1.cross(e2).norm() / l1);
    }

    for (int k = 0; k + 1 < m; ++k) {
        // exit edge of strip[k] toward strip[k+1]
        int slot = -1;
        for (int j = 0; j < 3; ++j)
            if (mesh.face_neighbor(strip[k], j) == strip[k + 1]) {
                slot = j;
                break;
            }
        if (slot == -1) {
            u.ok = false;
            return u;
        }
        const auto& tri = mesh.face(strip[k]);
        Hinge& h = u.hinges[k];
        h.rv = tri[slot];
        h.lv = tri[(slot + 1) % 3];
        h.r2 = u.coords[k][slot];
        h.l2 = u.coords[k][(slot + 1) % 3];

        // place the next face across the hinge, away from this face
        const auto& ntr = mesh.face(strip[k + 1]);
        int wv = -1;
        for (int j = 0; j < 3; ++j)
            if (ntr[j] != h.lv && ntr[j] != h.rv) wv = ntr[j];
        if (wv == -1) {
            u.ok = false;
            return u;
        }
        Vec2 L = h.l2, R = h.r2;
        double d = (R - L).norm();
        if (d <= 0) {
            u.ok = false;
            return u;
        }
        Vec2 dir = (R - L) / d;
        Vec2 nrm(-dir.y(), dir.x());
        double dLW = (mesh.vertex(wv) - mesh.vertex(h.lv)).norm();
        double dRW = (mesh.vertex(wv) - mesh.vertex(h.rv)).norm();
        double a = (dLW * dLW - dRW * dRW + d * d) / (2.0 * d);
        double hh = std::sqrt(std::max(0.0, dLW * dLW - a * a));
        const Vec2& pv = u.coords[k][(slot + 2) % 3];  // previous third vertex
        double side = cross2(R - L, pv - L) >= 0 ? 1.0 : -1.0;
        Vec2 W = L + dir * a + nrm * (-side * hh);
        for (int j = 0; j < 3; ++j) {
            if (ntr[j] == h.lv)
                u.coords[k + 1][j] = L;
            else if (ntr[j] == h.rv)
                u.coords[k + 1][j] = R;
            else
                u.coords[k + 1][j] = W;
        }
    }

    Vec3 bs = bary_in_triangle(mesh, strip.front(), s.position);
    Vec3 bt = bary_in_triangle(mesh, strip.back(), t.position);
    u.s2 = bs[0] * u.coords.front()[0] + bs[1] * u.coords.front()[1] + bs[2] * u.coords.front()[2];
    u.t2 = bt[0] * u.coords.back()[0] + bt[1] * u.coords.back()[1] + bt[2] * u.coords.back()[2];
    return u;
}

struct FunnelResult {
    std::vector<Vec2> path;                   // s2 .. apexes .. t2
    std::vector<std::pair<int, int>> apexes;  // (hinge index, 0=left 1=right) per interior point
    std::vector<double> cross_t;              // per hinge: param left->right
    double length = 0;
};

FunnelResult run_funnel(const Unfolded& u, double eq_eps) {
    FunnelResult res;
    const int nh = static_cast<int>(u.hinges.size());
    // portal list with point sentinels at both ends
    std::vector<std::pair<Vec2, Vec2>> portals(nh + 2);
    portals[0] = {u.s2, u.s2};
    for (int k = 0; k < nh; ++k) portals[k + 1] = {u.hinges[k].l2, u.hinges[k].r2};
    portals[nh + 1] = {u.t2, u.t2};

    auto vequal = [&](const Vec2& a, const Vec2& b) { return (a - b).squaredNorm() <= eq_eps * eq_eps; };

    res.path.push_back(u.s2);
    Vec2 apex = u.s2, lpt = u.s2, rpt = u.s2;
    int apexi = 0, li = 0, ri = 0;
    int guard = 0;
    const int guard_max = 100 * (nh + 2) + 1000;
    for (int i = 1; i < nh + 2; ++i) {
        if (++guard > guard_max) throw NonTermination("funnel failed to converge");
        const Vec2& left = portals[i].first;
        const Vec2& right = portals[i].second;

        if (triarea2(apex, rpt, right) <= 0.0) {
            if (vequal(apex, rpt) || triarea2(apex, lpt, right) > 0.0) {
                rpt = right;
                ri = i;
            } else {
                res.path.push_back(lpt);
                res.apexes.emplace_back(li - 1, 0);
                apex = lpt;
                apexi = li;
                lpt = rpt = apex;
                li = ri = apexi;
                i = apexi;
                continue;
            }
        }
        if (triarea2(apex, lpt, left) >= 0.0) {
            if (vequal(apex, lpt) || triarea2(apex, rpt, left) < 0.0) {
                lpt = left;
                li = i;
            } else {
                res.path.push_back(rpt);
                res.apexes.emplace_back(ri - 1, 1);
                apex = rpt;
                apexi = ri;
                lpt = rpt = apex;
                li = ri = apexi;
                i = apexi;
                continue;
            }
        }
    }
    res.path.push_back(u.t2);

    // drop consecutive duplicates (funnel can emit the apex twice)
    {
        std::vector<Vec2> pts;
        std::vector<std::pair<int, int>> apx;
        pts.push_back(res.path.front());
        for (size_t i = 1; i + 1 < res.path.size(); ++i) {
            if (!vequal(res.path[i], pts.back())) {
                pts.push_back(res.path[i]);
                apx.push_back(res.apexes[i - 1]);
            }
        }
        if (res.path.size() > 1) pts.push_back(res.path.back());
        res.path = std::move(pts);
        res.apexes = std::move(apx);
    }

    for (size_t i = 0; i + 1 < res.path.size(); ++i)
        res.length += (res.path[i + 1] - res.path[i]).norm();

    // crossing parameter on every hinge, walking path segments in tandem
    res.cross_t.assign(nh, 0.5);
    size_t seg = 0;
    for (int k = 0; k < nh; ++k) {
        const Vec2 L = u.hinges[k].l2, R = u.hinges[k].r2;
        bool found = false;
        for (size_t s = seg; s + 1 < res.path.size(); ++s) {
            Vec2 A = res.path[s], B = res.path[s + 1];
            double den = cross2(B - A, R - L);
            if (std::abs(den) < 1e-300) continue;
            double tt = cross2(B - A, A - L) / den;
            double uu = cross2(R - L, A - L) / den;
            if (tt >= -1e-9 && tt <= 1.0 + 1e-9 && uu >= -1e-9 && uu <= 1.0 + 1e-9) {
                res.cross_t[k] = std::clamp(tt, 0.0, 1.0);
                seg = s;
                found = true;
                break;
            }
        }
        if (!found) {
            // parallel/degenerate overlap: use the nearest path point
            Vec2 P = res.path[std::min(seg + 1, res.path.size() - 1)];
            double dd = (R - L).squaredNorm();
            double tt = dd > 0 ? (P - L).dot(R - L) / dd : 0.5;
            res.cross_t[k] = std::clamp(tt, 0.0, 1.0);
        }
    }
    return res;
}

struct StraightenResult {
    std::vector<int> strip;
    Unfolded unfolded;
    FunnelResult funnel;
};

// iteratively reroute the strip around vertices the path bends on
StraightenResult straighten(const Mesh& mesh, std::vector<int> strip, const SurfacePoint& s,
                            const SurfacePoint& t) {
    const double eq_eps = 1e-13 * std::max(1.0, mesh.bbox_diagonal());
    StraightenResult best;
    best.strip = std::move(strip);
    best.unfolded = unfold_strip(mesh, best.strip, s, t);
    if (!best.unfolded.ok) throw DomainError("internal: malformed geodesic strip");
    best.funnel = run_funnel(best.unfolded, eq_eps);

    std::set<int> pinned;
    for (int pass = 0; pass < 100; ++pass) {
        // strongest bend at an unpinned strip vertex
        double worst = 1e-9;
        int bend_hinge = -1, bend_side = 0, bend_v = -1;
        const auto& path = best.funnel.path;
        for (size_t i = 1; i + 1 < path.size(); ++i) {
            Vec2 d1 = path[i] - path[i - 1];
            Vec2 d2 = path[i + 1] - path[i];
            double turn = std::atan2(std::abs(cross2(d1, d2)), d1.dot(d2));
            auto [h, side] = best.funnel.apexes[i - 1];
            if (h < 0 || h >= static_cast<int>(best.unfolded.hinges.size())) continue;
            int v = side == 0 ? best.unfolded.hinges[h].lv : best.unfolded.hinges[h].rv;
            if (pinned.count(v)) continue;
            if (turn > worst) {
                worst = turn;
                bend_hinge = h;
                bend_side = side;
                bend_v = v;
            }
        }
        if (bend_hinge < 0) break;

        // maximal run of hinges pivoting on that vertex
        int a = bend_hinge, b = bend_hinge;
        auto touches = [&](int h) {
            return best.unfolded.hinges[h].lv == bend_v || best.unfolded.hinges[h].rv == bend_v;
        };
        while (a > 0 && touches(a - 1)) --a;
        while (b + 1 < static_cast<int>(best.unfolded.hinges.size()) && touches(b + 1)) ++b;

        // re-thread the corridor through either side of the vertex; the side
        // matching the current corridor just reproduces it and is rejected
        int f_from = best.strip[a], f_to = best.strip[b + 1];
        bool improved = false;
        const auto& tri = mesh.face(f_from);
        for (int k = 0; k < 3; ++k) {
            if (tri[k] != bend_v && tri[(k + 1) % 3] != bend_v) continue;
            int first = mesh.face_neighbor(f_from, k);
            if (first == -1) continue;
            auto fan = fan_walk(mesh, bend_v, f_from, first, f_to);
            if (!fan) continue;

            std::vector<int> cand;
            cand.reserve(best.strip.size());
            cand.insert(cand.end(), best.strip.begin(), best.strip.begin() + a + 1);
            for (int f : *fan)
                if (f != cand.back()) cand.push_back(f);
            for (size_t i = b + 1; i < best.strip.size(); ++i)
                if (best.strip[i] != cand.back()) cand.push_back(best.strip[i]);

            Unfolded cu = unfold_strip(mesh, cand, s, t);
            if (!cu.ok) continue;
            FunnelResult cf = run_funnel(cu, eq_eps);
            if (cf.length < best.funnel.length - 1e-10) {
                best.strip = std::move(cand);
                best.unfolded = std::move(cu);
                best.funnel = std::move(cf);
                improved = true;
                break;
            }
        }
        if (improved)
            pinned.clear();
        else
            pinned.insert(bend_v);
    }
    return best;
}

// lift the funnel's hinge crossings back to on-surface points
GeodesicPath assemble_path(const Mesh& mesh, const SurfacePoint& s, const SurfacePoint& t,
                           const StraightenResult& sr) {
    GeodesicPath path;
    path.points.push_back(s);
    const double merge = 1e-13 * std::max(1.0, mesh.bbox_diagonal());
    for (size_t k = 0; k < sr.unfolded.hinges.size(); ++k) {
        const Hinge& h = sr.unfolded.hinges[k];
        double tt = sr.funnel.cross_t[k];
        Vec3 p = (1.0 - tt) * mesh.vertex(h.lv) + tt * mesh.vertex(h.rv);
        if ((p - path.points.back().position).norm() <= merge) continue;
        if ((p - t.position).norm() <= merge) continue;
        int f = std::min(sr.strip[k], sr.strip[k + 1]);
        const auto& tri = mesh.face(f);
        Vec3 bary = Vec3::Zero();
        for (int j = 0; j < 3; ++j) {
            if (tri[j] == h.lv) bary[j] = 1.0 - tt;
            if (tri[j] == h.rv) bary[j] = tt;
        }
        SurfacePoint sp;
        sp.face = f;
        sp.bary = bary;
        sp.position = p;
        path.points.push_back(sp);
    }
    if ((t.position - path.points.back().position).norm() > 0 || path.points.size() == 1)
        path.points.push_back(t);
    path.segment_lengths.resize(path.points.size() - 1);
    for (size_t i = 0; i + 1 < path.points.size(); ++i)
        path.segment_lengths[i] =
            (path.points[i + 1].position - path.points[i].position).norm();
    return path;
}

}  // namespace

// ---------------------------------------------------------------------------
// GeodesicPath

double GeodesicPath::length() const {
    double sum = 0;
    for (double s : segment_lengths) sum += s;
    return sum;
}

GeodesicPath GeodesicPath::reversed() const {
    GeodesicPath r;
    r.points.assign(points.rbegin(), points.rend());
    r.segment_lengths.assign(segment_lengths.rbegin(), segment_lengths.rend());
    return r;
}

double path_length(const GeodesicPath& path) { return path.length(); }

// ---------------------------------------------------------------------------
// solver

struct GeodesicSolver::Impl {
    const Mesh& mesh;
    std::shared_ptr<const SteinerGraph> graph;
    SurfacePoint source;
    std::vector<int> source_faces;
    std::vector<double> dist;
    std::vector<int> pred;  // -1 unreached, -2 seeded directly from the source
    double build_seconds = 0;

    explicit Impl(const Mesh& m, const SurfacePoint& src) : mesh(m), source(src) {
        graph = m.cached<SteinerGraph>([&] { return SteinerGraph::build(m); });
        source_faces = face_set(m, src);
    }

    // Dijkstra over the subdivision graph; with `early` set, stops as soon
    // as the best possible entry for that target is settled
    void run(const SurfacePoint* early) {
        auto t0 = std::chrono::steady_clock::now();
        const int n = graph->num_nodes();
        dist.assign(n, kInf);
        pred.assign(n, -1);
        using QE = std::pair<double, int>;
        std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
        for (int f : source_faces)
            for (int node : graph->face_nodes[f]) {
                double d = (graph->pos[node] - source.position).norm();
                if (d < dist[node]) {
                    dist[node] = d;
                    pred[node] = -2;
                    pq.push({d, node});
                }
            }

        std::vector<int> target_nodes;
        double target_best = kInf;
        if (early) {
            for (int f : face_set(mesh, *early))
                for (int node : graph->face_nodes[f]) target_nodes.push_back(node);
            std::sort(target_nodes.begin(), target_nodes.end());
            target_nodes.erase(std::unique(target_nodes.begin(), target_nodes.end()),
                               target_nodes.end());
        }

        std::vector<char> done(n, 0);
        while (!pq.empty()) {
            auto [d, node] = pq.top();
            pq.pop();
            if (done[node]) continue;
            done[node] = 1;
            if (early) {
                for (int tn : target_nodes)
                    if (tn == node)
                        target_best = std::min(
                            target_best, d + (graph->pos[node] - early->position).norm());
                if (d > target_best) break;
            }
            auto relax_from = [&](int f) {
                for (int nb : graph->face_nodes[f]) {
                    if (nb == node || done[nb]) continue;
                    double nd = d + (graph->pos[nb] - graph->pos[node]).norm();
                    if (nd < dist[nb]) {
                        dist[nb] = nd;
                        pred[nb] = node;
                        pq.push({nd, nb});
                    }
                }
            };
            if (node < graph->nv)
                for (int f : mesh.vertex_faces(node)) relax_from(f);
            else
                for (int f : mesh.edge_faces((node - graph->nv) / SteinerGraph::kPerEdge))
                    relax_from(f);
        }
        build_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    std::vector<int> node_faces(int node) const {
        if (node < graph->nv) {
            auto fs = mesh.vertex_faces(node);
            std::sort(fs.begin(), fs.end());
            return fs;
        }
        auto fs = mesh.edge_faces((node - graph->nv) / SteinerGraph::kPerEdge);
        std::sort(fs.begin(), fs.end());
        return fs;
    }

    GeodesicPath query(const SurfacePoint& target) const {
        const double same_eps = 1e-14 * std::max(1.0, mesh.bbox_diagonal());
        if ((target.position - source.position).norm() <= same_eps) {
            GeodesicPath p;
            p.points.push_back(source);
            return p;
        }
        auto target_faces = face_set(mesh, target);
        if (sets_intersect(source_faces, target_faces, nullptr)) {
            // both in one (convex) face: a single straight segment
            GeodesicPath p;
            p.points = {source, target};
            p.segment_lengths = {(target.position - source.position).norm()};
            return p;
        }

        int entry = -1;
        double best = kInf;
        for (int f : target_faces)
            for (int node : graph->face_nodes[f]) {
                if (dist[node] == kInf) continue;
                double d = dist[node] + (graph->pos[node] - target.position).norm();
                if (d < best) {
                    best = d;
                    entry = node;
                }
            }
        if (entry == -1) throw UnreachableTarget("no on-surface path reaches the target");

        std::vector<int> chain;  // source-side first
        for (int node = entry; node != -2; node = pred[node]) chain.push_back(node);
        std::reverse(chain.begin(), chain.end());

        // face per straight segment of the initial polyline
        std::vector<std::vector<int>> psets;
        psets.push_back(source_faces);
        for (int node : chain) psets.push_back(node_faces(node));
        psets.push_back(target_faces);

        std::vector<int> seg_face(psets.size() - 1);
        int prev = -1;
        for (size_t i = 0; i + 1 < psets.size(); ++i) {
            int pick = -1;
            if (prev != -1 && sets_intersect({prev}, psets[i], nullptr) &&
                sets_intersect({prev}, psets[i + 1], nullptr))
                pick = prev;
            else {
                for (int f : psets[i]) {
                    if (!sets_intersect({f}, psets[i + 1], nullptr)) continue;
                    if (pick == -1 || f < pick) pick = f;
                }
            }
            if (pick == -1) throw DomainError("internal: disconnected geodesic chain");
            seg_face[i] = pick;
            prev = pick;
        }

        std::vector<int> strip;
        for (int f : seg_face)
            if (strip.empty() || strip.back() != f) strip.push_back(f);

        // make consecutive strip faces edge-adjacent (insert vertex fans)
        std::vector<int> full;
        full.push_back(strip[0]);
        for (size_t i = 1; i < strip.size(); ++i) {
            int f = full.back(), g = strip[i];
            bool adjacent = false;
            for (int j = 0; j < 3; ++j)
                if (mesh.face_neighbor(f, j) == g) adjacent = true;
            if (!adjacent) {
                int v = -1;
                const auto& ta = mesh.face(f);
                const auto& tb = mesh.face(g);
                for (int x : ta)
                    for (int y : tb)
                        if (x == y && (v == -1 || x < v)) v = x;
                if (v == -1) throw DomainError("internal: non-incident strip faces");
                auto fan = fan_between(mesh, v, f, g);
                if (!fan) throw DomainError("internal: blocked vertex fan in geodesic strip");
                for (int ff : *fan)
                    if (ff != full.back()) full.push_back(ff);
            }
            if (g != full.back()) full.push_back(g);
        }

        // collapse back-and-forth wanders (A B A -> A) left by fan insertion;
        // a shortest path never crosses the same edge twice
        for (size_t i = 2; i < full.size();) {
            if (full[i] == full[i - 2]) {
                full.erase(full.begin() + i - 1, full.begin() + i + 1);
                i = i > 2 ? i - 1 : 2;
            } else {
                ++i;
            }
        }

        // an endpoint sitting on an edge or vertex also lies on the next
        // strip face; the leading face is then vestigial and its gate would
        // pass through the funnel apex, degenerating the wedge
        while (full.size() > 1 && sets_intersect({full[1]}, source_faces, nullptr))
            full.erase(full.begin());
        while (full.size() > 1 && sets_intersect({full[full.size() - 2]}, target_faces, nullptr))
            full.pop_back();

        auto sr = straighten(mesh, full, source, target);
        return assemble_path(mesh, source, target, sr);
    }
};

GeodesicSolver::GeodesicSolver(const Mesh& mesh, const SurfacePoint& source)
    : impl_(std::make_unique<Impl>(mesh, source)) {
    impl_->run(nullptr);
}

GeodesicSolver::~GeodesicSolver() = default;
GeodesicSolver::GeodesicSolver(GeodesicSolver&&) noexcept = default;
GeodesicSolver& GeodesicSolver::operator=(GeodesicSolver&&) noexcept = default;

const SurfacePoint& GeodesicSolver::source() const { return impl_->source; }
const Mesh& GeodesicSolver::mesh() const { return impl_->mesh; }
double GeodesicSolver::build_seconds() const { return impl_->build_seconds; }

GeodesicPath GeodesicSolver::query_path(const SurfacePoint& target) const {
    return impl_->query(target);
}

GeodesicPath shortest_path_between(const Mesh& mesh, const SurfacePoint& a,
                                   const SurfacePoint& b) {
    GeodesicSolver::Impl impl(mesh, a);
    impl.run(&b);
    return impl.query(b);
}

// ---------------------------------------------------------------------------
// memoized per-goal solvers

namespace {

struct SolverKey {
    int face;
    long long q0, q1;
    bool operator==(const SolverKey&) const = default;
};

struct SolverKeyHash {
    size_t operator()(const SolverKey& k) const {
        size_t h = std::hash<int>()(k.face);
        h ^= std::hash<long long>()(k.q0) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h ^= std::hash<long long>()(k.q1) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        return h;
    }
};

struct SolverMemo {
    std::mutex mutex;
    std::unordered_map<SolverKey, std::shared_ptr<const GeodesicSolver>, SolverKeyHash> map;
    std::deque<SolverKey> order;
};

}  // namespace

std::shared_ptr<const GeodesicSolver> shared_solver(const Mesh& mesh,
                                                    const SurfacePoint& source) {
    auto memo = mesh.cached<SolverMemo>([] { return std::make_shared<SolverMemo>(); });
    SolverKey key{source.face, std::llround(source.bary[0] * 1e9),
                  std::llround(source.bary[1] * 1e9)};
    std::lock_guard<std::mutex> lock(memo->mutex);
    auto it = memo->map.find(key);
    if (it != memo->map.end()) return it->second;
    auto solver = std::make_shared<const GeodesicSolver>(mesh, source);
    if (memo->map.size() >= 8) {
        memo->map.erase(memo->order.front());
        memo->order.pop_front();
    }
    memo->map.emplace(key, solver);
    memo->order.push_back(key);
    return solver;
}

}  // namespace meshdmp
