#include "meshdmp/manifold_ops.hpp"

#include <cmath>
#include <limits>

namespace meshdmp {

namespace {

// unit vector in the plane of `n`, from `dir` (or a basis fallback)
Vec3 planar_unit(const Vec3& dir, const Vec3& n, const Vec3& fallback) {
    Vec3 p = dir - n.dot(dir) * n;
    double len = p.norm();
    if (len > 1e-12 * (dir.norm() + 1e-300)) return p / len;
    Vec3 f = fallback - n.dot(fallback) * n;
    double fl = f.norm();
    if (fl > 0) return f / fl;
    // arbitrary but deterministic in-plane direction
    Vec3 axis = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    return n.cross(axis).normalized();
}

Mat3 frame(const Vec3& w, const Vec3& n) {
    Mat3 m;
    m.col(0) = w;
    m.col(1) = n.cross(w);
    m.col(2) = n;
    return m;
}

// first direction of the polyline with a nonzero segment, or zero
Vec3 first_segment_dir(const GeodesicPath& path) {
    for (size_t i = 0; i + 1 < path.points.size(); ++i) {
        Vec3 d = path.points[i + 1].position - path.points[i].position;
        double len = d.norm();
        if (len > 0) return d / len;
    }
    return Vec3::Zero();
}

Vec3 last_segment_dir(const GeodesicPath& path) {
    for (size_t i = path.points.size(); i-- > 1;) {
        Vec3 d = path.points[i].position - path.points[i - 1].position;
        double len = d.norm();
        if (len > 0) return d / len;
    }
    return Vec3::Zero();
}

}  // namespace

TransportRotation transport_rotation(const Mesh& mesh, const GeodesicPath& path, const Vec3& v) {
    if (path.points.empty()) throw DomainError("transport along an empty path");
    TransportRotation tr;
    tr.from = path.points.front();
    tr.to = path.points.back();
    const Vec3& n1 = mesh.face_normal(tr.from.face);
    const Vec3& n2 = mesh.face_normal(tr.to.face);

    Vec3 d1 = first_segment_dir(path);
    if (d1.isZero()) {
        // degenerate path: align frames along v itself; identity for v = 0
        if (v.norm() == 0.0 || tr.from.face == tr.to.face) return tr;
        Vec3 w1 = planar_unit(v, n1, Vec3::Zero());
        Vec3 w2 = planar_unit(w1, n2, n2.cross(n1));
        tr.rotation = frame(w2, n2) * frame(w1, n1).transpose();
        return tr;
    }
    Vec3 w1 = planar_unit(d1, n1, Vec3::Zero());
    Vec3 w2 = planar_unit(last_segment_dir(path), n2, Vec3::Zero());
    tr.rotation = frame(w2, n2) * frame(w1, n1).transpose();
    return tr;
}

TangentVector parallel_transport(const Mesh& mesh, const GeodesicPath& path,
                                 const TangentVector& v) {
    if (path.points.empty()) throw DomainError("transport along an empty path");
    double tol = 1e-9 * std::max(1.0, mesh.bbox_diagonal());
    if ((v.base.position - path.points.front().position).norm() > tol)
        throw DomainError("transported vector is not based at the path start");
    TransportRotation tr = transport_rotation(mesh, path, v.vec);
    return TangentVector{path.points.back(), tr.rotation * v.vec};
}

TangentVector log_map(const Mesh& mesh, const SurfacePoint& m1, const SurfacePoint& m2) {
    double same = 1e-14 * std::max(1.0, mesh.bbox_diagonal());
    if ((m1.position - m2.position).norm() <= same) return TangentVector{m1, Vec3::Zero()};
    GeodesicPath path = shortest_path_between(mesh, m1, m2);
    double len = path.length();
    Vec3 dir = first_segment_dir(path);
    if (len == 0.0 || dir.isZero()) return TangentVector{m1, Vec3::Zero()};
    return project_to_tangent(mesh, m1, dir * len);
}

TangentVector log_map_from(const GeodesicSolver& goal_solver, const SurfacePoint& m1) {
    const Mesh& mesh = goal_solver.mesh();
    double same = 1e-14 * std::max(1.0, mesh.bbox_diagonal());
    if ((m1.position - goal_solver.source().position).norm() <= same)
        return TangentVector{m1, Vec3::Zero()};
    // the solver radiates from the goal; walk its path backwards
    GeodesicPath path = goal_solver.query_path(m1);
    double len = path.length();
    Vec3 dir = -last_segment_dir(path);
    if (len == 0.0 || dir.isZero()) return TangentVector{m1, Vec3::Zero()};
    return project_to_tangent(mesh, m1, dir * len);
}

// ---------------------------------------------------------------------------
// exponential map walk

namespace {

// unclamped barycentric coordinates of an in-plane point
Vec3 plane_bary(const Mesh& mesh, int f, const Vec3& p) {
    const auto& tri = mesh.face(f);
    Vec3 e1 = mesh.vertex(tri[1]) - mesh.vertex(tri[0]);
    Vec3 e2 = mesh.vertex(tri[2]) - mesh.vertex(tri[0]);
    Vec3 d = p - mesh.vertex(tri[0]);
    double a11 = e1.dot(e1), a12 = e1.dot(e2), a22 = e2.dot(e2);
    double b1 = e1.dot(d), b2 = e2.dot(d);
    double det = a11 * a22 - a12 * a12;
    double beta = (b1 * a22 - b2 * a12) / det;
    double gamma = (b2 * a11 - b1 * a12) / det;
    return {1.0 - beta - gamma, beta, gamma};
}

SurfacePoint snap_inside(const Mesh& mesh, int f, Vec3 bary) {
    for (int k = 0; k < 3; ++k) bary[k] = std::max(bary[k], 0.0);
    bary /= bary.sum();
    const auto& tri = mesh.face(f);
    SurfacePoint sp;
    sp.face = f;
    sp.bary = bary;
    sp.position = bary[0] * mesh.vertex(tri[0]) + bary[1] * mesh.vertex(tri[1]) +
                  bary[2] * mesh.vertex(tri[2]);
    return sp;
}

// local index of vertex v in face f, or -1
int local_index(const Mesh& mesh, int f, int v) {
    const auto& tri = mesh.face(f);
    for (int k = 0; k < 3; ++k)
        if (tri[k] == v) return k;
    return -1;
}

struct VertexExit {
    int face = -1;
    Vec3 direction = Vec3::Zero();
};

// continuation face when the walk runs exactly into a vertex: the incident
// face whose plane keeps the most of the remaining direction, preferring
// faces the projected direction actually enters
VertexExit pick_vertex_exit(const Mesh& mesh, int vid, int current_face, const Vec3& rem) {
    VertexExit best;
    double best_score = -1.0;
    bool best_cone = false;
    double rlen = rem.norm();
    for (int f : mesh.vertex_faces(vid)) {
        if (f == current_face) continue;
        const Vec3& n = mesh.face_normal(f);
        Vec3 proj = rem - n.dot(rem) * n;
        double plen = proj.norm();
        if (plen <= 1e-12 * rlen) continue;
        Vec3 dir = proj * (rlen / plen);
        int li = local_index(mesh, f, vid);
        const auto& tri = mesh.face(f);
        Vec3 ea = mesh.vertex(tri[(li + 1) % 3]) - mesh.vertex(vid);
        Vec3 eb = mesh.vertex(tri[(li + 2) % 3]) - mesh.vertex(vid);
        double a11 = ea.dot(ea), a12 = ea.dot(eb), a22 = eb.dot(eb);
        double det = a11 * a22 - a12 * a12;
        double b1 = ea.dot(dir), b2 = eb.dot(dir);
        double ca = (b1 * a22 - b2 * a12) / det;
        double cb = (b2 * a11 - b1 * a12) / det;
        bool cone = ca >= -1e-9 * (std::abs(ca) + std::abs(cb)) &&
                    cb >= -1e-9 * (std::abs(ca) + std::abs(cb));
        double score = plen / rlen;
        bool better = false;
        if (cone != best_cone)
            better = cone;
        else if (std::abs(score - best_score) > 1e-12)
            better = score > best_score;
        else
            better = f < best.face;
        if (better) {
            best.face = f;
            best.direction = dir;
            best_score = score;
            best_cone = cone;
        }
    }
    return best;
}

ExpResult exp_walk(const Mesh& mesh, const SurfacePoint& m, const TangentVector& v) {
    ExpResult res;
    res.path.points.push_back(m);
    double total = v.vec.norm();
    if (total == 0.0) {
        res.point = m;
        return res;
    }

    int f = m.face;
    Vec3 bary = m.bary;
    Vec3 pos = m.position;
    // exact in-plane direction, norm preserved
    const Vec3& n0 = mesh.face_normal(f);
    Vec3 vec = v.vec - n0.dot(v.vec) * n0;
    if (vec.norm() <= 1e-12 * total)
        throw DomainError("exp_map direction is normal to the base face");
    vec *= total / vec.norm();

    const int cap = static_cast<int>(10.0 * total / mesh.min_edge_length()) + 100;
    int prev_edge_a = -1, prev_edge_b = -1;  // edge the walk last entered through
    for (int iter = 0; iter <= cap; ++iter) {
        Vec3 btar = plane_bary(mesh, f, pos + vec);
        if (btar.minCoeff() >= -1e-12) {
            res.point = snap_inside(mesh, f, btar);
            res.path.points.push_back(res.point);
            break;
        }
        // first barycentric coordinate to hit zero along the segment
        double s_exit = std::numeric_limits<double>::max();
        int i_exit = -1;
        for (int i = 0; i < 3; ++i) {
            if (btar[i] >= -1e-15) continue;
            double s = bary[i] / (bary[i] - btar[i]);
            if (s < s_exit) {
                s_exit = s;
                i_exit = i;
            }
        }
        if (i_exit == -1) {  // numeric corner: treat as inside
            res.point = snap_inside(mesh, f, btar);
            res.path.points.push_back(res.point);
            break;
        }
        if (iter == cap)
            throw NonTermination("exp_map exceeded its iteration cap");
        s_exit = std::clamp(s_exit, 0.0, 1.0);

        Vec3 bx = bary + s_exit * (btar - bary);
        bx[i_exit] = 0.0;
        const auto& tri = mesh.face(f);
        int ja = (i_exit + 1) % 3, jb = (i_exit + 2) % 3;

        // a second vanishing coordinate means the segment leaves via a vertex
        int small = bx[ja] <= 1e-12 ? ja : (bx[jb] <= 1e-12 ? jb : -1);
        if (small != -1) {
            int vid = tri[small == ja ? jb : ja];
            Vec3 rem = vec * (1.0 - s_exit);
            double rlen = rem.norm();
            if (rlen <= 1e-15 * total) {  // exactly consumed at the vertex
                SurfacePoint sp;
                sp.face = f;
                sp.bary = Vec3::Zero();
                sp.bary[local_index(mesh, f, vid)] = 1.0;
                sp.position = mesh.vertex(vid);
                res.point = sp;
                res.path.points.push_back(sp);
                break;
            }
            VertexExit exit = pick_vertex_exit(mesh, vid, f, rem);
            if (exit.face == -1)
                throw GeodesicLeftSurface("exp_map hit a boundary vertex with " +
                                          std::to_string(rlen) + " m left to walk");
            int nf = std::min(f, exit.face);
            SurfacePoint sp;
            sp.face = nf;
            sp.bary = Vec3::Zero();
            sp.bary[local_index(mesh, nf, vid)] = 1.0;
            sp.position = mesh.vertex(vid);
            res.path.points.push_back(sp);
            f = exit.face;
            vec = exit.direction;
            pos = mesh.vertex(vid);
            bary = Vec3::Zero();
            bary[local_index(mesh, f, vid)] = 1.0;
            prev_edge_a = prev_edge_b = -1;
            continue;
        }

        // plain edge crossing
        int va = tri[ja], vb = tri[jb];
        double wa = bx[ja] / (bx[ja] + bx[jb]);
        Vec3 cross_pos = wa * mesh.vertex(va) + (1.0 - wa) * mesh.vertex(vb);
        Vec3 rem = vec * (1.0 - s_exit);
        double rlen = rem.norm();

        int nf = mesh.face_neighbor(f, ja);
        if (nf == -1)
            throw GeodesicLeftSurface("exp_map reached an open boundary with " +
                                      std::to_string(rlen) + " m left to walk");

        if (std::min(va, vb) == prev_edge_a && std::max(va, vb) == prev_edge_b &&
            s_exit <= 1e-12) {
            // projection folded the direction back across the entry edge;
            // the straightest continuation creases along the edge itself
            Vec3 ed = mesh.vertex(vb) - mesh.vertex(va);
            ed.normalize();
            double sign = rem.dot(ed) >= 0 ? 1.0 : -1.0;
            vec = ed * (sign * rlen);
            prev_edge_a = prev_edge_b = -1;
            continue;
        }

        // record the crossing on the lower-id face
        {
            int rf = std::min(f, nf);
            SurfacePoint sp;
            sp.face = rf;
            sp.bary = Vec3::Zero();
            sp.bary[local_index(mesh, rf, va)] = wa;
            sp.bary[local_index(mesh, rf, vb)] = 1.0 - wa;
            sp.position = cross_pos;
            res.path.points.push_back(sp);
        }

        if (rlen <= 1e-15 * total) {  // consumed exactly on the edge
            res.point = res.path.points.back();
            break;
        }

        const Vec3& nn = mesh.face_normal(nf);
        Vec3 proj = rem - nn.dot(rem) * nn;
        double plen = proj.norm();
        if (plen <= 1e-12 * rlen)
            throw DomainError("exp_map projection undefined: remaining direction is normal "
                              "to the next face");
        vec = proj * (rlen / plen);
        prev_edge_a = std::min(va, vb);
        prev_edge_b = std::max(va, vb);
        pos = cross_pos;
        f = nf;
        bary = Vec3::Zero();
        bary[local_index(mesh, f, va)] = wa;
        bary[local_index(mesh, f, vb)] = 1.0 - wa;
    }

    auto& pts = res.path.points;
    // drop zero-length knees the crossing bookkeeping may have produced
    std::vector<SurfacePoint> clean;
    clean.push_back(pts.front());
    for (size_t i = 1; i < pts.size(); ++i)
        if ((pts[i].position - clean.back().position).norm() > 0)
            clean.push_back(pts[i]);
    pts = std::move(clean);
    res.path.segment_lengths.resize(pts.size() - 1);
    for (size_t i = 0; i + 1 < pts.size(); ++i)
        res.path.segment_lengths[i] = (pts[i + 1].position - pts[i].position).norm();
    return res;
}

}  // namespace

SurfacePoint exp_map(const Mesh& mesh, const SurfacePoint& m, const TangentVector& v) {
    return exp_walk(mesh, m, v).point;
}

ExpResult exp_map_with_path(const Mesh& mesh, const SurfacePoint& m, const TangentVector& v) {
    return exp_walk(mesh, m, v);
}

}  // namespace meshdmp
