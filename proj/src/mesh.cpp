#include "meshdmp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace meshdmp {

namespace {

std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

struct Aabb {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::max());
    Vec3 hi = Vec3::Constant(std::numeric_limits<double>::lowest());

    void grow(const Vec3& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    void grow(const Aabb& b) {
        lo = lo.cwiseMin(b.lo);
        hi = hi.cwiseMax(b.hi);
    }
    double dist2(const Vec3& p) const {
        Vec3 q = p.cwiseMax(lo).cwiseMin(hi);
        return (p - q).squaredNorm();
    }
};

}  // namespace

struct Mesh::BvhNode {
    Aabb box;
    int left = -1;   // child node, or first face index when leaf
    int right = -1;  // child node, or one-past-last face index when leaf
    bool leaf = false;
};

Mesh::Mesh() : cache_mutex_(std::make_unique<std::mutex>()) {}
Mesh::~Mesh() = default;
Mesh::Mesh(Mesh&&) noexcept = default;
Mesh& Mesh::operator=(Mesh&&) noexcept = default;

Mesh Mesh::build(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces) {
    if (vertices.empty() || faces.empty()) throw DomainError("mesh is empty");

    Mesh mesh;
    mesh.vertices_ = std::move(vertices);
    mesh.faces_ = std::move(faces);

    const int nv = mesh.num_vertices();
    const int nf = mesh.num_faces();

    mesh.face_normals_.resize(nf);
    for (int f = 0; f < nf; ++f) {
        const auto& tri = mesh.faces_[f];
        for (int k = 0; k < 3; ++k) {
            if (tri[k] < 0 || tri[k] >= nv)
                throw DomainError("face " + std::to_string(f) + " references vertex " +
                                  std::to_string(tri[k]) + " out of range");
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
            throw DomainError("face " + std::to_string(f) + " has repeated vertices");
        Vec3 e1 = mesh.vertices_[tri[1]] - mesh.vertices_[tri[0]];
        Vec3 e2 = mesh.vertices_[tri[2]] - mesh.vertices_[tri[0]];
        Vec3 n = e1.cross(e2);
        double len = n.norm();
        double scale = std::max(e1.norm(), e2.norm());
        if (len <= 1e-14 * scale * scale || scale == 0.0)
            throw DomainError("face " + std::to_string(f) + " is degenerate (zero area)");
        mesh.face_normals_[f] = n / len;
    }

    // edges and adjacency, derived purely from the face list
    mesh.vertex_faces_.resize(nv);
    mesh.face_neighbors_.assign(nf, {-1, -1, -1});
    for (int f = 0; f < nf; ++f) {
        const auto& tri = mesh.faces_[f];
        for (int k = 0; k < 3; ++k) {
            mesh.vertex_faces_[tri[k]].push_back(f);
            int a = tri[k], b = tri[(k + 1) % 3];
            auto key = edge_key(a, b);
            auto it = mesh.edge_ids_.find(key);
            if (it == mesh.edge_ids_.end()) {
                int id = static_cast<int>(mesh.edges_.size());
                mesh.edge_ids_.emplace(key, id);
                mesh.edges_.push_back({std::min(a, b), std::max(a, b)});
                mesh.edge_faces_.emplace_back();
                it = mesh.edge_ids_.find(key);
            }
            mesh.edge_faces_[it->second].push_back(f);
        }
    }
    // pair up faces across edges with exactly two incident faces;
    // non-manifold edges are treated like boundaries for traversal
    for (int f = 0; f < nf; ++f) {
        const auto& tri = mesh.faces_[f];
        for (int k = 0; k < 3; ++k) {
            int e = mesh.edge_between(tri[k], tri[(k + 1) % 3]);
            const auto& inc = mesh.edge_faces_[e];
            if (inc.size() == 2) mesh.face_neighbors_[f][k] = inc[0] == f ? inc[1] : inc[0];
        }
    }

    double total = 0.0;
    double min_len = std::numeric_limits<double>::max();
    for (const auto& e : mesh.edges_) {
        double len = (mesh.vertices_[e[0]] - mesh.vertices_[e[1]]).norm();
        total += len;
        min_len = std::min(min_len, len);
    }
    mesh.mean_edge_length_ = total / static_cast<double>(mesh.edges_.size());
    mesh.min_edge_length_ = min_len;

    Aabb box;
    for (const auto& v : mesh.vertices_) box.grow(v);
    mesh.bbox_diagonal_ = (box.hi - box.lo).norm();

    mesh.build_bvh();
    return mesh;
}

int Mesh::edge_between(int a, int b) const {
    auto it = edge_ids_.find(edge_key(a, b));
    return it == edge_ids_.end() ? -1 : it->second;
}

// axis-aligned BVH over faces, median split, leaf size 4
void Mesh::build_bvh() {
    const int nf = num_faces();
    bvh_faces_.resize(nf);
    std::iota(bvh_faces_.begin(), bvh_faces_.end(), 0);

    std::vector<Vec3> centroids(nf);
    std::vector<Aabb> boxes(nf);
    for (int f = 0; f < nf; ++f) {
        const auto& tri = faces_[f];
        for (int k = 0; k < 3; ++k) boxes[f].grow(vertices_[tri[k]]);
        centroids[f] = (vertices_[tri[0]] + vertices_[tri[1]] + vertices_[tri[2]]) / 3.0;
    }

    struct Range {
        int begin, end, node;
    };
    bvh_nodes_.reserve(2 * nf / 4 + 2);
    bvh_nodes_.emplace_back();
    std::vector<Range> stack{{0, nf, 0}};
    while (!stack.empty()) {
        auto [begin, end, node] = stack.back();
        stack.pop_back();
        Aabb box;
        for (int i = begin; i < end; ++i) box.grow(boxes[bvh_faces_[i]]);
        bvh_nodes_[node].box = box;
        if (end - begin <= 4) {
            bvh_nodes_[node].leaf = true;
            bvh_nodes_[node].left = begin;
            bvh_nodes_[node].right = end;
            // deterministic tie-breaks favor the lowest face id
            std::sort(bvh_faces_.begin() + begin, bvh_faces_.begin() + end);
            continue;
        }
        Vec3 extent = box.hi - box.lo;
        int axis = 0;
        if (extent[1] > extent[axis]) axis = 1;
        if (extent[2] > extent[axis]) axis = 2;
        int mid = (begin + end) / 2;
        std::nth_element(bvh_faces_.begin() + begin, bvh_faces_.begin() + mid,
                         bvh_faces_.begin() + end, [&](int fa, int fb) {
                             double ca = centroids[fa][axis], cb = centroids[fb][axis];
                             return ca < cb || (ca == cb && fa < fb);
                         });
        int left = static_cast<int>(bvh_nodes_.size());
        bvh_nodes_.emplace_back();
        bvh_nodes_.emplace_back();
        bvh_nodes_[node].left = left;
        bvh_nodes_[node].right = left + 1;
        stack.push_back({begin, mid, left});
        stack.push_back({mid, end, left + 1});
    }
}

// Ericson-style point/triangle closest point with barycentric output
void closest_point_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c,
                            Vec3& point, Vec3& bary) {
    Vec3 ab = b - a, ac = c - a, ap = p - a;
    double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) {
        point = a;
        bary = Vec3(1, 0, 0);
        return;
    }
    Vec3 bp = p - b;
    double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) {
        point = b;
        bary = Vec3(0, 1, 0);
        return;
    }
    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        double v = d1 / (d1 - d3);
        point = a + v * ab;
        bary = Vec3(1 - v, v, 0);
        return;
    }
    Vec3 cp = p - c;
    double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) {
        point = c;
        bary = Vec3(0, 0, 1);
        return;
    }
    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        double w = d2 / (d2 - d6);
        point = a + w * ac;
        bary = Vec3(1 - w, 0, w);
        return;
    }
    double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        point = b + w * (c - b);
        bary = Vec3(0, 1 - w, w);
        return;
    }
    double denom = 1.0 / (va + vb + vc);
    double v = vb * denom, w = vc * denom;
    point = a + ab * v + ac * w;
    bary = Vec3(1 - v - w, v, w);
}

SurfacePoint Mesh::closest_point(const Vec3& p) const {
    double best_d2 = std::numeric_limits<double>::max();
    int best_face = -1;
    Vec3 best_point = Vec3::Zero(), best_bary = Vec3::Zero();

    std::vector<int> stack{0};
    stack.reserve(64);
    while (!stack.empty()) {
        int node = stack.back();
        stack.pop_back();
        const BvhNode& n = bvh_nodes_[node];
        if (n.box.dist2(p) > best_d2) continue;
        if (n.leaf) {
            for (int i = n.left; i < n.right; ++i) {
                int f = bvh_faces_[i];
                const auto& tri = faces_[f];
                Vec3 q, bc;
                closest_point_triangle(p, vertices_[tri[0]], vertices_[tri[1]],
                                       vertices_[tri[2]], q, bc);
                double d2 = (p - q).squaredNorm();
                if (d2 < best_d2 || (d2 == best_d2 && f < best_face)) {
                    best_d2 = d2;
                    best_face = f;
                    best_point = q;
                    best_bary = bc;
                }
            }
        } else {
            // visit nearer child first
            double dl = bvh_nodes_[n.left].box.dist2(p);
            double dr = bvh_nodes_[n.right].box.dist2(p);
            if (dl < dr) {
                stack.push_back(n.right);
                stack.push_back(n.left);
            } else {
                stack.push_back(n.left);
                stack.push_back(n.right);
            }
        }
    }
    SurfacePoint sp;
    sp.face = best_face;
    sp.bary = best_bary;
    sp.position = best_point;
    return sp;
}

bool Mesh::point_on_face(const SurfacePoint& sp, int f) const {
    const auto& tri = faces_[f];
    Vec3 q, bc;
    closest_point_triangle(sp.position, vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]],
                           q, bc);
    double tol = 1e-9 * std::max(1.0, bbox_diagonal_);
    return (q - sp.position).norm() <= tol;
}

SurfacePoint make_surface_point(const Mesh& mesh, int face, const Vec3& bary) {
    if (face < 0 || face >= mesh.num_faces()) throw DomainError("surface point face out of range");
    constexpr double kBaryEps = 1e-10;
    if (std::abs(bary.sum() - 1.0) > 1e-12)
        throw DomainError("barycentric coordinates do not sum to 1");
    for (int k = 0; k < 3; ++k)
        if (bary[k] < -kBaryEps || bary[k] > 1.0 + kBaryEps)
            throw DomainError("barycentric coordinate out of [0,1]");
    const auto& tri = mesh.face(face);
    SurfacePoint sp;
    sp.face = face;
    sp.bary = bary;
    sp.position = bary[0] * mesh.vertex(tri[0]) + bary[1] * mesh.vertex(tri[1]) +
                  bary[2] * mesh.vertex(tri[2]);
    return sp;
}

TangentVector make_tangent_vector(const Mesh& mesh, const SurfacePoint& base, const Vec3& v) {
    double norm = v.norm();
    if (norm > 0.0) {
        double off = std::abs(v.dot(mesh.face_normal(base.face)));
        if (off > 1e-9 * norm)
            throw DomainError("vector is not tangent to the base face plane");
    }
    return TangentVector{base, v};
}

std::pair<Vec3, Vec3> tangent_basis(const Mesh& mesh, const SurfacePoint& m) {
    const auto& tri = mesh.face(m.face);
    Vec3 e1 = mesh.vertex(tri[1]) - mesh.vertex(tri[0]);
    Vec3 e2 = mesh.vertex(tri[2]) - mesh.vertex(tri[0]);
    if (e1.cross(e2).norm() <= 1e-14 * e1.norm() * e2.norm())
        throw DomainError("degenerate face has no tangent basis");
    return {e1, e2};
}

TangentVector project_to_tangent(const Mesh& mesh, const SurfacePoint& m, const Vec3& v) {
    double norm = v.norm();
    if (norm == 0.0) return TangentVector{m, Vec3::Zero()};
    const Vec3& n = mesh.face_normal(m.face);
    Vec3 planar = v - n.dot(v) * n;
    double planar_norm = planar.norm();
    if (planar_norm <= 1e-12 * norm)
        throw DomainError("vector is (nearly) parallel to the face normal; "
                          "projected direction undefined");
    return TangentVector{m, planar * (norm / planar_norm)};
}

// ---------------------------------------------------------------------------
// validation

ValidationReport validate(const Mesh& mesh, double normal_dot_threshold) {
    ValidationReport report;
    report.threshold = normal_dot_threshold;
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const auto& inc = mesh.edge_faces(e);
        const auto& ev = mesh.edges()[e];
        if (inc.size() > 2)
            report.non_manifold_edges.push_back({ev[0], ev[1], static_cast<int>(inc.size())});
        else if (inc.size() == 1)
            report.boundary_edges.push_back({ev[0], ev[1]});
        if (inc.size() == 2) {
            double dot = mesh.face_normal(inc[0]).dot(mesh.face_normal(inc[1]));
            if (dot <= normal_dot_threshold)
                report.orientation_violations.push_back(
                    {std::min(inc[0], inc[1]), std::max(inc[0], inc[1]), dot});
        }
    }
    report.is_manifold = report.non_manifold_edges.empty();
    report.is_orientable = report.orientation_violations.empty();
    return report;
}

std::string ValidationReport::to_json() const {
    nlohmann::json j;
    j["is_manifold"] = is_manifold;
    j["is_orientable"] = is_orientable;
    j["threshold"] = threshold;
    j["non_manifold_edges"] = nlohmann::json::array();
    for (const auto& e : non_manifold_edges)
        j["non_manifold_edges"].push_back({{"edge", {e[0], e[1]}}, {"incident_faces", e[2]}});
    j["boundary_edges"] = nlohmann::json::array();
    for (const auto& e : boundary_edges) j["boundary_edges"].push_back({e[0], e[1]});
    j["orientation_violations"] = nlohmann::json::array();
    for (const auto& v : orientation_violations)
        j["orientation_violations"].push_back(
            {{"faces", {v.face_a, v.face_b}}, {"normal_dot", v.normal_dot}});
    j["boundary_edge_count"] = boundary_edges.size();
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// file I/O

namespace {

int parse_obj_index(const std::string& token, int line_no) {
    // accept "i", "i/j", "i//k"; only the vertex index is used
    size_t slash = token.find('/');
    std::string head = slash == std::string::npos ? token : token.substr(0, slash);
    try {
        size_t pos = 0;
        int idx = std::stoi(head, &pos);
        if (pos != head.size() || idx <= 0) throw std::invalid_argument("");
        return idx - 1;
    } catch (const std::exception&) {
        throw ParseError("OBJ line " + std::to_string(line_no) + ": bad face index '" + token +
                         "'");
    }
}

Mesh load_obj(std::istream& in) {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag)) continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ss >> p[0] >> p[1] >> p[2]))
                throw ParseError("OBJ line " + std::to_string(line_no) + ": malformed vertex");
            vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string token;
            while (ss >> token) idx.push_back(parse_obj_index(token, line_no));
            if (idx.size() != 3)
                throw ParseError("OBJ line " + std::to_string(line_no) +
                                 ": face with " + std::to_string(idx.size()) +
                                 " vertices (only triangles are supported)");
            faces.push_back({idx[0], idx[1], idx[2]});
        }
        // vn/vt/comments and other records are ignored
    }
    if (vertices.empty() || faces.empty()) throw ParseError("OBJ file has no triangles");
    return Mesh::build(std::move(vertices), std::move(faces));
}

Mesh load_off(std::istream& in) {
    auto next_token = [&in](const char* what) {
        std::string tok;
        while (in >> tok) {
            if (tok[0] == '#') {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            return tok;
        }
        throw ParseError(std::string("OFF: unexpected end of file reading ") + what);
    };
    std::string magic = next_token("header");
    if (magic != "OFF") throw ParseError("OFF: missing OFF header");
    int nv = std::stoi(next_token("vertex count"));
    int nf = std::stoi(next_token("face count"));
    next_token("edge count");
    if (nv <= 0 || nf <= 0) throw ParseError("OFF: empty mesh");
    std::vector<Vec3> vertices(nv);
    for (int i = 0; i < nv; ++i)
        for (int k = 0; k < 3; ++k) vertices[i][k] = std::stod(next_token("vertex"));
    std::vector<std::array<int, 3>> faces(nf);
    for (int i = 0; i < nf; ++i) {
        int arity = std::stoi(next_token("face arity"));
        if (arity != 3)
            throw ParseError("OFF: face " + std::to_string(i) + " has " + std::to_string(arity) +
                             " vertices (only triangles are supported)");
        for (int k = 0; k < 3; ++k) faces[i][k] = std::stoi(next_token("face index"));
    }
    return Mesh::build(std::move(vertices), std::move(faces));
}

}  // namespace

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open mesh file: " + path);
    auto dot = path.find_last_of('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    for (auto& c : ext) c = static_cast<char>(std::tolower(c));
    try {
        if (ext == "off") return load_off(in);
        if (ext == "obj") return load_obj(in);
        throw ParseError("unsupported mesh format: " + path);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    } catch (const std::exception& e) {
        // stoi/stod failures and geometric rejects both mean a bad file
        throw ParseError(path + ": " + e.what());
    }
}

void save_obj(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open file for writing: " + path);
    char buf[128];
    for (const auto& v : mesh.vertices()) {
        std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v[0], v[1], v[2]);
        out << buf;
    }
    for (const auto& f : mesh.faces()) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

void save_off(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open file for writing: " + path);
    out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_faces() << " 0\n";
    char buf[128];
    for (const auto& v : mesh.vertices()) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", v[0], v[1], v[2]);
        out << buf;
    }
    for (const auto& f : mesh.faces()) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

}  // namespace meshdmp
