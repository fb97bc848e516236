#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <typeindex>
#include <unordered_map>
#include <vector>

#include "meshdmp/errors.hpp"

namespace meshdmp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

class Mesh;

/// Location on the mesh surface: face id + barycentric coordinates.
/// The cached 3D position always equals the barycentric combination of
/// the face vertices.
struct SurfacePoint {
    int face = -1;
    Vec3 bary = Vec3::Zero();
    Vec3 position = Vec3::Zero();
};

/// 3D vector constrained to the tangent plane of its base point's face.
struct TangentVector {
    SurfacePoint base;
    Vec3 vec = Vec3::Zero();

    double norm() const { return vec.norm(); }
};

struct ValidationReport {
    // edge -> number of incident faces, for edges with more than two
    std::vector<std::array<int, 3>> non_manifold_edges;  // {a, b, count}
    std::vector<std::array<int, 2>> boundary_edges;      // {a, b}
    struct OrientationViolation {
        int face_a;
        int face_b;
        double normal_dot;
    };
    std::vector<OrientationViolation> orientation_violations;
    bool is_manifold = false;
    bool is_orientable = false;
    double threshold = 0.0;

    std::string to_json() const;
};

/// Immutable triangulated surface embedded in R^3. All queries are
/// read-only and safe to call from multiple threads; construction is
/// single-threaded.
class Mesh {
public:
    /// Builds adjacency, per-face normals and the closest-point index.
    /// Throws DomainError on out-of-range/duplicate vertex indices or
    /// zero-area faces, since those break the normal-field invariants.
    static Mesh build(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& faces() const { return faces_; }
    const Vec3& vertex(int v) const { return vertices_[v]; }
    const std::array<int, 3>& face(int f) const { return faces_[f]; }
    const Vec3& face_normal(int f) const { return face_normals_[f]; }

    /// Unique undirected edges, each as {min_vertex, max_vertex}.
    const std::vector<std::array<int, 2>>& edges() const { return edges_; }
    /// All faces incident to edge e (more than two on non-manifold input).
    const std::vector<int>& edge_faces(int e) const { return edge_faces_[e]; }
    /// Edge id for vertex pair (a, b), or -1.
    int edge_between(int a, int b) const;
    /// Neighbor of face f across its local edge k = (v_k, v_{k+1}), or -1
    /// at boundaries and non-manifold edges.
    int face_neighbor(int f, int k) const { return face_neighbors_[f][k]; }
    /// Faces incident to vertex v (unordered).
    const std::vector<int>& vertex_faces(int v) const { return vertex_faces_[v]; }

    double mean_edge_length() const { return mean_edge_length_; }
    double min_edge_length() const { return min_edge_length_; }
    /// Diagonal of the axis-aligned bounding box; the library's length scale.
    double bbox_diagonal() const { return bbox_diagonal_; }

    /// Closest point on the surface to p; ties broken by lowest face id.
    SurfacePoint closest_point(const Vec3& p) const;

    /// True if point sp lies on face f geometrically (within tolerance).
    bool point_on_face(const SurfacePoint& sp, int f) const;

    /// Per-mesh lazily built auxiliary structure (e.g. the geodesic graph),
    /// created once behind an exclusive lock and shared afterwards.
    template <typename T, typename Factory>
    std::shared_ptr<T> cached(Factory&& make) const {
        std::lock_guard<std::mutex> lock(*cache_mutex_);
        auto key = std::type_index(typeid(T));
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            std::shared_ptr<T> value = make();
            it = cache_.emplace(key, value).first;
        }
        return std::static_pointer_cast<T>(it->second);
    }

private:
    std::vector<Vec3> vertices_;
    std::vector<std::array<int, 3>> faces_;
    std::vector<Vec3> face_normals_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::vector<int>> edge_faces_;
    std::vector<std::array<int, 3>> face_neighbors_;
    std::vector<std::vector<int>> vertex_faces_;
    std::unordered_map<std::uint64_t, int> edge_ids_;
    double mean_edge_length_ = 0.0;
    double min_edge_length_ = 0.0;
    double bbox_diagonal_ = 0.0;

    struct BvhNode;
    std::vector<BvhNode> bvh_nodes_;
    std::vector<int> bvh_faces_;

    void build_bvh();

    mutable std::unique_ptr<std::mutex> cache_mutex_;  // pointer keeps Mesh movable
    mutable std::unordered_map<std::type_index, std::shared_ptr<void>> cache_;

public:
    Mesh(Mesh&&) noexcept;
    Mesh& operator=(Mesh&&) noexcept;
    Mesh(const Mesh&) = delete;
    Mesh& operator=(const Mesh&) = delete;
    ~Mesh();

private:
    Mesh();
};

/// Checked SurfacePoint constructor: enforces barycentric sum/range and
/// position consistency. Every SurfacePoint in the library goes through
/// here or through closest_point.
SurfacePoint make_surface_point(const Mesh& mesh, int face, const Vec3& bary);

/// Checked TangentVector constructor: v must be orthogonal to the base
/// face normal within 1e-9 * |v|.
TangentVector make_tangent_vector(const Mesh& mesh, const SurfacePoint& base, const Vec3& v);

/// Loads an OBJ (`v`/`f` records only, 1-based indices) or OFF file.
/// Non-triangular faces are an error; normals are recomputed from winding.
Mesh load_mesh(const std::string& path);
void save_obj(const Mesh& mesh, const std::string& path);
void save_off(const Mesh& mesh, const std::string& path);

/// Reports non-manifold edges, boundary edges and adjacent face pairs
/// whose normal dot product is <= normal_dot_threshold. Pure report.
ValidationReport validate(const Mesh& mesh, double normal_dot_threshold = 0.0);

/// Edge-vector basis of the tangent plane at m's face:
/// (V_j - V_i, V_k - V_i) for the face's ordered vertices.
std::pair<Vec3, Vec3> tangent_basis(const Mesh& mesh, const SurfacePoint& m);

/// Norm-preserving projection of v onto the tangent plane at m:
/// direction from (I - n n^T) v, magnitude |v|. Zero input gives a zero
/// vector; v nearly parallel to the normal is an error.
TangentVector project_to_tangent(const Mesh& mesh, const SurfacePoint& m, const Vec3& v);

/// Closest point on triangle (a, b, c) to p, with barycentric coordinates.
/// Shared low-level primitive; exposed for reuse by the spatial index.
void closest_point_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c,
                            Vec3& point, Vec3& bary);

}  // namespace meshdmp
