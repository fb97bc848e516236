#pragma once

#include "meshdmp/geodesic.hpp"
#include "meshdmp/mesh.hpp"

namespace meshdmp {

/// Isometry carrying tangent vectors from the path start's plane to the
/// path end's plane: the frame rotation taking (w1, n1) to (w2, n2) where
/// w1/w2 are the first/last geodesic segment directions.
struct TransportRotation {
    Mat3 rotation = Mat3::Identity();
    SurfacePoint from;
    SurfacePoint to;
};

/// Rotation for the given path. For a degenerate single-point path the
/// frames are derived from v's own direction (identity when start and end
/// share a face, or when v is zero).
TransportRotation transport_rotation(const Mesh& mesh, const GeodesicPath& path, const Vec3& v);

TangentVector parallel_transport(const Mesh& mesh, const GeodesicPath& path,
                                 const TangentVector& v);

/// Tangent vector at m1 pointing along the geodesic toward m2 with the
/// geodesic's length as magnitude; zero when the points coincide.
TangentVector log_map(const Mesh& mesh, const SurfacePoint& m1, const SurfacePoint& m2);

/// log_map against a prebuilt solver whose source is the *target* point
/// (the rollout pattern: many bases, one goal). Queries solver.source()
/// from m1's side by reversing the solver's path.
TangentVector log_map_from(const GeodesicSolver& goal_solver, const SurfacePoint& m1);

/// Walks v's length across the surface from m: repeated in-face advance,
/// edge crossing, and norm-preserving projection onto the next face.
/// Throws GeodesicLeftSurface at an open boundary with length left to
/// spend and NonTermination past the iteration cap.
SurfacePoint exp_map(const Mesh& mesh, const SurfacePoint& m, const TangentVector& v);

/// exp_map that also returns the walked polyline (for transporting the
/// DMP state along the step it just took).
struct ExpResult {
    SurfacePoint point;
    GeodesicPath path;
};
ExpResult exp_map_with_path(const Mesh& mesh, const SurfacePoint& m, const TangentVector& v);

}  // namespace meshdmp
