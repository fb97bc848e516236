#pragma once

#include <memory>
#include <vector>

#include "meshdmp/mesh.hpp"

namespace meshdmp {

/// On-surface polyline between two SurfacePoints. Consecutive points lie
/// on a shared face or shared edge; a single-point path (source == target)
/// is the degenerate zero-length case.
struct GeodesicPath {
    std::vector<SurfacePoint> points;
    std::vector<double> segment_lengths;

    double length() const;
    GeodesicPath reversed() const;
};

double path_length(const GeodesicPath& path);

/// Build-once / query-many shortest-path structure from a fixed source.
/// The build runs a full Dijkstra sweep over an edge-subdivision graph
/// (4 Steiner points per edge); each query backtracks a node chain and
/// straightens it by unfolding the crossed triangle strip until no
/// interior point can be locally shortened.
class GeodesicSolver {
public:
    GeodesicSolver(const Mesh& mesh, const SurfacePoint& source);
    ~GeodesicSolver();
    GeodesicSolver(GeodesicSolver&&) noexcept;
    GeodesicSolver& operator=(GeodesicSolver&&) noexcept;

    const SurfacePoint& source() const;
    const Mesh& mesh() const;
    /// Wall-clock seconds spent building the propagation structure.
    double build_seconds() const;

    /// Locally shortest polyline source -> target.
    /// Throws UnreachableTarget when target sits in another component.
    GeodesicPath query_path(const SurfacePoint& target) const;

    struct Impl;

private:
    std::unique_ptr<Impl> impl_;
};

/// One-shot shortest path a -> b (early-exit propagation, no memoization).
GeodesicPath shortest_path_between(const Mesh& mesh, const SurfacePoint& a,
                                   const SurfacePoint& b);

/// Per-mesh memoized solver keyed by source point, behind an exclusive
/// lock; a small FIFO of recent sources is kept (rollouts re-query the
/// same goal every step, moving-centre schedules rotate through a few).
std::shared_ptr<const GeodesicSolver> shared_solver(const Mesh& mesh, const SurfacePoint& source);

}  // namespace meshdmp
