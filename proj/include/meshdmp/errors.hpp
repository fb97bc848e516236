#pragma once

#include <stdexcept>
#include <string>

namespace meshdmp {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input file (OBJ/OFF/CSV/JSON).
struct ParseError : Error {
    using Error::Error;
};

/// Precondition or geometric-domain violation (degenerate face,
/// undefined projection direction, invalid barycentric coordinates...).
struct DomainError : Error {
    using Error::Error;
};

/// Geodesic walk reached a mesh boundary with arc length still to consume.
struct GeodesicLeftSurface : Error {
    using Error::Error;
};

/// Iteration cap exceeded in an algorithm that should terminate.
struct NonTermination : Error {
    using Error::Error;
};

/// Local frame requested at a (near-)zero velocity state.
struct DegenerateFrame : Error {
    using Error::Error;
};

/// Target lies in a mesh component unreachable from the source.
struct UnreachableTarget : Error {
    using Error::Error;
};

/// Demonstration cannot be fitted; carries the offending sample index.
struct FitError : Error {
    int sample_index;
    FitError(const std::string& msg, int index) : Error(msg), sample_index(index) {}
};

/// Cartesian sample too far from the mesh to project.
struct OffSurfaceSample : Error {
    int sample_index;
    double distance;
    OffSurfaceSample(const std::string& msg, int index, double dist)
        : Error(msg), sample_index(index), distance(dist) {}
};

}  // namespace meshdmp
