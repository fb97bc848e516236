#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "meshdmp/geodesic.hpp"
#include "meshdmp/mesh.hpp"

namespace meshdmp {

/// Learned periodic DMP on a mesh. The forcing term lives in the local
/// velocity-aligned frame, so a model trained on one surface can be
/// re-anchored (goal/start replaced) and rolled out on another.
struct MeshDmpModel {
    double alpha = 22.0;
    double beta = 5.5;
    double omega = 1.0;  // seconds per radian of phase
    int n_basis = 20;
    Eigen::VectorXd centers;
    Eigen::VectorXd widths;
    Eigen::Matrix3Xd weights;  // one 3-column per basis function
    SurfacePoint goal;
    SurfacePoint start;
    double r = 1.0;  // forcing amplitude, |Log_{start}(goal)|
    std::map<std::string, std::string> metadata;
};

struct DmpState {
    SurfacePoint y;
    TangentVector z;  // scaled velocity, based at y
    double phi = 0.0;
    double t = 0.0;
};

struct DemoSample {
    SurfacePoint y;
    TangentVector ydot;
    TangentVector yddot;  // covariant derivative of ydot
};

struct Demonstration {
    std::vector<DemoSample> samples;
    double dt = 0.0;
};

struct TrajectoryRow {
    double t = 0.0;
    Vec3 position = Vec3::Zero();
    int face = -1;
    Vec3 z = Vec3::Zero();
    double phi = 0.0;
    Eigen::Vector4d quat = {1, 0, 0, 0};  // (w,x,y,z), used when has_poses
};

struct Trajectory {
    std::vector<TrajectoryRow> rows;
    bool has_poses = false;
};

/// Velocity-aligned surface frame, columns [z/|z|, n x z/|z|, n].
Mat3 local_frame(const Mesh& mesh, const SurfacePoint& y, const TangentVector& z);

/// Periodic basis values Psi_i(phi) = exp(h_i (cos(phi - c_i) - 1)).
Eigen::VectorXd basis(double phi, const MeshDmpModel& model);

/// Forcing in local-frame coordinates: (sum Psi_i w_i / sum Psi_i) * r.
Vec3 forcing(const MeshDmpModel& model, double phi);

/// Projects Cartesian samples (position, velocity) onto the mesh and
/// estimates the covariant derivative of the velocity by transporting
/// consecutive samples; the last sample wraps to the first (periodic).
/// max_distance < 0 selects the default 5 * mean edge length.
Demonstration project_demonstration(const Mesh& mesh,
                                    const std::vector<std::pair<Vec3, Vec3>>& cartesian,
                                    double dt, double max_distance = -1.0);

/// Fits basis weights by ridge-regularized least squares on the
/// demonstration's forcing signal. omega <= 0 derives the time scale from
/// the demonstration (one cycle spans 2*pi of phase). Near-zero-velocity
/// samples are dropped; if none remain the fit fails.
MeshDmpModel fit(const Mesh& mesh, const Demonstration& demo, const SurfacePoint& goal,
                 double alpha, double beta, double omega, int n_basis);

/// One explicit Euler step of the transformation + canonical systems:
/// the position advances along Exp_y(dt*Omega*z) and z is updated in the
/// tangent plane then parallel-transported along the walked path.
DmpState step(const Mesh& mesh, const MeshDmpModel& model, const DmpState& state, double dt,
              const SurfacePoint* center_override = nullptr);

using CenterSchedule = std::vector<std::pair<double, SurfacePoint>>;

/// Integrates `duration/dt` steps, recording the state before each step.
/// The active centre is the last schedule entry with timestamp <= t.
Trajectory rollout(const Mesh& mesh, const MeshDmpModel& model, const SurfacePoint& start,
                   const TangentVector& initial_z, double duration, double dt,
                   const CenterSchedule& schedule = {});

/// Initial z for a rollout: the demonstration's first velocity parallel-
/// transported to the start point, scaled by 1/Omega.
TangentVector suggest_initial_z(const Mesh& mesh, const Demonstration& demo,
                                const MeshDmpModel& model, const SurfacePoint& start);

/// Per-row tool frame: z-axis is the inward surface normal, in-plane spin
/// minimizes rotation from the previously emitted pose, and the result is
/// low-pass filtered with weight dt/(tau+dt) per step.
Trajectory frames_along(const Mesh& mesh, const Trajectory& traj, double dt,
                        double filter_time_constant);

// persistence
void save_model_json(const MeshDmpModel& model, const std::string& path);
MeshDmpModel load_model_json(const std::string& path);
void save_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory load_trajectory_csv(const std::string& path);
CenterSchedule load_center_schedule(const Mesh& mesh, const std::string& path);

}  // namespace meshdmp
