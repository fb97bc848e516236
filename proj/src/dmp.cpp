#include "meshdmp/dmp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <Eigen/Geometry>
#include <nlohmann/json.hpp>

#include "meshdmp/manifold_ops.hpp"

namespace meshdmp {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kZeroVel = 1e-12;
}  // namespace

Mat3 local_frame(const Mesh& mesh, const SurfacePoint& y, const TangentVector& z) {
    double len = z.vec.norm();
    if (len <= kZeroVel)
        throw DegenerateFrame("local frame undefined at (near-)zero velocity");
    const Vec3& n = mesh.face_normal(y.face);
    Vec3 zhat = z.vec / len;
    Mat3 t;
    t.col(0) = zhat;
    t.col(1) = n.cross(zhat);
    t.col(2) = n;
    return t;
}

Eigen::VectorXd basis(double phi, const MeshDmpModel& model) {
    Eigen::VectorXd psi(model.n_basis);
    for (int i = 0; i < model.n_basis; ++i)
        psi[i] = std::exp(model.widths[i] * (std::cos(phi - model.centers[i]) - 1.0));
    return psi;
}

Vec3 forcing(const MeshDmpModel& model, double phi) {
    Eigen::VectorXd psi = basis(phi, model);
    double denom = psi.sum();
    return (model.weights * psi) / denom * model.r;
}

Demonstration project_demonstration(const Mesh& mesh,
                                    const std::vector<std::pair<Vec3, Vec3>>& cartesian,
                                    double dt, double max_distance) {
    if (cartesian.size() < 3) throw DomainError("demonstration needs at least 3 samples");
    if (dt <= 0) throw DomainError("demonstration sampling period must be positive");
    if (max_distance < 0) max_distance = 5.0 * mesh.mean_edge_length();

    const int n = static_cast<int>(cartesian.size());
    Demonstration demo;
    demo.dt = dt;
    demo.samples.resize(n);
    for (int k = 0; k < n; ++k) {
        SurfacePoint y = mesh.closest_point(cartesian[k].first);
        double dist = (y.position - cartesian[k].first).norm();
        if (dist > max_distance)
            throw OffSurfaceSample("sample " + std::to_string(k) + " lies " +
                                       std::to_string(dist) + " m off the mesh",
                                   k, dist);
        demo.samples[k].y = y;
        demo.samples[k].ydot = project_to_tangent(mesh, y, cartesian[k].second);
    }
    // covariant derivative of the velocity field, periodic wrap at the end
    for (int k = 0; k < n; ++k) {
        const DemoSample& cur = demo.samples[k];
        const DemoSample& nxt = demo.samples[(k + 1) % n];
        GeodesicPath back = shortest_path_between(mesh, nxt.y, cur.y);
        TangentVector moved = parallel_transport(mesh, back, nxt.ydot);
        demo.samples[k].yddot = TangentVector{cur.y, (moved.vec - cur.ydot.vec) / dt};
    }
    return demo;
}

MeshDmpModel fit(const Mesh& mesh, const Demonstration& demo, const SurfacePoint& goal,
                 double alpha, double beta, double omega, int n_basis) {
    const int n = static_cast<int>(demo.samples.size());
    if (n < 2) throw DomainError("demonstration too short to fit");
    if (alpha <= 0 || beta <= 0 || n_basis < 1) throw DomainError("invalid DMP gains");

    MeshDmpModel model;
    model.alpha = alpha;
    model.beta = beta;
    model.n_basis = n_basis;
    model.omega = omega > 0 ? omega : n * demo.dt / (2.0 * kPi);
    model.centers.resize(n_basis);
    model.widths.resize(n_basis);
    for (int i = 0; i < n_basis; ++i) {
        model.centers[i] = 2.0 * kPi * i / n_basis;
        model.widths[i] = 2.5 * n_basis;
    }
    model.goal = goal;
    model.start = demo.samples[0].y;

    auto solver = shared_solver(mesh, goal);
    double r_raw = log_map_from(*solver, model.start).norm();
    if (r_raw < 1e-9) {
        model.r = 1.0;
        model.metadata["r_fallback"] = "start coincides with goal; r clamped to 1";
    } else {
        model.r = r_raw;
    }

    const double om = model.omega;
    std::vector<int> used;
    used.reserve(n);
    int first_dropped = -1;
    for (int k = 0; k < n; ++k) {
        if (demo.samples[k].ydot.norm() <= kZeroVel) {
            if (first_dropped < 0) first_dropped = k;
            continue;
        }
        used.push_back(k);
    }
    if (used.empty())
        throw FitError("every demonstration sample has (near-)zero velocity; "
                       "the local frame is undefined",
                       first_dropped < 0 ? 0 : first_dropped);
    if (first_dropped >= 0)
        model.metadata["dropped_samples"] =
            std::to_string(n - static_cast<int>(used.size())) +
            " zero-velocity samples excluded from the regression";

    const int m = static_cast<int>(used.size());
    Eigen::MatrixXd design(m, n_basis);
    Eigen::MatrixXd target(m, 3);
    for (int row = 0; row < m; ++row) {
        int k = used[row];
        const DemoSample& s = demo.samples[k];
        double phi = k * demo.dt / om;
        Eigen::VectorXd psi = basis(phi, model);
        design.row(row) = psi.transpose() / psi.sum() * model.r;

        Vec3 log_y = log_map_from(*solver, s.y).vec;
        Vec3 f_world = s.yddot.vec / (om * om) -
                       alpha * (beta * log_y - s.ydot.vec / om);
        Mat3 t_frame = local_frame(mesh, s.y, s.ydot);
        target.row(row) = (t_frame.transpose() * f_world).transpose();
    }

    Eigen::MatrixXd gram = design.transpose() * design;
    gram.diagonal().array() += 1e-9;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    Eigen::MatrixXd w = ldlt.solve(design.transpose() * target);  // n_basis x 3
    model.weights = w.transpose();

    double rss = (design * w - target).squaredNorm();
    model.metadata["fit_residual_rms"] = std::to_string(std::sqrt(rss / (3.0 * m)));

    // seed vector for rollouts starting at model.start (world coordinates)
    Vec3 z0 = demo.samples[0].ydot.vec / om;
    char z0_buf[128];
    std::snprintf(z0_buf, sizeof(z0_buf), "%.17g %.17g %.17g", z0[0], z0[1], z0[2]);
    model.metadata["initial_z"] = z0_buf;
    return model;
}

DmpState step(const Mesh& mesh, const MeshDmpModel& model, const DmpState& state, double dt,
              const SurfacePoint* center_override) {
    if (dt <= 0) throw DomainError("step needs dt > 0");
    const SurfacePoint& g = center_override ? *center_override : model.goal;
    const double om = model.omega;

    auto solver = shared_solver(mesh, g);
    Vec3 log_y = log_map_from(*solver, state.y).vec;
    Vec3 f = forcing(model, state.phi);

    Vec3 tf = Vec3::Zero();
    if (state.z.norm() > kZeroVel) {
        tf = local_frame(mesh, state.y, state.z) * f;
    } else if (f.norm() > kZeroVel) {
        throw DegenerateFrame("cannot apply forcing at zero velocity; "
                              "seed the rollout with a nonzero initial z");
    }
    Vec3 z_tent = state.z.vec + dt * om * (model.alpha * (model.beta * log_y - state.z.vec) + tf);

    TangentVector disp{state.y, dt * om * state.z.vec};
    ExpResult moved = exp_map_with_path(mesh, state.y, disp);

    TangentVector z_new = parallel_transport(mesh, moved.path, TangentVector{state.y, z_tent});
    const Vec3& n = mesh.face_normal(moved.point.face);
    z_new.vec -= n.dot(z_new.vec) * n;  // strip rounding-level normal residue
    z_new.base = moved.point;

    DmpState next;
    next.y = moved.point;
    next.z = z_new;
    next.phi = state.phi + dt / om;
    next.t = state.t + dt;
    return next;
}

Trajectory rollout(const Mesh& mesh, const MeshDmpModel& model, const SurfacePoint& start,
                   const TangentVector& initial_z, double duration, double dt,
                   const CenterSchedule& schedule) {
    if (dt <= 0) throw DomainError("rollout needs dt > 0");
    for (size_t i = 1; i < schedule.size(); ++i)
        if (schedule[i].first < schedule[i - 1].first)
            throw DomainError("centre schedule timestamps must be sorted");

    const long steps = std::lround(duration / dt);
    Trajectory traj;
    traj.rows.reserve(steps);

    DmpState state;
    state.y = start;
    state.z = TangentVector{start, initial_z.vec};
    state.phi = 0.0;
    state.t = 0.0;

    size_t sched_idx = 0;
    for (long k = 0; k < steps; ++k) {
        TrajectoryRow row;
        row.t = state.t;
        row.position = state.y.position;
        row.face = state.y.face;
        row.z = state.z.vec;
        row.phi = state.phi;
        traj.rows.push_back(row);

        while (sched_idx < schedule.size() && schedule[sched_idx].first <= state.t + 1e-12)
            ++sched_idx;
        const SurfacePoint* center =
            sched_idx > 0 ? &schedule[sched_idx - 1].second : nullptr;
        state = step(mesh, model, state, dt, center);
    }
    return traj;
}

TangentVector suggest_initial_z(const Mesh& mesh, const Demonstration& demo,
                                const MeshDmpModel& model, const SurfacePoint& start) {
    if (demo.samples.empty()) throw DomainError("empty demonstration");
    const DemoSample& s0 = demo.samples.front();
    GeodesicPath path = shortest_path_between(mesh, s0.y, start);
    TangentVector moved = parallel_transport(mesh, path, s0.ydot);
    return TangentVector{start, moved.vec / model.omega};
}

Trajectory frames_along(const Mesh& mesh, const Trajectory& traj, double dt,
                        double filter_time_constant) {
    Trajectory out = traj;
    out.has_poses = true;
    Eigen::Quaterniond q_prev = Eigen::Quaterniond::Identity();
    bool have_prev = false;
    const double w = filter_time_constant <= 0 ? 1.0 : dt / (filter_time_constant + dt);

    for (auto& row : out.rows) {
        const Vec3& n = mesh.face_normal(row.face);
        Vec3 zax = -n;
        Vec3 xref;
        if (have_prev)
            xref = q_prev.toRotationMatrix().col(0);
        else if (row.z.norm() > kZeroVel)
            xref = row.z;
        else {
            const auto& tri = mesh.face(row.face);
            xref = mesh.vertex(tri[1]) - mesh.vertex(tri[0]);
        }
        Vec3 xax = xref - zax.dot(xref) * zax;
        if (xax.norm() <= 1e-12) {
            // previous heading parallel to the new normal: fall back to its y-axis
            Vec3 yref = have_prev ? Vec3(q_prev.toRotationMatrix().col(1)) : Vec3::UnitY();
            xax = yref.cross(zax);
        }
        xax.normalize();
        Vec3 yax = zax.cross(xax);
        Mat3 rot;
        rot.col(0) = xax;
        rot.col(1) = yax;
        rot.col(2) = zax;
        Eigen::Quaterniond q_target(rot);
        if (have_prev && q_prev.dot(q_target) < 0) q_target.coeffs() *= -1;
        Eigen::Quaterniond q_out = have_prev ? q_prev.slerp(w, q_target) : q_target;
        q_out.normalize();
        row.quat = {q_out.w(), q_out.x(), q_out.y(), q_out.z()};
        q_prev = q_out;
        have_prev = true;
    }
    return out;
}

// ---------------------------------------------------------------------------
// persistence

namespace {

nlohmann::json point_to_json(const SurfacePoint& sp) {
    return {{"face", sp.face}, {"bary", {sp.bary[0], sp.bary[1], sp.bary[2]}}};
}

SurfacePoint point_from_json(const Mesh& mesh, const nlohmann::json& j) {
    Vec3 bary(j.at("bary")[0].get<double>(), j.at("bary")[1].get<double>(),
              j.at("bary")[2].get<double>());
    return make_surface_point(mesh, j.at("face").get<int>(), bary);
}

}  // namespace

void save_model_json(const MeshDmpModel& model, const std::string& path) {
    nlohmann::json j;
    j["alpha"] = model.alpha;
    j["beta"] = model.beta;
    j["omega"] = model.omega;
    j["n_basis"] = model.n_basis;
    j["centers"] = std::vector<double>(model.centers.data(),
                                       model.centers.data() + model.centers.size());
    j["widths"] =
        std::vector<double>(model.widths.data(), model.widths.data() + model.widths.size());
    auto weights = nlohmann::json::array();
    for (int i = 0; i < model.weights.cols(); ++i)
        weights.push_back({model.weights(0, i), model.weights(1, i), model.weights(2, i)});
    j["weights"] = weights;
    j["goal"] = point_to_json(model.goal);
    j["start"] = point_to_json(model.start);
    j["r"] = model.r;
    j["metadata"] = model.metadata;
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open file for writing: " + path);
    out << j.dump(2) << "\n";
}

static MeshDmpModel load_model_json_impl(const nlohmann::json& j) {
    MeshDmpModel m;
    m.alpha = j.at("alpha").get<double>();
    m.beta = j.at("beta").get<double>();
    m.omega = j.at("omega").get<double>();
    m.n_basis = j.at("n_basis").get<int>();
    auto centers = j.at("centers").get<std::vector<double>>();
    auto widths = j.at("widths").get<std::vector<double>>();
    if (static_cast<int>(centers.size()) != m.n_basis ||
        static_cast<int>(widths.size()) != m.n_basis)
        throw ParseError("model basis arrays disagree with n_basis");
    m.centers = Eigen::Map<Eigen::VectorXd>(centers.data(), centers.size());
    m.widths = Eigen::Map<Eigen::VectorXd>(widths.data(), widths.size());
    m.weights.resize(3, m.n_basis);
    const auto& w = j.at("weights");
    if (static_cast<int>(w.size()) != m.n_basis)
        throw ParseError("model weight count disagrees with n_basis");
    for (int i = 0; i < m.n_basis; ++i)
        for (int d = 0; d < 3; ++d) m.weights(d, i) = w[i][d].get<double>();
    m.r = j.at("r").get<double>();
    if (j.contains("metadata"))
        m.metadata = j.at("metadata").get<std::map<std::string, std::string>>();

    // structurally valid JSON with out-of-range values is a domain error,
    // not a parse error: the file decoded fine but describes no usable model
    if (m.alpha <= 0 || m.beta <= 0 || m.omega <= 0 || m.r < 0)
        throw DomainError("model gains must be positive and r nonnegative");
    for (int i = 0; i < m.n_basis; ++i) {
        if (m.widths[i] <= 0) throw DomainError("model widths must be positive");
        if (m.centers[i] < 0 || m.centers[i] >= 2.0 * kPi ||
            (i > 0 && m.centers[i] <= m.centers[i - 1]))
            throw DomainError("model centers must increase strictly within [0, 2*pi)");
    }
    if (!m.weights.allFinite()) throw DomainError("model weights must be finite");
    return m;
}

MeshDmpModel load_model_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
        MeshDmpModel m = load_model_json_impl(j);
        // goal/start carry face ids: bind them lazily against the mesh the
        // caller intends to use (kept as raw values here)
        m.goal.face = j.at("goal").at("face").get<int>();
        for (int k = 0; k < 3; ++k) m.goal.bary[k] = j.at("goal").at("bary")[k].get<double>();
        m.start.face = j.at("start").at("face").get<int>();
        for (int k = 0; k < 3; ++k) m.start.bary[k] = j.at("start").at("bary")[k].get<double>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void save_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open file for writing: " + path);
    out << "t,x,y,z,face,zx,zy,zz,phi";
    if (traj.has_poses) out << ",qw,qx,qy,qz";
    out << "\n";
    char buf[512];
    for (const auto& r : traj.rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%d,%.17g,%.17g,%.17g,%.17g",
                      r.t, r.position[0], r.position[1], r.position[2], r.face, r.z[0], r.z[1],
                      r.z[2], r.phi);
        out << buf;
        if (traj.has_poses) {
            std::snprintf(buf, sizeof(buf), ",%.17g,%.17g,%.17g,%.17g", r.quat[0], r.quat[1],
                          r.quat[2], r.quat[3]);
            out << buf;
        }
        out << "\n";
    }
}

Trajectory load_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open trajectory file: " + path);
    Trajectory traj;
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty trajectory file");
    traj.has_poses = line.find(",qw") != std::string::npos;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        TrajectoryRow r;
        char c;
        if (!(ss >> r.t >> c >> r.position[0] >> c >> r.position[1] >> c >> r.position[2] >>
              c >> r.face >> c >> r.z[0] >> c >> r.z[1] >> c >> r.z[2] >> c >> r.phi))
            throw ParseError(path + " line " + std::to_string(line_no) +
                             ": malformed trajectory row");
        if (traj.has_poses &&
            !(ss >> c >> r.quat[0] >> c >> r.quat[1] >> c >> r.quat[2] >> c >> r.quat[3]))
            throw ParseError(path + " line " + std::to_string(line_no) + ": malformed pose row");
        traj.rows.push_back(r);
    }
    return traj;
}

CenterSchedule load_center_schedule(const Mesh& mesh, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open schedule file: " + path);
    nlohmann::json j;
    try {
        in >> j;
        CenterSchedule sched;
        for (const auto& e : j) {
            double t = e.at("t").get<double>();
            SurfacePoint sp;
            if (e.contains("point")) {
                Vec3 p(e["point"][0].get<double>(), e["point"][1].get<double>(),
                       e["point"][2].get<double>());
                sp = mesh.closest_point(p);
            } else {
                sp = point_from_json(mesh, e);
            }
            sched.emplace_back(t, sp);
        }
        std::sort(sched.begin(), sched.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        return sched;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace meshdmp
