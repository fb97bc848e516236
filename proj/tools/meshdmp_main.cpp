// meshdmp: learn and roll out periodic movement primitives on triangle meshes.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "meshdmp/dmp.hpp"
#include "meshdmp/geodesic.hpp"
#include "meshdmp/manifold_ops.hpp"
#include "meshdmp/mesh.hpp"
#include "meshdmp/smooth_oracle.hpp"
#include "meshdmp/surface_gen.hpp"

namespace md = meshdmp;
using md::Vec3;

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::vector<double> parse_numbers(const std::string& s, size_t expected,
                                  const std::string& what) {
    std::vector<double> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            size_t used = 0;
            out.push_back(std::stod(tok, &used));
            while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used])))
                ++used;
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw md::ParseError("cannot parse " + what + ": '" + s + "'");
        }
    }
    if (out.size() != expected)
        throw md::ParseError(what + " needs " + std::to_string(expected) +
                             " comma-separated numbers, got '" + s + "'");
    return out;
}

Vec3 parse_vec3(const std::string& s, const std::string& what) {
    auto n = parse_numbers(s, 3, what);
    return Vec3(n[0], n[1], n[2]);
}

// Accepted point forms: "x,y,z" (closest point on the mesh), "face:b0,b1,b2"
// (barycentric), "(u,v)" (graph-surface parameters, lifted through --surface).
md::SurfacePoint parse_point(const md::Mesh& mesh, const std::string& s,
                             const std::optional<md::SurfacePreset>& lift) {
    if (!s.empty() && s.front() == '(') {
        if (s.back() != ')') throw md::ParseError("unbalanced parentheses in point '" + s + "'");
        auto uv = parse_numbers(s.substr(1, s.size() - 2), 2, "(u,v) point");
        double z = lift ? md::surface_height(*lift, uv[0], uv[1]) : 0.0;
        return mesh.closest_point(Vec3(uv[0], uv[1], z));
    }
    auto colon = s.find(':');
    if (colon != std::string::npos) {
        int face = 0;
        try {
            size_t used = 0;
            face = std::stoi(s.substr(0, colon), &used);
            if (used != colon) throw std::invalid_argument(s);
        } catch (const std::exception&) {
            throw md::ParseError("cannot parse face id in point '" + s + "'");
        }
        auto b = parse_numbers(s.substr(colon + 1), 3, "barycentric point");
        return md::make_surface_point(mesh, face, Vec3(b[0], b[1], b[2]));
    }
    return mesh.closest_point(parse_vec3(s, "point"));
}

std::optional<md::SurfacePreset> preset_of(const std::string& name) {
    if (name.empty()) return std::nullopt;
    return md::surface_preset_from_name(name);
}

void save_mesh_by_extension(const md::Mesh& mesh, const std::string& path) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".off")
        md::save_off(mesh, path);
    else
        md::save_obj(mesh, path);
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& mesh_path, double threshold) {
    md::Mesh mesh = md::load_mesh(mesh_path);
    md::ValidationReport report = md::validate(mesh, threshold);
    std::cout << report.to_json() << "\n";
    return (report.is_manifold && report.is_orientable) ? 0 : 1;
}

struct SurfaceOpts {
    std::string kind = "graph";
    std::string fn = "twin_gauss";
    int nx = 28, ny = 28;
    std::string domain = "-2,2,-2,2";
    double R = 1.0, r = 0.4;
    int nu = 40, nv = 25;
    double radius = 1.0;
    int subdiv = 3;
    std::string out;
};

int cmd_surface(const SurfaceOpts& o) {
    auto make = [&]() -> md::Mesh {
        if (o.kind == "graph") {
            auto d = parse_numbers(o.domain, 4, "--domain");
            md::GridDomain dom{d[0], d[1], d[2], d[3]};
            return md::generate_graph_mesh(md::surface_preset_from_name(o.fn), dom, o.nx, o.ny);
        }
        if (o.kind == "torus") return md::generate_torus(o.R, o.r, o.nu, o.nv);
        if (o.kind == "icosphere") return md::generate_icosphere(o.radius, o.subdiv);
        throw md::ParseError("unknown surface kind '" + o.kind + "'");
    };
    md::Mesh mesh = make();
    save_mesh_by_extension(mesh, o.out);
    std::cout << "wrote " << o.out << ": " << mesh.num_vertices() << " vertices, "
              << mesh.num_faces() << " faces\n";
    return 0;
}

struct DemoOpts {
    std::string curve = "lemniscate";
    double a = 1.0, b = 1.0;
    std::string surface = "twin_gauss";
    int samples = 1000;
    double period = 2.0 * M_PI;
    std::string out;
};

int cmd_demo(const DemoOpts& o) {
    md::CurveSpec spec;
    if (o.curve == "circle")
        spec = md::CurveSpec::circle(o.a);
    else if (o.curve == "ellipse")
        spec = md::CurveSpec::ellipse(o.a, o.b);
    else if (o.curve == "lemniscate")
        spec = md::CurveSpec::lemniscate(o.a);
    else
        throw md::ParseError("unknown curve '" + o.curve + "'");
    auto samples = md::generate_demo_curve(spec, md::surface_preset_from_name(o.surface),
                                           o.samples, o.period);
    md::save_demo_csv(samples, o.out);
    std::cout << "wrote " << o.out << ": " << samples.size() << " samples over "
              << o.period << " s\n";
    return 0;
}

struct TrainOpts {
    std::string mesh, demo, goal, out;
    std::string surface;  // lift for (u,v) points
    double alpha = 22.0, beta = -1.0, omega = -1.0;
    int n_basis = 20;
    double max_distance = -1.0;
};

int cmd_train(const TrainOpts& o) {
    md::Mesh mesh = md::load_mesh(o.mesh);
    auto raw = md::load_demo_csv(o.demo);
    if (raw.size() < 2) throw md::DomainError("demonstration has too few samples");
    double dt = raw[1].t - raw[0].t;
    std::vector<std::pair<Vec3, Vec3>> cart;
    cart.reserve(raw.size());
    for (const auto& s : raw) cart.emplace_back(s.position, s.velocity);

    md::SurfacePoint goal = parse_point(mesh, o.goal, preset_of(o.surface));
    double beta = o.beta > 0 ? o.beta : o.alpha / 4.0;

    md::Demonstration demo = md::project_demonstration(mesh, cart, dt, o.max_distance);
    md::MeshDmpModel model = md::fit(mesh, demo, goal, o.alpha, beta, o.omega, o.n_basis);
    md::save_model_json(model, o.out);

    std::cout << "fit residual rms: " << model.metadata.at("fit_residual_rms") << "\n";
    std::cout << "r: " << model.r << "\n";
    std::cout << "omega: " << model.omega << " s/rad\n";
    if (model.metadata.count("dropped_samples"))
        std::cout << "note: " << model.metadata.at("dropped_samples") << "\n";
    std::cout << "wrote " << o.out << "\n";
    return 0;
}

struct IntegrateOpts {
    std::string mesh, model, out;
    std::string start, goal, initial_z, centers;
    std::string surface;
    double duration = 15.0, dt = 1e-3;
    bool poses = false;
    double filter_tau = 0.05;
};

int cmd_integrate(const IntegrateOpts& o) {
    md::Mesh mesh = md::load_mesh(o.mesh);
    md::MeshDmpModel model = md::load_model_json(o.model);
    auto lift = preset_of(o.surface);

    md::SurfacePoint start = o.start.empty()
                                 ? md::make_surface_point(mesh, model.start.face, model.start.bary)
                                 : parse_point(mesh, o.start, lift);
    if (!o.goal.empty())
        model.goal = parse_point(mesh, o.goal, lift);
    else
        model.goal = md::make_surface_point(mesh, model.goal.face, model.goal.bary);
    model.start = start;

    Vec3 z0 = Vec3::Zero();
    if (!o.initial_z.empty()) {
        z0 = parse_vec3(o.initial_z, "--initial-z");
    } else if (auto it = model.metadata.find("initial_z"); it != model.metadata.end()) {
        std::istringstream ss(it->second);
        if (!(ss >> z0[0] >> z0[1] >> z0[2]))
            throw md::ParseError("malformed initial_z metadata in " + o.model);
    }
    md::TangentVector initial_z = md::project_to_tangent(mesh, start, z0);

    md::CenterSchedule schedule;
    if (!o.centers.empty()) schedule = md::load_center_schedule(mesh, o.centers);

    double t0 = now_seconds();
    md::Trajectory traj;
    try {
        traj = md::rollout(mesh, model, start, initial_z, o.duration, o.dt, schedule);
    } catch (const md::GeodesicLeftSurface& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    double elapsed = now_seconds() - t0;

    if (o.poses) traj = md::frames_along(mesh, traj, o.dt, o.filter_tau);
    md::save_trajectory_csv(traj, o.out);

    std::cout << "integrated " << traj.rows.size() << " steps in " << elapsed << " s";
    if (!traj.rows.empty())
        std::cout << " (" << elapsed / traj.rows.size() * 1e6 << " us/step)";
    std::cout << "\nwrote " << o.out << "\n";
    return 0;
}

struct GeodesicOpts {
    std::string mesh, from, to, out, surface;
};

int cmd_geodesic(const GeodesicOpts& o) {
    md::Mesh mesh = md::load_mesh(o.mesh);
    auto lift = preset_of(o.surface);
    md::SurfacePoint a = parse_point(mesh, o.from, lift);
    md::SurfacePoint b = parse_point(mesh, o.to, lift);
    md::GeodesicPath path = md::shortest_path_between(mesh, a, b);
    std::cout << "length: " << path.length() << "\n";
    std::cout << "segments: " << path.segment_lengths.size() << "\n";
    if (!o.out.empty()) {
        std::ofstream out(o.out);
        if (!out) throw md::ParseError("cannot open file for writing: " + o.out);
        out << "s,x,y,z\n";
        double s = 0.0;
        char buf[256];
        for (size_t i = 0; i < path.points.size(); ++i) {
            if (i > 0) s += path.segment_lengths[i - 1];
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", s,
                          path.points[i].position[0], path.points[i].position[1],
                          path.points[i].position[2]);
            out << buf;
        }
        std::cout << "wrote " << o.out << "\n";
    }
    return 0;
}

struct LogmapOpts {
    std::string mesh, at, of, surface;
};

int cmd_logmap(const LogmapOpts& o) {
    md::Mesh mesh = md::load_mesh(o.mesh);
    auto lift = preset_of(o.surface);
    md::SurfacePoint at = parse_point(mesh, o.at, lift);
    md::SurfacePoint of = parse_point(mesh, o.of, lift);
    md::TangentVector v = md::log_map(mesh, at, of);
    std::cout << "log: " << v.vec[0] << "," << v.vec[1] << "," << v.vec[2] << "\n";
    std::cout << "norm: " << v.norm() << "\n";
    return 0;
}

struct ExpmapOpts {
    std::string mesh, at, vec, surface;
};

int cmd_expmap(const ExpmapOpts& o) {
    md::Mesh mesh = md::load_mesh(o.mesh);
    md::SurfacePoint at = parse_point(mesh, o.at, preset_of(o.surface));
    Vec3 raw = parse_vec3(o.vec, "--vec");
    md::TangentVector v = md::project_to_tangent(mesh, at, raw);
    md::SurfacePoint end = md::exp_map(mesh, at, v);
    std::cout << "point: " << end.face << ":" << end.bary[0] << "," << end.bary[1] << ","
              << end.bary[2] << "\n";
    std::cout << "position: " << end.position[0] << "," << end.position[1] << ","
              << end.position[2] << "\n";
    return 0;
}

struct OracleOpts {
    std::string kind = "sphere";
    double radius = 1.0;
    double R = 1.0, r = 0.4;
    std::string fn = "twin_gauss";
    std::string domain = "-2,2,-2,2";
    std::string u0, du0;
    double length = 1.0;
    int steps = 0;
    std::string out;
};

int cmd_oracle_shoot(const OracleOpts& o) {
    md::ParametricSurface surf;
    if (o.kind == "sphere") {
        surf = md::sphere_surface(o.radius);
    } else if (o.kind == "torus") {
        surf = md::torus_surface(o.R, o.r);
    } else if (o.kind == "graph") {
        auto d = parse_numbers(o.domain, 4, "--domain");
        surf = md::graph_surface(md::surface_preset_from_name(o.fn),
                                 md::GridDomain{d[0], d[1], d[2], d[3]});
    } else {
        throw md::ParseError("unknown oracle surface '" + o.kind + "'");
    }
    auto u0 = parse_numbers(o.u0, 2, "--u0");
    auto du0 = parse_numbers(o.du0, 2, "--du0");
    md::GeodesicShot shot = md::shoot_geodesic(surf, {u0[0], u0[1]}, {du0[0], du0[1]},
                                               o.length, o.steps);
    std::cout << "u_end: " << shot.u_end[0] << "," << shot.u_end[1] << "\n";
    std::cout << "du_end: " << shot.du_end[0] << "," << shot.du_end[1] << "\n";
    std::cout << "speed drift: " << shot.speed_drift << "\n";
    if (!o.out.empty()) {
        std::ofstream out(o.out);
        if (!out) throw md::ParseError("cannot open file for writing: " + o.out);
        out << "s,x,y,z\n";
        char buf[256];
        int n = static_cast<int>(shot.samples.size()) - 1;
        for (int i = 0; i <= n; ++i) {
            double s = n > 0 ? o.length * i / n : 0.0;
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", s,
                          shot.samples[i][0], shot.samples[i][1], shot.samples[i][2]);
            out << buf;
        }
        std::cout << "wrote " << o.out << "\n";
    }
    return 0;
}

struct BenchOpts {
    std::vector<std::string> meshes;
    int sources = 3;
    int queries = 100;
    unsigned seed = 42;
};

int cmd_bench(const BenchOpts& o) {
    std::printf("%-28s %8s %8s %14s %14s\n", "mesh", "n_v", "n_f", "delta_const",
                "delta_query");
    for (const auto& path : o.meshes) {
        md::Mesh mesh = md::load_mesh(path);
        std::mt19937 rng(o.seed);
        std::uniform_int_distribution<int> face_dist(0, mesh.num_faces() - 1);
        std::uniform_real_distribution<double> bary_dist(0.05, 0.95);
        auto random_point = [&]() {
            double b0 = bary_dist(rng), b1 = bary_dist(rng) * (1.0 - b0);
            return md::make_surface_point(mesh, face_dist(rng), Vec3(b0, b1, 1.0 - b0 - b1));
        };

        double build_total = 0.0, query_total = 0.0;
        long n_queries_done = 0;
        for (int s = 0; s < o.sources; ++s) {
            md::SurfacePoint src = random_point();
            double t0 = now_seconds();
            md::GeodesicSolver solver(mesh, src);
            build_total += now_seconds() - t0;
            for (int q = 0; q < o.queries; ++q) {
                md::SurfacePoint tgt = random_point();
                double t1 = now_seconds();
                solver.query_path(tgt);
                query_total += now_seconds() - t1;
                ++n_queries_done;
            }
        }
        double build_ms = build_total / o.sources * 1e3;
        double query_us = query_total / n_queries_done * 1e6;
        std::string name = path;
        auto slash = name.find_last_of('/');
        if (slash != std::string::npos) name = name.substr(slash + 1);
        std::printf("%-28s %8d %8d %11.2f ms %11.2f us\n", name.c_str(), mesh.num_vertices(),
                    mesh.num_faces(), build_ms, query_us);
    }
    return 0;
}

struct EvalOpts {
    std::string demo, trajectory;
};

int cmd_eval(const EvalOpts& o) {
    auto demo = md::load_demo_csv(o.demo);
    md::Trajectory traj = md::load_trajectory_csv(o.trajectory);
    if (demo.size() < 2 || traj.rows.size() < 2)
        throw md::DomainError("need at least two samples in demo and trajectory");

    // resample the trajectory at the demonstration timestamps (one period)
    const int n = static_cast<int>(demo.size());
    std::vector<Vec3> resampled(n);
    size_t cursor = 0;
    for (int k = 0; k < n; ++k) {
        double t = demo[k].t;
        while (cursor + 2 < traj.rows.size() && traj.rows[cursor + 1].t <= t) ++cursor;
        const auto& a = traj.rows[cursor];
        const auto& b = traj.rows[cursor + 1];
        double span = b.t - a.t;
        double w = span > 0 ? std::clamp((t - a.t) / span, 0.0, 1.0) : 0.0;
        resampled[k] = (1.0 - w) * a.position + w * b.position;
    }
    if (demo.back().t > traj.rows.back().t + 1e-9)
        std::cerr << "warning: trajectory shorter than one demonstration period; "
                     "tail clamped\n";

    // allow a circular phase shift; report the best alignment
    double best = -1.0;
    int best_shift = 0;
    for (int shift = 0; shift < n; ++shift) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k)
            acc += (demo[(k + shift) % n].position - resampled[k]).squaredNorm();
        double rmse = std::sqrt(acc / n);
        if (best < 0 || rmse < best) {
            best = rmse;
            best_shift = shift;
        }
    }
    if (best_shift != 0 && best_shift != n)
        std::cerr << "warning: periods misaligned; best circular shift = " << best_shift
                  << " samples\n";
    std::cout << "rmse: " << best << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Periodic movement primitives on triangle meshes"};
    app.require_subcommand(1);
    int rc = 0;

    // validate
    std::string v_mesh;
    double v_threshold = 0.0;
    auto* validate = app.add_subcommand("validate", "Check manifold and orientability");
    validate->add_option("mesh", v_mesh, "Mesh file (.obj/.off)")->required();
    validate->add_option("--threshold", v_threshold, "Minimum adjacent-normal dot product");
    validate->callback([&]() { rc = cmd_validate(v_mesh, v_threshold); });

    // surface
    SurfaceOpts so;
    auto* surface = app.add_subcommand("surface", "Generate a synthetic mesh");
    surface->add_option("--kind", so.kind, "graph | torus | icosphere");
    surface->add_option("--fn", so.fn, "Height preset (flat | twin_gauss)");
    surface->add_option("--nx", so.nx, "Grid vertices along x");
    surface->add_option("--ny", so.ny, "Grid vertices along y");
    surface->add_option("--domain", so.domain, "x0,x1,y0,y1");
    surface->add_option("--major-radius", so.R, "Torus major radius");
    surface->add_option("--minor-radius", so.r, "Torus minor radius");
    surface->add_option("--nu", so.nu, "Torus vertices around the axis");
    surface->add_option("--nv", so.nv, "Torus vertices around the tube");
    surface->add_option("--radius", so.radius, "Icosphere radius");
    surface->add_option("--subdiv", so.subdiv, "Icosphere subdivision level");
    surface->add_option("--out", so.out, "Output mesh path")->required();
    surface->callback([&]() { rc = cmd_surface(so); });

    // demo
    DemoOpts dm;
    auto* demo = app.add_subcommand("demo", "Generate a demonstration curve CSV");
    demo->add_option("--curve", dm.curve, "circle | ellipse | lemniscate");
    demo->add_option("--a", dm.a, "Primary scale");
    demo->add_option("--b", dm.b, "Secondary scale (ellipse)");
    demo->add_option("--surface", dm.surface, "Height preset the curve is lifted onto");
    demo->add_option("--samples", dm.samples, "Samples per period");
    demo->add_option("--period", dm.period, "Period in seconds");
    demo->add_option("--out", dm.out, "Output CSV path")->required();
    demo->callback([&]() { rc = cmd_demo(dm); });

    // train
    TrainOpts tr;
    auto* train = app.add_subcommand("train", "Fit a model to a demonstration");
    train->add_option("--mesh", tr.mesh, "Mesh file")->required();
    train->add_option("--demo", tr.demo, "Demonstration CSV")->required();
    train->add_option("--goal", tr.goal, "Goal point")->required();
    train->add_option("--surface", tr.surface, "Height preset for (u,v) points");
    train->add_option("--alpha", tr.alpha, "Stiffness gain");
    train->add_option("--beta", tr.beta, "Damping ratio gain (default alpha/4)");
    train->add_option("--omega", tr.omega, "Time scale, s/rad (default: from demo length)");
    train->add_option("--n-basis", tr.n_basis, "Number of basis functions");
    train->add_option("--max-distance", tr.max_distance,
                      "Off-surface sample threshold (default 5 x mean edge)");
    train->add_option("--out", tr.out, "Output model JSON")->required();
    train->callback([&]() { rc = cmd_train(tr); });

    // integrate
    IntegrateOpts in;
    auto* integrate = app.add_subcommand("integrate", "Roll out a trained model");
    integrate->add_option("--mesh", in.mesh, "Mesh file")->required();
    integrate->add_option("--model", in.model, "Model JSON")->required();
    integrate->add_option("--start", in.start, "Start point (default: model start)");
    integrate->add_option("--goal", in.goal, "Goal override (for re-anchoring)");
    integrate->add_option("--initial-z", in.initial_z,
                          "Initial scaled velocity zx,zy,zz (default: model metadata)");
    integrate->add_option("--surface", in.surface, "Height preset for (u,v) points");
    integrate->add_option("--duration", in.duration, "Rollout length in seconds");
    integrate->add_option("--dt", in.dt, "Integration step in seconds");
    integrate->add_option("--centers", in.centers, "Centre schedule JSON");
    integrate->add_flag("--poses", in.poses, "Attach filtered tool frames");
    integrate->add_option("--filter-tau", in.filter_tau, "Pose filter time constant");
    integrate->add_option("--out", in.out, "Output trajectory CSV")->required();
    integrate->callback([&]() { rc = cmd_integrate(in); });

    // geodesic
    GeodesicOpts ge;
    auto* geodesic = app.add_subcommand("geodesic", "Shortest path between two points");
    geodesic->add_option("--mesh", ge.mesh, "Mesh file")->required();
    geodesic->add_option("--from", ge.from, "Start point")->required();
    geodesic->add_option("--to", ge.to, "End point")->required();
    geodesic->add_option("--surface", ge.surface, "Height preset for (u,v) points");
    geodesic->add_option("--out", ge.out, "Optional polyline CSV");
    geodesic->callback([&]() { rc = cmd_geodesic(ge); });

    // logmap
    LogmapOpts lo;
    auto* logmap = app.add_subcommand("logmap", "Logarithmic map of one point at another");
    logmap->add_option("--mesh", lo.mesh, "Mesh file")->required();
    logmap->add_option("--at", lo.at, "Base point")->required();
    logmap->add_option("--of", lo.of, "Mapped point")->required();
    logmap->add_option("--surface", lo.surface, "Height preset for (u,v) points");
    logmap->callback([&]() { rc = cmd_logmap(lo); });

    // expmap
    ExpmapOpts ex;
    auto* expmap = app.add_subcommand("expmap", "Exponential map of a tangent vector");
    expmap->add_option("--mesh", ex.mesh, "Mesh file")->required();
    expmap->add_option("--at", ex.at, "Base point")->required();
    expmap->add_option("--vec", ex.vec, "Tangent vector vx,vy,vz")->required();
    expmap->add_option("--surface", ex.surface, "Height preset for (u,v) points");
    expmap->callback([&]() { rc = cmd_expmap(ex); });

    // oracle
    OracleOpts orc;
    auto* oracle = app.add_subcommand("oracle", "Smooth-surface reference computations");
    auto* shoot = oracle->add_subcommand("shoot", "Integrate the geodesic equation");
    shoot->add_option("--kind", orc.kind, "sphere | torus | graph");
    shoot->add_option("--radius", orc.radius, "Sphere radius");
    shoot->add_option("--major-radius", orc.R, "Torus major radius");
    shoot->add_option("--minor-radius", orc.r, "Torus minor radius");
    shoot->add_option("--fn", orc.fn, "Graph height preset");
    shoot->add_option("--domain", orc.domain, "Graph domain x0,x1,y0,y1");
    shoot->add_option("--u0", orc.u0, "Start parameters u1,u2")->required();
    shoot->add_option("--du0", orc.du0, "Start direction du1,du2")->required();
    shoot->add_option("--length", orc.length, "Arc length to integrate");
    shoot->add_option("--steps", orc.steps, "RK4 steps (raised to 1000/unit length)");
    shoot->add_option("--out", orc.out, "Optional curve CSV");
    shoot->callback([&]() { rc = cmd_oracle_shoot(orc); });
    oracle->require_subcommand(1);

    // bench
    BenchOpts be;
    auto* bench = app.add_subcommand("bench", "Time geodesic solver builds and queries");
    bench->add_option("--mesh", be.meshes, "Mesh file (repeatable)")->required();
    bench->add_option("--sources", be.sources, "Solver builds per mesh");
    bench->add_option("--queries", be.queries, "Queries per solver");
    bench->add_option("--seed", be.seed, "RNG seed");
    bench->callback([&]() { rc = cmd_bench(be); });

    // eval
    EvalOpts ev;
    auto* eval = app.add_subcommand("eval", "Position RMSE of a rollout against a demo");
    eval->add_option("--demo", ev.demo, "Demonstration CSV")->required();
    eval->add_option("--trajectory", ev.trajectory, "Trajectory CSV")->required();
    eval->callback([&]() { rc = cmd_eval(ev); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const md::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const md::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
