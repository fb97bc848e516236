#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "meshdmp/dmp.hpp"
#include "meshdmp/mesh.hpp"
#include "meshdmp/surface_gen.hpp"
#include "oracles.hpp"

using namespace meshdmp;

namespace {

const std::string kCli = MESHDMP_CLI_PATH;
const std::string kDir = "/tmp/meshdmp_cli_test";

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

RunResult run(const std::string& args) {
    std::filesystem::create_directories(kDir);
    std::string log = kDir + "/last_run.log";
    std::string cmd = kCli + " " + args + " > " + log + " 2>&1";
    int status = std::system(cmd.c_str());
    RunResult r;
    if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    return r;
}

// value following "<key>: " on its own line, e.g. parse_value(out, "rmse")
std::string parse_value(const std::string& text, const std::string& key) {
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line))
        if (line.rfind(key + ": ", 0) == 0) return line.substr(key.size() + 2);
    return {};
}

std::string path_of(const std::string& name) { return kDir + "/" + name; }

}  // namespace

TEST_CASE("argument handling exits with code 2") {
    std::filesystem::create_directories(kDir);
    CHECK(run("--help").exit_code == 0);
    CHECK(run("").exit_code == 2);                 // a subcommand is required
    CHECK(run("frobnicate").exit_code == 2);       // unknown subcommand
    CHECK(run("validate").exit_code == 2);         // missing required argument
    CHECK(run("validate /tmp/meshdmp_does_not_exist.obj").exit_code == 2);
}

TEST_CASE("surface generation writes loadable meshes") {
    auto r = run("surface --kind graph --fn twin_gauss --nx 28 --ny 28 --out " +
                 path_of("graph.obj"));
    CHECK(r.exit_code == 0);
    Mesh graph = load_mesh(path_of("graph.obj"));
    CHECK(graph.num_vertices() == 784);
    CHECK(graph.num_faces() == 1458);

    CHECK(run("surface --kind torus --major-radius 0.5 --minor-radius 0.2 --nu 40 --nv 25 "
              "--out " + path_of("torus.off")).exit_code == 0);
    Mesh torus = load_mesh(path_of("torus.off"));
    CHECK(torus.num_vertices() == 1000);
    CHECK(torus.num_faces() == 2000);

    CHECK(run("surface --kind icosphere --subdiv 2 --out " + path_of("ico.obj")).exit_code == 0);
    CHECK(load_mesh(path_of("ico.obj")).num_faces() == 320);

    CHECK(run("surface --kind nonsense --out " + path_of("x.obj")).exit_code == 2);
}

TEST_CASE("validate distinguishes clean, broken and missing meshes") {
    Mesh clean = generate_icosphere(1.0, 1);
    save_obj(clean, path_of("clean.obj"));
    auto ok = run("validate " + path_of("clean.obj"));
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("\"is_manifold\"") != std::string::npos);

    Mesh broken = oracles::make_nonmanifold_mesh();
    save_obj(broken, path_of("broken.obj"));
    CHECK(run("validate " + path_of("broken.obj")).exit_code == 1);

    Mesh flipped = oracles::make_flipped_grid();
    save_obj(flipped, path_of("flipped.obj"));
    CHECK(run("validate " + path_of("flipped.obj")).exit_code == 1);
    // a permissive threshold ignores shallow creases but flips still fail
    CHECK(run("validate --threshold -0.5 " + path_of("flipped.obj")).exit_code == 1);

    std::ofstream(path_of("garbage.obj")) << "not a mesh\n";
    CHECK(run("validate " + path_of("garbage.obj")).exit_code == 2);
}

TEST_CASE("demo, train, integrate, eval pipeline") {
    REQUIRE(run("surface --kind graph --fn flat --nx 20 --ny 20 --out " +
                path_of("flat.obj")).exit_code == 0);
    REQUIRE(run("demo --curve circle --a 0.8 --surface flat --samples 500 --period 2 --out " +
                path_of("demo.csv")).exit_code == 0);

    auto train = run("train --mesh " + path_of("flat.obj") + " --demo " + path_of("demo.csv") +
                     " --goal 0,0,0 --n-basis 20 --out " + path_of("model.json"));
    CHECK(train.exit_code == 0);
    CHECK(!parse_value(train.output, "fit residual rms").empty());
    MeshDmpModel model = load_model_json(path_of("model.json"));
    CHECK(model.omega == doctest::Approx(2.0 / (2 * M_PI)).epsilon(1e-12));
    CHECK(model.r == doctest::Approx(0.8).epsilon(1e-6));

    auto integ = run("integrate --mesh " + path_of("flat.obj") + " --model " +
                     path_of("model.json") + " --duration 2 --dt 0.001 --out " +
                     path_of("traj.csv"));
    CHECK(integ.exit_code == 0);
    Trajectory traj = load_trajectory_csv(path_of("traj.csv"));
    CHECK(traj.rows.size() == 2000);

    auto eval = run("eval --demo " + path_of("demo.csv") + " --trajectory " + path_of("traj.csv"));
    CHECK(eval.exit_code == 0);
    double rmse = std::stod(parse_value(eval.output, "rmse"));
    CHECK(rmse < 0.02);

    SUBCASE("re-anchoring to a new goal and start") {
        auto moved = run("integrate --mesh " + path_of("flat.obj") + " --model " +
                         path_of("model.json") + " --goal 0.5,0.5,0 --start 1.3,0.5,0 " +
                         "--duration 2 --dt 0.001 --out " + path_of("moved.csv"));
        CHECK(moved.exit_code == 0);
        Trajectory m = load_trajectory_csv(path_of("moved.csv"));
        double lo = 1e9, hi = 0.0;
        for (size_t k = 200; k < m.rows.size(); ++k) {  // skip the transient
            double d = (m.rows[k].position - Vec3(0.5, 0.5, 0)).norm();
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        CHECK(lo > 0.45);  // orbits the new centre at roughly the demo radius
        CHECK(hi < 1.15);
    }
    SUBCASE("zero duration leaves only the header") {
        CHECK(run("integrate --mesh " + path_of("flat.obj") + " --model " + path_of("model.json") +
                  " --duration 0 --out " + path_of("empty.csv")).exit_code == 0);
        CHECK(load_trajectory_csv(path_of("empty.csv")).rows.empty());
        std::ifstream in(path_of("empty.csv"));
        std::string header;
        std::getline(in, header);
        CHECK(header.rfind("t,", 0) == 0);
    }
    SUBCASE("pose columns appear with --poses") {
        CHECK(run("integrate --mesh " + path_of("flat.obj") + " --model " + path_of("model.json") +
                  " --duration 0.05 --poses --out " + path_of("posed.csv")).exit_code == 0);
        Trajectory posed = load_trajectory_csv(path_of("posed.csv"));
        REQUIRE(posed.has_poses);
        CHECK(std::abs(posed.rows[0].quat.norm() - 1.0) < 1e-9);
    }
    SUBCASE("custom gains are accepted") {
        auto r = run("train --mesh " + path_of("flat.obj") + " --demo " + path_of("demo.csv") +
                     " --goal 0,0,0 --alpha 10 --out " + path_of("model10.json"));
        CHECK(r.exit_code == 0);
        MeshDmpModel m10 = load_model_json(path_of("model10.json"));
        CHECK(m10.alpha == 10.0);
        CHECK(m10.beta == 2.5);
    }
}

TEST_CASE("eval agrees with hand-built trajectories") {
    auto demo = generate_demo_curve(CurveSpec::circle(0.7), SurfacePreset::flat, 200, 2.0);
    save_demo_csv(demo, path_of("eval_demo.csv"));
    Trajectory traj;
    for (const auto& p : demo) {
        TrajectoryRow row;
        row.t = p.t;
        row.position = p.position;
        traj.rows.push_back(row);
    }
    save_trajectory_csv(traj, path_of("eval_same.csv"));
    auto same = run("eval --demo " + path_of("eval_demo.csv") + " --trajectory " +
                    path_of("eval_same.csv"));
    CHECK(same.exit_code == 0);
    CHECK(std::stod(parse_value(same.output, "rmse")) < 1e-12);

    for (auto& row : traj.rows) row.position[0] += 0.1;
    save_trajectory_csv(traj, path_of("eval_off.csv"));
    auto off = run("eval --demo " + path_of("eval_demo.csv") + " --trajectory " +
                   path_of("eval_off.csv"));
    CHECK(std::stod(parse_value(off.output, "rmse")) == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("train reports a domain error for a motionless demonstration") {
    REQUIRE(run("surface --kind graph --fn flat --nx 10 --ny 10 --out " +
                path_of("flat_s.obj")).exit_code == 0);
    std::vector<DemoSamplePoint> frozen(32);
    for (int k = 0; k < 32; ++k)
        frozen[k] = {k * 0.01, Vec3(0.2, 0.1, 0), Vec3::Zero()};
    save_demo_csv(frozen, path_of("frozen.csv"));
    auto r = run("train --mesh " + path_of("flat_s.obj") + " --demo " + path_of("frozen.csv") +
                 " --goal 0,0,0 --out " + path_of("never.json"));
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("error:") != std::string::npos);
}

TEST_CASE("geodesic, logmap and expmap outputs are consistent") {
    REQUIRE(run("surface --kind icosphere --subdiv 3 --out " + path_of("s3.obj")).exit_code == 0);

    auto geo = run("geodesic --mesh " + path_of("s3.obj") +
                   " --from 1,0,0 --to 0,1,0 --out " + path_of("path.csv"));
    CHECK(geo.exit_code == 0);
    double length = std::stod(parse_value(geo.output, "length"));
    CHECK(length == doctest::Approx(M_PI / 2).epsilon(0.01));
    std::ifstream in(path_of("path.csv"));
    std::string header;
    std::getline(in, header);
    CHECK(header == "s,x,y,z");

    auto lm = run("logmap --mesh " + path_of("s3.obj") + " --at 1,0,0 --of 0,1,0");
    CHECK(lm.exit_code == 0);
    double lnorm = std::stod(parse_value(lm.output, "norm"));
    CHECK(lnorm == doctest::Approx(length).epsilon(1e-6));

    auto em = run("expmap --mesh " + path_of("s3.obj") + " --at 1,0,0 --vec " +
                  parse_value(lm.output, "log"));
    CHECK(em.exit_code == 0);
    auto xyz = parse_value(em.output, "position");
    double x, y, z;
    char c1, c2;
    std::istringstream(xyz) >> x >> c1 >> y >> c2 >> z;
    CHECK((Vec3(x, y, z) - Vec3(0, 1, 0)).norm() < 0.05);

    // (u,v) points lift through the surface preset
    REQUIRE(run("surface --kind graph --fn twin_gauss --nx 24 --ny 24 --out " +
                path_of("tg.obj")).exit_code == 0);
    auto uv = run("geodesic --mesh " + path_of("tg.obj") + " --surface twin_gauss "
                  "--from '(1,-1)' --to '(1,1)'");
    CHECK(uv.exit_code == 0);
    // the straight chord between the lifted endpoints is 2; the path has to
    // dip through the valley at (1,0), so it comes out noticeably longer
    CHECK(std::stod(parse_value(uv.output, "length")) > 2.1);
}

TEST_CASE("oracle shoot reports negligible speed drift") {
    auto r = run("oracle shoot --kind sphere --u0 1.5707963267948966,0 --du0 0,1 "
                 "--length 3.14159265 --steps 4000");
    CHECK(r.exit_code == 0);
    CHECK(std::stod(parse_value(r.output, "speed drift")) < 1e-6);
    auto bad = run("oracle shoot --kind graph --u0 1.9,0 --du0 1,0 --length 1 --steps 1000");
    CHECK(bad.exit_code == 1);  // leaves the chart: a domain error
}

TEST_CASE("bench runs on a small mesh") {
    Mesh mesh = generate_icosphere(1.0, 2);
    save_obj(mesh, path_of("bench.obj"));
    auto r = run("bench --mesh " + path_of("bench.obj") + " --sources 2 --queries 10");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("delta_const") != std::string::npos);
    CHECK(r.output.find("bench.obj") != std::string::npos);
    CHECK(r.output.find("320") != std::string::npos);
}
