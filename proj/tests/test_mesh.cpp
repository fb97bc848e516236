#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "meshdmp/mesh.hpp"
#include "meshdmp/surface_gen.hpp"
#include "oracles.hpp"

using namespace meshdmp;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = std::string("/tmp/meshdmp_test_") + name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("single triangle OBJ loads") {
    std::string path = write_temp("tri.obj",
                                  "v 0 0 0\n"
                                  "v 1 0 0\n"
                                  "v 0 1 0\n"
                                  "f 1 2 3\n");
    Mesh mesh = load_mesh(path);
    CHECK(mesh.num_vertices() == 3);
    CHECK(mesh.num_faces() == 1);
    CHECK((mesh.face_normal(0) - Vec3(0, 0, 1)).norm() < 1e-12);
}

TEST_CASE("OBJ parse failures") {
    SUBCASE("missing file") { CHECK_THROWS_AS(load_mesh("/tmp/definitely_not_here.obj"), ParseError); }
    SUBCASE("quad face rejected, no silent triangulation") {
        std::string path = write_temp("quad.obj",
                                      "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
                                      "f 1 2 3 4\n");
        CHECK_THROWS_AS(load_mesh(path), ParseError);
    }
    SUBCASE("malformed vertex line") {
        std::string path = write_temp("bad.obj", "v 0 zero 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
        CHECK_THROWS_AS(load_mesh(path), ParseError);
    }
    SUBCASE("empty mesh") {
        std::string path = write_temp("empty.obj", "# nothing\n");
        CHECK_THROWS_AS(load_mesh(path), ParseError);
    }
    SUBCASE("face index out of range") {
        std::string path = write_temp("oob.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n");
        CHECK_THROWS(load_mesh(path));
    }
}

TEST_CASE("OFF round-trip preserves geometry") {
    Mesh mesh = generate_icosphere(1.0, 2);
    std::string path = "/tmp/meshdmp_test_rt.off";
    save_off(mesh, path);
    Mesh back = load_mesh(path);
    REQUIRE(back.num_vertices() == mesh.num_vertices());
    REQUIRE(back.num_faces() == mesh.num_faces());
    for (int i = 0; i < mesh.num_vertices(); ++i)
        CHECK((back.vertex(i) - mesh.vertex(i)).norm() == 0.0);
}

TEST_CASE("OBJ round-trip preserves geometry") {
    Mesh mesh = generate_graph_mesh(SurfacePreset::twin_gauss, {}, 8, 8);
    std::string path = "/tmp/meshdmp_test_rt.obj";
    save_obj(mesh, path);
    Mesh back = load_mesh(path);
    REQUIRE(back.num_faces() == mesh.num_faces());
    for (int i = 0; i < mesh.num_vertices(); ++i)
        CHECK((back.vertex(i) - mesh.vertex(i)).norm() == 0.0);
}

TEST_CASE("icosphere subdivision counts") {
    Mesh mesh = generate_icosphere(1.0, 4);
    CHECK(mesh.num_vertices() == 2562);
    CHECK(mesh.num_faces() == 5120);
}

TEST_CASE("fender asset loads at its catalog size") {
    Mesh mesh = load_mesh(std::string(MESHDMP_ASSET_DIR) + "/fender.obj");
    CHECK(mesh.num_vertices() == 30919);
    CHECK(mesh.num_faces() == 61898);
}

TEST_CASE("validate: planar grid is clean") {
    Mesh mesh = generate_graph_mesh(SurfacePreset::flat, {}, 6, 6);
    ValidationReport rep = validate(mesh, 0.0);
    CHECK(rep.is_manifold);
    CHECK(rep.is_orientable);
    CHECK(rep.non_manifold_edges.empty());
    CHECK(rep.orientation_violations.empty());
    CHECK_FALSE(rep.boundary_edges.empty());  // open grid has a rim
}

TEST_CASE("validate: flipped winding is flagged with a direct scan oracle") {
    int victim = -1;
    Mesh mesh = oracles::make_flipped_grid(&victim);
    ValidationReport rep = validate(mesh, 0.0);
    CHECK_FALSE(rep.is_orientable);
    CHECK(rep.is_manifold);

    // oracle: adjacent-pair dot products computed directly
    int expected = 0;
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const auto& faces = mesh.edge_faces(e);
        if (faces.size() != 2) continue;
        if (mesh.face_normal(faces[0]).dot(mesh.face_normal(faces[1])) <= 0.0) ++expected;
    }
    CHECK(expected == 3);  // the flipped interior face breaks all three adjacencies
    CHECK(rep.orientation_violations.size() == 3);
    for (const auto& v : rep.orientation_violations)
        CHECK((v.face_a == victim || v.face_b == victim));
}

TEST_CASE("validate: glued tetrahedra expose a four-face edge") {
    Mesh mesh = oracles::make_nonmanifold_mesh();
    ValidationReport rep = validate(mesh, 0.0);
    CHECK_FALSE(rep.is_manifold);
    REQUIRE(rep.non_manifold_edges.size() == 1);
    CHECK(rep.non_manifold_edges[0][0] == 0);
    CHECK(rep.non_manifold_edges[0][1] == 1);
    CHECK(rep.non_manifold_edges[0][2] == 4);
}

TEST_CASE("closest_point basics") {
    Mesh mesh = generate_graph_mesh(SurfacePreset::flat, {}, 4, 4);
    SUBCASE("vertex query returns a unit barycentric") {
        SurfacePoint sp = mesh.closest_point(mesh.vertex(5));
        CHECK((sp.position - mesh.vertex(5)).norm() < 1e-12);
        CHECK(sp.bary.maxCoeff() == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("centroid plus normal offset lands on the centroid") {
        const auto& tri = mesh.face(7);
        Vec3 centroid = (mesh.vertex(tri[0]) + mesh.vertex(tri[1]) + mesh.vertex(tri[2])) / 3.0;
        SurfacePoint sp = mesh.closest_point(centroid + 0.1 * mesh.face_normal(7));
        CHECK((sp.position - centroid).norm() < 1e-9);
        CHECK((sp.bary - Vec3(1.0 / 3, 1.0 / 3, 1.0 / 3)).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("closest_point agrees with the exhaustive scan") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> span(-2.5, 2.5);
    for (const Mesh& mesh : {generate_graph_mesh(SurfacePreset::twin_gauss, {}, 20, 20),
                             generate_icosphere(1.0, 3)}) {
        for (int i = 0; i < 200; ++i) {
            Vec3 p(span(rng), span(rng), span(rng));
            SurfacePoint sp = mesh.closest_point(p);
            Vec3 ref = oracles::brute_force_closest(mesh, p);
            CHECK((p - sp.position).norm() == doctest::Approx((p - ref).norm()).epsilon(1e-9));
            CHECK((sp.position - ref).norm() < 1e-9 * std::max(1.0, mesh.bbox_diagonal()));
        }
    }
}

TEST_CASE("surface point invariants enforced on construction") {
    Mesh mesh = generate_graph_mesh(SurfacePreset::flat, {}, 3, 3);
    SurfacePoint sp = make_surface_point(mesh, 0, Vec3(0.2, 0.3, 0.5));
    CHECK(sp.bary.sum() == doctest::Approx(1.0).epsilon(1e-12));
    const auto& tri = mesh.face(0);
    Vec3 pos = sp.bary[0] * mesh.vertex(tri[0]) + sp.bary[1] * mesh.vertex(tri[1]) +
               sp.bary[2] * mesh.vertex(tri[2]);
    CHECK((sp.position - pos).norm() < 1e-9);
    CHECK_THROWS_AS(make_surface_point(mesh, 0, Vec3(0.8, 0.8, -0.6)), DomainError);
    CHECK_THROWS_AS(make_surface_point(mesh, 0, Vec3(0.5, 0.5, 0.5)), DomainError);
}

TEST_CASE("tangent_basis") {
    SUBCASE("unit right triangle") {
        std::vector<Vec3> v = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
        std::vector<std::array<int, 3>> f = {{0, 1, 2}};
        Mesh mesh = Mesh::build(std::move(v), std::move(f));
        auto [e1, e2] = tangent_basis(mesh, make_surface_point(mesh, 0, Vec3(1, 0, 0)));
        CHECK((e1 - Vec3(1, 0, 0)).norm() < 1e-15);
        CHECK((e2 - Vec3(0, 1, 0)).norm() < 1e-15);
    }
    SUBCASE("cross of basis vectors is parallel to the stored normal") {
        Mesh mesh = generate_icosphere(1.0, 2);
        for (int fidx = 0; fidx < mesh.num_faces(); ++fidx) {
            auto [e1, e2] =
                tangent_basis(mesh, make_surface_point(mesh, fidx, Vec3(1.0 / 3, 1.0 / 3, 1.0 / 3)));
            Vec3 n = e1.cross(e2).normalized();
            CHECK((n - mesh.face_normal(fidx)).norm() < 1e-12);
        }
    }
    SUBCASE("bunny faces are planar within the plane-fit oracle") {
        Mesh mesh = load_mesh(std::string(MESHDMP_ASSET_DIR) + "/bunny_simple.obj");
        for (int fidx = 0; fidx < mesh.num_faces(); ++fidx) {
            const auto& tri = mesh.face(fidx);
            CHECK(oracles::plane_fit_residual(mesh.vertex(tri[0]), mesh.vertex(tri[1]),
                                              mesh.vertex(tri[2])) < 1e-12);
        }
    }
}

TEST_CASE("project_to_tangent") {
    Mesh mesh = generate_graph_mesh(SurfacePreset::flat, {}, 3, 3);
    SurfacePoint m = make_surface_point(mesh, 0, Vec3(1.0 / 3, 1.0 / 3, 1.0 / 3));

    SUBCASE("in-plane vector unchanged") {
        TangentVector tv = project_to_tangent(mesh, m, Vec3(0.3, -0.4, 0));
        CHECK((tv.vec - Vec3(0.3, -0.4, 0)).norm() < 1e-15);
    }
    SUBCASE("analytic 45-degree case") {
        TangentVector tv = project_to_tangent(mesh, m, Vec3(1, 0, 1));
        CHECK(tv.vec.normalized().isApprox(Vec3(1, 0, 0), 1e-12));
        CHECK(tv.norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    }
    SUBCASE("norm preserved, result tangent, idempotent") {
        std::mt19937 rng(11);
        std::normal_distribution<double> g(0.0, 1.0);
        Mesh curved = generate_icosphere(1.0, 2);
        for (int i = 0; i < 100; ++i) {
            SurfacePoint p = oracles::random_surface_point(curved, rng);
            Vec3 v(g(rng), g(rng), g(rng));
            if (v.norm() < 1e-3) continue;
            TangentVector tv = project_to_tangent(curved, p, v);
            CHECK(tv.norm() == doctest::Approx(v.norm()).epsilon(1e-12));
            CHECK(std::abs(tv.vec.dot(curved.face_normal(p.face))) < 1e-9 * tv.norm());
            TangentVector again = project_to_tangent(curved, p, tv.vec);
            CHECK((again.vec - tv.vec).norm() < 1e-12 * tv.norm());
        }
    }
    SUBCASE("zero maps to zero, normal direction rejected") {
        CHECK(project_to_tangent(mesh, m, Vec3::Zero()).norm() == 0.0);
        CHECK_THROWS_AS(project_to_tangent(mesh, m, Vec3(0, 0, 2)), DomainError);
    }
}

TEST_CASE("validate passes on every generator output") {
    CHECK(validate(generate_graph_mesh(SurfacePreset::twin_gauss, {}, 28, 28)).is_orientable);
    CHECK(validate(generate_torus(0.5, 0.2, 40, 25)).is_orientable);
    CHECK(validate(generate_icosphere(1.0, 3)).is_orientable);
    CHECK(validate(generate_graph_mesh(SurfacePreset::twin_gauss, {}, 28, 28)).is_manifold);
    CHECK(validate(generate_torus(0.5, 0.2, 40, 25)).is_manifold);
    CHECK(validate(generate_icosphere(1.0, 3)).is_manifold);
}
