#include <doctest.h>

#include <random>
#include <sstream>

#include "sepskel/errors.hpp"
#include "sepskel/ingest.hpp"
#include "support/shapes.hpp"

using namespace sepskel;
using namespace sepskel::testing;

namespace {

MeshGraph obj_graph(const std::string& text) {
    std::stringstream ss(text);
    return mesh_to_graph(read_obj(ss));
}

} // namespace

TEST_CASE("mesh_to_graph") {
    auto tri = obj_graph("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
    CHECK(tri.graph.vertex_count() == 3);
    CHECK(tri.graph.edge_count() == 3);

    auto quad = obj_graph("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
    CHECK(quad.graph.edge_count() == 4);
    CHECK_FALSE(quad.graph.has_edge(0, 2));

    auto two = obj_graph("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 3\nf 2 4 3\n");
    CHECK(two.graph.vertex_count() == 4);
    CHECK(two.graph.edge_count() == 5);

    SUBCASE("index forms") {
        auto g = obj_graph("# c\nv 0 0 0\nvn 0 0 1\nv 1 0 0\nv 0 1 0\nvt 0 0\nf 1/1/1 2//1 -1\n");
        CHECK(g.graph.edge_count() == 3);
    }
    SUBCASE("degenerate faces are skipped and counted") {
        auto g = obj_graph("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 2\nf 1 2 3\n");
        CHECK(g.skipped_faces == 1);
        CHECK(g.graph.edge_count() == 3);
    }
    SUBCASE("positions are kept") {
        auto g = obj_graph("v 0.5 -2 3e1\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
        CHECK(g.graph.position(0) == Vec3(0.5, -2, 30));
    }
}

TEST_CASE("obj parse errors carry line numbers") {
    auto fails_at = [](const std::string& text, std::size_t line) {
        std::stringstream ss(text);
        try {
            read_obj(ss);
        } catch (const ParseError& e) {
            CHECK(e.line() == line);
            return;
        }
        FAIL("no parse error for: " << text);
    };
    fails_at("v 0 0\n", 1);
    fails_at("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 x\n", 4);
    fails_at("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2\n", 4);
    fails_at("v 0 0 0\nv 1 0 0\nv 0 1 0\n\nf 1 2 9\n", 5);
}

TEST_CASE("obj round trip") {
    auto mesh = torus_mesh(5, 4);
    std::stringstream ss;
    write_obj(ss, mesh);
    auto back = read_obj(ss);
    CHECK(back.faces == mesh.faces);
    REQUIRE(back.vertices.size() == mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
        CHECK((back.vertices[i] - mesh.vertices[i]).norm() < 1e-12);
}

TEST_CASE("voxels_to_graph") {
    VoxelGrid one({1, 1, 1});
    one.at(0, 0, 0) = 1.f;
    auto g1 = voxels_to_graph(one, 0.5f);
    CHECK(g1.vertex_count() == 1);
    CHECK(g1.edge_count() == 0);

    VoxelGrid two({2, 1, 1});
    two.values = {1.f, 1.f};
    CHECK(voxels_to_graph(two, 0.5f).edge_count() == 1);

    VoxelGrid cube({2, 2, 2});
    std::fill(cube.values.begin(), cube.values.end(), 1.f);
    auto k8 = voxels_to_graph(cube, 0.5f);
    CHECK(k8.vertex_count() == 8);
    CHECK(k8.edge_count() == 28);

    SUBCASE("threshold is strict and positions use spacing") {
        VoxelGrid g({3, 1, 1}, {2.f, 1.f, 1.f});
        g.values = {0.37f, 0.38f, 1.f};
        auto graph = voxels_to_graph(g, 0.37f);
        REQUIRE(graph.vertex_count() == 2);
        CHECK(graph.position(0) == Vec3(2, 0, 0));
        CHECK(graph.position(1) == Vec3(4, 0, 0));
    }
    SUBCASE("random grid against Chebyshev oracle") {
        std::mt19937 rng(3);
        VoxelGrid g({5, 4, 3});
        for (auto& v : g.values) v = static_cast<float>(rng() % 100) / 100.f;
        auto graph = voxels_to_graph(g, 0.5f);
        std::vector<std::array<int, 3>> cells;
        for (std::uint32_t z = 0; z < 3; ++z)
            for (std::uint32_t y = 0; y < 4; ++y)
                for (std::uint32_t x = 0; x < 5; ++x)
                    if (g.at(x, y, z) > 0.5f) cells.push_back({int(x), int(y), int(z)});
        REQUIRE(graph.vertex_count() == cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i)
            for (std::size_t j = i + 1; j < cells.size(); ++j) {
                int cheb = 0;
                for (int a = 0; a < 3; ++a) cheb = std::max(cheb, std::abs(cells[i][a] - cells[j][a]));
                CHECK(graph.has_edge(i, j) == (cheb == 1));
            }
    }
    CHECK(voxels_to_graph(VoxelGrid({3, 3, 3}), 0.5f).empty());
}

TEST_CASE("voxel file round trip and errors") {
    VoxelGrid g({3, 2, 2}, {0.5f, 1.f, 2.f});
    for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = static_cast<float>(i) * 0.25f;
    std::stringstream ss;
    write_voxels(ss, g);
    CHECK(ss.str().size() == 16 + 12 + 12 + 4 * 12);
    CHECK(ss.str().substr(0, 16) == "SEPSKELVOX00001\n");
    auto back = read_voxels(ss);
    CHECK(back.dims == g.dims);
    CHECK(back.spacing == g.spacing);
    CHECK(back.values == g.values);

    std::stringstream bad("NOTAVOXELFILE000\n........");
    CHECK_THROWS_AS(read_voxels(bad), ParseError);
    std::string truncated = ss.str().substr(0, 40);
    std::stringstream tr(truncated);
    CHECK_THROWS_AS(read_voxels(tr), ParseError);
}

TEST_CASE("voxelize_mesh fills a closed surface") {
    auto sphere = icosphere_mesh(3);
    auto grid = voxelize_mesh(sphere, 20);
    auto graph = voxels_to_graph(grid, 0.5f);
    // Volume of the unit sphere in voxels of side 2/20.
    const double expected = 4.0 / 3.0 * 3.14159265358979 / std::pow(0.1, 3);
    CHECK(static_cast<double>(graph.vertex_count()) == doctest::Approx(expected).epsilon(0.1));
    CHECK(connected_components(graph).size() == 1);
}

TEST_CASE("points_to_graph") {
    PointGraphParams p;
    PointCloud one{{Vec3(1, 2, 3)}};
    auto g1 = points_to_graph(one, p);
    CHECK(g1.graph.vertex_count() == 1);
    CHECK(g1.graph.edge_count() == 0);

    PointCloud line{{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)}};
    p.k = 1;
    p.radius = 1.5;
    p.l = 1;
    auto path = points_to_graph(line, p);
    CHECK(path.graph.edge_count() == 2);
    CHECK(path.graph.has_edge(0, 1));
    CHECK(path.graph.has_edge(1, 2));

    p.l = 2;
    p.l_radius = 3;
    CHECK(points_to_graph(line, p).graph.edge_count() == 3);

    p.k = 0;
    CHECK_THROWS_AS(points_to_graph(line, p), std::invalid_argument);
    p.k = 1;
    p.radius = 0;
    CHECK_THROWS_AS(points_to_graph(line, p), std::invalid_argument);
    CHECK_THROWS_AS(points_to_graph(PointCloud{}, PointGraphParams{}), std::invalid_argument);

    SUBCASE("contraction mapping is composed") {
        PointGraphParams q;
        q.k = 4;
        q.radius = 2.5;
        q.l = 1;
        q.target_fraction = 0.5;
        PointCloud dense;
        for (int i = 0; i < 20; ++i) dense.points.emplace_back(i, 0.1 * (i % 3), 0);
        auto g = points_to_graph(dense, q);
        CHECK(g.graph.vertex_count() == 10);
        REQUIRE(g.mapping.size() == 20);
        for (auto m : g.mapping) CHECK(m < 10);
    }
}

TEST_CASE("degree bound for complete kNN") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    PointCloud c;
    for (int i = 0; i < 15; ++i) c.points.emplace_back(u(rng), u(rng), u(rng));
    PointGraphParams p{14, 10.0, 1, 10.0, 1.0};
    auto g = points_to_graph(c, p);
    for (VertexId v = 0; v < g.graph.vertex_count(); ++v) CHECK(g.graph.degree(v) == 14);
    p.radius = 0.4;
    auto h = points_to_graph(c, p);
    for (VertexId v = 0; v < h.graph.vertex_count(); ++v) CHECK(h.graph.degree(v) <= 14);
}

TEST_CASE("kNN grid matches brute force") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Vec3> pts;
        for (int i = 0; i < 300; ++i) pts.emplace_back(u(rng), u(rng), 0.3 * u(rng));
        // A few exact duplicates and lattice points exercise the tie rule.
        for (int i = 0; i < 10; ++i) pts.push_back(pts[i]);
        for (int i = 0; i < 10; ++i) pts.emplace_back(i % 3, i / 3, 0);
        const int k = 1 + trial;
        const double radius = 0.3 + 0.2 * trial;
        CHECK(knn_within_radius(pts, k, radius) == knn_within_radius_serial(pts, k, radius));
    }
}

TEST_CASE("point file parsing") {
    std::stringstream ok("# cloud\n0 0 0\n1.5 2 3\n\n");
    CHECK(read_points(ok).points.size() == 2);
    std::stringstream bad("0 0 0\n1 2\n");
    try {
        read_points(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}
