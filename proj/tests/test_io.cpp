#include "msm/config.hpp"
#include "msm/mesh.hpp"
#include "msm/vtk.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

using namespace msm;

namespace {

Config parse(const std::string& text) {
    std::istringstream in(text);
    return Config::parse(in);
}

} // namespace

TEST(Config, SectionsCommentsAndLists) {
    const Config c = parse("# run\nscheme = cnle  # trailing\n[solver]\ntype = direct\ntol=1e-9\n\n[output]\n"
                           "snapshot_times = 1, 2,3\n");
    EXPECT_EQ(c.get_string("scheme", ""), "cnle");
    EXPECT_EQ(c.get_string("solver.type", ""), "direct");
    EXPECT_DOUBLE_EQ(c.get_double("solver.tol", 0.0), 1e-9);
    EXPECT_EQ(c.get_double_list("output.snapshot_times", {}), (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(c.get_int("missing", 5), 5);
    EXPECT_FALSE(c.get_optional_double("missing").has_value());
}

TEST(Config, ReportsUnusedKeys) {
    const Config c = parse("a = 1\nb = 2\n");
    c.get_double("a", 0.0);
    EXPECT_EQ(c.unused_keys(), std::vector<std::string>{"b"});
}

TEST(Config, SyntaxAndValueErrors) {
    EXPECT_THROW(parse("[solver\n"), ConfigError);
    EXPECT_THROW(parse("novalue\n"), ConfigError);
    EXPECT_THROW(parse("= 3\n"), ConfigError);
    const Config c = parse("x = 1.5\ny = abc\nz = 2x\n");
    EXPECT_THROW(c.get_int("x", 0), ConfigError);
    EXPECT_THROW(c.get_double("y", 0.0), ConfigError);
    EXPECT_THROW(c.get_double("z", 0.0), ConfigError);
    EXPECT_THROW(Config::load("/nonexistent/run.cfg"), ConfigError);
}

TEST(Config, OffsetCylinderDefaultsAndOverrides) {
    const OffsetCylinderConfig d = offset_cylinder_config(parse(""));
    EXPECT_EQ(d.scheme, Scheme::cnle);
    EXPECT_EQ(d.n_outer, 80);
    EXPECT_EQ(d.n_inner, 60);
    EXPECT_DOUBLE_EQ(d.nu, 1e-4);
    EXPECT_EQ(d.solver.type, SolverType::direct);

    const OffsetCylinderConfig c = offset_cylinder_config(
        parse("scheme = be\ndt = 0.02\nforce = zero\n[params]\nre = 500\nmu = 0.3\ndelta = 0.01\n"
              "[solver]\ntype = iterative\nmax_iter = 77\n[output]\nevery_n_steps = 5\n"));
    EXPECT_EQ(c.scheme, Scheme::backward_euler);
    EXPECT_DOUBLE_EQ(c.dt, 0.02);
    EXPECT_EQ(c.force, ForceKind::zero);
    EXPECT_DOUBLE_EQ(c.nu, 1.0 / 500.0);
    EXPECT_DOUBLE_EQ(c.mu, 0.3);
    EXPECT_DOUBLE_EQ(*c.delta, 0.01);
    EXPECT_EQ(c.solver.type, SolverType::iterative);
    EXPECT_EQ(c.solver.max_iter, 77);
    EXPECT_EQ(c.output_every_n_steps, 5);
}

TEST(Config, OffsetCylinderRejectsMistakes) {
    EXPECT_THROW(offset_cylinder_config(parse("params.nu = 1\nparams.re = 1\n")), ConfigError);
    EXPECT_THROW(offset_cylinder_config(parse("force = spiral\n")), ConfigError);
    EXPECT_THROW(offset_cylinder_config(parse("dtt = 0.1\n")), ConfigError);
    EXPECT_THROW(offset_cylinder_config(parse("scheme = rk4\n")), std::invalid_argument);
}

TEST(Config, ManufacturedSweep) {
    const ManufacturedConfig c = manufactured_config(
        parse("dt_list = 0.1, 0.05\nmesh.n_per_side = 9\nparams.nu = 0.5\noutput.convergence_csv = x.csv\n"));
    EXPECT_EQ(c.dt_list, (std::vector<double>{0.1, 0.05}));
    EXPECT_EQ(c.n_per_side, 9);
    EXPECT_DOUBLE_EQ(c.nu, 0.5);
    EXPECT_EQ(c.solver.type, SolverType::block);
    EXPECT_THROW(manufactured_config(parse("mesh.n_outer = 3\n")), ConfigError);
}

TEST(MeshIo, RoundTripPreservesEverything) {
    const Mesh m = build_annulus_mesh(24, 16);
    std::stringstream buf;
    write_mesh(buf, m);
    const Mesh r = read_mesh(buf);
    ASSERT_EQ(r.num_vertices(), m.num_vertices());
    ASSERT_EQ(r.num_triangles(), m.num_triangles());
    ASSERT_EQ(r.boundary_edges().size(), m.boundary_edges().size());
    for (std::size_t i = 0; i < m.num_vertices(); ++i) {
        EXPECT_EQ(r.vertices()[i].x, m.vertices()[i].x);
        EXPECT_EQ(r.vertices()[i].y, m.vertices()[i].y);
    }
    EXPECT_EQ(r.triangles(), m.triangles());
    for (std::size_t i = 0; i < m.boundary_edges().size(); ++i) {
        EXPECT_EQ(r.boundary_edges()[i].v, m.boundary_edges()[i].v);
        EXPECT_EQ(r.boundary_edges()[i].tag, m.boundary_edges()[i].tag);
    }
    EXPECT_EQ(r.h_min(), m.h_min());
}

TEST(MeshIo, FileRoundTripAndErrors) {
    const auto path = std::filesystem::temp_directory_path() / "msm_test_io_mesh.txt";
    const Mesh m = build_square_mesh(4);
    save_mesh(path.string(), m);
    EXPECT_EQ(load_mesh(path.string()).num_triangles(), m.num_triangles());
    EXPECT_THROW(load_mesh("/nonexistent/mesh.txt"), std::exception);
    std::istringstream truncated("3 2 0 0\n0 0 0\n1 1 0\n");
    EXPECT_THROW(read_mesh(truncated), std::exception);
}

TEST(Vtk, LegacyQuadraticTriangles) {
    const TaylorHoodSpace space(std::make_shared<const Mesh>(build_square_mesh(3)));
    const Field w = interpolate(space, [](double x, double y, double) { return Vec2{x, 2 * y}; });
    const Field p = interpolate(space, [](double x, double, double) { return x; });
    std::ostringstream out;
    write_vtk(out, space, w, p, "snapshot");
    const std::string s = out.str();
    EXPECT_EQ(s.rfind("# vtk DataFile Version 3.0\nsnapshot\nASCII\nDATASET UNSTRUCTURED_GRID\n", 0), 0u);
    EXPECT_NE(s.find("POINTS 25 double"), std::string::npos);
    EXPECT_NE(s.find("CELLS 8 56"), std::string::npos);
    EXPECT_NE(s.find("CELL_TYPES 8\n22\n"), std::string::npos);
    EXPECT_NE(s.find("POINT_DATA 25\nVECTORS velocity double\n"), std::string::npos);

    // Pressure at edge midpoints is the linear interpolant, so it equals x there too.
    std::istringstream in(s.substr(s.find("LOOKUP_TABLE default\n") + 21));
    for (int i = 0; i < space.num_nodes(); ++i) {
        double v = 0.0;
        in >> v;
        EXPECT_NEAR(v, space.node(i).x, 1e-12) << i;
    }
    EXPECT_THROW(write_vtk(out, space, p, p, "bad"), std::invalid_argument);
}
