// Command-line front end: offset-cylinder runs, convergence sweeps,
// verification reports and mesh import/export.

#include "msm/config.hpp"
#include "msm/experiments.hpp"
#include "msm/verification.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

namespace {

int run(const std::string& path) {
    const msm::Config cfg = msm::Config::load(path);
    const msm::OffsetCylinderConfig config = msm::offset_cylinder_config(cfg);
    const auto result = msm::run_offset_cylinder(config);
    std::cout << "mesh: " << result.num_vertices << " vertices, " << result.num_triangles << " triangles, delta "
              << result.delta << '\n';
    std::cout << "steps: " << result.records.size() << ", negative md steps: " << result.negative_md_steps << '\n';
    if (!result.records.empty()) {
        const auto& last = result.records.back();
        std::cout << "final t=" << last.t << " mke=" << last.mke << " md=" << last.md << '\n';
    }
    for (const auto& f : result.vtk_files) std::cout << "wrote " << f << '\n';
    if (!config.diagnostics_csv.empty()) std::cout << "wrote " << config.diagnostics_csv << '\n';
    return 0;
}

int convergence(const std::string& path) {
    const msm::Config cfg = msm::Config::load(path);
    const std::string csv = cfg.get_string("output.convergence_csv", "");
    const auto rows = msm::run_manufactured(msm::manufactured_config(cfg));
    std::cout << std::setw(10) << "dt" << std::setw(14) << "err_inf0" << std::setw(8) << "rate" << std::setw(14)
              << "err_grad00" << std::setw(8) << "rate" << std::setw(14) << "err_p00" << std::setw(8) << "rate"
              << '\n';
    auto rate = [](const std::optional<double>& r) {
        std::ostringstream s;
        if (r) s << std::fixed << std::setprecision(3) << *r;
        return s.str();
    };
    for (const auto& r : rows)
        std::cout << std::setw(10) << r.dt << std::setw(14) << r.err_inf0 << std::setw(8) << rate(r.rate_inf0)
                  << std::setw(14) << r.err_grad00 << std::setw(8) << rate(r.rate_grad00) << std::setw(14)
                  << r.err_p00 << std::setw(8) << rate(r.rate_p00) << '\n';
    if (!csv.empty()) {
        msm::write_convergence_csv(csv, rows);
        std::cout << "wrote " << csv << '\n';
    }
    return 0;
}

int verify(std::uint64_t seed, int samples, int n) {
    auto mesh = std::make_shared<const msm::Mesh>(msm::build_square_mesh(n));
    const msm::TaylorHoodSpace space(mesh);
    std::cout << "verification on the square mesh n=" << n << " (seed " << seed << ")\n";

    const msm::SparseMatrix mass = msm::assemble_mass(space);
    double pol = 0.0;
    for (int s = 0; s < samples; ++s) {
        const auto u = msm::random_masked_velocity(space, seed + 1000 + 2 * s);
        const auto v = msm::random_masked_velocity(space, seed + 1001 + 2 * s);
        pol = std::max(pol, msm::check_polarization(u, v, mass));
    }
    std::cout << "polarization: max relative defect=" << pol << '\n';

    double skew = 0.0;
    for (int s = 0; s < samples; ++s) {
        const msm::Field a{msm::FieldKind::velocity, msm::random_masked_velocity(space, seed + 5000 + 2 * s), 0.0};
        const auto w = msm::random_masked_velocity(space, seed + 5001 + 2 * s);
        const msm::SparseMatrix n_a = msm::assemble_trilinear(space, a);
        skew = std::max(skew, std::abs(w.dot(n_a * w)) / (w.squaredNorm() * a.coeffs.norm()));
    }
    std::cout << "trilinear skew-symmetry: max |w'N(a)w| / (|w|^2 |a|)=" << skew << '\n';

    msm::print_report(std::cout, msm::check_poincare(space, seed, samples));
    msm::print_report(std::cout, msm::check_monotonicity_suite(space, samples, seed));
    for (int m : {3, 5}) {
        const msm::TaylorHoodSpace coarse(std::make_shared<const msm::Mesh>(msm::build_square_mesh(m)));
        std::cout << "inf-sup: n=" << m << " beta_h=" << msm::check_infsup(coarse) << '\n';
    }
    return 0;
}

int mesh_export(const std::string& path, int square, int n_outer, int n_inner) {
    const msm::Mesh mesh = square > 0 ? msm::build_square_mesh(square) : msm::build_annulus_mesh(n_outer, n_inner);
    msm::save_mesh(path, mesh);
    std::cout << "wrote " << path << ": " << mesh.num_vertices() << " vertices, " << mesh.num_triangles()
              << " triangles\n";
    return 0;
}

int mesh_import(const std::string& path) {
    const msm::Mesh mesh = msm::load_mesh(path);
    std::cout << path << ": " << mesh.num_vertices() << " vertices, " << mesh.num_triangles() << " triangles, "
              << mesh.boundary_edges().size() << " boundary edges, h_min=" << mesh.h_min()
              << ", area=" << mesh.total_area() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modified Smagorinsky model finite element solver"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "Offset-cylinder simulation");
    run_cmd->add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);

    auto* conv_cmd = app.add_subcommand("convergence", "Manufactured-solution time-step sweep");
    conv_cmd->add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);

    std::uint64_t seed = 1;
    int samples = 100;
    int verify_n = 8;
    auto* verify_cmd = app.add_subcommand("verify", "Property checks on a small square mesh");
    verify_cmd->add_option("--seed", seed, "Random seed");
    verify_cmd->add_option("--samples", samples, "Random samples per check")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--n", verify_n, "Vertices per side of the square mesh")->check(CLI::Range(2, 64));

    auto* mesh_cmd = app.add_subcommand("mesh", "Mesh import and export");
    mesh_cmd->require_subcommand(1);
    std::string mesh_path;
    int square = 0, n_outer = 80, n_inner = 60;
    auto* export_cmd = mesh_cmd->add_subcommand("export", "Write a generated mesh");
    export_cmd->add_option("file", mesh_path, "Output file")->required();
    export_cmd->add_option("--square", square, "Square mesh with this many vertices per side");
    export_cmd->add_option("--outer", n_outer, "Annulus: vertices on the outer circle");
    export_cmd->add_option("--inner", n_inner, "Annulus: vertices on the inner circle");
    auto* import_cmd = mesh_cmd->add_subcommand("import", "Read and validate a mesh file");
    import_cmd->add_option("file", mesh_path, "Input file")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return run(config_path);
        if (conv_cmd->parsed()) return convergence(config_path);
        if (verify_cmd->parsed()) return verify(seed, samples, verify_n);
        if (export_cmd->parsed()) return mesh_export(mesh_path, square, n_outer, n_inner);
        if (import_cmd->parsed()) return mesh_import(mesh_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
