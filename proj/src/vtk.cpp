#include "msm/vtk.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace msm {

void write_vtk(std::ostream& out, const TaylorHoodSpace& space, const Field& velocity, const Field& pressure,
               const std::string& title) {
    require_conforming(space, velocity, FieldKind::velocity);
    const bool has_pressure = pressure.coeffs.size() > 0;
    if (has_pressure) require_conforming(space, pressure, FieldKind::pressure);

    const int nn = space.num_nodes();
    const int nv = space.num_vertices();
    const int ne = space.num_elements();
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << std::setprecision(12);
    out << "POINTS " << nn << " double\n";
    for (const auto& p : space.nodes()) out << p.x << ' ' << p.y << " 0\n";
    out << "CELLS " << ne << ' ' << 7 * ne << '\n';
    for (int e = 0; e < ne; ++e) {
        const auto& n = space.element_nodes(e);
        out << 6 << ' ' << n[0] << ' ' << n[1] << ' ' << n[2] << ' ' << n[3] << ' ' << n[4] << ' ' << n[5] << '\n';
    }
    out << "CELL_TYPES " << ne << '\n';
    for (int e = 0; e < ne; ++e) out << "22\n";

    out << "POINT_DATA " << nn << '\n';
    out << "VECTORS velocity double\n";
    for (int i = 0; i < nn; ++i) out << velocity.coeffs[i] << ' ' << velocity.coeffs[nn + i] << " 0\n";
    out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < nn; ++i) {
        double value = 0.0;
        if (has_pressure) {
            if (i < nv) {
                value = pressure.coeffs[i];
            } else {
                const auto& edge = space.edges()[i - nv];
                value = 0.5 * (pressure.coeffs[edge[0]] + pressure.coeffs[edge[1]]);
            }
        }
        out << value << '\n';
    }
}

void write_vtk(const std::string& path, const TaylorHoodSpace& space, const Field& velocity, const Field& pressure,
               const std::string& title) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_vtk(out, space, velocity, pressure, title);
}

} // namespace msm
