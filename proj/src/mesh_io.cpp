#include "msm/mesh.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace msm {

namespace {

// Next non-empty, non-comment line.
bool next_line(std::istream& in, std::istringstream& line) {
    std::string text;
    while (std::getline(in, text)) {
        const auto first = text.find_first_not_of(" \t\r");
        if (first == std::string::npos || text[first] == '#') continue;
        line.clear();
        line.str(text);
        return true;
    }
    return false;
}

std::istringstream require_line(std::istream& in, const char* what) {
    std::istringstream line;
    if (!next_line(in, line)) throw MeshError(std::string("mesh file truncated while reading ") + what);
    return line;
}

BoundaryTag tag_from_marker(int marker) {
    switch (marker) {
    case 0: return BoundaryTag::none;
    case 1: return BoundaryTag::outer;
    case 2: return BoundaryTag::inner;
    default: throw MeshError("unknown boundary marker " + std::to_string(marker));
    }
}

} // namespace

void write_mesh(std::ostream& out, const Mesh& mesh) {
    out << "# msm mesh: nodes, elements, boundary segments\n";
    out << mesh.num_vertices() << " 2 0 0\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i)
        out << i << ' ' << mesh.vertices()[i].x << ' ' << mesh.vertices()[i].y << '\n';
    out << mesh.num_triangles() << " 3 0\n";
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles()[t];
        out << t << ' ' << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
    }
    out << mesh.boundary_edges().size() << " 1\n";
    for (std::size_t b = 0; b < mesh.boundary_edges().size(); ++b) {
        const auto& e = mesh.boundary_edges()[b];
        out << b << ' ' << e.v[0] << ' ' << e.v[1] << ' ' << static_cast<int>(e.tag) << '\n';
    }
}

Mesh read_mesh(std::istream& in) {
    std::size_t nv = 0, nt = 0, nb = 0;
    int dim = 0;
    {
        auto line = require_line(in, "node header");
        if (!(line >> nv >> dim) || dim != 2) throw MeshError("bad node section header");
    }
    std::vector<Point> vertices(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        auto line = require_line(in, "nodes");
        std::size_t id;
        if (!(line >> id >> vertices[i].x >> vertices[i].y) || id != i)
            throw MeshError("bad node record " + std::to_string(i));
    }
    {
        auto line = require_line(in, "element header");
        int per = 0;
        if (!(line >> nt >> per) || per != 3) throw MeshError("bad element section header");
    }
    std::vector<std::array<int, 3>> triangles(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        auto line = require_line(in, "elements");
        std::size_t id;
        auto& tri = triangles[t];
        if (!(line >> id >> tri[0] >> tri[1] >> tri[2]) || id != t)
            throw MeshError("bad element record " + std::to_string(t));
    }
    {
        auto line = require_line(in, "segment header");
        if (!(line >> nb)) throw MeshError("bad segment section header");
    }
    std::vector<BoundaryEdge> boundary(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        auto line = require_line(in, "segments");
        std::size_t id;
        int marker = 0;
        if (!(line >> id >> boundary[b].v[0] >> boundary[b].v[1] >> marker) || id != b)
            throw MeshError("bad segment record " + std::to_string(b));
        boundary[b].tag = tag_from_marker(marker);
    }
    return Mesh(std::move(vertices), std::move(triangles), std::move(boundary));
}

void save_mesh(const std::string& path, const Mesh& mesh) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_mesh(out, mesh);
}

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_mesh(in);
}

} // namespace msm
