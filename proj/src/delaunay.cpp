#include "delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace msm {

namespace {

struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> nb; // nb[i] lies across the edge opposite v[i]
    bool alive = true;
};

long double orient(const Point& a, const Point& b, const Point& c) {
    return (static_cast<long double>(b.x) - a.x) * (static_cast<long double>(c.y) - a.y) -
           (static_cast<long double>(c.x) - a.x) * (static_cast<long double>(b.y) - a.y);
}

// > 0 when d lies strictly inside the circumcircle of the ccw triangle abc.
long double incircle(const Point& a, const Point& b, const Point& c, const Point& d) {
    const long double adx = a.x - static_cast<long double>(d.x), ady = a.y - static_cast<long double>(d.y);
    const long double bdx = b.x - static_cast<long double>(d.x), bdy = b.y - static_cast<long double>(d.y);
    const long double cdx = c.x - static_cast<long double>(d.x), cdy = c.y - static_cast<long double>(d.y);
    const long double ad = adx * adx + ady * ady;
    const long double bd = bdx * bdx + bdy * bdy;
    const long double cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

} // namespace

std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Point>& input) {
    const int n = static_cast<int>(input.size());
    if (n < 3) throw MeshError("delaunay: need at least three points");

    double xmin = input[0].x, xmax = input[0].x, ymin = input[0].y, ymax = input[0].y;
    for (const auto& p : input) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const double extent = std::max(xmax - xmin, ymax - ymin);
    const double cx = 0.5 * (xmin + xmax);
    const double cy = 0.5 * (ymin + ymax);
    const double big = 100.0 * extent;

    std::vector<Point> pts = input;
    pts.push_back({cx - big, cy - big});
    pts.push_back({cx + big, cy - big});
    pts.push_back({cx, cy + big});

    std::vector<Tri> tris;
    tris.reserve(static_cast<std::size_t>(n) * 4);
    tris.push_back({{n, n + 1, n + 2}, {-1, -1, -1}, true});

    // Snake order over a coarse grid keeps the point-location walks short.
    const int cells = std::max(1, static_cast<int>(std::sqrt(n / 4.0)));
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto cell_of = [&](const Point& p, bool row) {
        const double t = row ? (p.y - ymin) : (p.x - xmin);
        return std::min(cells - 1, static_cast<int>(cells * t / (extent > 0 ? extent : 1.0)));
    };
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const int ra = cell_of(pts[a], true), rb = cell_of(pts[b], true);
        if (ra != rb) return ra < rb;
        const int ca = cell_of(pts[a], false), cb = cell_of(pts[b], false);
        return (ra % 2 == 0) ? ca < cb : ca > cb;
    });

    int last = 0;
    std::vector<int> cavity;
    std::vector<int> stack;
    std::vector<char> in_cavity;
    struct Rim {
        int a, b, outer;
    };
    std::vector<Rim> rim;

    for (int pid : order) {
        const Point& p = pts[pid];

        // Walk towards p.
        int t = last;
        for (int guard = 0;; ++guard) {
            if (guard > 4 * static_cast<int>(tris.size()) + 16)
                throw MeshError("delaunay: point location failed");
            const Tri& tri = tris[t];
            int next = -1;
            for (int i = 0; i < 3; ++i) {
                if (orient(pts[tri.v[(i + 1) % 3]], pts[tri.v[(i + 2) % 3]], p) < 0) {
                    next = tri.nb[i];
                    break;
                }
            }
            if (next < 0) break;
            t = next;
        }

        // Grow the cavity of triangles whose circumcircle contains p.
        in_cavity.resize(tris.size(), 0);
        cavity.clear();
        stack.assign(1, t);
        in_cavity[t] = 1;
        while (!stack.empty()) {
            const int cur = stack.back();
            stack.pop_back();
            cavity.push_back(cur);
            for (int nb : tris[cur].nb) {
                if (nb < 0 || in_cavity[nb]) continue;
                const Tri& nt = tris[nb];
                if (incircle(pts[nt.v[0]], pts[nt.v[1]], pts[nt.v[2]], p) > 0) {
                    in_cavity[nb] = 1;
                    stack.push_back(nb);
                }
            }
        }

        rim.clear();
        for (int ct : cavity)
            for (int i = 0; i < 3; ++i) {
                const int nb = tris[ct].nb[i];
                if (nb >= 0 && in_cavity[nb]) continue;
                rim.push_back({tris[ct].v[(i + 1) % 3], tris[ct].v[(i + 2) % 3], nb});
            }

        for (int ct : cavity) {
            tris[ct].alive = false;
            in_cavity[ct] = 0;
        }

        const int first_new = static_cast<int>(tris.size());
        for (const auto& e : rim) {
            if (orient(pts[e.a], pts[e.b], p) <= 0)
                throw MeshError("delaunay: cavity is not star-shaped (degenerate input)");
            const int id = static_cast<int>(tris.size());
            tris.push_back({{e.a, e.b, pid}, {-1, -1, e.outer}, true});
            if (e.outer >= 0) {
                auto& nbs = tris[e.outer].nb;
                for (int j = 0; j < 3; ++j)
                    if (nbs[j] >= 0 && !tris[nbs[j]].alive &&
                        ((tris[e.outer].v[(j + 1) % 3] == e.b && tris[e.outer].v[(j + 2) % 3] == e.a)))
                        nbs[j] = id;
            }
        }
        const int last_new = static_cast<int>(tris.size());
        for (int i = first_new; i < last_new; ++i) {
            // (a, b, p): across v[0]=a is edge (b, p); across v[1]=b is edge (p, a).
            const int a = tris[i].v[0];
            const int b = tris[i].v[1];
            for (int j = first_new; j < last_new; ++j) {
                if (tris[j].v[0] == b) tris[i].nb[0] = j;
                if (tris[j].v[1] == a) tris[i].nb[1] = j;
            }
        }
        last = first_new;
    }

    std::vector<std::array<int, 3>> out;
    out.reserve(tris.size() / 2);
    for (const auto& tri : tris) {
        if (!tri.alive) continue;
        if (tri.v[0] >= n || tri.v[1] >= n || tri.v[2] >= n) continue;
        out.push_back(tri.v);
    }
    return out;
}

} // namespace msm
