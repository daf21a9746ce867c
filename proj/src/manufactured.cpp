#include "msm/experiments.hpp"

#include <cmath>
#include <numbers>

namespace msm {

namespace manufactured {

namespace {
constexpr double pi = std::numbers::pi;
}

Vec2 velocity(double x, double y, double t) {
    const double sx = std::sin(pi * x), sy = std::sin(pi * y);
    return {pi * std::sin(t) * std::sin(2 * pi * y) * sx * sx, -pi * std::sin(t) * std::sin(2 * pi * x) * sy * sy};
}

Mat2 velocity_gradient(double x, double y, double t) {
    const double st = std::sin(t);
    const double sx = std::sin(pi * x), cx = std::cos(pi * x);
    const double sy = std::sin(pi * y), cy = std::cos(pi * y);
    const double s2x = std::sin(2 * pi * x), c2x = std::cos(2 * pi * x);
    const double s2y = std::sin(2 * pi * y), c2y = std::cos(2 * pi * y);
    Mat2 g;
    g[0][0] = pi * st * s2y * 2 * pi * sx * cx;
    g[0][1] = pi * st * 2 * pi * c2y * sx * sx;
    g[1][0] = -pi * st * 2 * pi * c2x * sy * sy;
    g[1][1] = -pi * st * s2x * 2 * pi * sy * cy;
    return g;
}

double pressure(double x, double y, double t) { return std::sin(t) * std::cos(pi * x) * std::sin(pi * y); }

Vec2 force(double x, double y, double t, double nu) {
    const double pi3 = pi * pi * pi;
    const double st = std::sin(t), ct = std::cos(t);
    const double sx = std::sin(pi * x), cx = std::cos(pi * x);
    const double sy = std::sin(pi * y), cy = std::cos(pi * y);
    const double s2x = std::sin(2 * pi * x), c2x = std::cos(2 * pi * x);
    const double s2y = std::sin(2 * pi * y), c2y = std::cos(2 * pi * y);
    const double f1 = 6 * pi3 * nu * st * sx * sx * s2y - 2 * pi3 * nu * st * s2y * cx * cx +
                      2 * pi3 * st * st * sx * sx * sx * s2y * s2y * cx -
                      2 * pi3 * st * st * sx * sx * s2x * sy * sy * c2y - pi * st * sx * sy + pi * sx * sx * s2y * ct;
    const double f2 = -6 * pi3 * nu * st * s2x * sy * sy + 2 * pi3 * nu * st * s2x * cy * cy -
                      2 * pi3 * st * st * sx * sx * sy * sy * s2y * c2x +
                      2 * pi3 * st * st * s2x * s2x * sy * sy * sy * cy + pi * st * cx * cy -
                      pi * s2x * sy * sy * ct;
    return {f1, f2};
}

VectorFunction force_function(double nu) {
    return [nu](double x, double y, double t) { return force(x, y, t, nu); };
}

} // namespace manufactured

Vec2 offset_cylinder_force(double x, double y, double /*t*/) {
    const double s = 1.0 - x * x - y * y;
    return {-4.0 * y * s, 4.0 * x * s};
}

ExactSolution manufactured_solution() {
    return {manufactured::velocity, manufactured::velocity_gradient, manufactured::pressure};
}

} // namespace msm
