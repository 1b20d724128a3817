#pragma once

#include <array>
#include <functional>
#include <optional>

#include <Eigen/Dense>

namespace spl::quad {

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;

// Gauss-Legendre nodes/weights on [-1,1]; supported sizes 2..8.
const std::pair<std::vector<double>, std::vector<double>>& gauss_rule(int n);

// Composite Gauss over [a,b] with uniform panels.
double integrate(const Fn1& f, double a, double b, int panels = 8, int gpts = 4);

// Composite Gauss over [a,b] with panels graded geometrically toward s.
// If s lies outside [a,b] the grading degenerates to the plain composite
// rule. Evaluation points never coincide with s (Gauss points are interior).
double integrate_graded(const Fn1& f, double a, double b, double s,
                        int levels = 20, int gpts = 8, int base_panels = 4);

// Fixed-degree rule on a triangle given by its vertex coordinates.
double integrate_tri(const Fn2& f, const Eigen::Matrix<double, 3, 2>& tri,
                     int gpts = 4);

// Triangle rule with recursive quadrisection toward a singular point s
// (applied only when s touches the closure of the triangle).
double integrate_tri_graded(const Fn2& f, const Eigen::Matrix<double, 3, 2>& tri,
                            const Eigen::Vector2d& s, int depth = 12, int gpts = 4);

// Integral over the 2D ball B((cx,cy), r) in polar coordinates; radial panels
// are graded toward the radius of a singular point when one is supplied.
double integrate_ball2(const Fn2& f, double cx, double cy, double r,
                       const std::optional<Eigen::Vector2d>& singular,
                       int radial_panels = 12, int angular = 64, int gpts = 8);

// Surface measure of the unit sphere S^{n-1}.
double sphere_area(int n);

}  // namespace spl::quad
