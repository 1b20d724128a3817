#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace spl {

// Geometric domain description. Intervals (n=1), axis-aligned rectangles and
// disks (n=2) can be meshed; balls in higher dimension are supported for
// weight-class quadrature only.
struct Domain {
  enum class Kind { Interval, Rect, Disk, Ball };

  Kind kind = Kind::Interval;
  int dim = 1;

  // interval
  double a = 0.0, b = 0.0;
  // rect
  double ax = 0.0, ay = 0.0, bx = 0.0, by = 0.0;
  // disk / ball (ball is centered at the origin)
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 0.0;

  static Domain interval(double a, double b);
  static Domain rect(double ax, double ay, double bx, double by);
  static Domain disk(double cx, double cy, double r);
  static Domain ball(int n, double r);

  double measure() const;
  double diameter() const;
  bool contains1(double x) const;
  bool contains2(double x, double y) const;
};

}  // namespace spl
