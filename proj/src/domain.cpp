#include "spl/domain.hpp"

#include <cmath>

#include "spl/quadrature.hpp"

namespace spl {

Domain Domain::interval(double a, double b) {
  if (!(a < b)) throw std::invalid_argument("interval: requires a < b");
  Domain d;
  d.kind = Kind::Interval;
  d.dim = 1;
  d.a = a;
  d.b = b;
  return d;
}

Domain Domain::rect(double ax, double ay, double bx, double by) {
  if (!(ax < bx) || !(ay < by)) throw std::invalid_argument("rect: degenerate extents");
  Domain d;
  d.kind = Kind::Rect;
  d.dim = 2;
  d.ax = ax;
  d.ay = ay;
  d.bx = bx;
  d.by = by;
  return d;
}

Domain Domain::disk(double cx, double cy, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("disk: radius must be positive");
  Domain d;
  d.kind = Kind::Disk;
  d.dim = 2;
  d.center << cx, cy;
  d.radius = r;
  return d;
}

Domain Domain::ball(int n, double r) {
  if (n < 1) throw std::invalid_argument("ball: dimension must be >= 1");
  if (!(r > 0.0)) throw std::invalid_argument("ball: radius must be positive");
  Domain d;
  d.kind = Kind::Ball;
  d.dim = n;
  d.radius = r;
  d.center.setZero();
  return d;
}

double Domain::measure() const {
  switch (kind) {
    case Kind::Interval:
      return b - a;
    case Kind::Rect:
      return (bx - ax) * (by - ay);
    case Kind::Disk:
      return M_PI * radius * radius;
    case Kind::Ball:
      return quad::sphere_area(dim) / dim * std::pow(radius, dim);
  }
  return 0.0;
}

double Domain::diameter() const {
  switch (kind) {
    case Kind::Interval:
      return b - a;
    case Kind::Rect:
      return std::hypot(bx - ax, by - ay);
    case Kind::Disk:
    case Kind::Ball:
      return 2.0 * radius;
  }
  return 0.0;
}

bool Domain::contains1(double x) const {
  if (kind == Kind::Interval) return x >= a && x <= b;
  if (kind == Kind::Ball && dim == 1) return std::abs(x) <= radius;
  throw std::invalid_argument("contains1: domain is not one-dimensional");
}

bool Domain::contains2(double x, double y) const {
  switch (kind) {
    case Kind::Rect:
      return x >= ax && x <= bx && y >= ay && y <= by;
    case Kind::Disk:
      return std::hypot(x - center.x(), y - center.y()) <= radius;
    case Kind::Ball:
      if (dim == 2) return std::hypot(x, y) <= radius;
      break;
    default:
      break;
  }
  throw std::invalid_argument("contains2: domain is not two-dimensional");
}

}  // namespace spl
