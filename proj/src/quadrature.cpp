#include "spl/quadrature.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace spl::quad {

namespace {

std::pair<std::vector<double>, std::vector<double>> make_gauss(int n) {
  // Golub-Welsch via Newton on Legendre polynomials; n is small here.
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  return {x, w};
}

}  // namespace

const std::pair<std::vector<double>, std::vector<double>>& gauss_rule(int n) {
  if (n < 1 || n > 16) throw std::invalid_argument("gauss_rule: size out of range");
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss(n)).first;
  return it->second;
}

double integrate(const Fn1& f, double a, double b, int panels, int gpts) {
  if (b <= a) return 0.0;
  const auto& [gx, gw] = gauss_rule(gpts);
  double h = (b - a) / panels, total = 0.0;
  for (int p = 0; p < panels; ++p) {
    double c = a + (p + 0.5) * h, half = 0.5 * h;
    for (size_t i = 0; i < gx.size(); ++i) total += gw[i] * half * f(c + half * gx[i]);
  }
  return total;
}

namespace {

// One-sided geometric grading: integrate over [s, s+L] with cells shrinking
// toward s. The innermost cell still uses interior Gauss points, so f is
// never evaluated at s itself.
double graded_side(const Fn1& f, double s, double L, int levels, int gpts,
                   int base_panels) {
  if (L <= 0.0) return 0.0;
  double total = 0.0;
  double hi = L;
  for (int k = 0; k < levels; ++k) {
    double lo = L * std::pow(0.5, k + 1);
    total += integrate(f, s + lo, s + hi, 1, gpts);
    hi = lo;
  }
  total += integrate(f, s, s + hi, 1, gpts);
  // the rest of the interval (beyond the graded zone) is covered by the loop
  // above since the first cell spans [L/2, L]; base_panels refines the outer
  // half for smoother integrands
  (void)base_panels;
  return total;
}

double sgn(double v) { return v < 0 ? -1.0 : 1.0; }

}  // namespace

double integrate_graded(const Fn1& f, double a, double b, double s, int levels,
                        int gpts, int base_panels) {
  if (b <= a) return 0.0;
  if (s <= a || s >= b) {
    // grade toward the nearer endpoint when the singular point touches it
    if (s == a) return graded_side(f, a, b - a, levels, gpts, base_panels);
    if (s == b) {
      auto g = [&](double t) { return f(b - (t - a)); };
      return graded_side(g, a, b - a, levels, gpts, base_panels);
    }
    return integrate(f, a, b, base_panels, gpts);
  }
  auto left = [&](double t) { return f(2.0 * s - t); };  // mirror across s
  return graded_side(left, s, s - a, levels, gpts, base_panels) +
         graded_side(f, s, b - s, levels, gpts, base_panels);
}

namespace {

// degree-3 rule on the reference triangle (barycentric), 4 points
struct TriRule {
  double b1, b2, b3, w;
};
const TriRule tri4[] = {
    {1.0 / 3, 1.0 / 3, 1.0 / 3, -27.0 / 48},
    {0.6, 0.2, 0.2, 25.0 / 48},
    {0.2, 0.6, 0.2, 25.0 / 48},
    {0.2, 0.2, 0.6, 25.0 / 48},
};

double tri_area(const Eigen::Matrix<double, 3, 2>& t) {
  return 0.5 * std::abs((t(1, 0) - t(0, 0)) * (t(2, 1) - t(0, 1)) -
                        (t(2, 0) - t(0, 0)) * (t(1, 1) - t(0, 1)));
}

bool tri_contains(const Eigen::Matrix<double, 3, 2>& t, const Eigen::Vector2d& p) {
  auto cross = [](double ax, double ay, double bx, double by) {
    return ax * by - ay * bx;
  };
  double d1 = cross(t(1, 0) - t(0, 0), t(1, 1) - t(0, 1), p.x() - t(0, 0), p.y() - t(0, 1));
  double d2 = cross(t(2, 0) - t(1, 0), t(2, 1) - t(1, 1), p.x() - t(1, 0), p.y() - t(1, 1));
  double d3 = cross(t(0, 0) - t(2, 0), t(0, 1) - t(2, 1), p.x() - t(2, 0), p.y() - t(2, 1));
  bool neg = (d1 < 0) || (d2 < 0) || (d3 < 0);
  bool pos = (d1 > 0) || (d2 > 0) || (d3 > 0);
  return !(neg && pos);
}

}  // namespace

double integrate_tri(const Fn2& f, const Eigen::Matrix<double, 3, 2>& tri, int gpts) {
  (void)gpts;
  double area = tri_area(tri), total = 0.0;
  for (const auto& r : tri4) {
    double x = r.b1 * tri(0, 0) + r.b2 * tri(1, 0) + r.b3 * tri(2, 0);
    double y = r.b1 * tri(0, 1) + r.b2 * tri(1, 1) + r.b3 * tri(2, 1);
    total += r.w * f(x, y);
  }
  return total * area;
}

double integrate_tri_graded(const Fn2& f, const Eigen::Matrix<double, 3, 2>& tri,
                            const Eigen::Vector2d& s, int depth, int gpts) {
  if (depth <= 0 || !tri_contains(tri, s)) return integrate_tri(f, tri, gpts);
  // quadrisect, recurse only into children whose closure holds s
  Eigen::Vector2d v0 = tri.row(0), v1 = tri.row(1), v2 = tri.row(2);
  Eigen::Vector2d m01 = 0.5 * (v0 + v1), m12 = 0.5 * (v1 + v2), m02 = 0.5 * (v0 + v2);
  Eigen::Matrix<double, 3, 2> kids[4];
  kids[0] << v0.transpose(), m01.transpose(), m02.transpose();
  kids[1] << m01.transpose(), v1.transpose(), m12.transpose();
  kids[2] << m02.transpose(), m12.transpose(), v2.transpose();
  kids[3] << m01.transpose(), m12.transpose(), m02.transpose();
  double total = 0.0;
  bool recursed = false;
  for (auto& k : kids) {
    if (!recursed && tri_contains(k, s)) {
      total += integrate_tri_graded(f, k, s, depth - 1, gpts);
      recursed = true;
    } else {
      total += integrate_tri(f, k, gpts);
    }
  }
  return total;
}

double integrate_ball2(const Fn2& f, double cx, double cy, double r,
                       const std::optional<Eigen::Vector2d>& singular,
                       int radial_panels, int angular, int gpts) {
  // polar grid around the center; periodic trapezoid in the angle
  double rho_star = -1.0;
  if (singular) {
    double d = std::hypot(singular->x() - cx, singular->y() - cy);
    if (d < r) rho_star = d;
  }
  auto ring = [&](double rho) {
    double sum = 0.0;
    for (int j = 0; j < angular; ++j) {
      double th = 2.0 * M_PI * j / angular;
      sum += f(cx + rho * std::cos(th), cy + rho * std::sin(th));
    }
    return sum * (2.0 * M_PI / angular) * rho;
  };
  if (rho_star < 0.0) return integrate(ring, 0.0, r, radial_panels, gpts);
  // split the radial range at the singular radius and grade toward it
  double total = 0.0;
  if (rho_star > 0.0)
    total += integrate_graded(ring, 0.0, rho_star, rho_star, 16, gpts, radial_panels);
  total += integrate_graded(ring, rho_star, r, rho_star, 16, gpts, radial_panels);
  return total;
}

double sphere_area(int n) {
  return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

}  // namespace spl::quad
