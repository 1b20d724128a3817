#include "spl/weights.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "spl/quadrature.hpp"

namespace spl {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

Weight Weight::constant(double value, int dim, double p) {
  require(value > 0.0, "weight: constant value must be positive");
  require(dim >= 1, "weight: dimension must be >= 1");
  require(p > 1.0, "weight: p must exceed 1");
  Weight w;
  w.kind = WeightKind::Constant;
  w.dim = dim;
  w.p = p;
  w.value = value;
  return w;
}

Weight Weight::power(double alpha, int dim, double p) {
  require(dim >= 1, "weight: dimension must be >= 1");
  require(p > 1.0, "weight: p must exceed 1");
  Weight w;
  w.kind = WeightKind::Power;
  w.dim = dim;
  w.p = p;
  w.alpha = alpha;
  return w;
}

Weight Weight::tabulated1(std::vector<double> xs, std::vector<double> values, double p) {
  require(p > 1.0, "weight: p must exceed 1");
  require(xs.size() >= 2 && xs.size() == values.size(),
          "weight: table needs at least two samples");
  for (size_t i = 1; i < xs.size(); ++i)
    require(xs[i] > xs[i - 1], "weight: table abscissae must be strictly increasing");
  for (size_t i = 0; i < values.size(); ++i)
    require(values[i] > 0.0, "weight: table value at index " + std::to_string(i) +
                                 " is not positive");
  Weight w;
  w.kind = WeightKind::Tabulated;
  w.dim = 1;
  w.p = p;
  w.xs = std::move(xs);
  w.table = Eigen::Map<Eigen::VectorXd>(values.data(), values.size());
  return w;
}

Weight Weight::tabulated2(std::vector<double> xs, std::vector<double> ys,
                          Eigen::MatrixXd values, double p) {
  require(p > 1.0, "weight: p must exceed 1");
  require(xs.size() >= 2 && ys.size() >= 2, "weight: 2D table needs a full grid");
  require(values.rows() == static_cast<Eigen::Index>(xs.size()) &&
              values.cols() == static_cast<Eigen::Index>(ys.size()),
          "weight: 2D table shape mismatch");
  require((values.array() > 0.0).all(), "weight: 2D table has non-positive entries");
  Weight w;
  w.kind = WeightKind::Tabulated;
  w.dim = 2;
  w.p = p;
  w.xs = std::move(xs);
  w.ys = std::move(ys);
  w.table = std::move(values);
  return w;
}

Weight Weight::tabulated_from_csv(const std::string& path, int dim, double p) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("weight: cannot open table file '" + path + "'");
  std::vector<std::array<double, 3>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::array<double, 3> row{0, 0, 0};
    char comma;
    if (dim == 1) {
      if (!(ss >> row[0] >> comma >> row[2]))
        throw std::invalid_argument("weight: bad table row at line " +
                                    std::to_string(lineno));
    } else {
      if (!(ss >> row[0] >> comma >> row[1] >> comma >> row[2]))
        throw std::invalid_argument("weight: bad table row at line " +
                                    std::to_string(lineno));
    }
    rows.push_back(row);
  }
  require(!rows.empty(), "weight: table file '" + path + "' is empty");
  if (dim == 1) {
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a[0] < b[0]; });
    std::vector<double> xs, vs;
    for (const auto& r : rows) {
      xs.push_back(r[0]);
      vs.push_back(r[2]);
    }
    return tabulated1(std::move(xs), std::move(vs), p);
  }
  // 2D tables must form a tensor grid
  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    xs.push_back(r[0]);
    ys.push_back(r[1]);
  }
  auto uniq = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  uniq(xs);
  uniq(ys);
  require(xs.size() * ys.size() == rows.size(),
          "weight: 2D table rows do not form a tensor grid");
  Eigen::MatrixXd vals(xs.size(), ys.size());
  vals.setConstant(std::numeric_limits<double>::quiet_NaN());
  auto idx = [](const std::vector<double>& v, double t) {
    return std::lower_bound(v.begin(), v.end(), t) - v.begin();
  };
  for (const auto& r : rows) vals(idx(xs, r[0]), idx(ys, r[1])) = r[2];
  require(!vals.hasNaN(), "weight: 2D table rows do not cover the grid");
  return tabulated2(std::move(xs), std::move(ys), std::move(vals), p);
}

namespace {

double interp1(const std::vector<double>& xs, const Eigen::MatrixXd& tab, double x) {
  // nearest extension outside the sampled range
  if (x <= xs.front()) return tab(0, 0);
  if (x >= xs.back()) return tab(tab.rows() - 1, 0);
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  size_t i = it - xs.begin();
  double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return (1.0 - t) * tab(i - 1, 0) + t * tab(i, 0);
}

}  // namespace

double Weight::eval1(double x) const {
  double v = 0.0;
  switch (kind) {
    case WeightKind::Constant:
      v = value;
      break;
    case WeightKind::Power:
      if (alpha < 0.0 && x == 0.0)
        throw std::domain_error("weight: power weight evaluated at its singular point");
      v = std::pow(std::abs(x), alpha);
      break;
    case WeightKind::Tabulated:
      v = interp1(xs, table, x);
      break;
  }
  if (!(v > 0.0))
    throw std::domain_error("weight: non-positive value at evaluation point");
  return v;
}

double Weight::eval2(double x, double y) const {
  double v = 0.0;
  switch (kind) {
    case WeightKind::Constant:
      v = value;
      break;
    case WeightKind::Power: {
      double rr = std::hypot(x, y);
      if (alpha < 0.0 && rr == 0.0)
        throw std::domain_error("weight: power weight evaluated at its singular point");
      v = std::pow(rr, alpha);
      break;
    }
    case WeightKind::Tabulated: {
      double cx = std::clamp(x, xs.front(), xs.back());
      double cy = std::clamp(y, ys.front(), ys.back());
      auto seg = [](const std::vector<double>& v, double t, size_t& i, double& s) {
        auto it = std::upper_bound(v.begin(), v.end(), t);
        i = std::min<size_t>(std::max<ptrdiff_t>(1, it - v.begin()), v.size() - 1);
        s = (t - v[i - 1]) / (v[i] - v[i - 1]);
      };
      size_t i, j;
      double sx, sy;
      seg(xs, cx, i, sx);
      seg(ys, cy, j, sy);
      v = (1 - sx) * (1 - sy) * table(i - 1, j - 1) + sx * (1 - sy) * table(i, j - 1) +
          (1 - sx) * sy * table(i - 1, j) + sx * sy * table(i, j);
      break;
    }
  }
  if (!(v > 0.0))
    throw std::domain_error("weight: non-positive value at evaluation point");
  return v;
}

double Weight::eval_radial(double r) const {
  switch (kind) {
    case WeightKind::Constant:
      return value;
    case WeightKind::Power:
      if (alpha < 0.0 && r == 0.0)
        throw std::domain_error("weight: power weight evaluated at its singular point");
      return std::pow(std::abs(r), alpha);
    case WeightKind::Tabulated:
      throw std::invalid_argument("weight: tabulated weights are not radial");
  }
  return 0.0;
}

std::optional<Eigen::Vector2d> Weight::singular_point() const {
  if (kind == WeightKind::Power && alpha != 0.0) return Eigen::Vector2d::Zero();
  return std::nullopt;
}

bool power_weight_ap_admissible(double alpha, int n, double p) {
  require(p > 1.0, "admissibility: p must exceed 1");
  require(n >= 1, "admissibility: dimension must be >= 1");
  return alpha > -static_cast<double>(n) && alpha < n * (p - 1.0);
}

// ---------------------------------------------------------------------------
// shared-node quadrature over balls

namespace {

struct QPts {
  std::vector<double> x, y, w;  // y unused in 1D
  double vol() const {
    double s = 0.0;
    for (double v : w) s += v;
    return s;
  }
};

void append_gauss(QPts& q, double a, double b, int gpts) {
  const auto& [gx, gw] = quad::gauss_rule(gpts);
  double c = 0.5 * (a + b), half = 0.5 * (b - a);
  for (size_t i = 0; i < gx.size(); ++i) {
    q.x.push_back(c + half * gx[i]);
    q.w.push_back(half * gw[i]);
  }
}

// graded nodes on [a,b] toward s (s may coincide with an endpoint or lie inside)
void append_graded(QPts& q, double a, double b, double s, int levels, int gpts) {
  if (b <= a) return;
  if (s > a && s < b) {
    append_graded(q, a, s, s, levels, gpts);
    append_graded(q, s, b, s, levels, gpts);
    return;
  }
  if (s >= b) {  // grade toward b
    double hi = b - a;
    for (int k = 0; k < levels; ++k) {
      double lo = (b - a) * std::pow(0.5, k + 1);
      append_gauss(q, b - hi, b - lo, gpts);
      hi = lo;
    }
    append_gauss(q, b - hi, b, gpts);
    return;
  }
  // s <= a: grade toward a
  double hi = b - a;
  for (int k = 0; k < levels; ++k) {
    double lo = (b - a) * std::pow(0.5, k + 1);
    append_gauss(q, a + lo, a + hi, gpts);
    hi = lo;
  }
  append_gauss(q, a, a + hi, gpts);
}

QPts qpts_interval(double a, double b, const std::optional<double>& s, int levels,
                   int gpts, int panels) {
  QPts q;
  if (s && *s > a && *s < b) {
    append_graded(q, a, b, *s, levels, gpts);
  } else if (s && (*s == a || *s == b)) {
    append_graded(q, a, b, *s, levels, gpts);
  } else {
    double h = (b - a) / panels;
    for (int i = 0; i < panels; ++i) append_gauss(q, a + i * h, a + (i + 1) * h, gpts);
  }
  return q;
}

QPts qpts_ball2(double cx, double cy, double r, const std::optional<Eigen::Vector2d>& s,
                int levels, int gpts, int radial_panels, int angular) {
  QPts q;
  QPts radial;  // 1D nodes in rho with weights already including d(rho)
  double rho_star = -1.0;
  if (s) {
    double d = std::hypot(s->x() - cx, s->y() - cy);
    if (d < r) rho_star = d;
  }
  if (rho_star < 0.0) {
    double h = r / radial_panels;
    for (int i = 0; i < radial_panels; ++i)
      append_gauss(radial, i * h, (i + 1) * h, gpts);
  } else {
    if (rho_star > 0.0) append_graded(radial, 0.0, rho_star, rho_star, levels, gpts);
    append_graded(radial, rho_star, r, rho_star, levels, gpts);
  }
  double dth = 2.0 * M_PI / angular;
  for (size_t i = 0; i < radial.x.size(); ++i) {
    double rho = radial.x[i], wr = radial.w[i] * rho * dth;
    if (rho == 0.0) continue;
    for (int j = 0; j < angular; ++j) {
      double th = dth * (j + 0.5);
      q.x.push_back(cx + rho * std::cos(th));
      q.y.push_back(cy + rho * std::sin(th));
      q.w.push_back(wr);
    }
  }
  return q;
}

struct BallProduct {
  double product = 0.0;
  bool divergent = false;
};

// A_p product over one ball with the two averages sharing nodes; a second,
// deeper rule detects non-integrable dual factors by growth.
BallProduct ap_product(const Weight& w, int dim, const QPts& q1, const QPts& q2,
                       double dual_exp, bool check_refine) {
  auto product_on = [&](const QPts& q) {
    double vol = q.vol(), aw = 0.0, adual = 0.0;
    for (size_t i = 0; i < q.x.size(); ++i) {
      double wv = dim == 1 ? w.eval1(q.x[i]) : w.eval2(q.x[i], q.y[i]);
      aw += q.w[i] * wv;
      adual += q.w[i] * std::pow(wv, dual_exp);
    }
    aw /= vol;
    adual /= vol;
    return aw * std::pow(adual, w.p - 1.0);
  };
  BallProduct out;
  out.product = product_on(q1);
  if (check_refine) {
    double refined = product_on(q2);
    if (refined > out.product * 1.05 + 1e-300) {
      out.divergent = true;
      out.product = refined;
    } else {
      out.product = refined;  // deeper rule is the better estimate either way
    }
  }
  return out;
}

}  // namespace

double estimate_ap_constant(const Weight& w, const Domain& domain,
                            const BallSampling& sampling, ApDiagnostics* diag) {
  require(w.p > 1.0, "estimate_ap_constant: p must exceed 1");
  const double dual_exp = -1.0 / (w.p - 1.0);
  const double d0 = domain.diameter();
  ApDiagnostics local;
  double sup = 0.0;

  auto singular = w.singular_point();

  if (domain.dim == 1) {
    double a = domain.kind == Domain::Kind::Interval ? domain.a : -domain.radius;
    double b = domain.kind == Domain::Kind::Interval ? domain.b : domain.radius;
    for (int ci = 0; ci < sampling.centers_per_axis; ++ci) {
      double c = a + (ci + 0.5) * (b - a) / sampling.centers_per_axis;
      for (int j = 1; j <= sampling.radii_levels; ++j) {
        double r = d0 * std::pow(0.5, j);
        std::optional<double> s;
        bool near_sing = false;
        if (singular) {
          double sx = singular->x();
          if (sx >= c - r && sx <= c + r) {
            s = sx;
            near_sing = true;
          }
        }
        QPts q1 = qpts_interval(c - r, c + r, s, sampling.graded_levels,
                                sampling.gauss_points, 8);
        QPts q2 = near_sing ? qpts_interval(c - r, c + r, s, sampling.graded_levels + 10,
                                            sampling.gauss_points, 8)
                            : q1;
        BallProduct bp = ap_product(w, 1, q1, q2, dual_exp, near_sing);
        ++local.balls_sampled;
        if (bp.divergent) {
          ++local.divergent_balls;
          local.worst_center = c;
          local.worst_radius = r;
        }
        sup = std::max(sup, bp.product);
      }
    }
  } else if (domain.dim == 2) {
    double ax, ay, bx, by;
    if (domain.kind == Domain::Kind::Rect) {
      ax = domain.ax;
      ay = domain.ay;
      bx = domain.bx;
      by = domain.by;
    } else {
      ax = domain.center.x() - domain.radius;
      ay = domain.center.y() - domain.radius;
      bx = domain.center.x() + domain.radius;
      by = domain.center.y() + domain.radius;
    }
    for (int ci = 0; ci < sampling.centers_per_axis; ++ci) {
      double cx = ax + (ci + 0.5) * (bx - ax) / sampling.centers_per_axis;
      for (int cj = 0; cj < sampling.centers_per_axis; ++cj) {
        double cy = ay + (cj + 0.5) * (by - ay) / sampling.centers_per_axis;
        if (domain.kind != Domain::Kind::Rect && !domain.contains2(cx, cy)) continue;
        for (int j = 1; j <= sampling.radii_levels; ++j) {
          double r = d0 * std::pow(0.5, j);
          bool near_sing =
              singular && std::hypot(singular->x() - cx, singular->y() - cy) < r;
          QPts q1 = qpts_ball2(cx, cy, r, near_sing ? singular : std::nullopt, 12,
                               4, 6, 16);
          QPts q2 = near_sing ? qpts_ball2(cx, cy, r, singular, 20,
                                           sampling.gauss_points, 6, 32)
                              : q1;
          BallProduct bp = ap_product(w, 2, q1, q2, dual_exp, near_sing);
          ++local.balls_sampled;
          if (bp.divergent) {
            ++local.divergent_balls;
            local.worst_center = cx;
            local.worst_center_y = cy;
            local.worst_radius = r;
          }
          sup = std::max(sup, bp.product);
        }
      }
    }
  } else {
    throw std::invalid_argument("estimate_ap_constant: unsupported dimension " +
                                std::to_string(domain.dim));
  }

  if (diag) *diag = local;
  return sup;
}

// ---------------------------------------------------------------------------
// integrability of w^{-s}

namespace {

// \int_Omega w^{-s} at one quadrature depth
double neg_power_integral(const Weight& w, double s, const Domain& domain, int levels,
                          int gpts) {
  auto singular = w.singular_point();
  switch (domain.kind) {
    case Domain::Kind::Interval: {
      auto f = [&](double x) { return std::pow(w.eval1(x), -s); };
      if (singular && singular->x() > domain.a && singular->x() < domain.b)
        return quad::integrate_graded(f, domain.a, domain.b, singular->x(), levels,
                                      gpts, 16);
      return quad::integrate(f, domain.a, domain.b, 4 * levels, gpts);
    }
    case Domain::Kind::Rect: {
      // tensor grading toward the singular point's coordinates
      QPts qx, qy;
      double sx = singular ? singular->x() : std::numeric_limits<double>::infinity();
      double sy = singular ? singular->y() : std::numeric_limits<double>::infinity();
      if (singular && sx > domain.ax && sx < domain.bx)
        append_graded(qx, domain.ax, domain.bx, sx, levels, gpts);
      else
        for (int i = 0; i < 2 * levels; ++i)
          append_gauss(qx, domain.ax + i * (domain.bx - domain.ax) / (2 * levels),
                       domain.ax + (i + 1) * (domain.bx - domain.ax) / (2 * levels),
                       gpts);
      if (singular && sy > domain.ay && sy < domain.by)
        append_graded(qy, domain.ay, domain.by, sy, levels, gpts);
      else
        for (int i = 0; i < 2 * levels; ++i)
          append_gauss(qy, domain.ay + i * (domain.by - domain.ay) / (2 * levels),
                       domain.ay + (i + 1) * (domain.by - domain.ay) / (2 * levels),
                       gpts);
      double total = 0.0;
      for (size_t i = 0; i < qx.x.size(); ++i)
        for (size_t j = 0; j < qy.x.size(); ++j)
          total += qx.w[i] * qy.w[j] * std::pow(w.eval2(qx.x[i], qy.x[j]), -s);
      return total;
    }
    case Domain::Kind::Disk:
    case Domain::Kind::Ball: {
      if (!w.radial())
        throw std::invalid_argument(
            "as_membership: tabulated weights on balls are unsupported");
      int n = domain.dim;
      auto f = [&](double r) {
        return std::pow(w.eval_radial(r), -s) * std::pow(r, n - 1);
      };
      double R = domain.radius;
      if (singular)
        return quad::sphere_area(n) *
               quad::integrate_graded(f, 0.0, R, 0.0, levels, gpts, 16);
      return quad::sphere_area(n) * quad::integrate(f, 0.0, R, 4 * levels, gpts);
    }
  }
  return 0.0;
}

}  // namespace

AsMembership as_membership(const Weight& w, double s, const Domain& domain) {
  require(w.p > 1.0, "as_membership: p must exceed 1");
  double n = domain.dim;
  if (s < 1.0 / (w.p - 1.0))
    throw std::invalid_argument("as_membership: violated bound s >= 1/(p-1)");
  if (!(s > n / w.p))
    throw std::invalid_argument("as_membership: violated bound s > n/p");

  AsMembership out;
  out.s = s;
  for (int levels : {10, 14, 18, 22})
    out.refinements.push_back(neg_power_integral(w, s, domain, levels, 8));
  out.integral_estimate = out.refinements.back();
  double last = out.refinements.back();
  double prev = out.refinements[out.refinements.size() - 2];
  out.member = std::isfinite(last) && std::abs(last - prev) <= 0.01 * std::abs(last);
  return out;
}

EmbeddingExponents embedding_exponents(double p, double s, int n) {
  require(p > 1.0, "embedding_exponents: p must exceed 1");
  require(n >= 1, "embedding_exponents: dimension must be >= 1");
  if (s < 1.0 / (p - 1.0))
    throw std::invalid_argument("embedding_exponents: violated bound s >= 1/(p-1)");
  if (!(s > static_cast<double>(n) / p))
    throw std::invalid_argument("embedding_exponents: violated bound s > n/p");

  EmbeddingExponents out;
  out.p_s = p * s / (s + 1.0);
  double nn = n;
  double tol = 1e-12 * std::max(1.0, nn);
  if (out.p_s < nn - tol) {
    out.regime = EmbeddingRegime::Subcritical;
    out.p_s_star = nn * out.p_s / (nn - out.p_s);
    out.p_s_star_finite = true;
  } else if (out.p_s <= nn + tol) {
    out.regime = EmbeddingRegime::Borderline;
    out.p_s_star = std::numeric_limits<double>::infinity();
    out.p_s_star_finite = false;
  } else {
    out.regime = EmbeddingRegime::Supercritical;
    out.p_s_star = std::numeric_limits<double>::infinity();
    out.p_s_star_finite = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Morrey-class membership of 1/w

namespace {

struct MorreyAccum {
  double sup = 0.0;
};

// value of the Morrey quotient on one ball at one quadrature depth
double morrey_ball(const Weight& w, const Domain& domain, double cx, double cy,
                   double r, double t, double qexp, int levels, int gpts) {
  auto singular = w.singular_point();
  double mu = 0.0, num = 0.0;
  if (domain.dim == 1) {
    double a = std::max(domain.a, cx - r), b = std::min(domain.b, cx + r);
    if (b <= a) return 0.0;
    std::optional<double> s;
    if (singular && singular->x() >= a && singular->x() <= b) s = singular->x();
    QPts q = qpts_interval(a, b, s, levels, gpts, 16);
    for (size_t i = 0; i < q.x.size(); ++i) {
      double wv = w.eval1(q.x[i]);
      mu += q.w[i] * wv;
      num += q.w[i] * std::pow(wv, 1.0 - qexp);
    }
  } else {
    bool near_sing = singular && std::hypot(singular->x() - cx, singular->y() - cy) < r;
    QPts q = qpts_ball2(cx, cy, r, near_sing ? singular : std::nullopt, levels, gpts,
                        8, 32);
    for (size_t i = 0; i < q.x.size(); ++i) {
      bool inside = domain.kind == Domain::Kind::Rect
                        ? (q.x[i] >= domain.ax && q.x[i] <= domain.bx &&
                           q.y[i] >= domain.ay && q.y[i] <= domain.by)
                        : domain.contains2(q.x[i], q.y[i]);
      if (!inside) continue;
      double wv = w.eval2(q.x[i], q.y[i]);
      mu += q.w[i] * wv;
      num += q.w[i] * std::pow(wv, 1.0 - qexp);
    }
  }
  if (mu <= 0.0) return 0.0;
  return std::pow(std::pow(r, t) * num / mu, 1.0 / qexp);
}

}  // namespace

MorreyReport morrey_check(const Weight& w, double exponent_q, double alpha_m,
                          const Domain& domain, const BallSampling& sampling,
                          std::optional<EmbeddingRegime> regime) {
  double n = domain.dim, p = w.p;
  if (!(exponent_q > n))
    throw std::invalid_argument("morrey_check: violated bound exponent_q > n");
  double cap = std::min(1.0, p * n / (exponent_q * (p - 1.0)));
  if (!(alpha_m > 0.0 && alpha_m < cap))
    throw std::invalid_argument(
        "morrey_check: violated bound 0 < alpha_m < min{1, pn/(q(p-1))}");

  MorreyReport out;
  out.exponent_q = exponent_q;
  out.alpha_m = alpha_m;
  out.t = p * n - alpha_m * exponent_q * (p - 1.0);
  out.d0 = domain.diameter();

  if (regime && *regime == EmbeddingRegime::Supercritical) {
    out.vacuous = true;
    out.passes = true;
    return out;
  }

  int centers = domain.dim == 1 ? sampling.centers_per_axis
                                : std::min(sampling.centers_per_axis, 12);
  for (int levels : {10, 14, 18}) {
    double sup = 0.0;
    if (domain.dim == 1) {
      for (int ci = 0; ci < centers; ++ci) {
        double c = domain.a + (ci + 0.5) * (domain.b - domain.a) / centers;
        for (int j = 1; j <= sampling.radii_levels; ++j) {
          double r = out.d0 * std::pow(0.5, j);
          sup = std::max(sup, morrey_ball(w, domain, c, 0.0, r, out.t, exponent_q,
                                          levels, sampling.gauss_points));
        }
      }
    } else if (domain.dim == 2) {
      double ax, ay, bx, by;
      if (domain.kind == Domain::Kind::Rect) {
        ax = domain.ax;
        ay = domain.ay;
        bx = domain.bx;
        by = domain.by;
      } else {
        ax = domain.center.x() - domain.radius;
        ay = domain.center.y() - domain.radius;
        bx = domain.center.x() + domain.radius;
        by = domain.center.y() + domain.radius;
      }
      for (int ci = 0; ci < centers; ++ci)
        for (int cj = 0; cj < centers; ++cj) {
          double cx = ax + (ci + 0.5) * (bx - ax) / centers;
          double cy = ay + (cj + 0.5) * (by - ay) / centers;
          if (domain.kind != Domain::Kind::Rect && !domain.contains2(cx, cy)) continue;
          for (int j = 1; j <= sampling.radii_levels; ++j) {
            double r = out.d0 * std::pow(0.5, j);
            sup = std::max(sup, morrey_ball(w, domain, cx, cy, r, out.t, exponent_q,
                                            levels, 4));
          }
        }
    } else {
      throw std::invalid_argument("morrey_check: unsupported dimension " +
                                  std::to_string(domain.dim));
    }
    out.refinements.push_back(sup);
  }
  out.norm_estimate = out.refinements.back();
  double last = out.refinements.back(), prev = out.refinements[out.refinements.size() - 2];
  out.passes = std::isfinite(last) && std::abs(last - prev) <= 0.01 * std::abs(last);
  return out;
}

}  // namespace spl
