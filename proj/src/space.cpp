#include "spl/space.hpp"

#include <cmath>

#include "spl/quadrature.hpp"

namespace spl {

namespace {

// 1D quadrature segments on [0,1] (local coordinate), graded toward `s_loc`
// when the weight is singular at that local position.
struct LocalPts {
  std::vector<double> t, w;  // local coordinate and weight (already scaled to [0,1])
};

void local_gauss(LocalPts& out, double a, double b, int gpts) {
  const auto& [gx, gw] = quad::gauss_rule(gpts);
  double c = 0.5 * (a + b), half = 0.5 * (b - a);
  for (size_t i = 0; i < gx.size(); ++i) {
    out.t.push_back(c + half * gx[i]);
    out.w.push_back(half * gw[i]);
  }
}

LocalPts local_rule(std::optional<double> s_loc, int plain_gpts, int graded_levels) {
  LocalPts out;
  if (!s_loc || *s_loc < -1e-12 || *s_loc > 1.0 + 1e-12) {
    local_gauss(out, 0.0, 1.0, plain_gpts);
    return out;
  }
  double s = std::clamp(*s_loc, 0.0, 1.0);
  auto graded_side = [&](double from, double to) {
    // geometric cells from `from` (singular) toward `to`
    double len = std::abs(to - from);
    if (len < 1e-300) return;
    double dir = to > from ? 1.0 : -1.0;
    double hi = len;
    for (int k = 0; k < graded_levels; ++k) {
      double lo = len * std::pow(0.5, k + 1);
      double x0 = from + dir * lo, x1 = from + dir * hi;
      local_gauss(out, std::min(x0, x1), std::max(x0, x1), 4);
      hi = lo;
    }
    double x0 = from, x1 = from + dir * hi;
    local_gauss(out, std::min(x0, x1), std::max(x0, x1), 4);
  };
  graded_side(s, 0.0);
  graded_side(s, 1.0);
  return out;
}

const double tri_bary[4][3] = {
    {1.0 / 3, 1.0 / 3, 1.0 / 3},
    {0.6, 0.2, 0.2},
    {0.2, 0.6, 0.2},
    {0.2, 0.2, 0.6},
};
const double tri_w[4] = {-27.0 / 48, 25.0 / 48, 25.0 / 48, 25.0 / 48};

}  // namespace

Space::Space(MeshPtr mesh, const Weight& weight) : mesh_(std::move(mesh)), weight_(weight) {
  const Mesh& m = *mesh_;
  if (weight_.dim != m.dim)
    throw std::invalid_argument("space: weight dimension does not match the mesh");
  int ne = m.n_elems(), nn = m.n_nodes(), nv = m.dim + 1;

  vol_.resize(ne);
  wvol_.resize(ne);
  grads_.resize(ne * nv, 2);
  grads_.setZero();
  m_ = Eigen::VectorXd::Zero(nn);
  mw_ = Eigen::VectorXd::Zero(nn);
  qoff_.assign(ne + 1, 0);
  auto singular = weight_.singular_point();

  // first pass: geometry and quadrature sizes
  std::vector<LocalPts> rules(m.dim == 1 ? ne : 0);
  for (int e = 0; e < ne; ++e) {
    if (m.dim == 1) {
      double xa = m.nodes(m.elements(e, 0), 0), xb = m.nodes(m.elements(e, 1), 0);
      double h = xb - xa;
      vol_(e) = std::abs(h);
      grads_(e * nv + 0, 0) = -1.0 / h;
      grads_(e * nv + 1, 0) = 1.0 / h;
      std::optional<double> s_loc;
      if (singular) {
        double s = singular->x();
        if ((s - xa) * (s - xb) <= 0.0) s_loc = (s - xa) / h;
      }
      rules[e] = local_rule(s_loc, 5, 14);
      qoff_[e + 1] = qoff_[e] + static_cast<int>(rules[e].t.size());
    } else {
      Eigen::Vector2d v0 = m.nodes.row(m.elements(e, 0));
      Eigen::Vector2d v1 = m.nodes.row(m.elements(e, 1));
      Eigen::Vector2d v2 = m.nodes.row(m.elements(e, 2));
      double det = (v1.x() - v0.x()) * (v2.y() - v0.y()) -
                   (v2.x() - v0.x()) * (v1.y() - v0.y());
      vol_(e) = 0.5 * std::abs(det);
      if (vol_(e) <= 0.0) throw std::invalid_argument("space: degenerate element");
      // grad of barycentric basis
      grads_.row(e * nv + 0) << (v1.y() - v2.y()) / det, (v2.x() - v1.x()) / det;
      grads_.row(e * nv + 1) << (v2.y() - v0.y()) / det, (v0.x() - v2.x()) / det;
      grads_.row(e * nv + 2) << (v0.y() - v1.y()) / det, (v1.x() - v0.x()) / det;
      qoff_[e + 1] = qoff_[e] + 4;
    }
  }

  int nq = qoff_[ne];
  qx_.assign(nq, 0.0);
  qy_.assign(nq, 0.0);
  qw_.assign(nq, 0.0);
  qwval_.assign(nq, 0.0);

  for (int e = 0; e < ne; ++e) {
    if (m.dim == 1) {
      double xa = m.nodes(m.elements(e, 0), 0), xb = m.nodes(m.elements(e, 1), 0);
      const LocalPts& r = rules[e];
      double wint = 0.0;
      for (size_t k = 0; k < r.t.size(); ++k) {
        int idx = qoff_[e] + static_cast<int>(k);
        double t = r.t[k];
        double x = xa + (xb - xa) * t;
        qx_[idx] = t;  // barycentric coordinate of node 1
        qw_[idx] = r.w[k] * vol_(e);
        qwval_[idx] = weight_.eval1(x);
        wint += qw_[idx] * qwval_[idx];
      }
      wvol_(e) = wint;
    } else {
      Eigen::Vector2d v0 = m.nodes.row(m.elements(e, 0));
      Eigen::Vector2d v1 = m.nodes.row(m.elements(e, 1));
      Eigen::Vector2d v2 = m.nodes.row(m.elements(e, 2));
      Eigen::Matrix<double, 3, 2> tri;
      tri << v0.transpose(), v1.transpose(), v2.transpose();
      for (int k = 0; k < 4; ++k) {
        int idx = qoff_[e] + k;
        double l1 = tri_bary[k][0], l2 = tri_bary[k][1], l3 = tri_bary[k][2];
        Eigen::Vector2d x = l1 * v0 + l2 * v1 + l3 * v2;
        qx_[idx] = l2;
        qy_[idx] = l3;
        qw_[idx] = tri_w[k] * vol_(e);
        qwval_[idx] = weight_.eval2(x.x(), x.y());
      }
      auto f = [&](double x, double y) { return weight_.eval2(x, y); };
      bool near_sing = false;
      if (singular) {
        // grade when the singular point touches the element
        Eigen::Matrix<double, 3, 2> t2 = tri;
        double minx = tri.col(0).minCoeff(), maxx = tri.col(0).maxCoeff();
        double miny = tri.col(1).minCoeff(), maxy = tri.col(1).maxCoeff();
        if (singular->x() >= minx - 1e-14 && singular->x() <= maxx + 1e-14 &&
            singular->y() >= miny - 1e-14 && singular->y() <= maxy + 1e-14) {
          wvol_(e) = quad::integrate_tri_graded(f, t2, *singular, 14, 4);
          near_sing = true;
        }
      }
      if (!near_sing) wvol_(e) = quad::integrate_tri(f, tri, 4);
    }
    // lumped measures
    for (int k = 0; k < nv; ++k) {
      int i = m.elements(e, k);
      m_[i] += vol_(e) / nv;
      mw_[i] += wvol_(e) / nv;
    }
  }
}

Eigen::Vector2d Space::element_gradient(const Eigen::VectorXd& u, int e) const {
  const Mesh& m = *mesh_;
  int nv = m.dim + 1;
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (int k = 0; k < nv; ++k)
    g += u[m.elements(e, k)] * grads_.row(e * nv + k).transpose();
  return g;
}

double Space::seminorm(const Eigen::VectorXd& u, double p) const {
  double total = 0.0;
  for (int e = 0; e < mesh_->n_elems(); ++e)
    total += wvol_(e) * std::pow(element_gradient(u, e).norm(), p);
  return std::pow(total, 1.0 / p);
}

double Space::dirichlet_energy(const Eigen::VectorXd& u, double p) const {
  double total = 0.0;
  for (int e = 0; e < mesh_->n_elems(); ++e)
    total += wvol_(e) * std::pow(element_gradient(u, e).norm(), p);
  return total / p;
}

Eigen::VectorXd Space::dirichlet_gradient(const Eigen::VectorXd& u, double p) const {
  const Mesh& m = *mesh_;
  int nv = m.dim + 1;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m.n_nodes());
  for (int e = 0; e < m.n_elems(); ++e) {
    Eigen::Vector2d g = element_gradient(u, e);
    double s = g.norm();
    double kernel;
    if (p < 2.0 && s < grad_floor)
      kernel = std::pow(s * s + grad_floor * grad_floor, 0.5 * (p - 2.0));
    else if (s == 0.0)
      kernel = (p == 2.0) ? 1.0 : 0.0;
    else
      kernel = std::pow(s, p - 2.0);
    Eigen::Vector2d flux = wvol_(e) * kernel * g;
    for (int k = 0; k < nv; ++k)
      out[m.elements(e, k)] += flux.dot(grads_.row(e * nv + k).transpose());
  }
  for (int i = 0; i < m.n_nodes(); ++i)
    if (m.boundary[i]) out[i] = 0.0;
  return out;
}

Eigen::SparseMatrix<double> Space::dirichlet_hessian(const Eigen::VectorXd& u,
                                                     double p) const {
  const Mesh& m = *mesh_;
  int nv = m.dim + 1, nn = m.n_nodes();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(m.n_elems() * nv * nv + nn);
  for (int e = 0; e < m.n_elems(); ++e) {
    Eigen::Vector2d g = element_gradient(u, e);
    double s2 = g.squaredNorm() + grad_floor * grad_floor;
    double k1 = std::pow(s2, 0.5 * p - 1.0);
    double k2 = (p - 2.0) * std::pow(s2, 0.5 * p - 2.0);
    for (int a = 0; a < nv; ++a) {
      int ia = m.elements(e, a);
      if (m.boundary[ia]) continue;
      Eigen::Vector2d ga = grads_.row(e * nv + a).transpose();
      for (int b = 0; b < nv; ++b) {
        int ib = m.elements(e, b);
        if (m.boundary[ib]) continue;
        Eigen::Vector2d gb = grads_.row(e * nv + b).transpose();
        double v = wvol_(e) * (k1 * ga.dot(gb) + k2 * g.dot(ga) * g.dot(gb));
        trips.emplace_back(ia, ib, v);
      }
    }
  }
  for (int i = 0; i < nn; ++i)
    if (m.boundary[i]) trips.emplace_back(i, i, 1.0);
  Eigen::SparseMatrix<double> H(nn, nn);
  H.setFromTriplets(trips.begin(), trips.end());
  return H;
}

double Space::lpw_norm(const Eigen::VectorXd& u, double p) const {
  const Mesh& m = *mesh_;
  int nv = m.dim + 1;
  double total = 0.0;
  for (int e = 0; e < m.n_elems(); ++e) {
    for (int idx = qoff_[e]; idx < qoff_[e + 1]; ++idx) {
      double val;
      if (m.dim == 1) {
        double t = qx_[idx];
        val = (1.0 - t) * u[m.elements(e, 0)] + t * u[m.elements(e, 1)];
      } else {
        double l2 = qx_[idx], l3 = qy_[idx];
        val = (1.0 - l2 - l3) * u[m.elements(e, 0)] + l2 * u[m.elements(e, 1)] +
              l3 * u[m.elements(e, 2)];
      }
      total += qw_[idx] * qwval_[idx] * std::pow(std::abs(val), p);
    }
  }
  (void)nv;
  return std::pow(total, 1.0 / p);
}

Eigen::VectorXd Space::lpw_norm_gradient(const Eigen::VectorXd& u, double p) const {
  const Mesh& m = *mesh_;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m.n_nodes());
  for (int e = 0; e < m.n_elems(); ++e) {
    for (int idx = qoff_[e]; idx < qoff_[e + 1]; ++idx) {
      double bary[3];
      if (m.dim == 1) {
        bary[0] = 1.0 - qx_[idx];
        bary[1] = qx_[idx];
      } else {
        bary[0] = 1.0 - qx_[idx] - qy_[idx];
        bary[1] = qx_[idx];
        bary[2] = qy_[idx];
      }
      double val = 0.0;
      for (int k = 0; k <= m.dim; ++k) val += bary[k] * u[m.elements(e, k)];
      double d = p * qw_[idx] * qwval_[idx] *
                 std::pow(std::abs(val), p - 2.0) * val;
      if (val == 0.0) d = 0.0;
      for (int k = 0; k <= m.dim; ++k) out[m.elements(e, k)] += d * bary[k];
    }
  }
  for (int i = 0; i < m.n_nodes(); ++i)
    if (m.boundary[i]) out[i] = 0.0;
  return out;
}

double Space::integral_lumped(const Eigen::VectorXd& nodal_values) const {
  return m_.dot(nodal_values);
}

Eigen::VectorXd Space::load_lumped(const Eigen::VectorXd& nodal_values) const {
  Eigen::VectorXd out = m_.cwiseProduct(nodal_values);
  for (int i = 0; i < mesh_->n_nodes(); ++i)
    if (mesh_->boundary[i]) out[i] = 0.0;
  return out;
}

double Space::basis_seminorm(int i, double p) const {
  const Mesh& m = *mesh_;
  int nv = m.dim + 1;
  double total = 0.0;
  for (int e = 0; e < m.n_elems(); ++e)
    for (int k = 0; k < nv; ++k)
      if (m.elements(e, k) == i)
        total += wvol_(e) * std::pow(grads_.row(e * nv + k).norm(), p);
  return std::pow(total, 1.0 / p);
}

double Space::weak_residual(const Eigen::VectorXd& u, const Eigen::VectorXd& g_nodal,
                            double p) const {
  const Mesh& m = *mesh_;
  int nv = m.dim + 1;
  Eigen::VectorXd defect = dirichlet_gradient(u, p) - load_lumped(g_nodal);
  // basis seminorms in one sweep
  Eigen::VectorXd bs = Eigen::VectorXd::Zero(m.n_nodes());
  for (int e = 0; e < m.n_elems(); ++e)
    for (int k = 0; k < nv; ++k)
      bs[m.elements(e, k)] += wvol_(e) * std::pow(grads_.row(e * nv + k).norm(), p);
  double res = 0.0;
  for (int i : m.interior)
    res = std::max(res, std::abs(defect[i]) / (1.0 + std::pow(bs[i], 1.0 / p)));
  return res;
}

}  // namespace spl
