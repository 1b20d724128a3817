#pragma once

#include <functional>
#include <memory>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "spl/mesh.hpp"
#include "spl/weights.hpp"

namespace spl {

// Discrete weighted Sobolev space: a P1 mesh paired with a weight. Caches the
// per-element weight integrals (graded quadrature near the weight's singular
// point), basis gradients, lumped node measures, and per-element quadrature
// points for the weighted L^p integrals.
//
// Quadrature split, used consistently by every functional in the library:
//   * gradient terms  \int_T w |grad u|^p      exact in grad u (P1), w by quadrature
//   * L^p(w) norms    \int w |u|^p             per-element Gauss quadrature
//   * source terms    \int G(u) dx             nodal (lumped) quadrature with the
//                                              plain Lebesgue node measure
class Space {
 public:
  Space(MeshPtr mesh, const Weight& weight);

  const Mesh& mesh() const { return *mesh_; }
  MeshPtr mesh_ptr() const { return mesh_; }
  const Weight& weight() const { return weight_; }
  int n() const { return mesh_->n_nodes(); }

  const Eigen::VectorXd& lumped_measure() const { return m_; }            // plain
  const Eigen::VectorXd& lumped_weighted_measure() const { return mw_; }  // w-weighted
  double elem_weighted_volume(int e) const { return wvol_(e); }
  double elem_volume(int e) const { return vol_(e); }

  // ( \int w |grad u|^p )^{1/p}
  double seminorm(const Eigen::VectorXd& u, double p) const;
  // (1/p) \int w |grad u|^p
  double dirichlet_energy(const Eigen::VectorXd& u, double p) const;
  // d/du_i of the Dirichlet energy; boundary rows are zero. Elements with
  // |grad u| < grad_floor use the kernel (|grad u|^2 + grad_floor^2)^{(p-2)/2}.
  Eigen::VectorXd dirichlet_gradient(const Eigen::VectorXd& u, double p) const;
  // Hessian of the Dirichlet energy (boundary rows/cols = identity).
  Eigen::SparseMatrix<double> dirichlet_hessian(const Eigen::VectorXd& u, double p) const;

  // ( \int w |u|^p )^{1/p} by per-element Gauss quadrature.
  double lpw_norm(const Eigen::VectorXd& u, double p) const;
  // d/du_i of \int w |u|^p.
  Eigen::VectorXd lpw_norm_gradient(const Eigen::VectorXd& u, double p) const;

  // Lumped source integrals: sum_i g_i m_i, and the covector g_i m_i with
  // boundary entries zeroed.
  double integral_lumped(const Eigen::VectorXd& nodal_values) const;
  Eigen::VectorXd load_lumped(const Eigen::VectorXd& nodal_values) const;

  // Weighted p-seminorm of the nodal basis function phi_i.
  double basis_seminorm(int i, double p) const;

  // max over interior i of |a(u, phi_i) - g_i m_i| / (1 + |phi_i|_{w,p})
  // with a the weighted p-Laplace form and g the nodal source values.
  double weak_residual(const Eigen::VectorXd& u, const Eigen::VectorXd& g_nodal,
                       double p) const;

  Eigen::Vector2d element_gradient(const Eigen::VectorXd& u, int e) const;

  static constexpr double grad_floor = 1e-12;

 private:
  MeshPtr mesh_;
  Weight weight_;
  Eigen::VectorXd vol_, wvol_;  // per element
  Eigen::MatrixXd grads_;       // (n_elems*(dim+1)) x dim
  Eigen::VectorXd m_, mw_;      // lumped node measures
  // flattened per-element quadrature data: point, lebesgue weight, w value
  std::vector<int> qoff_;
  std::vector<double> qx_, qy_, qw_, qwval_;

  friend class SpaceQuadratureProbe;
};

}  // namespace spl
