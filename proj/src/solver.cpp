#include "spl/solver.hpp"

#include <cmath>
#include <limits>

namespace spl {
namespace solver {

namespace {

// residual covector F_i = a(u, phi_i) - g(u_i) m_i on interior nodes
Eigen::VectorXd residual_vec(const Space& X, double p, const Source& src,
                             const Eigen::VectorXd& u) {
  Eigen::VectorXd r = X.dirichlet_gradient(u, p);
  const Eigen::VectorXd& m = X.lumped_measure();
  for (int i : X.mesh().interior) r[i] -= src.g(u[i]) * m[i];
  return r;
}

double sup_norm(const Eigen::VectorXd& r) { return r.lpNorm<Eigen::Infinity>(); }

}  // namespace

Result newton_semilinear(const Space& X, double p, const Source& src,
                         const Eigen::VectorXd& u0, const Options& opt) {
  Result out;
  out.u = u0;
  for (int b = 0; b < X.n(); ++b)
    if (X.mesh().boundary[b]) out.u[b] = 0.0;

  Eigen::VectorXd F = residual_vec(X, p, src, out.u);
  double res = sup_norm(F);
  double mu = 0.0;  // Levenberg shift, grows only when steps fail

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  const Eigen::VectorXd& m = X.lumped_measure();

  for (int it = 0; it < opt.max_iter && res > opt.tol; ++it) {
    Eigen::SparseMatrix<double> J = X.dirichlet_hessian(out.u, p);
    for (int i : X.mesh().interior) J.coeffRef(i, i) -= src.gd(out.u[i]) * m[i];
    double dscale = 0.0;
    for (int i = 0; i < J.rows(); ++i) dscale = std::max(dscale, std::abs(J.coeff(i, i)));
    if (dscale == 0.0) dscale = 1.0;

    Eigen::VectorXd d;
    bool factored = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      Eigen::SparseMatrix<double> Js = J;
      if (mu > 0.0) {
        for (int i = 0; i < Js.rows(); ++i) Js.coeffRef(i, i) += mu;
      }
      ldlt.compute(Js);
      if (ldlt.info() == Eigen::Success) {
        d = ldlt.solve(-F);
        if (d.allFinite()) {
          factored = true;
          break;
        }
      }
      mu = std::max(mu * 10.0, 1e-14 * dscale);
    }
    if (!factored) throw SolveError("newton: stiffness factorization failed");

    double f0 = F.squaredNorm();
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < opt.max_ls; ++ls) {
      Eigen::VectorXd trial = out.u + t * d;
      double f1 = std::numeric_limits<double>::infinity();
      Eigen::VectorXd Ft;
      try {
        Ft = residual_vec(X, p, src, trial);
        f1 = Ft.squaredNorm();
      } catch (const std::domain_error&) {
        // step left the source's domain; shorten it
      }
      if (f1 <= (1.0 - opt.armijo_c * t) * f0) {
        out.u = trial;
        F = Ft;
        res = sup_norm(F);
        accepted = true;
        break;
      }
      t *= opt.ls_shrink;
    }

    if (accepted) {
      if (t == 1.0) mu *= 0.25;
      if (mu < 1e-14 * dscale) mu = 0.0;
    } else {
      mu = std::max(mu * 10.0, 1e-10 * dscale);
    }
    out.iterations = it + 1;
  }

  out.residual = res;
  out.converged = res <= opt.tol;
  return out;
}

Result constant_load(const Space& X, double p, double c, const Options& opt) {
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(X.n());
  Eigen::VectorXd rhs = X.load_lumped(c * ones);
  LinearStiffness K(X);
  Eigen::VectorXd u2 = K.solve(rhs);

  if (p == 2.0) {
    Result out;
    out.u = u2;
    out.iterations = 1;
    Source src{[c](double) { return c; }, [](double) { return 0.0; }};
    out.residual = sup_norm(residual_vec(X, 2.0, src, u2));
    out.converged = out.residual <= std::max(opt.tol, 1e-10 * std::abs(c));
    return out;
  }

  // seed with the p = 2 shape rescaled by the load homogeneity u ~ c^{1/(p-1)}
  Eigen::VectorXd u0 = u2;
  if (c != 0.0) u0 *= std::pow(std::abs(c), 1.0 / (p - 1.0) - 1.0);
  Source src{[c](double) { return c; }, [](double) { return 0.0; }};
  return newton_semilinear(X, p, src, u0, opt);
}

LinearStiffness::LinearStiffness(const Space& X) {
  K_ = X.dirichlet_hessian(Eigen::VectorXd::Zero(X.n()), 2.0);
  ldlt_.compute(K_);
  if (ldlt_.info() != Eigen::Success)
    throw SolveError("linear stiffness: factorization failed");
}

Eigen::VectorXd LinearStiffness::solve(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd r = rhs;
  Eigen::VectorXd u = ldlt_.solve(r);
  if (!u.allFinite()) throw SolveError("linear stiffness: solve produced non-finite values");
  return u;
}

}  // namespace solver
}  // namespace spl
