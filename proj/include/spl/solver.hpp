#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "spl/space.hpp"

namespace spl {

// Shared nonlinear solving utilities for the weighted p-Laplace systems.
// All systems keep homogeneous boundary values (rows eliminated).
namespace solver {

struct Options {
  double tol = 1e-11;        // sup-norm of the interior residual covector
  int max_iter = 200;
  double armijo_c = 1e-4;
  double ls_shrink = 0.5;
  int max_ls = 60;
};

struct Result {
  Eigen::VectorXd u;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// A source g(u) with nodal evaluation; gd is dg/du. Monotone non-increasing
// g (gd <= 0) makes the associated energy strictly convex.
struct Source {
  std::function<double(double)> g;
  std::function<double(double)> gd;
};

// Damped Newton for  a(u, phi_i) = g(u_i) m_i  (interior i), minimizing the
// convex energy when gd <= 0 and falling back to Levenberg shifts otherwise.
// Line search on the residual norm keeps non-convex cases stable.
Result newton_semilinear(const Space& X, double p, const Source& src,
                         const Eigen::VectorXd& u0, const Options& opt = {});

// -div(w |grad u|^{p-2} grad u) = c with zero boundary values. The p = 2
// solve seeds a damped Newton iteration for general p.
Result constant_load(const Space& X, double p, double c, const Options& opt = {});

// Weighted linear (p = 2) solve  K2 u = rhs  with boundary elimination;
// reusable factorization.
class LinearStiffness {
 public:
  explicit LinearStiffness(const Space& X);
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

 private:
  Eigen::SparseMatrix<double> K_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

struct SolveError : std::runtime_error {
  explicit SolveError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace solver
}  // namespace spl
