#pragma once

#include <Eigen/Dense>

#include "spl/space.hpp"

namespace spl {

// First Dirichlet eigenpair of the weighted p-Laplacian, obtained by
// minimizing the Rayleigh quotient
//   R(u) = \int w |grad u|^p / \int w |u|^p
// over nonzero discrete fields (both integrals by element quadrature, so the
// discrete value decreases under nested refinement).
struct EigenPair {
  double lambda1 = 0.0;
  Eigen::VectorXd e1;     // positive interior, normalized ||e1||_inf = 1
  int iterations = 0;
  double residual = 0.0;  // norm of the critical-point covector, scaled
  bool converged = false;
};

struct EigenOptions {
  double tol_rq = 1e-10;    // relative Rayleigh-quotient stall
  double tol_grad = 1e-9;   // scaled critical-point residual
  int max_iter = 2000;
};

// Preconditioned projected descent with L^p(w) normalization after each step;
// the initial iterate interpolates the first Laplace (p = 2) eigenfunction of
// the unweighted problem, or the torsion profile on disks.
EigenPair first_eigenpair(const Space& X, double p, const EigenOptions& opt = {});

}  // namespace spl
