#pragma once

#include <vector>

#include "spl/eigenpair.hpp"
#include "spl/energy.hpp"
#include "spl/mesh.hpp"
#include "spl/space.hpp"

namespace spl {

struct ContinuationLog {
  std::vector<double> eps;
  std::vector<double> diffs;      // seminorm of consecutive iterate differences
  std::vector<double> residuals;  // solver residual per level
};

// Limit of the regularized problems -div(w |grad v|^{p-2} grad v) = (v^+ + eps)^{-q}
// along the dyadic schedule eps = 2^-1, 2^-2, ... with warm starts; stops when
// consecutive iterates differ by less than `tol` in the weighted p-seminorm.
struct PureSingular {
  Field v0;
  double eps_final = 0.0;
  double min_interior = 0.0;
  ContinuationLog log;
};

PureSingular solve_pure_singular(const Space& X, double q, double p,
                                 double tol = 1e-7, int max_levels = 24);

// Scaled first eigenfunction a*e1 with the largest dyadic a in [1e-12, 1]
// whose weak defect  a(a e1, phi_i) - lambda f(a e1_i) (a e1_i)^{-q} m_i
// stays below `defect_tol` at every interior node.
struct Subsolution {
  double a = 0.0;
  Field field;
  double defect_max = 0.0;  // max interior defect (certified <= defect_tol)
};

Subsolution construct_subsolution(const Space& X, const EigenPair& ep,
                                  const CaseISpec& spec, double defect_tol = 1e-8);

// Scaled profile A*v0 with the smallest dyadic A in [1, 1e12] satisfying the
// scalar admissibility f(A max v0) / (A max v0)^{q+p-1} <= 1/(lambda max v0^{q+p-1})
// together with a nonnegative weak defect at every interior node.
struct Supersolution {
  double A = 0.0;
  Field field;
  double defect_min = 0.0;  // min interior defect (certified >= -defect_tol)
};

Supersolution construct_supersolution(const Space& X, const PureSingular& ps,
                                      const CaseISpec& spec, double defect_tol = 1e-8);

// Node-wise order interval [lower, upper]; the subsolution scale is halved
// until lower <= upper everywhere. c_K is the minimum of `lower` over the
// central half of the domain (compact positivity witness).
struct OrderInterval {
  Field lower, upper;
  double a = 0.0, A = 0.0;
  double c_K = 0.0;
};

OrderInterval order_interval(const Space& X, Subsolution sub, const Supersolution& sup,
                             const CaseISpec& spec, double defect_tol = 1e-8);

struct IntervalMinimize {
  Field u;
  double energy = 0.0;
  std::vector<double> energy_log;  // monotone under Armijo
  double projected_grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  int clamped_nodes = 0;  // interior nodes resting on a bound at convergence
};

struct IntervalMinimizeOptions {
  double tol = 1e-10;  // sup-norm of the projected gradient covector
  int max_iter = 500;
};

// Projected descent for E over the order interval: scaled descent step,
// nodal clamping to [lower, upper], Armijo backtracking on E.
IntervalMinimize minimize_over_interval(const Space& X, const CaseISpec& spec,
                                        const OrderInterval& interval,
                                        const IntervalMinimizeOptions& opt = {});

struct Case1Result {
  EigenPair eigen;
  PureSingular pure;
  OrderInterval interval;
  IntervalMinimize minimize;
  double sub_defect_max = 0.0;     // at the interval's final scales
  double sup_defect_min = 0.0;
  double weak_res = 0.0;           // residual of the full equation at the minimizer
  double min_over_box = 0.0;       // minimizer minimum over the central half
  int strict_interior_nodes = 0;   // nodes strictly between the bounds
  int interior_nodes = 0;
  F1Validation f1;
};

struct Case1Options {
  double defect_tol = 1e-8;
  double continuation_tol = 1e-7;
  IntervalMinimizeOptions minimize;
  EigenOptions eigen;
};

// Full pipeline: eigenpair, singular profile, ordered sub/supersolution pair,
// energy minimization over the interval, residual and positivity witnesses.
// Throws std::invalid_argument when f fails the structural screen.
Case1Result solve_case1(const Space& X, const CaseISpec& spec,
                        const Case1Options& opt = {});

}  // namespace spl
