#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spl/space.hpp"

namespace spl {

enum class FKind { Affine, PowerShift, Tabulated };

// Perturbation profile f for the singular source f(t)/t^q. Builtin families:
//   affine       f(t) = c0 + c1 t
//   power_shift  f(t) = c0 + t^beta        (beta < q + p - 1 for admissibility)
// Tabulated profiles interpolate positive samples piecewise-linearly and
// extend by the last slope.
struct NonlinearityF {
  FKind kind = FKind::Affine;
  double c0 = 1.0, c1 = 0.0;  // affine
  double beta = 0.0;          // power_shift
  std::vector<double> ts, fs;

  static NonlinearityF affine(double c0, double c1);
  static NonlinearityF power_shift(double c0, double beta);
  static NonlinearityF tabulated(std::vector<double> ts, std::vector<double> fs);

  double operator()(double t) const;
};

struct F1Validation {
  bool ok = false;
  std::string diagnostics;  // names the first violated clause
};

// Numerical screen of the structural hypotheses on f:
//   (a) f(0) > 0,
//   (b) f nondecreasing on a log grid,
//   (c) f(t)/t^{q+p-1} decreasing toward 0 over the last two log-decades,
//   (d) f(t)/t^q blows up as t -> 0 at the rate t^{-q} (log-log slope test;
//       an absolute threshold cannot distinguish the admissible rate for
//       q < 1, so the observed slope is compared against -q/2).
F1Validation validate_f1(const NonlinearityF& f, double q, double p,
                         double t_min = 1e-8, double t_max = 1e8);

// F(t) = \int_0^t f(s) s^{-q} ds for t > 0, else 0. The substitution
// s = sigma^{1/(1-q)} removes the endpoint singularity; the transformed
// integrand is evaluated with composite Gauss panels graded toward 0.
double F_primitive(double t, const NonlinearityF& f, double q);

struct CaseISpec {
  double p = 2.0;
  double q = 0.5;
  double lambda = 1.0;
  NonlinearityF f;
};

struct CaseIISpec {
  double p = 2.0;
  double q = 0.5;
  double r = 3.0;
  double lambda = 1.0;
  double eps = 0.0;  // regularization level; 0 = limit functional
};

// E(u) = (1/p) \int w |grad u|^p - lambda * sum_i F(u_i) m_i  (lumped source).
double energy_case1(const Space& X, const Eigen::VectorXd& u, const CaseISpec& spec);

// Gradient of E at a field with positive interior values.
Eigen::VectorXd gradient_case1(const Space& X, const Eigen::VectorXd& u,
                               const CaseISpec& spec);

// I(u) = (1/p) \int w |grad u|^p
//        - lambda/(1-q) sum_i [ (u_i^+ + eps)^{1-q} - eps^{1-q} ] m_i
//        - 1/(r+1) sum_i (u_i^+)^{r+1} m_i.
double energy_case2(const Space& X, const Eigen::VectorXd& u, const CaseIISpec& spec);

// Covector a(u, phi_i) - lambda (u_i^+ + eps)^{-q} m_i - (u_i^+)^r m_i.
// For eps = 0 every interior node must exceed the positivity floor 1e-14;
// the first offending node is named otherwise.
Eigen::VectorXd gradient_case2(const Space& X, const Eigen::VectorXd& u,
                               const CaseIISpec& spec);

}  // namespace spl
