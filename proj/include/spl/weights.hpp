#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spl/domain.hpp"

namespace spl {

enum class WeightKind { Constant, Power, Tabulated };

// A positive weight function w on a domain in R^n, attached to the exponent p
// of the operator it weights. Supported families:
//   constant   w(x) = value
//   power      w(x) = |x|^alpha
//   tabulated  piecewise-linear interpolation of positive samples
//              (1D sorted abscissae, or a 2D tensor grid)
struct Weight {
  WeightKind kind = WeightKind::Constant;
  int dim = 1;
  double p = 2.0;

  double value = 1.0;  // constant
  double alpha = 0.0;  // power

  std::vector<double> xs, ys;  // table abscissae (ys empty for 1D)
  Eigen::MatrixXd table;       // 1D: column vector of samples; 2D: xs.size() x ys.size()

  static Weight constant(double value, int dim, double p);
  static Weight power(double alpha, int dim, double p);
  static Weight tabulated1(std::vector<double> xs, std::vector<double> values, double p);
  static Weight tabulated2(std::vector<double> xs, std::vector<double> ys,
                           Eigen::MatrixXd values, double p);
  // Loads "x,w" or "x,y,w" CSV rows (2D rows must form a tensor grid).
  static Weight tabulated_from_csv(const std::string& path, int dim, double p);

  double eval1(double x) const;
  double eval2(double x, double y) const;
  // Radial evaluation w(r) for radially symmetric kinds (constant/power).
  double eval_radial(double r) const;
  bool radial() const { return kind != WeightKind::Tabulated; }

  // Location where evaluation degenerates (origin for power weights with
  // alpha != 0); quadrature grades toward it and never samples it exactly.
  std::optional<Eigen::Vector2d> singular_point() const;
};

// Ball family used by the sampled Muckenhoupt estimate and the Morrey check:
// centers on a uniform lattice over the domain, radii d0 * 2^-j, j = 1..radii_levels.
struct BallSampling {
  int centers_per_axis = 32;
  int radii_levels = 12;
  int gauss_points = 8;
  int graded_levels = 20;
};

// Per-ball divergence bookkeeping for estimate_ap_constant. Balls whose
// refined quadrature keeps growing (non-integrable dual factor) are flagged
// and their largest refined value enters the sup untouched.
struct ApDiagnostics {
  int balls_sampled = 0;
  int divergent_balls = 0;
  double worst_center = 0.0, worst_center_y = 0.0, worst_radius = 0.0;
};

struct AsMembership {
  double s = 0.0;
  double integral_estimate = 0.0;     // last refinement of \int_Omega w^{-s}
  std::vector<double> refinements;    // successive quadrature refinements
  bool member = false;                // finite and refinement-stable (last two within 1%)
};

enum class EmbeddingRegime { Subcritical, Borderline, Supercritical };

struct EmbeddingExponents {
  double p_s = 0.0;
  double p_s_star = 0.0;       // meaningful only when finite
  bool p_s_star_finite = false;
  EmbeddingRegime regime = EmbeddingRegime::Subcritical;
};

struct MorreyReport {
  double exponent_q = 0.0;
  double alpha_m = 0.0;
  double t = 0.0;              // p*n - alpha_m*exponent_q*(p-1)
  double d0 = 0.0;
  double norm_estimate = 0.0;  // sampled sup over centers/radii
  std::vector<double> refinements;
  bool passes = false;
  bool vacuous = false;        // supercritical regime: no Morrey condition needed
};

// True iff |x|^alpha is an A_p Muckenhoupt weight on R^n: -n < alpha < n(p-1).
// Throws std::invalid_argument for p <= 1 or n < 1.
bool power_weight_ap_admissible(double alpha, int n, double p);

// Sampled lower bound for the A_p characteristic
//   sup_B (avg_B w) (avg_B w^{-1/(p-1)})^{p-1}.
// Both averages share one quadrature rule per ball, so the discrete product
// is >= 1 by Hoelder regardless of quadrature error. Balls on which the dual
// factor fails the refinement-stability check are reported via `diag`.
double estimate_ap_constant(const Weight& w, const Domain& domain,
                            const BallSampling& sampling = {},
                            ApDiagnostics* diag = nullptr);

// Quadrature estimate of \int_Omega w^{-s}. Membership requires the last two
// refinements to agree within 1%. s must satisfy s >= 1/(p-1) and s > n/p.
AsMembership as_membership(const Weight& w, double s, const Domain& domain);

// p_s = p*s/(s+1); for p_s < n also p_s_star = n*p_s/(n - p_s).
// Preconditions: p > 1, n >= 1, s in [1/(p-1), inf) and s > n/p.
EmbeddingExponents embedding_exponents(double p, double s, int n);

// Sampled sup defining the Morrey-class membership of 1/w:
//   sup_{x in Omega, 0<r<d0} ( r^t / mu(Omega cap B) * \int_{Omega cap B} w^{1-q} )^{1/q},
// mu the w-measure, t = p*n - alpha_m*q*(p-1). Required only when p_s <= n;
// in the supercritical regime the report is marked vacuous and passes.
MorreyReport morrey_check(const Weight& w, double exponent_q, double alpha_m,
                          const Domain& domain, const BallSampling& sampling = {},
                          std::optional<EmbeddingRegime> regime = std::nullopt);

}  // namespace spl
