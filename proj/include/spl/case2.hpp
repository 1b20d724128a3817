#pragma once

#include <cstdint>
#include <vector>

#include "spl/eigenpair.hpp"
#include "spl/energy.hpp"
#include "spl/space.hpp"
#include "spl/weights.hpp"

namespace spl {

// Quantitative mountain-pass frame around the origin for the functional with
// exponents (p, q, r). All constants derive from sampled embedding bounds and
// are reported as estimates.
struct MPGeometry {
  double k = 0.5;          // scale actually used; capped at half the critical value
  double l = 0.0;          // |Omega|^{1/z'}, z = p_s_star/(r+1) (l = |Omega| when z = inf)
  double C_embed = 0.0;    // inflated sampled constant with \int (v^+)^{r+1} <= C_embed*l*|v|^{r+1}
  double k_crit = 0.0;     // rho > 0 iff k < k_crit
  double R = 0.0;          // sphere radius
  double rho = 0.0;        // guaranteed level on the sphere (under the lambda cap)
  double Lambda_est = 0.0; // rho / sup_{|v|=R} (1-q)^{-1} \int |v|^{1-q}
  double T = 0.0;          // scale with I_0(T e1) < -1, T > R
  double sphere_f_sup = 0.0;
  double sphere_I0_min = 0.0;  // sampled min of the lambda-free part on the sphere
};

struct MPGeometryOptions {
  double k = 0.5;
  int embed_samples = 500;
  int sphere_samples = 200;
  uint64_t seed = 0;
};

// Closed-form frame quantities for a given growth bound M = C_embed * l:
//   R      = k ((r+1)/(p M))^{1/(r+1-p)}
//   2 rho  = ((r+1)/(p M))^{p/(r+1-p)} (k^p - M k^{r+1}) / p
//   k_crit = M^{-1/(r+1-p)}
struct MPFrame {
  double R = 0.0, rho = 0.0, k_crit = 0.0;
};

MPFrame mp_frame(double M, double p, double r, double k);

// Needs the embedding exponents of the ambient space to size l; pass the
// report from embedding_exponents for the configured (p, s, n).
MPGeometry mp_geometry(const Space& X, double p, double q, double r,
                       const EmbeddingExponents& emb, const EigenPair& ep,
                       const MPGeometryOptions& opt = {});

// Sampled sphere certificate: min over sampled |v| = R of I_{lambda,eps}(v),
// compared against rho * (1 - slack). Informative for lambda < Lambda_est.
double sphere_min_sampled(const Space& X, const CaseIISpec& spec, const MPGeometry& geo,
                          const EigenPair& ep, int samples = 200, uint64_t seed = 0);

struct BallMinimize {
  Field nu;
  double energy = 0.0;       // I_{lambda,eps}(nu), negative for lambda > 0
  double norm = 0.0;         // weighted p-seminorm, strictly below R at success
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct DescentOptions {
  double tol = 1e-10;  // sup-norm of the (projected) gradient covector
  int max_iter = 4000;
};

// Projected descent inside the ball |v| <= R: preconditioned step, nodal
// clamp to v >= 0, rescale onto the ball when the step exits, Armijo on I.
// Newton polishing once the constraint is inactive. For lambda = 0 the
// minimizer degenerates to 0 and is returned as such.
BallMinimize ball_minimizer(const Space& X, const CaseIISpec& spec, const MPGeometry& geo,
                            const EigenPair& ep, const DescentOptions& opt = {},
                            const Field* warm = nullptr);

struct MountainPass {
  Field zeta;
  double level = 0.0;      // I_{lambda,eps}(zeta) >= rho
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> path_max_log;        // nonincreasing across deformations
  std::vector<double> final_path_energies; // I along the final path (path_profile)
  Eigen::MatrixXd final_path;              // m x n nodal fields along the path
};

struct MountainPassOptions {
  int path_nodes = 41;
  double tol = 1e-9;
  int max_deform = 3000;
  DescentOptions inner;
};

// Deformation of the segment path 0 -> T e1: every interior node flows
// downhill with steps capped by the arc spacing, the chain is reparametrized
// by arc length each sweep (keeping it connected through the ridge), and the
// top node is Newton-polished once the level stalls. Throws
// solver::SolveError on level collapse (reconnected path max under rho).
MountainPass mountain_pass_search(const Space& X, const CaseIISpec& spec,
                                  const MPGeometry& geo, const EigenPair& ep,
                                  const MountainPassOptions& opt = {},
                                  const Field* warm = nullptr);

// Solution of -div(w |grad xi|^{p-2} grad xi) = min{1, lambda/2^q}: every
// regularized solution of the singular problem dominates it node-wise.
struct BarrierResult {
  Field xi;
  double C = 0.0;
  double min_interior = 0.0;
};

BarrierResult barrier(const Space& X, double p, double q, double lambda);

struct Case2Level {
  double eps = 0.0;
  double I_nu = 0.0, I_zeta = 0.0;
  double norm_nu = 0.0, norm_zeta = 0.0;
  double diff_nu = 0.0, diff_zeta = 0.0;  // seminorm change from previous level
  double barrier_margin = 0.0;            // min over both branches of v - xi
};

struct Case2Options {
  MPGeometryOptions geometry;
  MountainPassOptions mp;
  DescentOptions ball;
  int eps_first = 1, eps_last = 20;  // schedule 2^-first .. 2^-last
  bool lambda_auto = false;          // replace spec.lambda by Lambda_est / 10
  double sphere_slack = 0.05;
};

struct Case2Result {
  CaseIISpec spec;  // lambda as actually used
  MPGeometry geo;
  BarrierResult bar;
  std::vector<Case2Level> levels;

  Field nu0, zeta0;
  double I_nu0 = 0.0, I_zeta0 = 0.0;  // limit functional (eps = 0)
  double Theta = 0.0;
  bool theta_stable = false;
  bool theta_attained_early = false;
  double separation = 0.0;            // seminorm distance between branches
  double weak_res_nu = 0.0, weak_res_zeta = 0.0;  // against the eps = 0 source
  double energy_identity_err_nu = 0.0, energy_identity_err_zeta = 0.0;
  double energy_limit_gap_nu = 0.0, energy_limit_gap_zeta = 0.0;
  double barrier_margin = 0.0;
  double sphere_min = 0.0;
  bool sphere_warn = false;  // lambda at or above Lambda_est, or sampled sphere dip

  std::vector<double> path_profile;   // I along the final mountain-pass path
  Eigen::MatrixXd final_path;
};

// Full two-branch pipeline along the regularization schedule.
Case2Result solve_case2(const Space& X, CaseIISpec spec, const EigenPair& ep,
                        const EmbeddingExponents& emb, const Case2Options& opt = {});

}  // namespace spl
