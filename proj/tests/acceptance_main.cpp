// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "spl/case1.hpp"
#include "spl/case2.hpp"
#include "spl/eigenpair.hpp"
#include "spl/energy.hpp"
#include "spl/solver.hpp"
#include "spl/weights.hpp"

using namespace spl;

namespace {

using clk = std::chrono::steady_clock;

double secs(clk::time_point t0) {
  return std::chrono::duration<double>(clk::now() - t0).count();
}

int failures = 0;

void report(int idx, const char* name, bool ok) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", idx, name);
  std::fflush(stdout);
  if (!ok) ++failures;
}

// ((p-1)/p) (1 - |x|^{p/(p-1)}) solves the unit-load problem on (-1,1), w = 1
double torsion_exact(double x, double p) {
  double c = p / (p - 1.0);
  return (1.0 / c) * (1.0 - std::pow(std::abs(x), c));
}

bool criterion1() {
  auto t0 = clk::now();
  auto m = build_mesh(Domain::interval(-1.0, 1.0), 512);
  bool ok = true;
  for (double p : {2.0, 3.0}) {
    Space X(m, Weight::constant(1.0, 1, p));
    solver::Result r = solver::constant_load(X, p, 1.0);
    ok = ok && r.converged;
    double err = 0.0;
    for (int i = 0; i < m->n_nodes(); ++i)
      err = std::max(err, std::abs(r.u[i] - torsion_exact(m->nodes(i, 0), p)));
    std::printf("  torsion p=%g sup-error %.3e\n", p, err);
    ok = ok && err <= 1e-3;
    if (p == 2.0) ok = ok && err <= 1e-10;  // nodally exact
  }
  return ok && secs(t0) < 5.0;
}

bool criterion2() {
  auto t0 = clk::now();
  auto m = build_mesh(Domain::interval(0.0, 1.0), 256);
  Space X(m, Weight::constant(1.0, 1, 2.0));
  EigenPair ep = first_eigenpair(X, 2.0);
  double pi2 = M_PI * M_PI;
  std::printf("  lambda1 = %.8f (pi^2 = %.8f), residual %.2e\n", ep.lambda1, pi2,
              ep.residual);
  bool ok = ep.converged;
  ok = ok && std::abs(ep.lambda1 - pi2) <= 0.005 * pi2;
  ok = ok && std::abs(ep.e1.lpNorm<Eigen::Infinity>() - 1.0) <= 1e-14;
  for (int i : m->interior) ok = ok && ep.e1[i] > 0.0;
  return ok && secs(t0) < 10.0;
}

bool criterion3() {
  bool ok = true;

  // constant weights have A_p constant exactly 1
  ok = ok && std::abs(estimate_ap_constant(Weight::constant(0.3, 1, 2.0),
                                           Domain::interval(-1.0, 1.0)) - 1.0) <= 1e-12;
  ok = ok && std::abs(estimate_ap_constant(Weight::constant(1.0, 1, 3.0),
                                           Domain::interval(0.0, 2.0)) - 1.0) <= 1e-12;
  ok = ok && std::abs(estimate_ap_constant(Weight::constant(2.5, 2, 2.0),
                                           Domain::rect(0.0, 0.0, 1.0, 2.0)) - 1.0) <= 1e-12;

  // power-weight membership is exactly the open range (-n, n(p-1))
  for (int n : {1, 2, 3})
    for (double p : {1.5, 2.0, 3.0}) {
      double hi = n * (p - 1.0);
      for (double alpha : {-n - 0.5, -static_cast<double>(n), -n + 0.01, -0.3, 0.0,
                           0.7 * hi, hi - 0.01, hi, hi + 0.5}) {
        bool expect = alpha > -n && alpha < hi;
        if (power_weight_ap_admissible(alpha, n, p) != expect) {
          std::printf("  admissibility mismatch at alpha=%g n=%d p=%g\n", alpha, n, p);
          ok = false;
        }
      }
    }

  // the non-integrable dual power produces a strictly growing refinement trail
  AsMembership as = as_membership(Weight::power(2.0, 3, 2.0), 2.0, Domain::ball(3, 1.0));
  ok = ok && !as.member && as.refinements.size() >= 3;
  for (size_t i = 1; i < as.refinements.size(); ++i)
    ok = ok && as.refinements[i] > as.refinements[i - 1];
  return ok;
}

bool fd_check(const Space& X, const std::function<double(const Eigen::VectorXd&)>& E,
              const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& G,
              std::mt19937& rng, double lo, double hi) {
  const Mesh& m = X.mesh();
  std::uniform_real_distribution<double> U(lo, hi);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(X.n());
  for (int i : m.interior) u[i] = U(rng);
  Eigen::VectorXd g = G(u);
  double worst = 0.0;
  for (int i : m.interior) {
    double h = 1e-6 * std::max(1.0, std::abs(u[i]));
    Eigen::VectorXd up = u, um = u;
    up[i] += h;
    um[i] -= h;
    double fd = (E(up) - E(um)) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - g[i]) / std::max(1.0, std::abs(g[i])));
  }
  return worst <= 1e-5;
}

bool criterion4() {
  auto t0 = clk::now();
  auto m = build_mesh(Domain::interval(-1.0, 1.0), 16);
  std::mt19937 rng(7);
  bool ok = true;
  for (double p : {1.5, 2.0, 3.0}) {
    Space X(m, Weight::constant(1.0, 1, p));

    CaseISpec s1;
    s1.p = p;
    s1.q = 0.5;
    s1.lambda = 1.0;
    s1.f = NonlinearityF::affine(1.0, 1.0);

    CaseIISpec s2;
    s2.p = p;
    s2.q = 0.5;
    s2.r = 3.2;
    s2.lambda = 0.3;
    s2.eps = 0.4;

    for (int trial = 0; trial < 20; ++trial) {
      ok = ok && fd_check(
          X, [&](const Eigen::VectorXd& u) { return X.dirichlet_energy(u, p); },
          [&](const Eigen::VectorXd& u) { return X.dirichlet_gradient(u, p); },
          rng, -0.5, 0.5);
      ok = ok && fd_check(
          X, [&](const Eigen::VectorXd& u) { return energy_case1(X, u, s1); },
          [&](const Eigen::VectorXd& u) { return gradient_case1(X, u, s1); },
          rng, 0.5, 1.5);
      ok = ok && fd_check(
          X, [&](const Eigen::VectorXd& u) { return energy_case2(X, u, s2); },
          [&](const Eigen::VectorXd& u) { return gradient_case2(X, u, s2); },
          rng, 0.2, 1.2);
    }
  }
  return ok && secs(t0) < 30.0;
}

bool case1_certificate(const Space& X, double lambda, double res_tol, double budget) {
  auto t0 = clk::now();
  CaseISpec spec;
  spec.p = 2.0;
  spec.q = 0.5;
  spec.lambda = lambda;
  spec.f = NonlinearityF::affine(1.0, 1.0);
  Case1Result r = solve_case1(X, spec);

  const Mesh& m = X.mesh();
  bool ok = r.f1.ok && r.eigen.converged && r.minimize.converged;
  for (int i : m.interior) {
    ok = ok && r.interval.lower.values[i] - 1e-14 <= r.minimize.u.values[i];
    ok = ok && r.minimize.u.values[i] <= r.interval.upper.values[i] + 1e-14;
  }
  ok = ok && r.sub_defect_max <= 1e-8;
  ok = ok && r.sup_defect_min >= -1e-8;
  ok = ok && r.weak_res <= res_tol;
  ok = ok && r.interval.c_K > 0.0 && r.min_over_box >= r.interval.c_K - 1e-15;
  std::printf("  lambda=%-4g weak_res=%.2e c_K=%.3e min=%.3e %s\n", lambda, r.weak_res,
              r.interval.c_K, r.min_over_box, ok ? "ok" : "BAD");
  return ok && secs(t0) < budget;
}

bool criterion5() {
  auto m = build_mesh(Domain::interval(-1.0, 1.0), 256);
  Space X(m, Weight::constant(1.0, 1, 2.0));
  bool ok = true;
  for (double lam : {0.1, 1.0, 10.0}) ok = case1_certificate(X, lam, 1e-6, 60.0) && ok;
  return ok;
}

bool case2_certificate(const Space& X, const EigenPair& ep, double res_tol,
                       Case2Result* keep) {
  auto emb = embedding_exponents(2.0, 2.0, 1);
  CaseIISpec spec;
  spec.p = 2.0;
  spec.q = 0.5;
  spec.r = 3.0;
  spec.lambda = 1.0;
  Case2Options opt;
  opt.lambda_auto = true;  // lambda = Lambda_est / 10
  Case2Result r = solve_case2(X, spec, ep, emb, opt);

  bool ok = ep.converged;
  ok = ok && r.I_nu0 < 0.0;
  ok = ok && r.geo.rho > 0.0 && r.I_zeta0 >= r.geo.rho;
  ok = ok && r.separation > 0.0;
  ok = ok && r.barrier_margin >= -1e-12;  // both branches dominate xi
  ok = ok && r.weak_res_nu <= res_tol && r.weak_res_zeta <= res_tol;
  ok = ok && r.energy_identity_err_nu <= 0.01 && r.energy_identity_err_zeta <= 0.01;
  std::printf("  lambda=%.4g I_nu=%.4f rho=%.4f I_zeta=%.4f sep=%.3f res=(%.1e, %.1e) %s\n",
              r.spec.lambda, r.I_nu0, r.geo.rho, r.I_zeta0, r.separation, r.weak_res_nu,
              r.weak_res_zeta, ok ? "ok" : "BAD");
  if (keep) *keep = r;
  return ok;
}

Case2Result g_case2;  // shared between criteria 6 and 7

bool criterion6() {
  auto t0 = clk::now();
  auto m = build_mesh(Domain::interval(-1.0, 1.0), 128);
  Space X(m, Weight::constant(1.0, 1, 2.0));
  EigenPair ep = first_eigenpair(X, 2.0);
  bool ok = case2_certificate(X, ep, 1e-5, &g_case2);
  return ok && secs(t0) < 300.0;
}

bool criterion7() {
  const std::vector<Case2Level>& L = g_case2.levels;
  if (L.size() < 6) return false;
  bool ok = true;
  for (size_t i = L.size() - 4; i < L.size(); ++i) {
    ok = ok && L[i].diff_nu < L[i - 1].diff_nu;
    ok = ok && L[i].diff_zeta < L[i - 1].diff_zeta;
  }
  return ok;
}

bool criterion8() {
  bool ok = true;
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto flux = [](const Eigen::VectorXd& x, double p) -> Eigen::VectorXd {
    double nx = x.norm();
    if (nx == 0.0) return Eigen::VectorXd::Zero(x.size());
    return std::pow(nx, p - 2.0) * x;
  };
  for (int d : {1, 2, 3}) {
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
      double worst = std::numeric_limits<double>::infinity();
      double cp = std::numeric_limits<double>::infinity();
      for (int trial = 0; trial < 10000; ++trial) {
        Eigen::VectorXd x(d), y(d);
        for (int i = 0; i < d; ++i) {
          x[i] = U(rng);
          y[i] = U(rng);
        }
        double inner = (flux(x, p) - flux(y, p)).dot(x - y);
        worst = std::min(worst, inner);
        double dist = (x - y).norm();
        if (inner < -1e-12) ok = false;
        // separated pairs must be strictly positive
        if (dist >= 0.1 && inner <= 1e-12) ok = false;
        if (dist > 0.0) {
          double denom = p >= 2.0 ? std::pow(dist, p)
                                  : dist * dist * std::pow(x.norm() + y.norm(), p - 2.0);
          if (denom > 0.0) cp = std::min(cp, inner / denom);
        }
        // equality holds at identical arguments
        if (trial < 100 && (flux(x, p) - flux(x, p)).dot(x - x) != 0.0) ok = false;
      }
      std::printf("  d=%d p=%.1f min inner %.3e, min ratio %.4f\n", d, p, worst, cp);
      ok = ok && cp > 0.0;
    }
  }
  return ok;
}

bool criterion9() {
  bool ok = true;
  {
    auto m = build_mesh(Domain::interval(-1.0, 1.0), 256);
    Space X(m, Weight::power(0.5, 1, 2.0));
    for (double lam : {0.1, 1.0, 10.0}) ok = case1_certificate(X, lam, 1e-4, 60.0) && ok;
  }
  {
    auto t0 = clk::now();
    auto m = build_mesh(Domain::interval(-1.0, 1.0), 128);
    Space X(m, Weight::power(0.5, 1, 2.0));
    EigenPair ep = first_eigenpair(X, 2.0);
    ok = case2_certificate(X, ep, 1e-4, nullptr) && ok;
    ok = ok && secs(t0) < 300.0;
  }
  return ok;
}

}  // namespace

int main() {
  report(1, "torsion oracle, p in {2, 3}", criterion1());
  report(2, "first eigenpair vs pi^2", criterion2());
  report(3, "weight toolkit", criterion3());
  report(4, "finite-difference gradient suite", criterion4());
  report(5, "one-solution certificate, lambda in {0.1, 1, 10}", criterion5());
  report(6, "two-solution certificate at lambda = Lambda_est/10", criterion6());
  report(7, "eps-continuation tail decreases", criterion7());
  report(8, "flux monotonicity inequality", criterion8());
  report(9, "weighted reruns of criteria 5 and 6", criterion9());
  std::printf("%d of 9 criteria passed\n", 9 - failures);
  return failures;
}
