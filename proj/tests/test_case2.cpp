#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "spl/case2.hpp"
#include "spl/mesh.hpp"
#include "spl/solver.hpp"

using namespace spl;

namespace {

struct Fixture {
  MeshPtr m;
  Space X;
  EigenPair ep;
  EmbeddingExponents emb;
  explicit Fixture(int res = 32)
      : m(build_mesh(Domain::interval(-1.0, 1.0), res)),
        X(m, Weight::constant(1.0, 1, 2.0)),
        ep(first_eigenpair(X, 2.0)),
        emb(embedding_exponents(2.0, 2.0, 1)) {}
};

CaseIISpec spec235(double lambda, double eps = 0.0) {
  CaseIISpec s;
  s.p = 2.0;
  s.q = 0.5;
  s.r = 3.0;
  s.lambda = lambda;
  s.eps = eps;
  return s;
}

}  // namespace

TEST_CASE("mountain-pass frame closed forms") {
  MPFrame f = mp_frame(1.0, 2.0, 3.0, 0.5);
  CHECK(f.R == doctest::Approx(0.7071067811865476).epsilon(1e-15));
  CHECK(f.rho == doctest::Approx(0.09375).epsilon(1e-15));
  CHECK(f.k_crit == doctest::Approx(1.0).epsilon(1e-15));

  // rho collapses at the critical scale
  MPFrame g = mp_frame(2.0, 2.0, 3.0, std::pow(0.5, 0.5) * (1.0 - 1e-9));
  CHECK(g.rho > 0.0);
  CHECK(g.rho < 1e-8);

  CHECK_THROWS_AS(mp_frame(0.0, 2.0, 3.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(mp_frame(1.0, 1.0, 3.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(mp_frame(1.0, 2.0, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(mp_frame(1.0, 2.0, 3.0, 0.0), std::invalid_argument);
}

TEST_CASE("sampled geometry satisfies its own frame identities") {
  Fixture fx;
  REQUIRE(fx.ep.converged);
  MPGeometry geo = mp_geometry(fx.X, 2.0, 0.5, 3.0, fx.emb, fx.ep);

  // 1d embedding is supercritical: l is the plain measure
  CHECK(geo.l == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(geo.C_embed > 0.0);

  MPFrame f = mp_frame(geo.C_embed * geo.l, 2.0, 3.0, geo.k);
  CHECK(geo.R == doctest::Approx(f.R).epsilon(1e-13));
  CHECK(geo.rho == doctest::Approx(f.rho).epsilon(1e-13));
  CHECK(geo.k_crit == doctest::Approx(f.k_crit).epsilon(1e-13));
  CHECK(geo.k < geo.k_crit);
  CHECK(geo.Lambda_est * geo.sphere_f_sup == doctest::Approx(geo.rho).epsilon(1e-12));

  // the sampled lambda-free floor on the sphere clears rho
  CHECK(geo.sphere_I0_min >= geo.rho);

  // T certificate: strictly negative lambda-free energy past the sphere
  CHECK(geo.T > geo.R);
  Eigen::VectorXd ehat = fx.ep.e1 / fx.X.seminorm(fx.ep.e1, 2.0);
  CHECK(energy_case2(fx.X, (geo.T * ehat).eval(), spec235(0.0)) < -1.0);

  // sampling is seeded: the report is reproducible bit for bit
  MPGeometry geo2 = mp_geometry(fx.X, 2.0, 0.5, 3.0, fx.emb, fx.ep);
  CHECK(geo2.C_embed == geo.C_embed);
  CHECK(geo2.sphere_f_sup == geo.sphere_f_sup);
  CHECK(geo2.T == geo.T);
}

TEST_CASE("sphere certificate: healthy below Lambda_est, fails far above") {
  Fixture fx;
  MPGeometry geo = mp_geometry(fx.X, 2.0, 0.5, 3.0, fx.emb, fx.ep);
  double low = sphere_min_sampled(fx.X, spec235(geo.Lambda_est / 10.0), geo, fx.ep);
  CHECK(low >= geo.rho * 0.95);
  double high = sphere_min_sampled(fx.X, spec235(10.0 * geo.Lambda_est), geo, fx.ep);
  CHECK(high < geo.rho * 0.95);
}

TEST_CASE("ball minimizer degenerates to zero without the singular term") {
  Fixture fx;
  MPGeometry geo = mp_geometry(fx.X, 2.0, 0.5, 3.0, fx.emb, fx.ep);
  BallMinimize bm = ball_minimizer(fx.X, spec235(0.0, 0.5), geo, fx.ep);
  CHECK(bm.converged);
  CHECK(bm.energy == 0.0);
  CHECK(bm.norm == 0.0);
  CHECK(bm.nu.values.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("ball minimizer finds a negative-energy interior point") {
  Fixture fx;
  MPGeometry geo = mp_geometry(fx.X, 2.0, 0.5, 3.0, fx.emb, fx.ep);
  BallMinimize bm = ball_minimizer(fx.X, spec235(geo.Lambda_est / 10.0, 0.5), geo, fx.ep);
  REQUIRE(bm.converged);
  CHECK(bm.energy < 0.0);
  CHECK(bm.norm > 0.0);
  CHECK(bm.norm < geo.R);
  CHECK(bm.grad_norm <= 1e-10);
  for (int i = 0; i < fx.m->n_nodes(); ++i) CHECK(bm.nu.values[i] >= 0.0);
}

TEST_CASE("mountain pass search holds the level above rho") {
  Fixture fx;
  MPGeometry geo = mp_geometry(fx.X, 2.0, 0.5, 3.0, fx.emb, fx.ep);
  CaseIISpec spec = spec235(geo.Lambda_est / 10.0, 0.5);
  MountainPass mp = mountain_pass_search(fx.X, spec, geo, fx.ep);
  REQUIRE(mp.converged);
  CHECK(mp.level >= geo.rho * 0.999);
  CHECK(mp.grad_norm <= 1e-9);
  CHECK(mp.level == doctest::Approx(energy_case2(fx.X, mp.zeta.values, spec)).epsilon(1e-12));
  for (size_t i = 1; i < mp.path_max_log.size(); ++i)
    CHECK(mp.path_max_log[i] <= mp.path_max_log[i - 1] + 1e-12);
  CHECK(mp.final_path_energies.size() == 41);
  CHECK(mp.final_path.rows() == 41);
  double pmax = -1e300;
  for (double e : mp.final_path_energies) pmax = std::max(pmax, e);
  CHECK(pmax >= geo.rho * 0.999);
  CHECK(mp.zeta.min_interior() > 0.0);
}

TEST_CASE("barrier constant and p-homogeneous scaling") {
  Fixture fx;
  BarrierResult b1 = barrier(fx.X, 2.0, 0.5, 1.0);
  CHECK(b1.C == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-15));
  CHECK(b1.min_interior > 0.0);
  // p = 2: xi = C (1 - x^2)/2 nodally
  for (int i = 0; i < fx.m->n_nodes(); ++i) {
    double x = fx.m->nodes(i, 0);
    CHECK(b1.xi.values[i] ==
          doctest::Approx(b1.C * 0.5 * (1.0 - x * x)).epsilon(1e-9));
  }

  // saturated constant
  BarrierResult b2 = barrier(fx.X, 2.0, 0.5, 4.0);
  CHECK(b2.C == 1.0);

  // p = 3: xi scales like C^{1/(p-1)} against the unit-load profile
  Space X3(fx.m, Weight::constant(1.0, 1, 3.0));
  BarrierResult full = barrier(X3, 3.0, 0.5, 4.0);  // C = 1
  double lam_half = 0.5 * std::pow(2.0, 0.5);       // C = 1/2
  BarrierResult half = barrier(X3, 3.0, 0.5, lam_half);
  CHECK(half.C == doctest::Approx(0.5).epsilon(1e-15));
  double scale = std::pow(0.5, 1.0 / 2.0);
  for (int i : fx.m->interior)
    CHECK(half.xi.values[i] ==
          doctest::Approx(scale * full.xi.values[i]).epsilon(1e-6));
}

TEST_CASE("two-branch pipeline: ordering, barrier, continuation, separation") {
  Fixture fx;
  CaseIISpec spec = spec235(1.0);
  Case2Options opt;
  opt.eps_first = 1;
  opt.eps_last = 10;
  opt.lambda_auto = true;
  Case2Result r = solve_case2(fx.X, spec, fx.ep, fx.emb, opt);

  CHECK(r.spec.lambda == doctest::Approx(r.geo.Lambda_est / 10.0).epsilon(1e-14));
  CHECK_FALSE(r.sphere_warn);
  REQUIRE(r.levels.size() == 10);
  for (const Case2Level& lv : r.levels) {
    CHECK(lv.I_nu < 0.0);
    CHECK(lv.I_zeta >= r.geo.rho * 0.999);
    CHECK(lv.norm_nu < r.geo.R);
    CHECK(lv.barrier_margin >= -1e-12);
  }
  // continuation settles: tail differences shrink on both branches
  size_t nl = r.levels.size();
  for (size_t i = nl - 2; i < nl; ++i) {
    CHECK(r.levels[i].diff_nu <= r.levels[i - 1].diff_nu + 1e-12);
    CHECK(r.levels[i].diff_zeta <= r.levels[i - 1].diff_zeta + 1e-12);
  }

  CHECK(r.I_nu0 < 0.0);
  CHECK(r.I_zeta0 >= r.geo.rho * 0.999);
  CHECK(r.theta_stable);
  CHECK(r.Theta >= r.I_zeta0 - 1e-12);
  CHECK(r.barrier_margin >= -1e-12);

  CHECK(r.separation > 0.0);
  double sep = fx.X.seminorm(r.zeta0.values - r.nu0.values, 2.0);
  CHECK(r.separation == doctest::Approx(sep).epsilon(1e-12));

  // the singular branch residual tracks the eps floor (~eps^{1-q})
  CHECK(r.weak_res_nu <= 2e-4);
  CHECK(r.weak_res_zeta <= 1e-5);
  CHECK(r.energy_identity_err_nu <= 0.01);
  CHECK(r.energy_identity_err_zeta <= 0.01);

  // both limit branches dominate the barrier node-wise
  for (int i : fx.m->interior) {
    CHECK(r.nu0.values[i] >= r.bar.xi.values[i] - 1e-12);
    CHECK(r.zeta0.values[i] >= r.bar.xi.values[i] - 1e-12);
  }
}

TEST_CASE("single-level schedule stays coherent") {
  Fixture fx;
  CaseIISpec spec = spec235(1.0);
  Case2Options opt;
  opt.eps_first = 3;
  opt.eps_last = 3;
  opt.lambda_auto = true;
  Case2Result r = solve_case2(fx.X, spec, fx.ep, fx.emb, opt);
  CHECK(r.levels.size() == 1);
  CHECK(r.separation > 0.0);
  CHECK(r.I_nu0 < 0.0);
  CHECK(r.I_zeta0 >= r.geo.rho * 0.999);
  CHECK_FALSE(r.theta_stable);  // stability needs at least two levels
}

TEST_CASE("lambda at the estimate completes with a sphere warning") {
  Fixture fx;
  MPGeometry geo = mp_geometry(fx.X, 2.0, 0.5, 3.0, fx.emb, fx.ep);
  CaseIISpec spec = spec235(geo.Lambda_est);
  Case2Options opt;
  opt.eps_first = 1;
  opt.eps_last = 4;
  Case2Result r = solve_case2(fx.X, spec, fx.ep, fx.emb, opt);
  CHECK(r.sphere_warn);
  CHECK(r.I_zeta0 >= r.geo.rho * 0.999);
}

TEST_CASE("far-supercritical lambda fails honestly") {
  Fixture fx;
  MPGeometry geo = mp_geometry(fx.X, 2.0, 0.5, 3.0, fx.emb, fx.ep);
  CaseIISpec spec = spec235(10.0 * geo.Lambda_est);
  Case2Options opt;
  opt.eps_first = 1;
  opt.eps_last = 3;
  CHECK_THROWS_AS(solve_case2(fx.X, spec, fx.ep, fx.emb, opt), solver::SolveError);
}

TEST_CASE("spec bounds are enforced") {
  Fixture fx;
  Case2Options opt;
  opt.eps_first = 1;
  opt.eps_last = 2;
  CaseIISpec bad_q = spec235(1.0);
  bad_q.q = 1.5;
  CHECK_THROWS_AS(solve_case2(fx.X, bad_q, fx.ep, fx.emb, opt), std::invalid_argument);
  CaseIISpec bad_r = spec235(1.0);
  bad_r.r = 1.0;  // r = p - 1
  CHECK_THROWS_AS(solve_case2(fx.X, bad_r, fx.ep, fx.emb, opt), std::invalid_argument);
  CaseIISpec bad_l = spec235(-1.0);
  CHECK_THROWS_AS(solve_case2(fx.X, bad_l, fx.ep, fx.emb, opt), std::invalid_argument);
}
