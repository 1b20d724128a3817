#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "spl/mesh.hpp"
#include "spl/solver.hpp"
#include "spl/space.hpp"

using namespace spl;

namespace {

Eigen::VectorXd random_interior(const Mesh& m, std::mt19937& rng, double lo,
                                double hi) {
  std::uniform_real_distribution<double> U(lo, hi);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(m.n_nodes());
  for (int i : m.interior) u[i] = U(rng);
  return u;
}

}  // namespace

TEST_CASE("interval mesh counts and boundary flags") {
  MeshPtr m = build_mesh(Domain::interval(-1.0, 1.0), 4);
  CHECK(m->n_nodes() == 5);
  CHECK(m->n_elems() == 4);
  CHECK(m->interior.size() == 3);
  CHECK(m->diam == doctest::Approx(2.0));
  int nb = 0;
  for (int i = 0; i < m->n_nodes(); ++i)
    if (m->boundary[i]) {
      ++nb;
      CHECK(std::fabs(std::fabs(m->nodes(i, 0)) - 1.0) < 1e-14);
    }
  CHECK(nb == 2);
  CHECK_THROWS_AS(build_mesh(Domain::interval(0.0, 1.0), 1),
                  std::invalid_argument);
}

TEST_CASE("unit square mesh counts") {
  MeshPtr m = build_mesh(Domain::rect(0.0, 0.0, 1.0, 1.0), 2);
  CHECK(m->n_nodes() == 9);
  CHECK(m->n_elems() == 8);
  CHECK(m->interior.size() == 1);  // only the center survives the boundary
}

TEST_CASE("disk mesh stays inside the circle") {
  MeshPtr m = build_mesh(Domain::disk(0.0, 0.0, 1.0), 4);
  CHECK(m->n_elems() > 0);
  for (int i = 0; i < m->n_nodes(); ++i) {
    double r = std::hypot(m->nodes(i, 0), m->nodes(i, 1));
    CHECK(r <= 1.0 + 1e-12);
    if (m->boundary[i]) CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("refinement nests the coarse space") {
  MeshPtr coarse = build_mesh(Domain::interval(-1.0, 1.0), 4);
  MeshPtr fine = refine(*coarse);
  CHECK(fine->n_elems() == 8);
  CHECK(fine->n_nodes() == 9);

  Weight w = Weight::constant(1.0, 1, 2.0);
  Space Xc(coarse, w), Xf(fine, w);
  Field u = Field::zeros(coarse);
  u.values[2] = 1.0;  // center hat
  Field uf = interpolate_refined(u, fine);
  // piecewise-linear interpolation is exact on the nested mesh
  CHECK(Xf.seminorm(uf.values, 2.0) ==
        doctest::Approx(Xc.seminorm(u.values, 2.0)).epsilon(1e-13));
  CHECK(Xf.lpw_norm(uf.values, 2.0) ==
        doctest::Approx(Xc.lpw_norm(u.values, 2.0)).epsilon(1e-13));

  MeshPtr rc = build_mesh(Domain::rect(0.0, 0.0, 1.0, 1.0), 2);
  CHECK(refine(*rc)->n_elems() == 32);
}

TEST_CASE("seminorm of the center hat on (-1,1) is sqrt(2)") {
  MeshPtr m = build_mesh(Domain::interval(-1.0, 1.0), 2);
  Space X(m, Weight::constant(1.0, 1, 2.0));
  Eigen::VectorXd u = Eigen::VectorXd::Zero(3);
  u[1] = 1.0;
  CHECK(X.seminorm(u, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(X.seminorm(-3.0 * u, 2.0) ==
        doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(X.seminorm(Eigen::VectorXd::Zero(3), 2.0) == 0.0);
  // energy and seminorm agree: E = |u|^p / p
  CHECK(X.dirichlet_energy(u, 3.0) ==
        doctest::Approx(std::pow(X.seminorm(u, 3.0), 3.0) / 3.0).epsilon(1e-12));
}

TEST_CASE("lumped measures sum to the domain measure") {
  Space X1(build_mesh(Domain::interval(-1.0, 1.0), 16),
           Weight::constant(1.0, 1, 2.0));
  CHECK(X1.lumped_measure().sum() == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(X1.integral_lumped(Eigen::VectorXd::Ones(X1.n())) ==
        doctest::Approx(2.0).epsilon(1e-13));
  Space X2(build_mesh(Domain::rect(0.0, 0.0, 1.0, 1.0), 4),
           Weight::constant(1.0, 2, 2.0));
  CHECK(X2.lumped_measure().sum() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("p = 2 torsion solution is nodally exact") {
  MeshPtr m = build_mesh(Domain::interval(-1.0, 1.0), 64);
  Space X(m, Weight::constant(1.0, 1, 2.0));
  solver::Result r = solver::constant_load(X, 2.0, 1.0);
  REQUIRE(r.converged);
  for (int i = 0; i < m->n_nodes(); ++i) {
    double x = m->nodes(i, 0);
    CHECK(r.u[i] == doctest::Approx(0.5 * (1.0 - x * x)).epsilon(1e-10));
  }
  // the discrete solution satisfies its own weak form to solver tolerance
  CHECK(X.weak_residual(r.u, Eigen::VectorXd::Ones(X.n()), 2.0) <= 1e-10);
}

TEST_CASE("p = 3 torsion matches the closed form") {
  MeshPtr m = build_mesh(Domain::interval(-1.0, 1.0), 128);
  Space X(m, Weight::constant(1.0, 1, 3.0));
  solver::Result r = solver::constant_load(X, 3.0, 1.0);
  REQUIRE(r.converged);
  double err = 0.0;
  for (int i = 0; i < m->n_nodes(); ++i) {
    double x = m->nodes(i, 0);
    double exact = (2.0 / 3.0) * (1.0 - std::pow(std::fabs(x), 1.5));
    err = std::max(err, std::fabs(r.u[i] - exact));
  }
  CHECK(err <= 5e-3);
  CHECK(X.weak_residual(r.u, Eigen::VectorXd::Ones(X.n()), 3.0) <= 1e-10);
}

TEST_CASE("perturbing an exact solution raises the weak residual") {
  MeshPtr m = build_mesh(Domain::interval(-1.0, 1.0), 32);
  Space X(m, Weight::constant(1.0, 1, 2.0));
  solver::Result r = solver::constant_load(X, 2.0, 1.0);
  Eigen::VectorXd g = Eigen::VectorXd::Ones(X.n());
  double base = X.weak_residual(r.u, g, 2.0);
  Eigen::VectorXd pert = r.u;
  pert[m->interior[m->interior.size() / 2]] += 0.1;
  CHECK(X.weak_residual(pert, g, 2.0) > base + 0.01);
}

TEST_CASE("weak residual of the lone hat against zero source") {
  MeshPtr m = build_mesh(Domain::interval(-1.0, 1.0), 2);
  Space X(m, Weight::constant(1.0, 1, 2.0));
  Eigen::VectorXd u = Eigen::VectorXd::Zero(3), g = Eigen::VectorXd::Zero(3);
  u[1] = 1.0;
  // a(u, phi) = 2 against the single interior hat, normalized by 1 + sqrt(2)
  CHECK(X.weak_residual(u, g, 2.0) ==
        doctest::Approx(2.0 / (1.0 + std::sqrt(2.0))).epsilon(1e-13));
}

TEST_CASE("dirichlet gradient agrees with central differences") {
  std::mt19937 rng(7);
  MeshPtr m = build_mesh(Domain::interval(-1.0, 1.0), 16);
  Space X(m, Weight::constant(1.0, 1, 2.0));
  const double h = 1e-6;
  for (double p : {1.5, 2.0, 3.0}) {
    Eigen::VectorXd u = random_interior(*m, rng, 0.5, 1.5);
    Eigen::VectorXd g = X.dirichlet_gradient(u, p);
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::VectorXd v = random_interior(*m, rng, -1.0, 1.0);
      double fd = (X.dirichlet_energy(u + h * v, p) -
                   X.dirichlet_energy(u - h * v, p)) /
                  (2.0 * h);
      double exact = g.dot(v);
      CHECK(std::fabs(fd - exact) <= 3e-6 * (1.0 + std::fabs(exact)));
    }
  }
}

TEST_CASE("dirichlet gradient on a 2d mesh, fractional p") {
  std::mt19937 rng(11);
  MeshPtr m = build_mesh(Domain::rect(0.0, 0.0, 1.0, 1.0), 8);
  Space X(m, Weight::constant(1.0, 2, 2.5));
  Eigen::VectorXd u = random_interior(*m, rng, 0.5, 1.5);
  Eigen::VectorXd g = X.dirichlet_gradient(u, 2.5);
  const double h = 1e-6;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd v = random_interior(*m, rng, -1.0, 1.0);
    double fd = (X.dirichlet_energy(u + h * v, 2.5) -
                 X.dirichlet_energy(u - h * v, 2.5)) /
                (2.0 * h);
    CHECK(std::fabs(fd - g.dot(v)) <= 3e-6 * (1.0 + std::fabs(g.dot(v))));
  }
}

TEST_CASE("dirichlet energy is midpoint-convex for p >= 2") {
  std::mt19937 rng(3);
  MeshPtr m = build_mesh(Domain::interval(-1.0, 1.0), 16);
  Space X(m, Weight::constant(1.0, 1, 2.0));
  for (double p : {2.0, 3.0})
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd a = random_interior(*m, rng, -1.0, 1.0);
      Eigen::VectorXd b = random_interior(*m, rng, -1.0, 1.0);
      double mid = X.dirichlet_energy(0.5 * (a + b), p);
      CHECK(mid <= 0.5 * X.dirichlet_energy(a, p) +
                       0.5 * X.dirichlet_energy(b, p) + 1e-12);
    }
}

TEST_CASE("field helpers") {
  MeshPtr m = build_mesh(Domain::interval(0.0, 1.0), 8);
  Field f = Field::zeros(m);
  CHECK(f.values.size() == m->n_nodes());
  CHECK(f.max() == 0.0);
  f.values = Eigen::VectorXd::Ones(m->n_nodes());
  f.enforce_zero_boundary();
  for (int i = 0; i < m->n_nodes(); ++i)
    CHECK(f.values[i] == (m->boundary[i] ? 0.0 : 1.0));
  CHECK(f.min_interior() == 1.0);
}
