#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "spl/energy.hpp"
#include "spl/mesh.hpp"
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

TEST_CASE("F_primitive closed forms") {
  NonlinearityF one = NonlinearityF::affine(1.0, 0.0);
  CHECK(F_primitive(-1.0, one, 0.5) == 0.0);
  CHECK(F_primitive(0.0, one, 0.5) == 0.0);
  // f = 1: F(1) = int_0^1 s^{-1/2} = 2
  CHECK(F_primitive(1.0, one, 0.5) == doctest::Approx(2.0).epsilon(1e-10));

  // f = 1 + t: F(1) = 2 + 2/3
  NonlinearityF lin = NonlinearityF::affine(1.0, 1.0);
  CHECK(F_primitive(1.0, lin, 0.5) == doctest::Approx(8.0 / 3.0).epsilon(1e-10));

  // f = 1 + t^{1/4}, q = 0.3: F(t) = t^{0.7}/0.7 + t^{0.95}/0.95
  NonlinearityF ps = NonlinearityF::power_shift(1.0, 0.25);
  double t = 2.7;
  double exact = std::pow(t, 0.7) / 0.7 + std::pow(t, 0.95) / 0.95;
  CHECK(F_primitive(t, ps, 0.3) == doctest::Approx(exact).epsilon(1e-8));

  CHECK_THROWS_AS(F_primitive(1.0, one, 1.5), std::invalid_argument);
}

TEST_CASE("tabulated profiles interpolate and extend by slope") {
  NonlinearityF tab = NonlinearityF::tabulated({1.0, 2.0, 3.0}, {2.0, 3.0, 4.0});
  CHECK(tab(1.5) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(tab(5.0) == doctest::Approx(6.0).epsilon(1e-15));  // last slope
  CHECK(tab(0.0) == doctest::Approx(1.0).epsilon(1e-15));  // first slope
  CHECK(tab(-10.0) == 0.0);                                // clamped below
  CHECK_THROWS_AS(NonlinearityF::tabulated({1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(NonlinearityF::tabulated({1.0, 1.0}, {1.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("validate_f1 accepts the admissible profiles") {
  CHECK(validate_f1(NonlinearityF::affine(1.0, 1.0), 0.5, 2.0).ok);
  CHECK(validate_f1(NonlinearityF::affine(2.0, 0.0), 0.3, 3.0).ok);
  CHECK(validate_f1(NonlinearityF::power_shift(1.0, 0.25), 0.5, 2.0).ok);

  // tabulated samples of 1 + t over the screened range
  std::vector<double> ts, fs;
  for (int d = -18; d <= 18; ++d) {
    ts.push_back(std::pow(10.0, 0.5 * d));
    fs.push_back(1.0 + ts.back());
  }
  CHECK(validate_f1(NonlinearityF::tabulated(ts, fs), 0.5, 2.0).ok);
}

TEST_CASE("validate_f1 names the violated clause") {
  // f(0) = 0
  F1Validation v0 = validate_f1(NonlinearityF::affine(0.0, 1.0), 0.5, 2.0);
  CHECK_FALSE(v0.ok);
  CHECK(v0.diagnostics.find("f(0) > 0") != std::string::npos);

  // decreasing table
  F1Validation vm =
      validate_f1(NonlinearityF::tabulated({1.0, 2.0}, {2.0, 1.0}), 0.5, 2.0);
  CHECK_FALSE(vm.ok);
  CHECK(vm.diagnostics.find("monotonicity") != std::string::npos);

  // f = 1 + t^2 grows faster than t^{q+p-1}
  F1Validation vg = validate_f1(NonlinearityF::power_shift(1.0, 2.0), 0.5, 2.0);
  CHECK_FALSE(vg.ok);
  CHECK(vg.diagnostics.find("q+p-1") != std::string::npos);

  F1Validation vq = validate_f1(NonlinearityF::affine(1.0, 1.0), 1.5, 2.0);
  CHECK_FALSE(vq.ok);
  CHECK(vq.diagnostics.find("q outside") != std::string::npos);
}

TEST_CASE("singular energy: zero and negative fields cost only Dirichlet") {
  MeshPtr m = build_mesh(Domain::interval(-1.0, 1.0), 2);
  Space X(m, Weight::constant(1.0, 1, 2.0));
  CaseISpec spec;
  spec.f = NonlinearityF::affine(1.0, 0.0);

  CHECK(energy_case1(X, Eigen::VectorXd::Zero(3), spec) == 0.0);

  Eigen::VectorXd hat = Eigen::VectorXd::Zero(3);
  hat[1] = 1.0;
  // F vanishes on t <= 0, so the source term drops out
  CHECK(energy_case1(X, Eigen::VectorXd(-hat), spec) ==
        doctest::Approx(X.dirichlet_energy(-hat, 2.0)).epsilon(1e-14));

  // center hat: E = 1 - lambda * F(1) * m_center = 1 - 2
  CHECK(energy_case1(X, hat, spec) == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("singular energy gradient agrees with central differences") {
  std::mt19937 rng(23);
  MeshPtr m = build_mesh(Domain::interval(-1.0, 1.0), 16);
  Space X(m, Weight::constant(1.0, 1, 2.0));
  const double h = 1e-6;
  for (double p : {1.5, 2.0, 3.0}) {
    CaseISpec spec;
    spec.p = p;
    spec.q = 0.5;
    spec.lambda = 0.7;
    spec.f = NonlinearityF::affine(1.0, 1.0);
    Eigen::VectorXd u = random_interior(*m, rng, 0.2, 1.0);
    Eigen::VectorXd g = gradient_case1(X, u, spec);
    for (int trial = 0; trial < 4; ++trial) {
      Eigen::VectorXd v = random_interior(*m, rng, -1.0, 1.0);
      double fd = (energy_case1(X, u + h * v, spec) -
                   energy_case1(X, u - h * v, spec)) /
                  (2.0 * h);
      CHECK(std::fabs(fd - g.dot(v)) <= 1e-5 * (1.0 + std::fabs(g.dot(v))));
    }
  }
}

TEST_CASE("singular energy gradient rejects non-positive interior nodes") {
  MeshPtr m = build_mesh(Domain::interval(-1.0, 1.0), 8);
  Space X(m, Weight::constant(1.0, 1, 2.0));
  CaseISpec spec;
  spec.f = NonlinearityF::affine(1.0, 0.0);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(m->n_nodes());
  for (int i : m->interior) u[i] = 0.5;
  u[m->interior[2]] = 0.0;
  CHECK_THROWS_AS(gradient_case1(X, u, spec), std::domain_error);
  try {
    gradient_case1(X, u, spec);
  } catch (const std::domain_error& e) {
    CHECK(std::string(e.what()).find("node") != std::string::npos);
  }
}

TEST_CASE("regularized energy: zero field, hat value, lambda domination") {
  MeshPtr m = build_mesh(Domain::interval(-1.0, 1.0), 2);
  Space X(m, Weight::constant(1.0, 1, 2.0));
  CaseIISpec spec;
  spec.r = 3.0;

  for (double eps : {0.0, 0.3}) {
    spec.eps = eps;
    CHECK(energy_case2(X, Eigen::VectorXd::Zero(3), spec) == 0.0);
  }

  // lambda = 0, r = 3, center hat: I = 1 - 1/4
  Eigen::VectorXd hat = Eigen::VectorXd::Zero(3);
  hat[1] = 1.0;
  spec.lambda = 0.0;
  spec.eps = 0.0;
  CHECK(energy_case2(X, hat, spec) == doctest::Approx(0.75).epsilon(1e-14));

  // the singular term only lowers the energy on nonnegative fields
  std::mt19937 rng(5);
  MeshPtr m16 = build_mesh(Domain::interval(-1.0, 1.0), 16);
  Space X16(m16, Weight::constant(1.0, 1, 2.0));
  for (double eps : {0.0, 0.25})
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd v = random_interior(*m16, rng, 0.0, 2.0);
      CaseIISpec a, b;
      a.eps = b.eps = eps;
      a.lambda = 0.0;
      b.lambda = 0.8;
      CHECK(energy_case2(X16, v, b) <= energy_case2(X16, v, a) + 1e-14);
    }
}

TEST_CASE("regularized energy is nondecreasing in eps on nonnegative fields") {
  std::mt19937 rng(9);
  MeshPtr m = build_mesh(Domain::interval(-1.0, 1.0), 16);
  Space X(m, Weight::constant(1.0, 1, 2.0));
  const double epses[] = {0.0, 0.1, 0.5, 2.0};
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd v = random_interior(*m, rng, 0.0, 2.0);
    double prev = -1e300;
    for (double eps : epses) {
      CaseIISpec spec;
      spec.eps = eps;
      double val = energy_case2(X, v, spec);
      CHECK(val >= prev - 1e-12);
      prev = val;
    }
  }
}

TEST_CASE("regularized gradient at the origin is the pure eps source") {
  MeshPtr m = build_mesh(Domain::interval(-1.0, 1.0), 8);
  Space X(m, Weight::constant(1.0, 1, 2.0));
  CaseIISpec spec;
  spec.lambda = 0.9;
  spec.q = 0.5;
  spec.eps = 0.3;
  Eigen::VectorXd g = gradient_case2(X, Eigen::VectorXd::Zero(m->n_nodes()), spec);
  for (int i = 0; i < m->n_nodes(); ++i) {
    if (m->boundary[i]) {
      CHECK(g[i] == 0.0);
    } else {
      double expect = -spec.lambda * std::pow(spec.eps, -spec.q) *
                      X.lumped_measure()[i];
      CHECK(g[i] == doctest::Approx(expect).epsilon(1e-13));
      CHECK(g[i] < 0.0);
    }
  }
}

TEST_CASE("regularized gradient agrees with central differences") {
  std::mt19937 rng(41);
  MeshPtr m = build_mesh(Domain::interval(-1.0, 1.0), 16);
  Space X(m, Weight::constant(1.0, 1, 2.0));
  const double h = 1e-6;
  for (double p : {1.5, 2.0, 3.0}) {
    CaseIISpec spec;
    spec.p = p;
    spec.q = 0.5;
    spec.r = 3.2;
    spec.lambda = 0.6;
    spec.eps = 0.4;
    Eigen::VectorXd u = random_interior(*m, rng, 0.2, 1.2);
    Eigen::VectorXd g = gradient_case2(X, u, spec);
    for (int trial = 0; trial < 4; ++trial) {
      Eigen::VectorXd v = random_interior(*m, rng, -1.0, 1.0);
      double fd = (energy_case2(X, u + h * v, spec) -
                   energy_case2(X, u - h * v, spec)) /
                  (2.0 * h);
      CHECK(std::fabs(fd - g.dot(v)) <= 1e-5 * (1.0 + std::fabs(g.dot(v))));
    }
  }
}

TEST_CASE("regularized gradient special cases") {
  MeshPtr m = build_mesh(Domain::interval(-1.0, 1.0), 8);
  Space X(m, Weight::constant(1.0, 1, 2.0));

  // eps = 0 requires positive interior values
  CaseIISpec spec;
  spec.eps = 0.0;
  CHECK_THROWS_AS(gradient_case2(X, Eigen::VectorXd::Zero(m->n_nodes()), spec),
                  std::domain_error);

  // lambda = 0 reduces to Dirichlet gradient minus the r-power load
  std::mt19937 rng(2);
  Eigen::VectorXd u = random_interior(*m, rng, 0.1, 1.0);
  spec.lambda = 0.0;
  spec.r = 3.0;
  spec.p = 2.0;
  Eigen::VectorXd g = gradient_case2(X, u, spec);
  Eigen::VectorXd pow_r = u.array().pow(3.0);
  Eigen::VectorXd ref = X.dirichlet_gradient(u, 2.0) - X.load_lumped(pow_r);
  CHECK((g - ref).cwiseAbs().maxCoeff() <= 1e-14);
}
