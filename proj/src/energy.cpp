#include "spl/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spl/quadrature.hpp"

namespace spl {

NonlinearityF NonlinearityF::affine(double c0, double c1) {
  NonlinearityF f;
  f.kind = FKind::Affine;
  f.c0 = c0;
  f.c1 = c1;
  return f;
}

NonlinearityF NonlinearityF::power_shift(double c0, double beta) {
  NonlinearityF f;
  f.kind = FKind::PowerShift;
  f.c0 = c0;
  f.beta = beta;
  return f;
}

NonlinearityF NonlinearityF::tabulated(std::vector<double> ts, std::vector<double> fs) {
  if (ts.size() < 2 || ts.size() != fs.size())
    throw std::invalid_argument("nonlinearity: table needs at least two samples");
  for (size_t i = 1; i < ts.size(); ++i)
    if (!(ts[i] > ts[i - 1]))
      throw std::invalid_argument("nonlinearity: table abscissae must increase");
  NonlinearityF f;
  f.kind = FKind::Tabulated;
  f.ts = std::move(ts);
  f.fs = std::move(fs);
  return f;
}

double NonlinearityF::operator()(double t) const {
  switch (kind) {
    case FKind::Affine:
      return c0 + c1 * t;
    case FKind::PowerShift:
      return c0 + (t <= 0.0 ? 0.0 : std::pow(t, beta));
    case FKind::Tabulated: {
      if (t <= ts.front()) {
        // extend by the first slope, clamped at 0 from below
        double sl = (fs[1] - fs[0]) / (ts[1] - ts[0]);
        return std::max(0.0, fs[0] + sl * (t - ts[0]));
      }
      if (t >= ts.back()) {
        size_t n = ts.size();
        double sl = (fs[n - 1] - fs[n - 2]) / (ts[n - 1] - ts[n - 2]);
        return fs[n - 1] + sl * (t - ts[n - 1]);
      }
      auto it = std::upper_bound(ts.begin(), ts.end(), t);
      size_t i = it - ts.begin();
      double u = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
      return (1.0 - u) * fs[i - 1] + u * fs[i];
    }
  }
  return 0.0;
}

F1Validation validate_f1(const NonlinearityF& f, double q, double p, double t_min,
                         double t_max) {
  F1Validation out;
  if (!(q > 0.0 && q < 1.0)) {
    out.diagnostics = "q outside (0,1)";
    return out;
  }
  double f0 = f(0.0);
  if (!(f0 > 0.0)) {
    out.diagnostics = "f(0) > 0 violated (f(0) = " + std::to_string(f0) + ")";
    return out;
  }

  const int per_decade = 10;
  int decades = static_cast<int>(std::round(std::log10(t_max / t_min)));
  std::vector<double> grid;
  for (int i = 0; i <= decades * per_decade; ++i)
    grid.push_back(t_min * std::pow(10.0, static_cast<double>(i) / per_decade));

  for (size_t i = 1; i < grid.size(); ++i) {
    double a = f(grid[i - 1]), b = f(grid[i]);
    if (b < a * (1.0 - 1e-12) - 1e-300) {
      std::ostringstream ss;
      ss << "monotonicity violated near t = " << grid[i];
      out.diagnostics = ss.str();
      return out;
    }
  }

  // decay of f(t)/t^{q+p-1} over the last two decades
  double growth = q + p - 1.0;
  double t0 = t_max / 100.0;
  double prev = f(t0) / std::pow(t0, growth);
  for (int i = 1; i <= 2 * per_decade; ++i) {
    double t = t0 * std::pow(10.0, static_cast<double>(i) / per_decade);
    double ratio = f(t) / std::pow(t, growth);
    if (ratio > prev * (1.0 + 1e-12)) {
      out.diagnostics = "decay of f(t)/t^{q+p-1} violated in the last two decades";
      return out;
    }
    prev = ratio;
  }
  if (!(f(t_max) / std::pow(t_max, growth) < f(t0) / std::pow(t0, growth))) {
    out.diagnostics = "f(t)/t^{q+p-1} fails to decrease toward 0";
    return out;
  }

  // blow-up of f(t)/t^q as t -> 0: with f(0) > 0 the admissible rate is t^{-q},
  // so the fitted log-log slope over the first two decades must stay <= -q/2
  double r0 = f(t_min) / std::pow(t_min, q);
  double t1 = t_min * 100.0;
  double r1 = f(t1) / std::pow(t1, q);
  double slope = std::log(r1 / r0) / std::log(t1 / t_min);
  if (!(slope <= -0.5 * q)) {
    std::ostringstream ss;
    ss << "blow-up of f(t)/t^q as t -> 0 violated (observed slope " << slope << ")";
    out.diagnostics = ss.str();
    return out;
  }

  out.ok = true;
  return out;
}

double F_primitive(double t, const NonlinearityF& f, double q) {
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("F_primitive: q outside (0,1)");
  if (t <= 0.0) return 0.0;
  // s = sigma^{1/(1-q)} turns \int_0^t f(s) s^{-q} ds into
  // 1/(1-q) \int_0^{t^{1-q}} f(sigma^{1/(1-q)}) dsigma
  double expo = 1.0 / (1.0 - q);
  double upper = std::pow(t, 1.0 - q);
  auto integrand = [&](double sigma) { return f(std::pow(sigma, expo)); };
  double val = quad::integrate_graded(integrand, 0.0, upper, 0.0, 24, 8, 8);
  return val * expo;
}

double energy_case1(const Space& X, const Eigen::VectorXd& u, const CaseISpec& spec) {
  double dir = X.dirichlet_energy(u, spec.p);
  Eigen::VectorXd Fu(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i)
    Fu[i] = F_primitive(u[i], spec.f, spec.q);
  return dir - spec.lambda * X.integral_lumped(Fu);
}

Eigen::VectorXd gradient_case1(const Space& X, const Eigen::VectorXd& u,
                               const CaseISpec& spec) {
  Eigen::VectorXd g = X.dirichlet_gradient(u, spec.p);
  const Mesh& m = X.mesh();
  const Eigen::VectorXd& lm = X.lumped_measure();
  for (int i : m.interior) {
    double t = u[i];
    if (!(t > 0.0))
      throw std::domain_error("gradient: singular source needs positive value at node " +
                              std::to_string(i));
    g[i] -= spec.lambda * spec.f(t) * std::pow(t, -spec.q) * lm[i];
  }
  return g;
}

double energy_case2(const Space& X, const Eigen::VectorXd& u, const CaseIISpec& spec) {
  double dir = X.dirichlet_energy(u, spec.p);
  double q = spec.q, eps = spec.eps;
  double eps_pow = eps > 0.0 ? std::pow(eps, 1.0 - q) : 0.0;
  Eigen::VectorXd sing(u.size()), grow(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    double up = std::max(0.0, u[i]);
    sing[i] = std::pow(up + eps, 1.0 - q) - eps_pow;
    grow[i] = std::pow(up, spec.r + 1.0);
  }
  return dir - spec.lambda / (1.0 - q) * X.integral_lumped(sing) -
         X.integral_lumped(grow) / (spec.r + 1.0);
}

Eigen::VectorXd gradient_case2(const Space& X, const Eigen::VectorXd& u,
                               const CaseIISpec& spec) {
  Eigen::VectorXd g = X.dirichlet_gradient(u, spec.p);
  const Mesh& m = X.mesh();
  const Eigen::VectorXd& lm = X.lumped_measure();
  for (int i : m.interior) {
    double up = std::max(0.0, u[i]);
    double sing;
    if (spec.eps > 0.0) {
      sing = std::pow(up + spec.eps, -spec.q);
    } else {
      if (up <= 1e-14)
        throw std::domain_error(
            "gradient: singular source needs positive value at node " +
            std::to_string(i));
      sing = std::pow(up, -spec.q);
    }
    g[i] -= (spec.lambda * sing + std::pow(up, spec.r)) * lm[i];
  }
  return g;
}

}  // namespace spl
