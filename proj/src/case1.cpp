#include "spl/case1.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "spl/solver.hpp"

namespace spl {

namespace {

// middle half of the domain, the positivity witness region
bool in_central_half(const Mesh& m, int i) {
  const Domain& d = m.domain;
  switch (d.kind) {
    case Domain::Kind::Interval: {
      double c = 0.5 * (d.a + d.b), q = 0.25 * (d.b - d.a);
      return std::abs(m.nodes(i, 0) - c) <= q + 1e-12;
    }
    case Domain::Kind::Rect: {
      double cx = 0.5 * (d.ax + d.bx), qx = 0.25 * (d.bx - d.ax);
      double cy = 0.5 * (d.ay + d.by), qy = 0.25 * (d.by - d.ay);
      return std::abs(m.nodes(i, 0) - cx) <= qx + 1e-12 &&
             std::abs(m.nodes(i, 1) - cy) <= qy + 1e-12;
    }
    default: {
      double dx = m.nodes(i, 0) - d.center[0], dy = m.nodes(i, 1) - d.center[1];
      return std::sqrt(dx * dx + dy * dy) <= 0.5 * d.radius + 1e-12;
    }
  }
}

double min_over_central_half(const Mesh& m, const Eigen::VectorXd& v) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m.n_nodes(); ++i)
    if (!m.boundary[i] && in_central_half(m, i)) best = std::min(best, v[i]);
  return best;
}

// interior weak defect of a candidate subsolution at scale s:
//   a(s e1, phi_i) - lambda f(s e1_i) (s e1_i)^{-q} m_i
Eigen::VectorXd sub_defect(const Space& X, const Eigen::VectorXd& e1, double s,
                           const CaseISpec& spec) {
  Eigen::VectorXd d = X.dirichlet_gradient(s * e1, spec.p);
  const Eigen::VectorXd& m = X.lumped_measure();
  for (int i : X.mesh().interior) {
    double t = s * e1[i];
    d[i] -= spec.lambda * spec.f(t) * std::pow(t, -spec.q) * m[i];
  }
  return d;
}

Eigen::VectorXd super_defect(const Space& X, const Eigen::VectorXd& v0, double A,
                             const CaseISpec& spec) {
  Eigen::VectorXd d = X.dirichlet_gradient(A * v0, spec.p);
  const Eigen::VectorXd& m = X.lumped_measure();
  for (int i : X.mesh().interior) {
    double t = A * v0[i];
    d[i] -= spec.lambda * spec.f(t) * std::pow(t, -spec.q) * m[i];
  }
  return d;
}

double max_interior(const Mesh& m, const Eigen::VectorXd& v) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i : m.interior) best = std::max(best, v[i]);
  return best;
}

double min_interior_of(const Mesh& m, const Eigen::VectorXd& v) {
  double best = std::numeric_limits<double>::infinity();
  for (int i : m.interior) best = std::min(best, v[i]);
  return best;
}

}  // namespace

PureSingular solve_pure_singular(const Space& X, double q, double p, double tol,
                                 int max_levels) {
  PureSingular out;
  out.v0 = Field::zeros(X.mesh_ptr());

  solver::Options sopt;
  Eigen::VectorXd prev;
  for (int j = 1; j <= max_levels; ++j) {
    double eps = std::ldexp(1.0, -j);
    solver::Source src{
        [eps, q](double t) { return std::pow(std::max(t, 0.0) + eps, -q); },
        [eps, q](double t) {
          return t >= 0.0 ? -q * std::pow(t + eps, -q - 1.0) : 0.0;
        }};
    Eigen::VectorXd seed;
    if (prev.size() == 0) {
      seed = solver::constant_load(X, p, std::pow(eps, -q), sopt).u;
    } else {
      seed = prev;
    }
    solver::Result r = solver::newton_semilinear(X, p, src, seed, sopt);
    if (!r.converged)
      throw solver::SolveError("pure singular profile: level " + std::to_string(j) +
                               " failed to converge");
    out.log.eps.push_back(eps);
    out.log.residuals.push_back(r.residual);
    double diff = prev.size() == 0 ? X.seminorm(r.u, p)
                                   : X.seminorm(r.u - prev, p);
    out.log.diffs.push_back(diff);
    prev = r.u;
    out.eps_final = eps;
    if (j > 1 && diff < tol) break;
  }

  out.v0.values = prev;
  out.v0.enforce_zero_boundary();
  out.min_interior = min_interior_of(X.mesh(), prev);
  return out;
}

Subsolution construct_subsolution(const Space& X, const EigenPair& ep,
                                  const CaseISpec& spec, double defect_tol) {
  Subsolution out;
  out.field = Field::zeros(X.mesh_ptr());
  for (double a = 1.0; a >= 1e-12; a *= 0.5) {
    Eigen::VectorXd d = sub_defect(X, ep.e1, a, spec);
    double dmax = max_interior(X.mesh(), d);
    if (dmax <= defect_tol) {
      out.a = a;
      out.defect_max = dmax;
      out.field.values = a * ep.e1;
      out.field.enforce_zero_boundary();
      return out;
    }
  }
  throw solver::SolveError("subsolution: no admissible scale above 1e-12");
}

Supersolution construct_supersolution(const Space& X, const PureSingular& ps,
                                      const CaseISpec& spec, double defect_tol) {
  Supersolution out;
  out.field = Field::zeros(X.mesh_ptr());
  const Eigen::VectorXd& v0 = ps.v0.values;
  double vmax = v0.maxCoeff();
  if (!(vmax > 0.0))
    throw solver::SolveError("supersolution: singular profile is not positive");
  double gp = spec.q + spec.p - 1.0;

  for (double A = 1.0; A <= 1e12; A *= 2.0) {
    double t = A * vmax;
    bool scalar_ok =
        spec.f(t) / std::pow(t, gp) <= 1.0 / (spec.lambda * std::pow(vmax, gp));
    if (!scalar_ok) continue;
    Eigen::VectorXd d = super_defect(X, v0, A, spec);
    double dmin = min_interior_of(X.mesh(), d);
    if (dmin >= -defect_tol) {
      out.A = A;
      out.defect_min = dmin;
      out.field.values = A * v0;
      out.field.enforce_zero_boundary();
      return out;
    }
  }
  throw solver::SolveError("supersolution: no admissible scale below 1e12");
}

OrderInterval order_interval(const Space& X, Subsolution sub, const Supersolution& sup,
                             const CaseISpec& spec, double defect_tol) {
  OrderInterval out;
  const Mesh& m = X.mesh();
  double a = sub.a;
  Eigen::VectorXd e1 = sub.field.values / sub.a;

  auto ordered = [&](double s) {
    for (int i : m.interior)
      if (s * e1[i] > sup.field.values[i]) return false;
    return true;
  };
  while (!ordered(a)) {
    a *= 0.5;
    if (a < 1e-14) throw solver::SolveError("order interval: scales failed to order");
  }
  if (a != sub.a) {
    // shrinking the subsolution scale keeps its defect certificate valid;
    // recheck anyway
    Eigen::VectorXd d = sub_defect(X, e1, a, spec);
    if (max_interior(m, d) > defect_tol)
      throw solver::SolveError("order interval: rescaled subsolution lost its defect bound");
  }

  out.a = a;
  out.A = sup.A;
  out.lower = Field::zeros(X.mesh_ptr());
  out.lower.values = a * e1;
  out.lower.enforce_zero_boundary();
  out.upper = sup.field;
  out.c_K = min_over_central_half(m, out.lower.values);
  return out;
}

IntervalMinimize minimize_over_interval(const Space& X, const CaseISpec& spec,
                                        const OrderInterval& interval,
                                        const IntervalMinimizeOptions& opt) {
  IntervalMinimize out;
  const Mesh& m = X.mesh();
  const Eigen::VectorXd& lo = interval.lower.values;
  const Eigen::VectorXd& hi = interval.upper.values;

  auto clamp_box = [&](Eigen::VectorXd v) {
    for (int i = 0; i < v.size(); ++i) v[i] = std::min(std::max(v[i], lo[i]), hi[i]);
    return v;
  };

  Eigen::VectorXd u = clamp_box(0.5 * (lo + hi));
  double E = energy_case1(X, u, spec);
  out.energy_log.push_back(E);

  const Eigen::VectorXd& lm = X.lumped_measure();
  double pg = std::numeric_limits<double>::infinity();
  double t_init = 1.0;
  int last_polish = -10;

  auto count_clamped = [&](const Eigen::VectorXd& v) {
    double span = (hi - lo).lpNorm<Eigen::Infinity>();
    double slack = 1e-10 * std::max(1.0, span);
    int c = 0;
    for (int i : m.interior)
      if (v[i] <= lo[i] + slack || v[i] >= hi[i] - slack) ++c;
    return c;
  };

  for (int it = 0; it < opt.max_iter; ++it) {
    out.iterations = it;
    Eigen::VectorXd g = gradient_case1(X, u, spec);
    Eigen::VectorXd proj = u - clamp_box(u - g);
    pg = proj.lpNorm<Eigen::Infinity>();
    if (pg <= opt.tol) break;

    // free minimizers satisfy the unconstrained critical-point system; polish
    // with the semilinear Newton solver once no bound is active
    if (count_clamped(u) == 0 && it - last_polish >= 10) {
      last_polish = it;
      solver::Source src{
          [&spec](double t) {
            if (!(t > 0.0)) throw std::domain_error("nonpositive source argument");
            return spec.lambda * spec.f(t) * std::pow(t, -spec.q);
          },
          [&spec](double t) {
            if (!(t > 0.0)) return 0.0;
            double h = 1e-7 * std::max(1.0, t);
            auto gs = [&](double s) {
              return spec.lambda * spec.f(s) * std::pow(s, -spec.q);
            };
            return (gs(t + h) - gs(t)) / h;
          }};
      try {
        solver::Result nr = solver::newton_semilinear(X, spec.p, src, u);
        Eigen::VectorXd w = clamp_box(nr.u);
        double Ew = energy_case1(X, w, spec);
        if (nr.converged && Ew <= E) {
          u = w;
          E = Ew;
          out.energy_log.push_back(E);
          g = gradient_case1(X, u, spec);
          proj = u - clamp_box(u - g);
          pg = proj.lpNorm<Eigen::Infinity>();
          if (pg <= opt.tol) break;
        }
      } catch (const std::exception&) {
        // keep the projected descent
      }
    }

    // diagonal metric: Dirichlet Hessian diagonal plus the source curvature
    Eigen::SparseMatrix<double> H = X.dirichlet_hessian(u, spec.p);
    Eigen::VectorXd D = H.diagonal();
    for (int i : m.interior) {
      double t = u[i];
      double h = 1e-6 * std::max(1.0, std::abs(t));
      auto gs = [&](double s) { return spec.f(s) * std::pow(s, -spec.q); };
      // one-sided slope keeps the argument positive
      double slope = (gs(t + h) - gs(t)) / h;
      D[i] += std::max(0.0, -spec.lambda * slope) * lm[i];
    }
    for (int i = 0; i < D.size(); ++i) D[i] = std::max(D[i], 1e-14);

    Eigen::VectorXd step = g.cwiseQuotient(D);
    double t = t_init;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      Eigen::VectorXd trial = clamp_box(u - t * step);
      double Et = energy_case1(X, trial, spec);
      double pred = g.dot(trial - u);  // <= 0 for a projected descent step
      if (Et <= E + 1e-4 * pred) {
        u = trial;
        E = Et;
        out.energy_log.push_back(E);
        t_init = std::min(t * 2.0, 1e3);
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // projected step stalled at line-search floor
  }

  out.u = Field::zeros(X.mesh_ptr());
  out.u.values = u;
  out.u.enforce_zero_boundary();
  out.energy = E;
  out.projected_grad_norm = pg;
  out.converged = pg <= opt.tol;
  double span = (hi - lo).lpNorm<Eigen::Infinity>();
  double slack = 1e-10 * std::max(1.0, span);
  for (int i : m.interior)
    if (u[i] <= lo[i] + slack || u[i] >= hi[i] - slack) ++out.clamped_nodes;
  return out;
}

Case1Result solve_case1(const Space& X, const CaseISpec& spec, const Case1Options& opt) {
  Case1Result out;
  out.f1 = validate_f1(spec.f, spec.q, spec.p);
  if (!out.f1.ok)
    throw std::invalid_argument("nonlinearity rejected: " + out.f1.diagnostics);
  if (!(spec.q > 0.0 && spec.q < 1.0))
    throw std::invalid_argument("violated bound 0 < q < 1");
  if (!(spec.lambda > 0.0)) throw std::invalid_argument("violated bound lambda > 0");

  out.eigen = first_eigenpair(X, spec.p, opt.eigen);
  out.pure = solve_pure_singular(X, spec.q, spec.p, opt.continuation_tol);
  Subsolution sub = construct_subsolution(X, out.eigen, spec, opt.defect_tol);
  Supersolution sup = construct_supersolution(X, out.pure, spec, opt.defect_tol);
  out.interval = order_interval(X, sub, sup, spec, opt.defect_tol);
  out.sub_defect_max =
      max_interior(X.mesh(), sub_defect(X, out.eigen.e1, out.interval.a, spec));
  out.sup_defect_min = sup.defect_min;
  out.minimize = minimize_over_interval(X, spec, out.interval, opt.minimize);

  const Mesh& m = X.mesh();
  const Eigen::VectorXd& u = out.minimize.u.values;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(X.n());
  for (int i : m.interior)
    g[i] = spec.lambda * spec.f(u[i]) * std::pow(u[i], -spec.q);
  out.weak_res = X.weak_residual(u, g, spec.p);
  out.min_over_box = min_over_central_half(m, u);
  out.interior_nodes = static_cast<int>(m.interior.size());
  double span = (out.interval.upper.values - out.interval.lower.values)
                    .lpNorm<Eigen::Infinity>();
  double slack = 1e-10 * std::max(1.0, span);
  for (int i : m.interior)
    if (u[i] > out.interval.lower.values[i] + slack &&
        u[i] < out.interval.upper.values[i] - slack)
      ++out.strict_interior_nodes;
  return out;
}

}  // namespace spl
