#include "spl/eigenpair.hpp"

#include <cmath>
#include <limits>

#include "spl/solver.hpp"

namespace spl {

namespace {

constexpr double kPi = 3.14159265358979323846;

// positive starting profile vanishing on the boundary
Eigen::VectorXd initial_profile(const Mesh& m) {
  Eigen::VectorXd u(m.n_nodes());
  const Domain& dom = m.domain;
  for (int i = 0; i < m.n_nodes(); ++i) {
    if (m.boundary[i]) {
      u[i] = 0.0;
      continue;
    }
    switch (dom.kind) {
      case Domain::Kind::Interval:
        u[i] = std::sin(kPi * (m.nodes(i, 0) - dom.a) / (dom.b - dom.a));
        break;
      case Domain::Kind::Rect:
        u[i] = std::sin(kPi * (m.nodes(i, 0) - dom.ax) / (dom.bx - dom.ax)) *
               std::sin(kPi * (m.nodes(i, 1) - dom.ay) / (dom.by - dom.ay));
        break;
      default: {  // disk: torsion-like bump
        double dx = m.nodes(i, 0) - dom.center[0];
        double dy = m.nodes(i, 1) - dom.center[1];
        double rr = (dx * dx + dy * dy) / (dom.radius * dom.radius);
        u[i] = 1.0 - rr;
        break;
      }
    }
    if (u[i] < 0.0) u[i] = 0.0;
  }
  return u;
}

}  // namespace

EigenPair first_eigenpair(const Space& X, double p, const EigenOptions& opt) {
  EigenPair out;
  const Mesh& msh = X.mesh();

  Eigen::VectorXd u = initial_profile(msh);
  double nrm = X.lpw_norm(u, p);
  if (!(nrm > 0.0)) throw solver::SolveError("eigenpair: degenerate starting profile");
  u /= nrm;

  solver::LinearStiffness K2(X);
  auto quotient = [&](const Eigen::VectorXd& v, double* denom_norm) {
    double dn = X.lpw_norm(v, p);
    *denom_norm = dn;
    if (!(dn > 0.0)) return std::numeric_limits<double>::infinity();
    return std::pow(X.seminorm(v, p) / dn, p);
  };

  double R = std::pow(X.seminorm(u, p), p);  // denominator is 1 after normalization
  double res = std::numeric_limits<double>::infinity();
  double res_best = res;
  double t_init = 1.0;
  int stall = 0;

  for (int it = 0; it < opt.max_iter; ++it) {
    out.iterations = it;
    Eigen::VectorXd g =
        p * X.dirichlet_gradient(u, p) - R * X.lpw_norm_gradient(u, p);
    res = g.lpNorm<Eigen::Infinity>() / (1.0 + R);
    if (res <= opt.tol_grad) break;
    // the quotient stalls quadratically while the iterate is still moving, so
    // a shrinking residual also counts as progress
    if (res < 0.95 * res_best) stall = 0;
    res_best = std::min(res_best, res);

    Eigen::VectorXd d = -K2.solve(g);
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      d = -g;
      slope = -g.squaredNorm();
    }

    double R_prev = R;
    double t = t_init;
    bool accepted = false;

    if (p == 2.0) {
      // R(u + t d) is a ratio of quadratics; minimize it exactly. With the
      // denominator normalized to 1 the stationarity condition is
      //   (a1 - a0 b1) + (a2 - a0 b2) t + (a2 b1 - a1 b2) t^2 = 0.
      double a0 = R;
      double a2 = std::pow(X.seminorm(d, 2.0), 2.0);
      double a1 = 0.5 * (std::pow(X.seminorm(u + d, 2.0), 2.0) - a0 - a2);
      double b2 = std::pow(X.lpw_norm(d, 2.0), 2.0);
      double b1 = 0.5 * (std::pow(X.lpw_norm(u + d, 2.0), 2.0) - 1.0 - b2);
      double c0 = a1 - a0 * b1, c1 = a2 - a0 * b2, c2 = a2 * b1 - a1 * b2;
      double roots[2];
      int nroots = 0;
      if (std::abs(c2) > 1e-300) {
        double disc = c1 * c1 - 4.0 * c2 * c0;
        if (disc >= 0.0) {
          double sq = std::sqrt(disc);
          roots[nroots++] = (-c1 + sq) / (2.0 * c2);
          roots[nroots++] = (-c1 - sq) / (2.0 * c2);
        }
      } else if (std::abs(c1) > 1e-300) {
        roots[nroots++] = -c0 / c1;
      }
      for (int k = 0; k < nroots; ++k) {
        double tk = roots[k];
        if (!(tk > 0.0) || !std::isfinite(tk)) continue;
        Eigen::VectorXd v = u + tk * d;
        double dn;
        double Rv = quotient(v, &dn);
        if (Rv < R) {
          u = v / dn;
          R = Rv;
          accepted = true;
        }
      }
    }

    if (!accepted) {
      const Eigen::VectorXd u0 = u;
      const double R0 = R;
      for (int ls = 0; ls < 60; ++ls) {
        Eigen::VectorXd v = u0 + t * d;
        double dn;
        double Rv = quotient(v, &dn);
        if (Rv <= R0 + 1e-4 * t * slope) {
          u = v / dn;
          R = Rv;
          t_init = std::min(t * 2.0, 1e6);
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (accepted && p != 2.0) {
        // one parabolic refinement through (0, t/2, t): the backtracking step
        // alone lets the step size collapse near stationarity
        double dnh;
        double Rh = quotient(u0 + 0.5 * t * d, &dnh);
        double denom = R - 2.0 * Rh + R0;
        if (denom > 0.0) {
          double ts = t * (0.25 * (R0 - R) / denom + 0.5);
          if (ts > 0.0 && std::isfinite(ts)) {
            double dns;
            Eigen::VectorXd vs = u0 + ts * d;
            double Rs = quotient(vs, &dns);
            if (Rs < R) {
              u = vs / dns;
              R = Rs;
            }
          }
        }
        if (Rh < R) {
          u = (u0 + 0.5 * t * d) / dnh;
          R = Rh;
        }
      }
    }

    // nodal absolute value never raises the quotient in 1d and rarely in 2d;
    // apply it only when it helps, which also keeps the iterate nonnegative
    Eigen::VectorXd a = u.cwiseAbs();
    double dn;
    double Ra = quotient(a, &dn);
    if (Ra < R) {
      u = a / dn;
      R = Ra;
    }

    if (!accepted) {
      t_init = std::max(t_init * 0.25, 1e-12);
      ++stall;
    } else {
      stall = std::abs(R_prev - R) <= opt.tol_rq * std::max(1.0, R) ? stall + 1 : 0;
    }
    if (stall >= 12) break;
  }

  // Quotient comparisons bottom out at a residual of roughly sqrt(machine
  // epsilon): improvements in R fall below roundoff long before the iterate
  // stops moving. Finish with inverse power steps, solving the convex system
  //   N'(v) = R D'(u)
  // by damped Newton; for p = 2 this is exact inverse iteration.
  {
    auto residual_at = [&](const Eigen::VectorXd& v, double Rv) {
      Eigen::VectorXd gv =
          p * X.dirichlet_gradient(v, p) - Rv * X.lpw_norm_gradient(v, p);
      return gv.lpNorm<Eigen::Infinity>() / (1.0 + Rv);
    };
    res = residual_at(u, R);
    for (int outer = 0; outer < 40 && res > opt.tol_grad; ++outer) {
      Eigen::VectorXd rhs = R * X.lpw_norm_gradient(u, p);
      Eigen::VectorXd v = u;
      Eigen::VectorXd G = p * X.dirichlet_gradient(v, p) - rhs;
      double gn = G.lpNorm<Eigen::Infinity>();
      for (int nit = 0; nit < 30 && gn > 1e-14 * (1.0 + R); ++nit) {
        Eigen::SparseMatrix<double> H = X.dirichlet_hessian(v, p);
        H *= p;
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(H);
        if (ldlt.info() != Eigen::Success) break;
        Eigen::VectorXd dlt = ldlt.solve(-G);
        double t = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 30; ++ls) {
          Eigen::VectorXd vt = v + t * dlt;
          Eigen::VectorXd Gt = p * X.dirichlet_gradient(vt, p) - rhs;
          double gnt = Gt.lpNorm<Eigen::Infinity>();
          if (gnt < gn * (1.0 - 1e-4 * t)) {
            v = vt;
            G = Gt;
            gn = gnt;
            moved = true;
            break;
          }
          t *= 0.5;
        }
        if (!moved) break;
      }
      double dn;
      double Rv = quotient(v, &dn);
      if (!std::isfinite(Rv) || !(dn > 0.0)) break;
      v /= dn;
      double res_v = residual_at(v, Rv);
      if (res_v >= res * 0.99) break;
      u = v;
      R = Rv;
      res = res_v;
    }
  }

  // recompute the scaled critical-point residual at the final iterate
  Eigen::VectorXd g = p * X.dirichlet_gradient(u, p) - R * X.lpw_norm_gradient(u, p);
  res = g.lpNorm<Eigen::Infinity>() / (1.0 + R);

  double umax = u.lpNorm<Eigen::Infinity>();
  out.e1 = u / umax;
  out.lambda1 = R;
  out.residual = res;
  out.converged = res <= opt.tol_grad;
  return out;
}

}  // namespace spl
