#include "spl/case2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "spl/solver.hpp"

namespace spl {

namespace {

// Sampled candidate fields vanishing on the boundary: the eigenfunction,
// smoothed Gaussian noise, raw noise, and their absolute values.
template <class F>
void for_each_sample(const Space& X, const Eigen::VectorXd& e1,
                     const solver::LinearStiffness& K2, int samples, uint64_t seed,
                     F&& fn) {
  const Mesh& m = X.mesh();
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> nd;
  fn(e1);
  Eigen::VectorXd z(X.n());
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < X.n(); ++i) z[i] = m.boundary[i] ? 0.0 : nd(rng);
    Eigen::VectorXd v = (s % 2 == 0) ? Eigen::VectorXd(K2.solve(X.load_lumped(z))) : z;
    fn(v);
    Eigen::VectorXd a = v.cwiseAbs();
    fn(a);
  }
}

// lumped \int (v^+)^{r+1}
double plus_power_integral(const Space& X, const Eigen::VectorXd& v, double expo) {
  Eigen::VectorXd g(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    g[i] = v[i] > 0.0 ? std::pow(v[i], expo) : 0.0;
  return X.integral_lumped(g);
}

double abs_power_integral(const Space& X, const Eigen::VectorXd& v, double expo) {
  Eigen::VectorXd g(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) g[i] = std::pow(std::abs(v[i]), expo);
  return X.integral_lumped(g);
}

// sup-norm of the projected gradient covector for the constraint v >= 0
double projected_sup(const Eigen::VectorXd& u, const Eigen::VectorXd& g) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    double r = u[i] - std::max(u[i] - g[i], 0.0);
    s = std::max(s, std::abs(r));
  }
  return s;
}

solver::Source case2_source(const CaseIISpec& spec) {
  double lambda = spec.lambda, q = spec.q, r = spec.r, eps = spec.eps;
  return solver::Source{
      [lambda, q, r, eps](double t) {
        double up = std::max(t, 0.0);
        return lambda * std::pow(up + eps, -q) + std::pow(up, r);
      },
      [lambda, q, r, eps](double t) {
        if (t <= 0.0) return 0.0;
        return -lambda * q * std::pow(t + eps, -q - 1.0) + r * std::pow(t, r - 1.0);
      }};
}

}  // namespace

MPFrame mp_frame(double M, double p, double r, double k) {
  if (!(M > 0.0)) throw std::invalid_argument("mp_frame: violated bound M > 0");
  if (!(p > 1.0)) throw std::invalid_argument("mp_frame: violated bound p > 1");
  if (!(r + 1.0 > p)) throw std::invalid_argument("mp_frame: violated bound r > p - 1");
  if (!(k > 0.0)) throw std::invalid_argument("mp_frame: violated bound k > 0");
  MPFrame f;
  double expo = 1.0 / (r + 1.0 - p);
  double B = std::pow((r + 1.0) / (p * M), expo);
  f.R = k * B;
  f.rho = std::pow(B, p) * (std::pow(k, p) - M * std::pow(k, r + 1.0)) / (2.0 * p);
  f.k_crit = std::pow(1.0 / M, expo);
  return f;
}

MPGeometry mp_geometry(const Space& X, double p, double q, double r,
                       const EmbeddingExponents& emb, const EigenPair& ep,
                       const MPGeometryOptions& opt) {
  MPGeometry geo;
  double vol = X.mesh().domain.measure();
  if (emb.p_s_star_finite) {
    double z = emb.p_s_star / (r + 1.0);
    if (!(z > 1.0))
      throw std::invalid_argument("violated bound r + 1 < p_s_star");
    geo.l = std::pow(vol, (z - 1.0) / z);
  } else {
    geo.l = vol;
  }

  solver::LinearStiffness K2(X);
  double ratio_max = 0.0;
  for_each_sample(X, ep.e1, K2, opt.embed_samples, opt.seed, [&](const Eigen::VectorXd& v) {
    double sn = X.seminorm(v, p);
    if (!(sn > 0.0)) return;
    double num = plus_power_integral(X, v, r + 1.0);
    ratio_max = std::max(ratio_max, num / std::pow(sn, r + 1.0));
  });
  geo.C_embed = 1.2 * ratio_max / geo.l;

  double M = geo.C_embed * geo.l;
  MPFrame probe = mp_frame(M, p, r, 1.0);
  geo.k = opt.k < probe.k_crit ? opt.k : 0.5 * probe.k_crit;
  MPFrame f = mp_frame(M, p, r, geo.k);
  geo.k_crit = f.k_crit;
  geo.R = f.R;
  geo.rho = f.rho;

  // sphere samples feed both the singular-term sup and the lambda-free floor
  double f_sup = 0.0;
  double I0_min = std::numeric_limits<double>::infinity();
  for_each_sample(X, ep.e1, K2, opt.sphere_samples, opt.seed + 1,
                  [&](const Eigen::VectorXd& v) {
                    double sn = X.seminorm(v, p);
                    if (!(sn > 0.0)) return;
                    Eigen::VectorXd w = (geo.R / sn) * v;
                    f_sup = std::max(f_sup,
                                     abs_power_integral(X, w, 1.0 - q) / (1.0 - q));
                    double I0 = std::pow(geo.R, p) / p -
                                plus_power_integral(X, w, r + 1.0) / (r + 1.0);
                    I0_min = std::min(I0_min, I0);
                  });
  geo.sphere_f_sup = f_sup;
  geo.sphere_I0_min = I0_min;
  geo.Lambda_est = f_sup > 0.0 ? geo.rho / f_sup : 0.0;

  // doubling scale with a strictly negative lambda-free level beyond the sphere
  Eigen::VectorXd ehat = ep.e1 / X.seminorm(ep.e1, p);
  double T = std::max(2.0 * geo.R, 1.0);
  for (int it = 0; it < 200; ++it) {
    double I0 = std::pow(T, p) / p -
                plus_power_integral(X, (T * ehat).eval(), r + 1.0) / (r + 1.0);
    if (I0 < -1.0) break;
    T *= 2.0;
  }
  geo.T = T;
  return geo;
}

double sphere_min_sampled(const Space& X, const CaseIISpec& spec, const MPGeometry& geo,
                          const EigenPair& ep, int samples, uint64_t seed) {
  solver::LinearStiffness K2(X);
  double best = std::numeric_limits<double>::infinity();
  for_each_sample(X, ep.e1, K2, samples, seed + 2, [&](const Eigen::VectorXd& v) {
    double sn = X.seminorm(v, spec.p);
    if (!(sn > 0.0)) return;
    Eigen::VectorXd w = (geo.R / sn) * v;
    best = std::min(best, energy_case2(X, w, spec));
  });
  return best;
}

BallMinimize ball_minimizer(const Space& X, const CaseIISpec& spec, const MPGeometry& geo,
                            const EigenPair& ep, const DescentOptions& opt,
                            const Field* warm) {
  BallMinimize out;
  out.nu = Field::zeros(X.mesh_ptr());
  if (spec.lambda == 0.0) {
    out.converged = true;
    return out;
  }

  solver::LinearStiffness K2(X);
  double R = geo.R;
  auto clamp0 = [](Eigen::VectorXd v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = std::max(v[i], 0.0);
    return v;
  };
  auto into_ball = [&](Eigen::VectorXd v) {
    double sn = X.seminorm(v, spec.p);
    if (sn > R) v *= R / sn;
    return v;
  };

  Eigen::VectorXd u;
  if (warm != nullptr && warm->values.size() == X.n()) {
    u = into_ball(clamp0(warm->values));
  } else {
    Eigen::VectorXd ehat = ep.e1 / X.seminorm(ep.e1, spec.p);
    double bestE = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= 100; ++j) {
      double t = R * j / 100.0;
      double E = energy_case2(X, (t * ehat).eval(), spec);
      if (E < bestE) {
        bestE = E;
        u = t * ehat;
      }
    }
  }

  double E = energy_case2(X, u, spec);
  double t_init = 1.0;
  solver::Source src = case2_source(spec);
  double pg = std::numeric_limits<double>::infinity();

  for (int it = 0; it < opt.max_iter; ++it) {
    out.iterations = it;
    Eigen::VectorXd g = gradient_case2(X, u, spec);
    pg = projected_sup(u, g);
    double norm_u = X.seminorm(u, spec.p);
    bool interior_ball = norm_u < R * (1.0 - 1e-8);
    if (pg <= opt.tol && interior_ball) break;

    // polishing once the ball constraint is inactive and descent has slowed
    if (interior_ball && (pg <= 1e3 * opt.tol || it % 25 == 24)) {
      solver::Options nopt;
      nopt.tol = std::min(opt.tol, 1e-11);
      try {
        solver::Result nr = solver::newton_semilinear(X, spec.p, src, u, nopt);
        Eigen::VectorXd w = clamp0(nr.u);
        double Ew = energy_case2(X, w, spec);
        if (nr.converged && Ew <= E + 1e-12 && X.seminorm(w, spec.p) < R * (1.0 - 1e-9)) {
          u = w;
          E = Ew;
          g = gradient_case2(X, u, spec);
          pg = projected_sup(u, g);
          if (pg <= opt.tol) break;
        }
      } catch (const solver::SolveError&) {
        // keep descending
      }
    }

    Eigen::VectorXd d = -K2.solve(g);
    double t = t_init;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      Eigen::VectorXd trial = into_ball(clamp0(u + t * d));
      double pred = g.dot(trial - u);
      if (!(pred < 0.0)) break;  // projection blocked the direction
      double Et = energy_case2(X, trial, spec);
      if (Et <= E + 1e-4 * pred) {
        u = trial;
        E = Et;
        t_init = std::min(t * 2.0, 1e3);
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      t_init = std::max(t_init * 0.25, 1e-14);
      if (t_init <= 1e-13) break;
    }
  }

  out.nu.values = u;
  out.nu.enforce_zero_boundary();
  out.energy = E;
  out.norm = X.seminorm(u, spec.p);
  out.grad_norm = pg;
  out.converged = pg <= opt.tol && out.norm < R * (1.0 - 1e-8);
  return out;
}

MountainPass mountain_pass_search(const Space& X, const CaseIISpec& spec,
                                  const MPGeometry& geo, const EigenPair& ep,
                                  const MountainPassOptions& opt, const Field* warm) {
  MountainPass out;
  out.zeta = Field::zeros(X.mesh_ptr());
  solver::LinearStiffness K2(X);
  solver::Source src = case2_source(spec);
  Eigen::VectorXd ehat = ep.e1 / X.seminorm(ep.e1, spec.p);
  const int m = std::max(5, opt.path_nodes);

  auto energy = [&](const Eigen::VectorXd& v) { return energy_case2(X, v, spec); };

  // warm saddle: polish directly, then lay a reporting path through it
  if (warm != nullptr && warm->values.size() == X.n()) {
    solver::Options nopt;
    nopt.tol = std::min(opt.tol, 1e-11);
    try {
      solver::Result nr = solver::newton_semilinear(X, spec.p, src, warm->values, nopt);
      double Ez = energy(nr.u);
      if (nr.converged && Ez >= geo.rho * 0.999) {
        out.zeta.values = nr.u;
        out.zeta.enforce_zero_boundary();
        out.level = Ez;
        out.grad_norm = nr.residual;
        out.iterations = nr.iterations;
        out.converged = true;
        int half = m / 2;
        out.final_path.resize(m, X.n());
        for (int j = 0; j <= half; ++j)
          out.final_path.row(j) = (static_cast<double>(j) / half) * nr.u.transpose();
        Eigen::VectorXd top = geo.T * ehat;
        for (int j = half + 1; j < m; ++j) {
          double s = static_cast<double>(j - half) / (m - 1 - half);
          out.final_path.row(j) = ((1.0 - s) * nr.u + s * top).transpose();
        }
        out.final_path_energies.resize(m);
        double pmax = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j) {
          out.final_path_energies[j] = energy(out.final_path.row(j).transpose());
          pmax = std::max(pmax, out.final_path_energies[j]);
        }
        out.path_max_log.push_back(pmax);
        return out;
      }
    } catch (const solver::SolveError&) {
      // fall through to the full deformation
    }
  }

  std::vector<Eigen::VectorXd> P(m);
  std::vector<double> E(m);
  for (int j = 0; j < m; ++j) {
    P[j] = (geo.T * j / (m - 1.0)) * ehat;
    E[j] = energy(P[j]);
  }

  // Arc-length reparametrization. Interpolating across the ridge can raise the
  // discrete maximum; that raise is the price of keeping the chain connected,
  // so it is always accepted (only the reported log is clamped monotone).
  double arc_spacing = geo.T / (m - 1.0);
  auto reparametrize = [&]() {
    std::vector<double> len(m, 0.0);
    for (int j = 1; j < m; ++j)
      len[j] = len[j - 1] + X.seminorm(P[j] - P[j - 1], spec.p);
    if (!(len[m - 1] > 0.0)) return;
    std::vector<Eigen::VectorXd> Q(m);
    Q[0] = P[0];
    Q[m - 1] = P[m - 1];
    for (int j = 1; j < m - 1; ++j) {
      double target = len[m - 1] * j / (m - 1.0);
      int seg = 1;
      while (seg < m - 1 && len[seg] < target) ++seg;
      double denom = len[seg] - len[seg - 1];
      double s = denom > 0.0 ? (target - len[seg - 1]) / denom : 0.0;
      Q[j] = (1.0 - s) * P[seg - 1] + s * P[seg];
    }
    P = std::move(Q);
    for (int j = 1; j < m - 1; ++j) E[j] = energy(P[j]);
    arc_spacing = len[m - 1] / (m - 1.0);
  };

  int jmax = 1;
  double gn = std::numeric_limits<double>::infinity();
  double best_level = std::numeric_limits<double>::infinity();
  int last_improve = 0, last_polish = -10;

  for (int sweep = 0; sweep < opt.max_deform; ++sweep) {
    out.iterations = sweep;

    // flow the active band downhill; steps capped to one arc spacing so a
    // single node cannot tunnel through the ridge between reparametrizations.
    // Nodes already far below the level stay put: the functional is unbounded
    // below and chasing the tail only stretches the chain off the ridge.
    for (int j = 1; j < m - 1; ++j) {
      if (E[j] < 0.5 * geo.rho) continue;
      Eigen::VectorXd g = gradient_case2(X, P[j], spec);
      Eigen::VectorXd d = -K2.solve(g);
      double slope = g.dot(d);
      if (!(slope < 0.0)) {
        d = -g;
        slope = -g.squaredNorm();
      }
      if (!(slope < 0.0)) continue;
      double dn = X.seminorm(d, spec.p);
      if (!(dn > 0.0)) continue;
      double t = std::min(1.0, arc_spacing / dn);
      for (int ls = 0; ls < 30; ++ls) {
        Eigen::VectorXd trial = P[j] + t * d;
        double Et = energy(trial);
        if (Et <= E[j] + 1e-4 * t * slope) {
          P[j] = trial;
          E[j] = Et;
          break;
        }
        t *= 0.5;
      }
      Eigen::VectorXd a = P[j].cwiseAbs();
      double Ea = energy(a);
      if (Ea < E[j]) {
        P[j] = a;
        E[j] = Ea;
      }
    }
    reparametrize();

    jmax = 1;
    for (int j = 2; j < m - 1; ++j)
      if (E[j] > E[jmax]) jmax = j;
    double level = E[jmax];
    if (out.path_max_log.empty() || level < out.path_max_log.back())
      out.path_max_log.push_back(level);
    else
      out.path_max_log.push_back(out.path_max_log.back());
    // checked on the reconnected chain only; a connected discrete path has a
    // node inside the sphere shell, so a genuine dip under rho is a failure
    if (level < geo.rho)
      throw solver::SolveError("mountain pass: path level fell below the sphere bound");

    Eigen::VectorXd g = gradient_case2(X, P[jmax], spec);
    gn = g.lpNorm<Eigen::Infinity>();
    if (gn <= opt.tol) break;

    if (level < best_level - 1e-9 * std::max(1.0, std::abs(level))) {
      best_level = level;
      last_improve = sweep;
    }
    bool stalled = sweep - last_improve >= 12;
    if ((gn <= 1e-4 && sweep - last_polish >= 10) ||
        (stalled && sweep - last_polish >= 5)) {
      last_polish = sweep;
      solver::Options nopt;
      nopt.tol = std::min(opt.tol, 1e-11);
      try {
        solver::Result nr = solver::newton_semilinear(X, spec.p, src, P[jmax], nopt);
        double Ez = energy(nr.u);
        // the discrete chain samples the ridge at finitely many nodes, so its
        // max sits slightly under the saddle value; allow that sag while still
        // rejecting jumps to unrelated higher critical points
        if (nr.converged && Ez >= geo.rho * 0.999 && Ez <= level * 1.02 + 1e-9) {
          P[jmax] = nr.u;
          E[jmax] = Ez;
          gn = nr.residual;
          break;
        }
      } catch (const solver::SolveError&) {
        // keep deforming
      }
    }
    if (sweep - last_improve >= 40) break;  // level stopped moving, give up
  }

  out.zeta.values = P[jmax];
  out.zeta.enforce_zero_boundary();
  out.level = E[jmax];
  out.grad_norm = gn;
  out.converged = gn <= opt.tol;
  out.final_path.resize(m, X.n());
  out.final_path_energies.resize(m);
  for (int j = 0; j < m; ++j) {
    out.final_path.row(j) = P[j].transpose();
    out.final_path_energies[j] = E[j];
  }
  return out;
}

BarrierResult barrier(const Space& X, double p, double q, double lambda) {
  BarrierResult out;
  out.C = std::min(1.0, lambda / std::pow(2.0, q));
  solver::Result r = solver::constant_load(X, p, out.C);
  if (!r.converged && out.C != 0.0)
    throw solver::SolveError("barrier: constant-load solve failed");
  out.xi = Field::zeros(X.mesh_ptr());
  out.xi.values = r.u;
  out.xi.enforce_zero_boundary();
  out.min_interior = out.xi.min_interior();
  return out;
}

Case2Result solve_case2(const Space& X, CaseIISpec spec, const EigenPair& ep,
                        const EmbeddingExponents& emb, const Case2Options& opt) {
  if (!(spec.q > 0.0 && spec.q < 1.0))
    throw std::invalid_argument("violated bound 0 < q < 1");
  if (!(spec.r > spec.p - 1.0))
    throw std::invalid_argument("violated bound r > p - 1");

  Case2Result out;
  out.geo = mp_geometry(X, spec.p, spec.q, spec.r, emb, ep, opt.geometry);
  if (opt.lambda_auto) spec.lambda = out.geo.Lambda_est / 10.0;
  if (!(spec.lambda >= 0.0)) throw std::invalid_argument("violated bound lambda >= 0");
  out.spec = spec;

  out.bar = barrier(X, spec.p, spec.q, spec.lambda);

  CaseIISpec s0 = spec;
  s0.eps = 0.0;
  out.sphere_min = sphere_min_sampled(X, s0, out.geo, ep, opt.geometry.sphere_samples,
                                      opt.geometry.seed);
  out.sphere_warn = spec.lambda >= out.geo.Lambda_est ||
                    out.sphere_min < out.geo.rho * (1.0 - opt.sphere_slack);

  const Mesh& msh = X.mesh();
  Field nu_prev, zeta_prev;
  bool have_prev = false;
  out.barrier_margin = std::numeric_limits<double>::infinity();

  for (int j = opt.eps_first; j <= opt.eps_last; ++j) {
    CaseIISpec sj = spec;
    sj.eps = std::ldexp(1.0, -j);

    BallMinimize bm =
        ball_minimizer(X, sj, out.geo, ep, opt.ball, have_prev ? &nu_prev : nullptr);
    MountainPass mp = mountain_pass_search(X, sj, out.geo, ep, opt.mp,
                                           have_prev ? &zeta_prev : nullptr);

    Case2Level lvl;
    lvl.eps = sj.eps;
    lvl.I_nu = bm.energy;
    lvl.I_zeta = mp.level;
    lvl.norm_nu = bm.norm;
    lvl.norm_zeta = X.seminorm(mp.zeta.values, spec.p);
    lvl.diff_nu = have_prev ? X.seminorm(bm.nu.values - nu_prev.values, spec.p)
                            : X.seminorm(bm.nu.values, spec.p);
    lvl.diff_zeta = have_prev ? X.seminorm(mp.zeta.values - zeta_prev.values, spec.p)
                              : X.seminorm(mp.zeta.values, spec.p);
    double margin = std::numeric_limits<double>::infinity();
    for (int i : msh.interior) {
      margin = std::min(margin, bm.nu.values[i] - out.bar.xi.values[i]);
      margin = std::min(margin, mp.zeta.values[i] - out.bar.xi.values[i]);
    }
    lvl.barrier_margin = margin;
    out.barrier_margin = std::min(out.barrier_margin, margin);
    out.levels.push_back(lvl);

    nu_prev = bm.nu;
    zeta_prev = mp.zeta;
    have_prev = true;
    if (j == opt.eps_last) {
      out.nu0 = bm.nu;
      out.zeta0 = mp.zeta;
      out.path_profile = mp.final_path_energies;
      out.final_path = mp.final_path;
    }
  }

  out.I_nu0 = energy_case2(X, out.nu0.values, s0);
  out.I_zeta0 = energy_case2(X, out.zeta0.values, s0);
  out.separation = X.seminorm(out.zeta0.values - out.nu0.values, spec.p);

  // uniform branch-norm bound along the schedule and its stabilization
  size_t L = out.levels.size();
  size_t argmax = 0;
  out.Theta = 0.0;
  for (size_t i = 0; i < L; ++i) {
    double v = std::max(out.levels[i].norm_nu, out.levels[i].norm_zeta);
    if (v > out.Theta) {
      out.Theta = v;
      argmax = i;
    }
  }
  if (L >= 2) {
    double last = std::max(out.levels[L - 1].norm_nu, out.levels[L - 1].norm_zeta);
    double prev = std::max(out.levels[L - 2].norm_nu, out.levels[L - 2].norm_zeta);
    out.theta_stable = last <= prev * 1.05;
  }
  out.theta_attained_early = L >= 3 && argmax < L - 2;

  auto weak_res0 = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(X.n());
    for (int i : msh.interior) {
      if (!(u[i] > 0.0)) return std::numeric_limits<double>::infinity();
      g[i] = spec.lambda * std::pow(u[i], -spec.q) + std::pow(u[i], spec.r);
    }
    return X.weak_residual(u, g, spec.p);
  };
  out.weak_res_nu = weak_res0(out.nu0.values);
  out.weak_res_zeta = weak_res0(out.zeta0.values);

  double eps_last = std::ldexp(1.0, -opt.eps_last);
  auto identity_err = [&](const Eigen::VectorXd& u) {
    double a_uu = std::pow(X.seminorm(u, spec.p), spec.p);
    Eigen::VectorXd g(X.n());
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      double up = std::max(u[i], 0.0);
      g[i] = (spec.lambda * std::pow(up + eps_last, -spec.q) + std::pow(up, spec.r)) * up;
    }
    double rhs = X.integral_lumped(g);
    return std::abs(a_uu - rhs) / std::max(1.0, std::abs(a_uu));
  };
  out.energy_identity_err_nu = identity_err(out.nu0.values);
  out.energy_identity_err_zeta = identity_err(out.zeta0.values);

  CaseIISpec s_last = spec;
  s_last.eps = eps_last;
  out.energy_limit_gap_nu =
      std::abs(energy_case2(X, out.nu0.values, s_last) - out.I_nu0);
  out.energy_limit_gap_zeta =
      std::abs(energy_case2(X, out.zeta0.values, s_last) - out.I_zeta0);
  return out;
}

}  // namespace spl
