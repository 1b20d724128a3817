#include "spl/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "spl/case1.hpp"
#include "spl/case2.hpp"
#include "spl/solver.hpp"

namespace spl {

namespace {

using nlohmann::ordered_json;
using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point t0) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string field_csv(const Mesh& m, const Eigen::VectorXd& u) {
  std::string s = m.dim == 1 ? "x,u\n" : "x,y,u\n";
  for (int i = 0; i < m.n_nodes(); ++i) {
    s += fmt(m.nodes(i, 0));
    if (m.dim == 2) {
      s += ',';
      s += fmt(m.nodes(i, 1));
    }
    s += ',';
    s += fmt(u[i]);
    s += '\n';
  }
  return s;
}

std::string profile_csv(const std::vector<double>& e) {
  std::string s = "index,energy\n";
  for (size_t i = 0; i < e.size(); ++i)
    s += std::to_string(i) + "," + fmt(e[i]) + "\n";
  return s;
}

Domain make_domain(const DomainConfig& dc) {
  if (dc.kind == "interval") return Domain::interval(dc.a, dc.b);
  if (dc.kind == "rect") return Domain::rect(dc.ax, dc.ay, dc.bx, dc.by);
  return Domain::disk(dc.cx, dc.cy, dc.radius);
}

Weight make_weight(const WeightConfig& wc, int dim, double p) {
  if (wc.kind == "constant") return Weight::constant(wc.value, dim, p);
  if (wc.kind == "power") return Weight::power(wc.alpha, dim, p);
  return Weight::tabulated_from_csv(wc.path, dim, p);
}

NonlinearityF load_f_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read profile table: " + path);
  std::vector<double> ts, fs;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#') continue;
    double t, f;
    if (std::sscanf(line.c_str(), "%lf,%lf", &t, &f) != 2) {
      if (row == 1) continue;  // header
      throw std::invalid_argument("profile table " + path + ": malformed row " +
                                  std::to_string(row));
    }
    ts.push_back(t);
    fs.push_back(f);
  }
  return NonlinearityF::tabulated(std::move(ts), std::move(fs));
}

NonlinearityF make_f(const FConfig& fc) {
  if (fc.kind == "affine") return NonlinearityF::affine(fc.c0, fc.c1);
  if (fc.kind == "power_shift") return NonlinearityF::power_shift(fc.c0, fc.beta);
  return load_f_table(fc.path);
}

ordered_json echo_config(const RunConfig& c) {
  ordered_json j;
  j["case"] = c.case_id;
  j["seed"] = c.seed;
  j["resolution"] = c.resolution;
  j["p"] = c.p;
  j["q"] = c.q;
  j["lambda"] = c.lambda;
  j["lambda_auto"] = c.lambda_auto;
  j["r"] = c.r;
  j["k"] = c.k;
  j["eps_first"] = c.eps_first;
  j["eps_last"] = c.eps_last;
  j["domain"] = {{"kind", c.domain.kind}, {"a", c.domain.a},   {"b", c.domain.b},
                 {"ax", c.domain.ax},     {"ay", c.domain.ay}, {"bx", c.domain.bx},
                 {"by", c.domain.by},     {"cx", c.domain.cx}, {"cy", c.domain.cy},
                 {"radius", c.domain.radius}};
  j["weight"] = {{"kind", c.weight.kind},
                 {"value", c.weight.value},
                 {"alpha", c.weight.alpha},
                 {"path", c.weight.path},
                 {"s", c.weight.s},
                 {"morrey_q", c.weight.morrey_q},
                 {"morrey_alpha", c.weight.morrey_alpha}};
  j["f"] = {{"kind", c.f.kind},
            {"c0", c.f.c0},
            {"c1", c.f.c1},
            {"beta", c.f.beta},
            {"path", c.f.path}};
  j["tol"] = {{"defect", c.tol.defect},
              {"residual", c.tol.residual},
              {"continuation", c.tol.continuation},
              {"solver", c.tol.solver},
              {"minimize", c.tol.minimize}};
  return j;
}

const char* regime_name(EmbeddingRegime r) {
  switch (r) {
    case EmbeddingRegime::Subcritical:
      return "subcritical";
    case EmbeddingRegime::Borderline:
      return "borderline";
    default:
      return "supercritical";
  }
}

void preset_certificates(ordered_json& report, const std::vector<std::string>& keys) {
  ordered_json certs;
  for (const std::string& k : keys) certs[k] = {{"pass", false}, {"evaluated", false}};
  report["certificates"] = certs;
}

bool strictly_decreasing_tail(const std::vector<double>& v, size_t count) {
  if (v.size() < count) return false;
  for (size_t i = v.size() - count + 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

}  // namespace

const std::vector<std::string>& case1_certificate_keys() {
  static const std::vector<std::string> keys = {
      "f1_screen",         "continuation_converged", "subsolution_defect",
      "supersolution_defect", "interval_ordered",    "minimize_converged",
      "energy_monotone",   "weak_residual",          "positivity",
  };
  return keys;
}

const std::vector<std::string>& case2_certificate_keys() {
  static const std::vector<std::string> keys = {
      "geometry",        "sphere_geometry",  "ball_minimum",
      "mountain_pass_level", "separation",   "barrier_domination",
      "continuation_tail", "theta_stabilized", "weak_residuals",
      "energy_identity",
  };
  return keys;
}

RunOutput run_solve(const RunConfig& cfg) {
  RunOutput out;
  ordered_json& report = out.report;
  auto t_start = clock_type::now();

  report["config"] = echo_config(cfg);
  report["hypothesis_flags"] = ordered_json::array();
  bool is_case1 = cfg.case_id == "I";
  preset_certificates(report,
                      is_case1 ? case1_certificate_keys() : case2_certificate_keys());

  try {
    Domain dom = make_domain(cfg.domain);
    int n = dom.dim;
    Weight w = make_weight(cfg.weight, n, cfg.p);

    // weight admissibility stage
    auto t_w = clock_type::now();
    ApDiagnostics apd;
    BallSampling sampling;
    if (n == 2) sampling.centers_per_axis = 12;
    double ap = estimate_ap_constant(w, dom, sampling, &apd);

    double s = cfg.weight.s;
    if (s < 0.0) s = std::max(1.0 / (cfg.p - 1.0), n / cfg.p) + 1.0;
    AsMembership as = as_membership(w, s, dom);
    EmbeddingExponents emb = embedding_exponents(cfg.p, s, n);

    double morrey_q = cfg.weight.morrey_q >= 0.0 ? cfg.weight.morrey_q : n + 1.0;
    double morrey_hi = std::min(1.0, cfg.p * n / (morrey_q * (cfg.p - 1.0)));
    double morrey_alpha =
        cfg.weight.morrey_alpha >= 0.0 ? cfg.weight.morrey_alpha : 0.5 * morrey_hi;
    MorreyReport mor = morrey_check(w, morrey_q, morrey_alpha, dom, sampling, emb.regime);

    report["weight_analysis"] = {
        {"ap_estimate", ap},
        {"ap_balls_sampled", apd.balls_sampled},
        {"ap_divergent_balls", apd.divergent_balls},
        {"s", s},
        {"as_member", as.member},
        {"as_integral", as.integral_estimate},
        {"p_s", emb.p_s},
        {"p_s_star", emb.p_s_star_finite ? ordered_json(emb.p_s_star) : ordered_json("inf")},
        {"regime", regime_name(emb.regime)},
        {"morrey_q", mor.exponent_q},
        {"morrey_alpha", mor.alpha_m},
        {"morrey_t", mor.t},
        {"morrey_estimate", mor.norm_estimate},
        {"morrey_passes", mor.passes},
        {"morrey_vacuous", mor.vacuous},
    };
    report["timings"]["weight_ms"] = ms_since(t_w);

    if (apd.divergent_balls > 0)
      report["hypothesis_flags"].push_back(
          "A_p sampling found balls without refinement-stable averages");
    if (!as.member)
      report["hypothesis_flags"].push_back(
          "w^{-s} integrability screen failed; embedding exponents are formal");
    if (!mor.vacuous && !mor.passes)
      report["hypothesis_flags"].push_back("Morrey screen did not stabilize");
    if (!is_case1 && n < 3)
      report["hypothesis_flags"].push_back(
          "dimension n < 3 lies outside the two-solution frame's hypothesis range; "
          "results are numerical evidence");

    MeshPtr mesh = build_mesh(dom, cfg.resolution);
    Space X(mesh, w);

    auto t_e = clock_type::now();
    EigenPair ep = first_eigenpair(X, cfg.p);
    report["eigen"] = {{"lambda1", ep.lambda1},
                       {"iterations", ep.iterations},
                       {"residual", ep.residual},
                       {"converged", ep.converged}};
    report["timings"]["eigen_ms"] = ms_since(t_e);

    auto t_s = clock_type::now();
    ordered_json& certs = report["certificates"];
    bool hard_fail = false;
    auto set_cert = [&](const char* key, bool pass, ordered_json extra) {
      extra["pass"] = pass;
      extra["evaluated"] = true;
      certs[key] = extra;
    };

    if (is_case1) {
      CaseISpec spec;
      spec.p = cfg.p;
      spec.q = cfg.q;
      spec.lambda = cfg.lambda;
      spec.f = make_f(cfg.f);

      Case1Options opt;
      opt.defect_tol = cfg.tol.defect;
      opt.continuation_tol = cfg.tol.continuation;
      opt.minimize.tol = cfg.tol.minimize;
      Case1Result r = solve_case1(X, spec, opt);

      report["case1"] = {
          {"lambda", spec.lambda},
          {"a", r.interval.a},
          {"A", r.interval.A},
          {"c_K", r.interval.c_K},
          {"energy", r.minimize.energy},
          {"weak_residual", r.weak_res},
          {"min_over_box", r.min_over_box},
          {"continuation_eps_final", r.pure.eps_final},
          {"continuation_levels", r.pure.log.eps.size()},
          {"minimize_iterations", r.minimize.iterations},
          {"clamped_nodes", r.minimize.clamped_nodes},
          {"strict_interior_nodes", r.strict_interior_nodes},
          {"interior_nodes", r.interior_nodes},
          {"solution_max", r.minimize.u.max()},
          {"solution_min_interior", r.minimize.u.min_interior()},
      };

      set_cert("f1_screen", r.f1.ok, {{"diagnostics", r.f1.diagnostics}});
      double last_diff = r.pure.log.diffs.empty() ? 0.0 : r.pure.log.diffs.back();
      set_cert("continuation_converged", last_diff < cfg.tol.continuation,
               {{"last_diff", last_diff}, {"eps_final", r.pure.eps_final}});
      set_cert("subsolution_defect", r.sub_defect_max <= cfg.tol.defect,
               {{"a", r.interval.a}, {"defect_max", r.sub_defect_max}});
      set_cert("supersolution_defect", r.sup_defect_min >= -cfg.tol.defect,
               {{"A", r.interval.A}, {"defect_min", r.sup_defect_min}});
      double min_gap = std::numeric_limits<double>::infinity();
      for (int i : mesh->interior)
        min_gap = std::min(min_gap,
                           r.interval.upper.values[i] - r.interval.lower.values[i]);
      set_cert("interval_ordered", min_gap >= 0.0, {{"min_gap", min_gap}});
      set_cert("minimize_converged", r.minimize.converged,
               {{"projected_grad_norm", r.minimize.projected_grad_norm}});
      bool monotone = true;
      for (size_t i = 1; i < r.minimize.energy_log.size(); ++i)
        if (r.minimize.energy_log[i] > r.minimize.energy_log[i - 1] + 1e-300)
          monotone = false;
      set_cert("energy_monotone", monotone,
               {{"steps", r.minimize.energy_log.size()}});
      set_cert("weak_residual", r.weak_res <= cfg.tol.residual,
               {{"value", r.weak_res}, {"tol", cfg.tol.residual}});
      set_cert("positivity",
               r.interval.c_K > 0.0 && r.min_over_box >= r.interval.c_K - 1e-15,
               {{"c_K", r.interval.c_K}, {"min_over_box", r.min_over_box}});

      out.files.emplace_back("solution.csv", field_csv(*mesh, r.minimize.u.values));
      out.files.emplace_back("lower.csv", field_csv(*mesh, r.interval.lower.values));
      out.files.emplace_back("upper.csv", field_csv(*mesh, r.interval.upper.values));
      out.files.emplace_back("v0.csv", field_csv(*mesh, r.pure.v0.values));
      out.files.emplace_back("e1.csv", field_csv(*mesh, ep.e1));
    } else {
      CaseIISpec spec;
      spec.p = cfg.p;
      spec.q = cfg.q;
      spec.r = cfg.r;
      spec.lambda = cfg.lambda;

      Case2Options opt;
      opt.geometry.k = cfg.k;
      opt.geometry.seed = cfg.seed;
      opt.eps_first = cfg.eps_first;
      opt.eps_last = cfg.eps_last;
      opt.lambda_auto = cfg.lambda_auto;
      opt.ball.tol = cfg.tol.minimize;
      Case2Result r = solve_case2(X, spec, ep, emb, opt);

      ordered_json levels = ordered_json::array();
      std::vector<double> dn, dz;
      for (const Case2Level& L : r.levels) {
        levels.push_back({{"eps", L.eps},
                          {"I_nu", L.I_nu},
                          {"I_zeta", L.I_zeta},
                          {"norm_nu", L.norm_nu},
                          {"norm_zeta", L.norm_zeta},
                          {"diff_nu", L.diff_nu},
                          {"diff_zeta", L.diff_zeta},
                          {"barrier_margin", L.barrier_margin}});
        dn.push_back(L.diff_nu);
        dz.push_back(L.diff_zeta);
      }
      report["case2"] = {
          {"lambda", r.spec.lambda},
          {"geometry",
           {{"k", r.geo.k},
            {"l", r.geo.l},
            {"C_embed", r.geo.C_embed},
            {"k_crit", r.geo.k_crit},
            {"R", r.geo.R},
            {"rho", r.geo.rho},
            {"Lambda_est", r.geo.Lambda_est},
            {"T", r.geo.T},
            {"sphere_f_sup", r.geo.sphere_f_sup},
            {"sphere_I0_min", r.geo.sphere_I0_min}}},
          {"barrier", {{"C", r.bar.C}, {"min_interior", r.bar.min_interior}}},
          {"levels", levels},
          {"I_nu0", r.I_nu0},
          {"I_zeta0", r.I_zeta0},
          {"Theta", r.Theta},
          {"theta_stable", r.theta_stable},
          {"theta_attained_early", r.theta_attained_early},
          {"separation", r.separation},
          {"weak_res_nu", r.weak_res_nu},
          {"weak_res_zeta", r.weak_res_zeta},
          {"energy_identity_err_nu", r.energy_identity_err_nu},
          {"energy_identity_err_zeta", r.energy_identity_err_zeta},
          {"energy_limit_gap_nu", r.energy_limit_gap_nu},
          {"energy_limit_gap_zeta", r.energy_limit_gap_zeta},
          {"barrier_margin", r.barrier_margin},
          {"sphere_min", r.sphere_min},
          {"sphere_warn", r.sphere_warn},
      };

      set_cert("geometry", r.geo.rho > 0.0 && r.geo.R > 0.0,
               {{"rho", r.geo.rho}, {"R", r.geo.R}});
      // warn-level certificate: sampled sphere dips are reported, not fatal
      set_cert("sphere_geometry", !r.sphere_warn,
               {{"sphere_min", r.sphere_min}, {"rho", r.geo.rho}});
      set_cert("ball_minimum", r.I_nu0 < 0.0 && r.levels.back().norm_nu < r.geo.R,
               {{"I_nu0", r.I_nu0}, {"norm", r.levels.back().norm_nu}});
      set_cert("mountain_pass_level", r.I_zeta0 >= r.geo.rho,
               {{"I_zeta0", r.I_zeta0}, {"rho", r.geo.rho}});
      set_cert("separation", r.separation > 1e-8 * std::max(1.0, r.Theta),
               {{"value", r.separation}});
      set_cert("barrier_domination", r.barrier_margin >= -1e-12,
               {{"margin", r.barrier_margin}});
      bool tail = strictly_decreasing_tail(dn, 5) && strictly_decreasing_tail(dz, 5);
      set_cert("continuation_tail", tail,
               {{"levels", dn.size()}});
      set_cert("theta_stabilized", r.theta_stable,
               {{"Theta", r.Theta}, {"attained_early", r.theta_attained_early}});
      set_cert("weak_residuals",
               r.weak_res_nu <= cfg.tol.residual && r.weak_res_zeta <= cfg.tol.residual,
               {{"nu", r.weak_res_nu}, {"zeta", r.weak_res_zeta},
                {"tol", cfg.tol.residual}});
      set_cert("energy_identity",
               r.energy_identity_err_nu <= 0.01 && r.energy_identity_err_zeta <= 0.01,
               {{"nu", r.energy_identity_err_nu}, {"zeta", r.energy_identity_err_zeta}});

      out.files.emplace_back("nu.csv", field_csv(*mesh, r.nu0.values));
      out.files.emplace_back("zeta.csv", field_csv(*mesh, r.zeta0.values));
      out.files.emplace_back("xi.csv", field_csv(*mesh, r.bar.xi.values));
      out.files.emplace_back("e1.csv", field_csv(*mesh, ep.e1));
      out.files.emplace_back("path_profile.csv", profile_csv(r.path_profile));
    }
    report["timings"]["solve_ms"] = ms_since(t_s);

    for (auto& [key, val] : certs.items()) {
      if (key == "sphere_geometry") continue;  // warn only
      if (!val["pass"].get<bool>()) hard_fail = true;
    }
    out.status = hard_fail ? RunStatus::CertificateFailure : RunStatus::Ok;
  } catch (const std::invalid_argument& e) {
    report["error"] = e.what();
    out.status = RunStatus::ConfigError;
  } catch (const solver::SolveError& e) {
    report["error"] = e.what();
    out.status = RunStatus::SolverFailure;
  } catch (const std::exception& e) {
    report["error"] = e.what();
    out.status = RunStatus::SolverFailure;
  }

  report["timings"]["total_ms"] = ms_since(t_start);
  report["status"] = static_cast<int>(out.status);
  return out;
}

void write_outputs(const RunOutput& out, const std::string& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir + "/report.json");
    f << out.report.dump(2) << "\n";
  }
  for (const auto& [name, content] : out.files) {
    std::ofstream f(dir + "/" + name);
    f << content;
  }
}

}  // namespace spl
