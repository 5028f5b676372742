#include "cogur/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cogur {

EnergyRow energy(const GalerkinState& state, const ModalSystem& sys) {
  EnergyRow row;
  row.t = state.t;
  row.energy_x2 = sys.energy_x2(state.a);
  row.energy_m1 = sys.m1_norm2_modal(state.history.samples);
  row.dissipation = sys.dissipation_modal(state.history.samples);
  row.v1_norm2 = sys.v1_norm2(state.a);
  row.f_inner = sys.f_inner(state.a);
  return row;
}

MonitorVerdict monitor_apriori(const Trajectory& traj, const SimConfig& cfg,
                               MonitorEnvelope envelope) {
  MonitorVerdict v;
  if (traj.stride != 1) {
    v.conclusive = false;
    v.detail = "sparse sampling: monitor inconclusive, rerun with stride 1";
    return v;
  }
  v.conclusive = true;

  double e_max = 0.0;
  for (const auto& r : traj.rows) {
    e_max = std::max(e_max, r.energy_x2 + r.energy_m1);
    if (r.dissipation > 1e-10 * (1.0 + r.energy_m1)) {
      v.pass = false;
      v.detail = "dissipation channel positive at t = " + std::to_string(r.t);
      return v;
    }
  }

  const double e0 = traj.rows.front().energy_x2 + traj.rows.front().energy_m1;
  const double margin = 0.01 * (1.0 + e0 + e_max);
  v.envelope_c = traj.sup_neg_f_inner;

  double gronwall_rate = 0.0;
  if (envelope == MonitorEnvelope::exponential) {
    const auto sg = validate_sign_growth(cfg.nonlin);
    gronwall_rate = 2.0 * std::max(sg.M_f, sg.M_g + cfg.op.nu * cfg.op.beta);
  }

  v.pass = true;
  v.margin = std::numeric_limits<double>::infinity();
  for (const auto& r : traj.rows) {
    const double e = r.energy_x2 + r.energy_m1;
    const double accum = e - e0 + 2.0 * r.cum_q;
    double env = v.envelope_c * r.t + margin;
    if (envelope == MonitorEnvelope::exponential) env *= std::exp(gronwall_rate * r.t);
    v.margin = std::min(v.margin, env - accum);
    if (accum > env) {
      v.pass = false;
      v.detail = "a-priori accumulation exceeded envelope at t = " + std::to_string(r.t);
      return v;
    }
  }
  v.detail = "ok";
  return v;
}

ContDepReport continuous_dependence(const SimConfig& cfg, double delta0) {
  ContDepReport rep;
  const auto sg = validate_sign_growth(cfg.nonlin);
  if (!sg.pass)
    throw validation_error("continuous_dependence: sign conditions fail: " + sg.reason);
  rep.C = 2.0 * std::max(sg.M_f, sg.M_g + cfg.op.nu * cfg.op.beta);

  const ModalSystem sys = build_modal_system(cfg);
  GalerkinState sa = project_initial(cfg.u0, cfg.phi0, sys);
  GalerkinState sb = sa;
  sb.a[0] += delta0;
  sb.u_nodal = sys.nodal(sb.a);

  const double init = (sa.a - sb.a).norm();
  if (init == 0.0) {
    rep.pass = true;
    return rep;
  }

  Stepper stepA(sys, cfg.scheme, cfg.dt), stepB(sys, cfg.scheme, cfg.dt);
  const long nsteps = std::llround(cfg.t_end / cfg.dt);
  rep.pass = true;
  rep.max_ratio = 0.0;
  double sum_t = 0, sum_t2 = 0, sum_y = 0, sum_ty = 0;
  long count = 0;
  for (long n = 0; n < nsteps; ++n) {
    stepA.advance(sa);
    stepB.advance(sb);
    const double t = sa.t;
    const double du = (sa.a - sb.a).norm();
    const Mat dB = sa.history.samples - sb.history.samples;
    const double dphi = std::sqrt(std::max(0.0, sys.m1_norm2_modal(dB)));
    const double lhs = du + dphi;
    const double bound = init * std::exp(rep.C * t);
    rep.max_ratio = std::max(rep.max_ratio, lhs / bound);
    if (lhs > bound) rep.pass = false;
    if (lhs > 0) {
      const double y = std::log(lhs / init);
      sum_t += t;
      sum_t2 += t * t;
      sum_y += y;
      sum_ty += t * y;
      ++count;
    }
  }
  if (count >= 2) {
    const double denom = count * sum_t2 - sum_t * sum_t;
    if (denom > 0) rep.fitted_rate = (count * sum_ty - sum_t * sum_y) / denom;
  }
  return rep;
}

namespace {

void finish_report(ConvergenceReport& rep) {
  for (size_t i = 0; i + 1 < rep.error.size(); ++i) {
    const double num = std::log(rep.error[i] / rep.error[i + 1]);
    const double den = std::log(rep.level_param[i] / rep.level_param[i + 1]);
    rep.order.push_back(num / den);
    if (rep.error[i + 1] >= rep.error[i]) rep.monotone = false;
  }
  double st = 0, st2 = 0, sy = 0, sty = 0;
  const int n = static_cast<int>(rep.error.size());
  for (int i = 0; i < n; ++i) {
    const double x = std::log(rep.level_param[i]);
    const double y = std::log(std::max(rep.error[i], 1e-300));
    st += x;
    st2 += x * x;
    sy += y;
    sty += x * y;
  }
  const double denom = n * st2 - st * st;
  if (denom != 0) rep.ls_slope = (n * sty - st * sy) / denom;
}

}  // namespace

ConvergenceReport convergence_study_dt(const SimConfig& base,
                                       const std::vector<double>& dts,
                                       const std::optional<Vec>& reference_a) {
  if (dts.size() < 3) throw config_error("convergence_study: need >= 3 levels");
  ConvergenceReport rep;
  rep.axis = StudyAxis::dt;

  Vec ref;
  if (reference_a) {
    ref = *reference_a;
  } else {
    SimConfig fine = base;
    fine.dt = dts.back() / 4.0;
    fine.stride = 1 << 20;
    ref = run(fine).final_state.a;
  }
  for (double dt : dts) {
    SimConfig c = base;
    c.dt = dt;
    c.stride = 1 << 20;
    const Vec a = run(c).final_state.a;
    rep.level_param.push_back(dt);
    rep.error.push_back((a - ref).norm());
  }
  finish_report(rep);
  return rep;
}

ConvergenceReport convergence_study_modes(const SimConfig& base,
                                          const std::vector<int>& mode_counts) {
  if (mode_counts.size() < 3) throw config_error("convergence_study: need >= 3 levels");
  ConvergenceReport rep;
  rep.axis = StudyAxis::modes;

  const int n_max = *std::max_element(mode_counts.begin(), mode_counts.end());
  EigenBasis full = eigenbasis(base.op, n_max);
  auto final_nodal = [&](int nm) {
    SimConfig c = base;
    c.n_modes = nm;
    c.basis.lambda = full.lambda.head(nm);
    c.basis.Psi = full.Psi.leftCols(nm);
    c.basis.residual = full.residual.head(nm);
    c.basis.n_modes = nm;
    c.stride = 1 << 20;
    return run(c).final_state.u_nodal;
  };
  const Vec ref = final_nodal(n_max);
  const SpMat& M = base.op.M;
  for (int nm : mode_counts) {
    const Vec d = final_nodal(nm) - ref;
    rep.level_param.push_back(static_cast<double>(nm));
    rep.error.push_back(std::sqrt(std::max(0.0, d.dot(M * d))));
  }
  finish_report(rep);
  return rep;
}

ConvergenceReport convergence_study_mesh(Backend backend, double beta,
                                         const std::vector<int>& levels) {
  if (levels.size() < 3) throw config_error("convergence_study: need >= 3 levels");
  ConvergenceReport rep;
  rep.axis = StudyAxis::mesh;
  for (int lvl : levels) {
    Geometry g = backend == Backend::interval ? build_interval(1.0, 1 << lvl)
                                              : build_disk(1.0, lvl);
    Vec p1(g.n_bulk()), p2(g.n_gamma()), exact(g.n_bulk());
    if (backend == Backend::interval) {
      // u = cos(pi x): dn u = 0 at both ends, p2 = beta u|_Gamma
      for (int i = 0; i < g.n_bulk(); ++i) {
        const double x = g.nodes(i, 0);
        p1[i] = M_PI * M_PI * std::cos(M_PI * x);
        exact[i] = std::cos(M_PI * x);
      }
      for (int j = 0; j < g.n_gamma(); ++j)
        p2[j] = beta * exact[g.boundary_nodes[j]];
    } else {
      // u = x on the unit disk: p1 = 0, p2 = (2 + beta) cos(theta)
      p1.setZero();
      for (int i = 0; i < g.n_bulk(); ++i) exact[i] = g.nodes(i, 0);
      for (int j = 0; j < g.n_gamma(); ++j) {
        const int b = g.boundary_nodes[j];
        const double th = std::atan2(g.nodes(b, 1), g.nodes(b, 0));
        p2[j] = (2.0 + beta) * std::cos(th);
      }
    }
    const auto sol = solve_bvp(g, p1, p2, beta);
    const Vec d = sol.field.u - exact;
    const double h = backend == Backend::interval
                         ? 1.0 / (1 << lvl)
                         : 1.0 / (6.0 * (1 << lvl));  // boundary edge scale
    rep.level_param.push_back(h);
    rep.error.push_back(std::sqrt(std::max(0.0, d.dot(g.mass_bulk * d))));
  }
  finish_report(rep);
  return rep;
}

StrongDiagnostics strong_diagnostics(const SimConfig& cfg) {
  StrongDiagnostics diag;
  const ModalSystem sys = build_modal_system(cfg);
  GalerkinState st = project_initial(cfg.u0, cfg.phi0, sys);
  const long nsteps = std::llround(cfg.t_end / cfg.dt);

  std::vector<Vec> a_hist{st.a};
  auto m2_proxy = [&](const Mat& B) {
    Mat AB = B;
    for (int k = 0; k < AB.cols(); ++k)
      AB.col(k) = sys.basis.lambda.cwiseProduct(AB.col(k));
    return std::sqrt(std::max(0.0, sys.m1_norm2_modal(AB)));
  };
  diag.t.push_back(0.0);
  diag.v1_norm.push_back(std::sqrt(std::max(0.0, sys.v1_norm2(st.a))));
  diag.m2_proxy.push_back(m2_proxy(st.history.samples));

  Stepper stepper(sys, cfg.scheme, cfg.dt);
  for (long n = 0; n < nsteps; ++n) {
    stepper.advance(st);
    a_hist.push_back(st.a);
    diag.t.push_back(st.t);
    diag.v1_norm.push_back(std::sqrt(std::max(0.0, sys.v1_norm2(st.a))));
    diag.m2_proxy.push_back(m2_proxy(st.history.samples));
  }
  diag.dt_u_x2.resize(a_hist.size(), 0.0);
  for (size_t k = 1; k + 1 < a_hist.size(); ++k)
    diag.dt_u_x2[k] = (a_hist[k + 1] - a_hist[k - 1]).norm() / (2.0 * cfg.dt);
  if (a_hist.size() >= 2) {
    diag.dt_u_x2.front() = (a_hist[1] - a_hist[0]).norm() / cfg.dt;
    diag.dt_u_x2.back() =
        (a_hist[a_hist.size() - 1] - a_hist[a_hist.size() - 2]).norm() / cfg.dt;
  }

  const auto& ko = cfg.kernels.omega;
  const auto& kg = cfg.kernels.gamma;
  diag.cancellation_regime =
      ko.family == kg.family && ko.a0 == kg.a0 && ko.d0 == kg.d0 &&
      ko.a1 == kg.a1 && ko.d1 == kg.d1 && ko.p == kg.p && ko.tab_s == kg.tab_s &&
      ko.tab_mu == kg.tab_mu;

  diag.bounded = true;
  for (size_t k = 0; k < diag.t.size(); ++k)
    if (!std::isfinite(diag.v1_norm[k]) || !std::isfinite(diag.dt_u_x2[k]) ||
        !std::isfinite(diag.m2_proxy[k]))
      diag.bounded = false;
  return diag;
}

TraceInterpolationCheck trace_interpolation(const Geometry& geom, const Vec& u,
                                            double s, double eps) {
  if (s <= 1.0) throw config_error("trace_interpolation: s > 1 required");
  TraceInterpolationCheck c;
  const double gamma = std::max(s, 2.0 * (s - 1.0));
  const Vec v = trace(geom, u);
  const Vec wg = geom.mass_gamma * Vec::Ones(geom.n_gamma());
  for (int j = 0; j < geom.n_gamma(); ++j)
    c.lhs += wg[j] * std::pow(std::abs(v[j]), s);
  c.grad2 = u.dot(geom.stiffness_bulk * u);
  const Vec wb = geom.mass_bulk * Vec::Ones(geom.n_bulk());
  double lg = 0.0;
  for (int i = 0; i < geom.n_bulk(); ++i)
    lg += wb[i] * std::pow(std::abs(u[i]), gamma);
  c.bulk_term = lg + 1.0;
  c.ratio = c.lhs / (eps * c.grad2 + (1.0 / eps) * c.bulk_term);
  return c;
}

std::vector<LimitStudyRow> delta_limit_study(const SimConfig& base,
                                             const std::vector<double>& epsilons) {
  std::vector<LimitStudyRow> rows;
  const LimitSystem lim =
      build_limit_system(base.geom, base.nonlin, base.op.alpha, base.op.beta,
                         base.op.omega, base.op.nu, base.n_modes);

  // limit run started from the same X2 projection as the memory runs
  const ModalSystem sys0 = build_modal_system(base);
  const Vec u0 = project_initial(base.u0, base.phi0, sys0).u_nodal;
  const Vec u_lim = run_limit(lim, u0, base.dt, base.t_end);

  const double c_om = (1.0 - base.op.omega) / base.op.omega;
  const double c_ga = (1.0 - base.op.nu) / base.op.nu;
  for (double eps : epsilons) {
    const double delta = 1.0 / eps;
    SimConfig c = base;
    c.kernels.omega = exponential_kernel(c_om * delta * delta, delta, KernelSide::omega);
    c.kernels.gamma = exponential_kernel(c_ga * delta * delta, delta, KernelSide::gamma);
    c.s_max = 30.0 * eps;
    c.stride = 1 << 20;
    const Trajectory traj = run(c);
    const Vec d = traj.final_state.u_nodal - u_lim;
    rows.push_back({eps, std::sqrt(std::max(0.0, d.dot(lim.M * d)))});
  }
  return rows;
}

}  // namespace cogur
