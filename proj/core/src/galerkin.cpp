#include "cogur/galerkin.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace cogur {

namespace {

constexpr double kBlowupGuard = 1e12;

Vec kernel_table(const AgeGrid& grid, const MemoryKernel& k, bool derivative) {
  const Vec s = grid.nodes();
  const Vec w = grid.weights();
  Vec out(grid.n_nodes);
  for (int i = 0; i < grid.n_nodes; ++i)
    out[i] = w[i] * (derivative ? k.deriv(s[i]) : k.eval(s[i]));
  return out;
}

}  // namespace

Vec ModalSystem::f_modal(const Vec& a) const {
  if (linear) return Vec::Zero(n_modes());
  const Vec u = nodal(a);
  const Vec v = trace(*geom, u);
  BulkBoundaryField U{u, v, SpaceTag::V1};
  const BulkBoundaryField F = evaluate_F(U, nonlin, op.nu, op.beta);
  const Vec load = geom->mass_bulk * F.u + geom->lift_boundary(geom->mass_gamma * F.v);
  return basis.Psi.transpose() * load;
}

double ModalSystem::f_inner(const Vec& a) const {
  if (linear) return 0.0;
  const Vec u = nodal(a);
  const Vec v = trace(*geom, u);
  BulkBoundaryField U{u, v, SpaceTag::V1};
  const BulkBoundaryField F = evaluate_F(U, nonlin, op.nu, op.beta);
  return F.u.dot(geom->mass_bulk * u) + F.v.dot(geom->mass_gamma * v);
}

Vec ModalSystem::memory_load_modal(const Mat& B) const {
  return G_A0 * (B * wmu_omega) + G_C * (B * wmu_gamma);
}

double ModalSystem::v1_norm2(const Vec& a) const {
  const double alom = op.alpha * op.omega;
  return a.dot(basis.lambda.cwiseProduct(a)) - alom * a.dot(G_MOm * a);
}

void ModalSystem::history_forms(const Mat& B, Vec& qa, Vec& qc) const {
  const int ns = static_cast<int>(B.cols());
  qa.resize(ns);
  qc.resize(ns);
  for (int k = 0; k < ns; ++k) {
    const auto b = B.col(k);
    qa[k] = b.dot(G_A0 * b);
    qc[k] = b.dot(G_C * b);
  }
}

double ModalSystem::m1_norm2_modal(const Mat& B) const {
  Vec qa, qc;
  history_forms(B, qa, qc);
  return wmu_omega.dot(qa) + wmu_gamma.dot(qc);
}

double ModalSystem::dissipation_modal(const Mat& B) const {
  Vec qa, qc;
  history_forms(B, qa, qc);
  return 0.5 * (wdmu_omega.dot(qa) + wdmu_gamma.dot(qc));
}

double ModalSystem::lr1_norm(const Vec& a, double r1) const {
  const Vec u = nodal(a);
  double acc = 0.0;
  for (int i = 0; i < u.size(); ++i)
    acc += lumped_bulk[i] * std::pow(std::abs(u[i]), r1);
  return std::pow(acc, 1.0 / r1);
}

ModalSystem build_modal_system(const SimConfig& cfg) {
  ModalSystem sys;
  sys.geom = cfg.geom;
  sys.op = cfg.op;
  sys.basis = cfg.basis;
  sys.kernels = cfg.kernels;
  sys.nonlin = cfg.nonlin;
  sys.linear = cfg.linear_twin;

  const double s_max =
      cfg.s_max > 0 ? cfg.s_max : default_s_max(cfg.kernels.omega, cfg.kernels.gamma);
  sys.grid = make_age_grid(cfg.dt, s_max);

  const Mat& Psi = sys.basis.Psi;
  const Geometry& g = *sys.geom;
  const int nb = g.n_gamma();
  sys.Psi_b.resize(nb, sys.n_modes());
  for (int j = 0; j < nb; ++j) sys.Psi_b.row(j) = Psi.row(g.boundary_nodes[j]);

  sys.G_A0 = Psi.transpose() * (sys.op.A0 * Psi);
  sys.G_C = sys.op.nu * (sys.Psi_b.transpose() * (sys.op.C_gamma * sys.Psi_b));
  sys.G_MOm = Psi.transpose() * (g.mass_bulk * Psi);

  const double alom = sys.op.alpha * sys.op.omega;
  sys.kap = sys.basis.lambda - alom * sys.G_MOm.diagonal();
  sys.R_off = -alom * (sys.G_MOm - Mat(sys.G_MOm.diagonal().asDiagonal()));

  sys.wmu_omega = kernel_table(sys.grid, sys.kernels.omega, false);
  sys.wmu_gamma = kernel_table(sys.grid, sys.kernels.gamma, false);
  sys.wdmu_omega = kernel_table(sys.grid, sys.kernels.omega, true);
  sys.wdmu_gamma = kernel_table(sys.grid, sys.kernels.gamma, true);

  sys.lumped_bulk = g.mass_bulk * Vec::Ones(g.n_bulk());
  return sys;
}

GalerkinState project_initial(const BulkBoundaryField& u0,
                              const std::function<Vec(double)>& phi0,
                              const ModalSystem& sys) {
  const Geometry& g = *sys.geom;
  if (u0.u.size() != g.n_bulk() || u0.v.size() != g.n_gamma())
    throw shape_error("project_initial: initial pair sized inconsistently");

  GalerkinState st;
  st.t = 0.0;
  // X2 projection: a_i = <U0, Psi_i>_X2 with independent boundary data
  const Vec load = g.mass_bulk * u0.u + g.lift_boundary(g.mass_gamma * u0.v);
  st.a = sys.basis.Psi.transpose() * load;

  st.history = zero_history(sys.grid, sys.n_modes());
  if (phi0) {
    const Vec s = sys.grid.nodes();
    for (int k = 1; k < sys.grid.n_nodes; ++k) {
      const Vec eta = phi0(s[k]);
      if (eta.size() != g.n_bulk())
        throw shape_error("project_initial: history field sized inconsistently");
      const Vec hl = g.mass_bulk * eta + g.lift_boundary(g.mass_gamma * trace(g, eta));
      st.history.samples.col(k) = sys.basis.Psi.transpose() * hl;
    }
  }
  st.u_nodal = sys.nodal(st.a);
  return st;
}

RhsValue rhs(const GalerkinState& state, const ModalSystem& sys) {
  RhsValue out;
  out.memory_load = sys.memory_load_modal(state.history.samples);
  const double alom = sys.op.alpha * sys.op.omega;
  out.dadt = -sys.basis.lambda.cwiseProduct(state.a) + alom * (sys.G_MOm * state.a) -
             out.memory_load - sys.f_modal(state.a);
  return out;
}

Stepper::Stepper(const ModalSystem& sys, Scheme scheme, double dt)
    : sys_(sys), scheme_(scheme), dt_(dt) {
  if (std::abs(dt - sys.grid.ds) > 1e-12 * std::max(1.0, dt))
    throw grid_mismatch_error("Stepper: dt must equal the age spacing");
}

void Stepper::advance(GalerkinState& state) {
  const Vec ex = sys_.memory_load_modal(state.history.samples) +
                 sys_.R_off * state.a + sys_.f_modal(state.a);
  const Vec& kap = sys_.kap;
  Vec a_new;
  auto implicit_solve = [&](const Vec& a, double dt, const Vec& e) -> Vec {
    return (a - dt * e).cwiseQuotient(Vec::Ones(a.size()) + dt * kap);
  };
  if (scheme_ == Scheme::imex_euler) {
    a_new = implicit_solve(state.a, dt_, ex);
  } else if (!have_prev_) {
    // second-order startup: Richardson on two half steps of the one-step map
    const Vec full = implicit_solve(state.a, dt_, ex);
    const Vec half = implicit_solve(implicit_solve(state.a, dt_ / 2, ex), dt_ / 2, ex);
    a_new = 2.0 * half - full;
  } else {
    const Vec num = 4.0 * state.a - a_prev_ - 2.0 * dt_ * (2.0 * ex - ex_prev_);
    a_new = num.cwiseQuotient(Vec::Constant(state.a.size(), 3.0) + 2.0 * dt_ * kap);
  }

  const Vec inc = scheme_ == Scheme::imex_euler ? Vec(dt_ * a_new)
                                                : Vec(dt_ * 0.5 * (a_new + state.a));
  state.history.shift_and_add(inc);

  a_prev_ = state.a;
  ex_prev_ = ex;
  have_prev_ = true;

  state.a = a_new;
  state.t += dt_;
  state.u_nodal = sys_.nodal(state.a);
  if (state.u_nodal.cwiseAbs().maxCoeff() > kBlowupGuard)
    throw instability_error(
        "step: nodal values exceeded 1e12; the explicit part blew up, use a smaller dt");
}

namespace {

struct StepChannels {
  double m1 = 0, diss = 0, v1 = 0, f_inner = 0;
};

StepChannels step_channels(const GalerkinState& st, const ModalSystem& sys) {
  StepChannels c;
  Vec qa, qc;
  sys.history_forms(st.history.samples, qa, qc);
  c.m1 = sys.wmu_omega.dot(qa) + sys.wmu_gamma.dot(qc);
  c.diss = 0.5 * (sys.wdmu_omega.dot(qa) + sys.wdmu_gamma.dot(qc));
  c.v1 = sys.v1_norm2(st.a);
  c.f_inner = sys.f_inner(st.a);
  return c;
}

EnergyRow make_row(const GalerkinState& st, const ModalSystem& sys,
                   const StepChannels& c, double r1, double cum_q) {
  EnergyRow row;
  row.t = st.t;
  row.energy_x2 = sys.energy_x2(st.a);
  row.energy_m1 = c.m1;
  row.dissipation = c.diss;
  row.v1_norm2 = c.v1;
  row.lr1_norm = sys.lr1_norm(st.a, r1);
  row.f_inner = c.f_inner;
  row.cum_q = cum_q;
  return row;
}

}  // namespace

Trajectory run(const SimConfig& cfg, bool keep_modal) {
  if (cfg.dt <= 0 || cfg.t_end < 0) throw config_error("run: dt > 0, t_end >= 0 required");
  const double steps_real = cfg.t_end / cfg.dt;
  const long nsteps = std::llround(steps_real);
  if (std::abs(steps_real - nsteps) > 1e-9)
    throw config_error("run: dt must divide t_end");

  if (!cfg.force) {
    const auto ro = check_admissible(cfg.kernels.omega);
    const auto rg = check_admissible(cfg.kernels.gamma);
    if (!ro.pass()) throw validation_error("run: bulk kernel fails admissibility (miu1-3)");
    if (!rg.pass()) throw validation_error("run: boundary kernel fails admissibility (miu1-3)");
    if (!cfg.linear_twin) {
      const auto sg = validate_sign_growth(cfg.nonlin);
      if (!sg.pass)
        throw validation_error("run: sign/growth validation failed: " + sg.reason);
      const auto bal = check_balance(cfg.nonlin, cfg.op.nu, cfg.op.beta, *cfg.geom,
                                     cfg.op.omega);
      if (!bal.pass)
        throw validation_error("run: balance condition failed: " + bal.reason);
    }
  }

  const ModalSystem sys = build_modal_system(cfg);
  GalerkinState st = project_initial(cfg.u0, cfg.phi0, sys);

  Trajectory traj;
  traj.stride = cfg.stride;
  traj.dt = cfg.dt;
  traj.r1 = validate_sign_growth(cfg.nonlin).r1;

  double cum_q = 0.0;
  StepChannels ch = step_channels(st, sys);
  double prev_q_integrand = ch.v1 - ch.diss;
  traj.rows.push_back(make_row(st, sys, ch, traj.r1, cum_q));
  traj.sup_neg_f_inner = std::max(0.0, -2.0 * ch.f_inner);

  std::vector<Vec> modal_snaps;
  if (keep_modal) modal_snaps.push_back(st.a);

  Stepper stepper(sys, cfg.scheme, cfg.dt);
  for (long n = 0; n < nsteps; ++n) {
    stepper.advance(st);
    const bool sampled = (n + 1) % cfg.stride == 0 || n + 1 == nsteps;
    if (cfg.track_energy || sampled) {
      ch = step_channels(st, sys);
      cum_q += 0.5 * cfg.dt * (ch.v1 - ch.diss + prev_q_integrand);
      prev_q_integrand = ch.v1 - ch.diss;
      traj.sup_neg_f_inner = std::max(traj.sup_neg_f_inner, -2.0 * ch.f_inner);
    }
    if (sampled) {
      traj.rows.push_back(make_row(st, sys, ch, traj.r1, cum_q));
      if (keep_modal) modal_snaps.push_back(st.a);
    }
  }

  if (keep_modal) {
    Mat m(static_cast<int>(modal_snaps.size()), sys.n_modes());
    for (size_t i = 0; i < modal_snaps.size(); ++i)
      m.row(static_cast<int>(i)) = modal_snaps[i].transpose();
    traj.modal_rows = m;
  }
  traj.final_state = std::move(st);
  return traj;
}

LimitSystem build_limit_system(std::shared_ptr<const Geometry> geom,
                               const NonlinearitySpec& spec, double alpha,
                               double beta, double omega, double nu,
                               int n_modes) {
  LimitSystem sys;
  sys.geom = geom;
  sys.reactions = limit_shifted(spec, alpha, beta, omega, nu);

  const Geometry& g = *geom;
  const int n = g.n_bulk();
  if (n_modes < 1 || n_modes > n) throw config_error("build_limit_system: n_modes out of range");

  SpMat M = g.mass_bulk;
  std::vector<Eigen::Triplet<double>> tm;
  for (int k = 0; k < M.outerSize(); ++k)
    for (SpMat::InnerIterator it(M, k); it; ++it)
      tm.emplace_back(it.row(), it.col(), it.value());
  for (int k = 0; k < g.mass_gamma.outerSize(); ++k)
    for (SpMat::InnerIterator it(g.mass_gamma, k); it; ++it)
      tm.emplace_back(g.boundary_nodes[it.row()], g.boundary_nodes[it.col()], it.value());
  SpMat Mfull(n, n);
  Mfull.setFromTriplets(tm.begin(), tm.end());

  std::vector<Eigen::Triplet<double>> tk;
  for (int k = 0; k < g.stiffness_bulk.outerSize(); ++k)
    for (SpMat::InnerIterator it(g.stiffness_bulk, k); it; ++it)
      tk.emplace_back(it.row(), it.col(), it.value());
  for (int k = 0; k < g.stiffness_gamma.outerSize(); ++k)
    for (SpMat::InnerIterator it(g.stiffness_gamma, k); it; ++it)
      tk.emplace_back(g.boundary_nodes[it.row()], g.boundary_nodes[it.col()], it.value());
  SpMat K(n, n);
  K.setFromTriplets(tk.begin(), tk.end());

  const Mat K_dense(K), M_dense(Mfull);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(K_dense, M_dense);
  if (es.info() != Eigen::Success)
    throw numerical_error("build_limit_system: eigensolve failed");
  sys.lambda = es.eigenvalues().head(n_modes);
  sys.Psi = es.eigenvectors().leftCols(n_modes);
  sys.M = Mfull;
  return sys;
}

Vec run_limit(const LimitSystem& sys, const Vec& u0_nodal, double dt, double t_end) {
  const Geometry& g = *sys.geom;
  Vec a = sys.Psi.transpose() * (sys.M * u0_nodal);
  const long nsteps = std::llround(t_end / dt);
  for (long n = 0; n < nsteps; ++n) {
    const Vec u = sys.Psi * a;
    Vec fb(u.size());
    for (int i = 0; i < u.size(); ++i) fb[i] = sys.reactions.f_bar(u[i]);
    Vec gb(g.n_gamma());
    for (int j = 0; j < g.n_gamma(); ++j)
      gb[j] = sys.reactions.g_bar(u[g.boundary_nodes[j]]);
    const Vec load = g.mass_bulk * fb + g.lift_boundary(g.mass_gamma * gb);
    const Vec ex = sys.Psi.transpose() * load;
    a = (a - dt * ex).cwiseQuotient(Vec::Ones(a.size()) + dt * sys.lambda);
  }
  return sys.Psi * a;
}

}  // namespace cogur
