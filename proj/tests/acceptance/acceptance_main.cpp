// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one [PASS]/[FAIL] line per criterion.  Exit status is the number
// of failed criteria.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cogur/analysis.hpp"
#include "cogur/artifacts.hpp"
#include "cogur/cli.hpp"
#include "cogur/config.hpp"
#include "oracles.hpp"

using namespace cogur;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int idx, const std::string& what, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", idx,
              what.c_str(), detail.c_str());
  if (!ok) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

SimConfig make_sim(std::shared_ptr<const Geometry> geom, double al, double be,
                   double om, double nu, int n_modes, const KernelPair& kernels,
                   const NonlinearitySpec& nl, Scheme scheme, double dt,
                   double t_end, double s_max, const Vec& a0_coeffs) {
  SimConfig cfg;
  cfg.geom = geom;
  cfg.op = assemble(geom, al, be, om, nu);
  cfg.basis = eigenbasis(cfg.op, n_modes);
  cfg.kernels = kernels;
  cfg.nonlin = nl;
  cfg.scheme = scheme;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.s_max = s_max;
  cfg.n_modes = n_modes;
  cfg.stride = 1;
  Vec a = Vec::Zero(n_modes);
  for (int i = 0; i < a0_coeffs.size() && i < n_modes; ++i) a[i] = a0_coeffs[i];
  cfg.u0 = make_v1_field(*geom, cfg.basis.Psi * a);
  return cfg;
}

NonlinearitySpec zero_spec() { return {ScalarFunc::zero(), ScalarFunc::zero()}; }

// ---------------------------------------------------------------------------

void criterion_1_eigenbasis() {
  auto geom = std::make_shared<Geometry>(build_interval(1.0, 128));
  const auto op = assemble(geom, 1.0, 1.0, 0.5, 0.5);
  const auto basis = eigenbasis(op, 5);

  const auto sh =
      oracles::shooting_eigenvalues({1.0, 128, 1.0, 1.0, 0.5, 0.5}, 5, 100.0);
  bool ok = sh.size() == 5;
  double worst = 0.0;
  for (int k = 0; ok && k < 5; ++k) {
    const double rel = std::abs(basis.lambda[k] - sh[k]) / std::abs(sh[k]);
    worst = std::max(worst, rel);
    if (rel > 1e-6) ok = false;
  }
  const Mat gram = basis.Psi.transpose() * (op.M * basis.Psi);
  const double dev = (gram - Mat::Identity(5, 5)).cwiseAbs().maxCoeff();
  if (dev > 1e-10) ok = false;
  report(1, "eigenbasis vs shooting oracle", ok,
         "max rel " + fmt(worst) + ", gram dev " + fmt(dev));
}

void criterion_2_constant_mode() {
  auto g1 = std::make_shared<Geometry>(build_interval(1.0, 16));
  const auto op1 = assemble(g1, 2.0, 1.0, 0.25, 0.5);  // al om = be nu = 0.5
  const auto b1 = eigenbasis(op1, 1);
  const double d1 = std::abs(b1.lambda[0] - 0.5);
  const Vec ones = Vec::Ones(g1->n_bulk());
  const double res1 = (op1.A * ones - 0.5 * (op1.M * ones)).norm();

  auto g2 = std::make_shared<Geometry>(build_disk(1.0, 2));
  const auto op2 = assemble(g2, 1.0, 1.0, 0.5, 0.5);
  const auto b2 = eigenbasis(op2, 1);
  const double d2 = std::abs(b2.lambda[0] - 0.5);

  const bool ok = d1 <= 1e-10 && d2 <= 1e-10 && res1 <= 1e-12;
  report(2, "constant eigenfunction when al om = be nu", ok,
         "interval " + fmt(d1) + ", disk " + fmt(d2));
}

void criterion_3_bvp() {
  const auto rep = convergence_study_mesh(Backend::disk, 1.0, {2, 3, 4});
  const bool order_ok = rep.ls_slope > 1.7 && rep.ls_slope < 2.3;

  const Geometry g = build_interval(1.0, 64);
  const double beta = 2.0;
  Vec p1 = Vec::Ones(g.n_bulk());
  Vec p2 = Vec::Zero(2);
  const auto sol = solve_bvp(g, p1, p2, beta);
  double worst = 0.0;
  for (int i = 0; i < g.n_bulk(); ++i) {
    const double x = g.nodes(i, 0);
    const double exact = -x * x / 2.0 + x / 2.0 + 1.0 / (2.0 * beta);
    worst = std::max(worst, std::abs(sol.field.u[i] - exact));
  }
  const bool ok = order_ok && worst <= 1e-10;
  report(3, "elliptic BVP: disk order 2, interval exact", ok,
         "slope " + fmt(rep.ls_slope) + ", interval err " + fmt(worst));
}

void criterion_4_representation() {
  // exact transport of a piecewise-constant input plus a shifted history
  const double dt = 0.125, T = 1.0;
  const int m = static_cast<int>(std::llround(T / dt));
  AgeGrid grid = make_age_grid(dt, 3.0);
  MemoryState st = zero_history(grid, 1);
  const double slope0 = 0.7;  // Phi0(s) = slope0 * s
  for (int k = 0; k < grid.n_nodes; ++k) st.samples(0, k) = slope0 * (k * dt);

  std::vector<double> c(m + 1, 0.0);
  for (int j = 1; j <= m; ++j) c[j] = (j % 2 ? 1.0 : -1.0) * (0.3 + 0.1 * j);
  for (int j = 1; j <= m; ++j) advance_history(st, Vec::Constant(1, c[j]), dt);

  double worst_exact = 0.0;
  for (int k = 0; k < grid.n_nodes; ++k) {
    const double s = k * dt;
    double expected;
    if (k <= m) {
      double acc = 0.0;
      for (int j = 0; j < k; ++j) acc += dt * c[m - j];
      expected = acc;  // int_0^s u(T-y) dy
    } else {
      double acc = 0.0;
      for (int j = 1; j <= m; ++j) acc += dt * c[j];
      expected = slope0 * (s - T) + acc;  // Phi0(s-T) + int_0^T u
    }
    worst_exact = std::max(worst_exact, std::abs(st.samples(0, k) - expected));
  }

  // first-order error for u(t) = t
  std::vector<double> hs, errs;
  for (double h : {1.0 / 64, 1.0 / 128, 1.0 / 256}) {
    AgeGrid gr = make_age_grid(h, 2.0);
    MemoryState s2 = zero_history(gr, 1);
    const int steps = static_cast<int>(std::llround(T / h));
    for (int j = 1; j <= steps; ++j) advance_history(s2, Vec::Constant(1, j * h), h);
    double werr = 0.0;
    for (int k = 0; k < gr.n_nodes; ++k) {
      const double s = k * h;
      const double exact = s <= T ? T * s - s * s / 2.0 : T * T / 2.0;
      werr = std::max(werr, std::abs(s2.samples(0, k) - exact));
    }
    hs.push_back(h);
    errs.push_back(werr);
  }
  const double slope = oracles::ls_slope(hs, errs);
  const bool ok = worst_exact <= 1e-13 && slope > 0.8 && slope < 1.2;
  report(4, "representation formula: exact branches, O(dt) ramp", ok,
         "exact dev " + fmt(worst_exact) + ", slope " + fmt(slope));
}

void criterion_5_dissipation_sign() {
  auto geom = std::make_shared<Geometry>(build_interval(1.0, 16));
  const auto op = assemble(geom, 1.0, 1.0, 0.5, 0.5);
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  bool ok = true;
  double worst = -1e300;
  for (int trial = 0; trial < 100 && ok; ++trial) {
    MemoryKernel k;
    const int fam = trial % 4;
    const double a = 0.1 + 1.9 * unit(rng);
    const double d = 0.2 + 2.8 * unit(rng);
    if (fam == 0) k = exponential_kernel(a, d);
    else if (fam == 1)
      k = biexponential_kernel(a, d, 0.1 + unit(rng), 0.2 + 2.0 * unit(rng));
    else if (fam == 2)
      k = power_law_kernel(a, 1.2 + 2.0 * unit(rng));
    else {
      std::vector<double> ts, mu;
      for (int i = 0; i <= 200; ++i) {
        const double s = 4.0 * i / 200.0;
        ts.push_back(s);
        mu.push_back(a * std::exp(-d * s));
      }
      k = tabulated_kernel(ts, mu);
    }
    KernelPair kp{k, k};
    AgeGrid grid = make_age_grid(0.05, 4.0);
    MemoryState st = zero_history(grid, geom->n_bulk());
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int kk = 1; kk < grid.n_nodes; ++kk)
      for (int i = 0; i < geom->n_bulk(); ++i) st.samples(i, kk) = gauss(rng);
    const double td = t_dissipation(st, kp, op);
    const double norm2 = m1_norm2(st, kp, op);
    worst = std::max(worst, td - 1e-10 * norm2);
    if (td > 1e-10 * norm2) ok = false;
  }
  report(5, "T-dissipation nonpositive on 100 random pairs", ok,
         "worst margin " + fmt(worst));
}

void criterion_6_energy() {
  auto geom = std::make_shared<Geometry>(build_interval(1.0, 32));
  KernelPair kernels{exponential_kernel(0.5, 1.0, KernelSide::omega),
                     exponential_kernel(0.4, 0.8, KernelSide::gamma)};

  Vec a0(8);
  a0 << 1.3, -0.7, 0.45, -0.3, 0.2, -0.12, 0.08, -0.05;
  SimConfig lin = make_sim(geom, 1.0, 1.0, 0.5, 0.5, 8, kernels, zero_spec(),
                           Scheme::imex_euler, 0.005, 2.0, 20.0, a0);
  const Trajectory tl = run(lin);
  bool monotone = true;
  double worst_de = -1e300;
  for (size_t k = 1; k < tl.rows.size(); ++k) {
    const double de = (tl.rows[k].energy_x2 + tl.rows[k].energy_m1) -
                      (tl.rows[k - 1].energy_x2 + tl.rows[k - 1].energy_m1);
    worst_de = std::max(worst_de, de);
    if (de >= 0.0) monotone = false;
  }

  NonlinearitySpec cubic{ScalarFunc::poly({0, 0, 0, 1}),
                         ScalarFunc::poly({0, -0.5})};  // g_tilde = -s
  Vec b0(6);
  b0 << 0.2, 0.1, 0.05, 0.02, 0.01, 0.004;
  SimConfig nl = make_sim(geom, 1.0, 1.0, 0.5, 0.5, 6, kernels, cubic,
                          Scheme::imex_euler, 0.002, 10.0, 20.0, b0);
  const Trajectory tn = run(nl);
  double e_max = 0.0;
  for (const auto& r : tn.rows) e_max = std::max(e_max, r.energy_x2 + r.energy_m1);
  const auto verdict = monitor_apriori(tn, nl, MonitorEnvelope::linear);
  const bool ok =
      monotone && std::isfinite(e_max) && verdict.conclusive && verdict.pass;
  report(6, "energy: linear monotone decay, a-priori monitor at 1%", ok,
         "max dE " + fmt(worst_de) + ", E_max " + fmt(e_max) + ", margin " +
             fmt(verdict.margin));
}

void criterion_7_continuous_dependence() {
  auto geom = std::make_shared<Geometry>(build_interval(1.0, 32));
  KernelPair kernels{exponential_kernel(0.5, 1.0, KernelSide::omega),
                     exponential_kernel(0.4, 0.8, KernelSide::gamma)};
  NonlinearitySpec nl{ScalarFunc::poly({0, -1, 0, 1}), ScalarFunc::zero()};
  Vec a0(8);
  a0 << 0.3, -0.18, 0.12, -0.06, 0.03, 0.015, -0.006, 0.003;
  SimConfig cfg = make_sim(geom, 1.0, 1.0, 0.5, 0.5, 8, kernels, nl,
                           Scheme::imex_euler, 1e-3, 1.0, 20.0, a0);
  const auto rep = continuous_dependence(cfg, 1e-6);
  const bool ok = rep.pass && std::abs(rep.C - 2.0) < 1e-12;
  report(7, "continuous dependence vs Gronwall envelope", ok,
         "C " + fmt(rep.C) + ", max ratio " + fmt(rep.max_ratio));
}

struct OracleSetup {
  SimConfig cfg;
  double exact_aT = 0.0;
};

OracleSetup make_oracle(Scheme scheme, double dt) {
  auto geom = std::make_shared<Geometry>(build_interval(1.0, 16));
  KernelPair kernels{exponential_kernel(0.08, 2.0, KernelSide::omega),
                     exponential_kernel(0.06, 1.6, KernelSide::gamma)};
  Vec a0 = Vec::Ones(1);
  // g(s) = nu beta s makes g_tilde vanish: the run is the pure linear
  // single-mode problem the augmented ODE describes
  NonlinearitySpec lin{ScalarFunc::zero(), ScalarFunc::poly({0.0, 0.125})};
  OracleSetup out;
  out.cfg = make_sim(geom, 0.25, 0.25, 0.5, 0.5, 1, kernels, lin, scheme,
                     dt, 1.0, 16.0, a0);
  out.cfg.track_energy = false;
  out.cfg.stride = 1 << 20;
  const ModalSystem sys = build_modal_system(out.cfg);
  out.exact_aT =
      oracles::augmented_ode_exact(1.0, sys.kap[0], sys.G_A0(0, 0), sys.G_C(0, 0),
                                   0.08 / 2.0, 2.0, 0.06 / 1.6, 1.6);
  return out;
}

void criterion_8_oracle() {
  auto eul = make_oracle(Scheme::imex_euler, 1e-4);
  const double a_eul = run(eul.cfg).final_state.a[0];
  const double err_eul = std::abs(a_eul - eul.exact_aT);

  auto bdf = make_oracle(Scheme::imex_bdf2, 1e-3);
  const double a_bdf = run(bdf.cfg).final_state.a[0];
  const double err_bdf = std::abs(a_bdf - bdf.exact_aT);

  const bool ok = err_eul < 1e-6 && err_bdf < 1e-8;
  report(8, "exponential-kernel closed-form oracle", ok,
         "euler " + fmt(err_eul) + ", bdf2 " + fmt(err_bdf));
}

void criterion_9_orders() {
  auto eul = make_oracle(Scheme::imex_euler, 1e-3);
  const auto rep_e = convergence_study_dt(eul.cfg, {4e-3, 2e-3, 1e-3},
                                          Vec::Constant(1, eul.exact_aT));
  auto bdf = make_oracle(Scheme::imex_bdf2, 2e-3);
  const auto rep_b = convergence_study_dt(bdf.cfg, {8e-3, 4e-3, 2e-3},
                                          Vec::Constant(1, bdf.exact_aT));
  const bool ok = rep_e.ls_slope > 0.85 && rep_e.ls_slope < 1.15 &&
                  rep_b.ls_slope > 1.8 && rep_b.ls_slope < 2.2;
  report(9, "time-integrator orders on the oracle problem", ok,
         "euler slope " + fmt(rep_e.ls_slope) + ", bdf2 slope " +
             fmt(rep_b.ls_slope));
}

void criterion_10_limit_trend() {
  auto geom = std::make_shared<Geometry>(build_interval(1.0, 32));
  KernelPair kernels{exponential_kernel(1.0, 1.0, KernelSide::omega),
                     exponential_kernel(1.0, 1.0, KernelSide::gamma)};
  NonlinearitySpec nl{ScalarFunc::poly({0, 0, 0, 1}), ScalarFunc::zero()};
  Vec a0(3);
  a0 << 1.0, 0.5, 0.25;
  SimConfig cfg = make_sim(geom, 1.0, 1.0, 0.5, 0.5, 10, kernels, nl,
                           Scheme::imex_euler, 1e-3, 0.5, 0.0, a0);
  cfg.track_energy = false;
  cfg.stride = 1 << 20;
  const auto rows = delta_limit_study(cfg, {0.5, 0.25, 0.125});
  bool ok = rows.size() == 3;
  for (size_t i = 1; i < rows.size(); ++i)
    if (rows[i].final_distance >= rows[i - 1].final_distance) ok = false;
  std::string detail;
  for (const auto& r : rows) detail += fmt(r.final_distance) + " ";
  report(10, "delta_0 limit: distances strictly decreasing", ok, detail);
}

void criterion_11_validators() {
  const Geometry geom = build_interval(1.0, 128);
  const double nu = 0.5, beta = 1.0, omega = 0.5;

  // anti-dissipative boundary, r1 > max{r2, 2(r2-1)}
  NonlinearitySpec a{ScalarFunc::poly({0, 0, 0, 1}), ScalarFunc::poly({0, -0.5})};
  const auto ra = check_balance(a, nu, beta, geom, omega);
  bool ok = ra.classification == NonlinearityClass::balance_condition && ra.pass &&
            ra.closed_form_pass && *ra.closed_form_pass;

  // dissipative pair bypasses the balance condition
  NonlinearitySpec b{ScalarFunc::poly({0, 0, 0, 1}),
                     ScalarFunc::poly({0, nu * beta, 0, 1})};
  const auto rb = check_balance(b, nu, beta, geom, omega);
  ok = ok && rb.classification == NonlinearityClass::dissipative && rb.pass;

  // sublinear pair: pass iff the closed-form inequality holds with C_Omega
  auto sublinear = [&](double cf) {
    NonlinearitySpec s{ScalarFunc::poly({0, cf}),
                       ScalarFunc::poly({0, nu * beta - 1.0})};  // g_tilde = -s
    return check_balance(s, nu, beta, geom, omega);
  };
  const double C = geom.poincare_constant();
  const double thresh = 2.0 + std::pow(2.0 * C, 2.0) / (0.99 * omega);
  const auto pass_case = sublinear(thresh + 0.7);
  const auto fail_case = sublinear(thresh - 0.8);
  ok = ok && pass_case.pass && pass_case.closed_form_pass &&
       *pass_case.closed_form_pass;
  ok = ok && !fail_case.pass && fail_case.closed_form_pass &&
       !*fail_case.closed_form_pass;
  report(11, "balance validator matches the closed-form casework", ok,
         "C_Omega " + fmt(C) + ", sublinear threshold " + fmt(thresh));
}

void criterion_12_determinism() {
  const std::string src = COGUR_SOURCE_DIR;
  const std::vector<std::pair<std::string, std::vector<std::string>>> suite = {
      {"run_linear", {"run", "-c", src + "/configs/linear_decay.toml"}},
      {"run_oracle", {"run", "-c", src + "/configs/oracle_bdf2.toml", "--modal"}},
      {"eig", {"eig", "-c", src + "/configs/linear_decay.toml"}},
      {"bvp", {"bvp", "-c", src + "/configs/disk_bvp.toml"}},
  };
  auto run_suite = [&](const std::string& root) {
    fs::remove_all(root);
    for (const auto& [name, args] : suite) {
      const std::string dir = root + "/" + name;
      ::setenv("COGUR_OUT", dir.c_str(), 1);
      if (dispatch(args) != 0) {
        ::unsetenv("COGUR_OUT");
        return false;
      }
    }
    ::unsetenv("COGUR_OUT");
    return true;
  };
  bool ok = run_suite("acc_det_a") && run_suite("acc_det_b");
  int compared = 0;
  if (ok) {
    for (const auto& entry : fs::recursive_directory_iterator("acc_det_a")) {
      if (!entry.is_regular_file()) continue;
      const std::string rel = fs::relative(entry.path(), "acc_det_a").string();
      std::ifstream fa(entry.path(), std::ios::binary);
      std::ifstream fb("acc_det_b/" + rel, std::ios::binary);
      std::stringstream sa, sb;
      sa << fa.rdbuf();
      sb << fb.rdbuf();
      if (!fb || sa.str() != sb.str()) {
        ok = false;
        break;
      }
      ++compared;
    }
    if (compared == 0) ok = false;
  }
  report(12, "byte-identical outputs across repeated executions", ok,
         std::to_string(compared) + " files compared");
}

}  // namespace

int main() {
  criterion_1_eigenbasis();
  criterion_2_constant_mode();
  criterion_3_bvp();
  criterion_4_representation();
  criterion_5_dissipation_sign();
  criterion_6_energy();
  criterion_7_continuous_dependence();
  criterion_8_oracle();
  criterion_9_orders();
  criterion_10_limit_trend();
  criterion_11_validators();
  criterion_12_determinism();
  if (g_failures == 0) std::printf("acceptance: all criteria passed\n");
  else std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return g_failures;
}
