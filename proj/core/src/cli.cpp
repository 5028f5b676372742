#include "cogur/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cogur/analysis.hpp"
#include "cogur/artifacts.hpp"
#include "cogur/config.hpp"

namespace cogur {

namespace {

namespace fs = std::filesystem;

std::string resolve_out_dir(const RunConfig& rc) {
  if (const char* env = std::getenv("COGUR_OUT"); env && *env) return env;
  return rc.out_dir;
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

int cmd_run(const std::string& config_path, bool force, bool modal) {
  const RunConfig rc = parse_config(config_path);
  const SimConfig cfg = build_sim(rc, force);

  const auto rep_o = check_admissible(cfg.kernels.omega);
  const auto rep_g = check_admissible(cfg.kernels.gamma);
  const auto sg = validate_sign_growth(cfg.nonlin);
  const auto bal = check_balance(cfg.nonlin, cfg.op.nu, cfg.op.beta, *cfg.geom,
                                 cfg.op.omega);

  const Trajectory traj = run(cfg, modal);

  const std::string dir = resolve_out_dir(rc);
  fs::create_directories(dir);
  std::vector<std::string> outputs;

  const std::string traj_path = dir + "/trajectory.csv";
  write_text_file(traj_path, trajectory_csv(traj, rc.channels, modal));
  outputs.push_back("trajectory.csv");

  for (const auto& ch : rc.channels) {
    const auto y = channel_series(traj, ch);
    if (y.empty()) continue;  // skipped, noted by omission from the inventory
    std::vector<double> t;
    for (const auto& r : traj.rows) t.push_back(r.t);
    const std::string name = ch + ".svg";
    write_text_file(dir + "/" + name, svg_line_plot(t, y, ch));
    outputs.push_back(name);
  }

  write_text_file(dir + "/manifest.json",
                  manifest_json(rc, rep_o, rep_g, sg, bal, outputs));
  std::printf("run: %zu rows -> %s\n", traj.rows.size(), dir.c_str());
  return 0;
}

int cmd_eig(const std::string& config_path) {
  const RunConfig rc = parse_config(config_path);
  const SimConfig cfg = build_sim(rc, true);
  const std::string csv = eig_csv(cfg.basis);
  std::fputs(csv.c_str(), stdout);
  const std::string dir = resolve_out_dir(rc);
  fs::create_directories(dir);
  write_text_file(dir + "/eig.csv", csv);
  return 0;
}

int cmd_bvp(const std::string& config_path) {
  const RunConfig rc = parse_config(config_path);
  std::ostringstream os;
  os << "case,l2_error,regularity_ratio\n";
  if (rc.backend == Backend::interval) {
    const Geometry g = build_interval(rc.size, rc.refine);
    // closed form for p1 = 1, p2 = 0: u = -x^2/2 + (L/2) x + L/(2 beta)... on [0,L]
    const double L = rc.size, beta = rc.beta;
    Vec p1 = Vec::Ones(g.n_bulk());
    Vec p2 = Vec::Zero(2);
    const auto sol = solve_bvp(g, p1, p2, beta);
    Vec exact(g.n_bulk());
    for (int i = 0; i < g.n_bulk(); ++i) {
      const double x = g.nodes(i, 0);
      exact[i] = -x * x / 2.0 + (L / 2.0) * x + L / (2.0 * beta);
    }
    const Vec d = sol.field.u - exact;
    os << "interval_quadratic," << format_double(std::sqrt(d.dot(g.mass_bulk * d)))
       << "," << format_double(sol.regularity_ratio) << "\n";
  } else {
    const Geometry g = build_disk(rc.size, rc.refine);
    Vec p1 = Vec::Zero(g.n_bulk());
    Vec p2(g.n_gamma());
    for (int j = 0; j < g.n_gamma(); ++j) {
      const int b = g.boundary_nodes[j];
      p2[j] = (2.0 + rc.beta) *
              (g.nodes(b, 0) / std::hypot(g.nodes(b, 0), g.nodes(b, 1)));
    }
    const auto sol = solve_bvp(g, p1, p2, rc.beta);
    Vec exact(g.n_bulk());
    for (int i = 0; i < g.n_bulk(); ++i) exact[i] = g.nodes(i, 0);
    const Vec d = sol.field.u - exact;
    os << "disk_linear," << format_double(std::sqrt(d.dot(g.mass_bulk * d))) << ","
       << format_double(sol.regularity_ratio) << "\n";
  }
  const std::string dir = resolve_out_dir(rc);
  fs::create_directories(dir);
  write_text_file(dir + "/bvp.csv", os.str());
  std::fputs(os.str().c_str(), stdout);
  return 0;
}

int cmd_check_kernel(const std::string& config_path) {
  const RunConfig rc = parse_config(config_path);
  const auto rep_o = check_admissible(rc.kernel_omega);
  const auto rep_g = check_admissible(rc.kernel_gamma);
  std::printf("{\n\"kernel_omega\": %s,\n\"kernel_gamma\": %s\n}\n",
              admissibility_json(rep_o).c_str(), admissibility_json(rep_g).c_str());
  return 0;
}

int cmd_check_nonlinearity(const std::string& config_path) {
  const RunConfig rc = parse_config(config_path);
  const Geometry geom = rc.backend == Backend::interval
                            ? build_interval(rc.size, rc.refine)
                            : build_disk(rc.size, rc.refine);
  const auto sg = validate_sign_growth(rc.nonlin);
  const auto bal = check_balance(rc.nonlin, rc.nu, rc.beta, geom, rc.omega);
  std::fputs(nonlinearity_json(sg, bal).c_str(), stdout);
  return 0;
}

int cmd_study(const std::string& config_path, const std::string& axis, int levels) {
  const RunConfig rc = parse_config(config_path);
  ConvergenceReport rep;
  if (axis == "dt") {
    const SimConfig cfg = build_sim(rc, false);
    std::vector<double> dts;
    for (int i = levels - 1; i >= 0; --i) dts.push_back(rc.dt * (1 << i));
    rep = convergence_study_dt(cfg, dts);
  } else if (axis == "modes") {
    const SimConfig cfg = build_sim(rc, false);
    std::vector<int> counts;
    for (int i = 0; i < levels; ++i) {
      const int nm = rc.n_modes << i;
      if (nm > cfg.geom->n_bulk()) break;
      counts.push_back(nm);
    }
    if (static_cast<int>(counts.size()) < 3)
      throw config_error("study: mode ladder exceeds the space dimension");
    rep = convergence_study_modes(cfg, counts);
  } else if (axis == "mesh") {
    std::vector<int> lv;
    const int base = rc.backend == Backend::interval ? 4 : 2;
    for (int i = 0; i < levels; ++i) lv.push_back(base + i);
    rep = convergence_study_mesh(rc.backend, rc.beta, lv);
  } else {
    throw config_error("study: axis must be dt, modes or mesh");
  }
  const std::string dir = resolve_out_dir(rc);
  fs::create_directories(dir);
  const std::string csv = study_csv(rep);
  write_text_file(dir + "/study.csv", csv);
  std::fputs(csv.c_str(), stdout);
  if (!rep.monotone) std::printf("# warning: errors not monotone\n");
  return 0;
}

int cmd_limit(const std::string& config_path, const std::string& eps_csv) {
  const RunConfig rc = parse_config(config_path);
  const SimConfig cfg = build_sim(rc, false);
  const auto eps = parse_double_list(eps_csv);
  if (eps.size() < 2) throw config_error("limit: need at least two epsilons");
  const auto rows = delta_limit_study(cfg, eps);
  const std::string dir = resolve_out_dir(rc);
  fs::create_directories(dir);
  const std::string csv = limit_csv(rows);
  write_text_file(dir + "/limit.csv", csv);
  std::fputs(csv.c_str(), stdout);
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"cogur: Coleman-Gurtin heat equation with dynamic boundary memory"};
  app.require_subcommand(1);

  std::string config_path, axis = "dt", epsilons = "0.5,0.25,0.125";
  int levels = 3;
  bool force = false, modal = false;

  auto* run_cmd = app.add_subcommand("run", "integrate a configured problem");
  run_cmd->add_option("-c,--config", config_path, "config file")->required();
  run_cmd->add_flag("--force", force, "skip validators");
  run_cmd->add_flag("--modal", modal, "emit modal coefficients a_1..a_n");

  auto* eig_cmd = app.add_subcommand("eig", "eigenvalue table of the operator");
  eig_cmd->add_option("-c,--config", config_path, "config file")->required();

  auto* bvp_cmd = app.add_subcommand("bvp", "manufactured static problem");
  bvp_cmd->add_option("-c,--config", config_path, "config file")->required();

  auto* ck = app.add_subcommand("check-kernel", "kernel admissibility report");
  ck->add_option("-c,--config", config_path, "config file")->required();

  auto* cn = app.add_subcommand("check-nonlinearity", "reaction validator report");
  cn->add_option("-c,--config", config_path, "config file")->required();

  auto* study_cmd = app.add_subcommand("study", "convergence study");
  study_cmd->add_option("-c,--config", config_path, "config file")->required();
  study_cmd->add_option("--axis", axis, "dt | modes | mesh");
  study_cmd->add_option("--levels", levels, "number of levels (>= 3)");

  auto* limit_cmd = app.add_subcommand("limit", "concentrating-kernel comparison");
  limit_cmd->add_option("-c,--config", config_path, "config file")->required();
  limit_cmd->add_option("--epsilons", epsilons, "comma-separated epsilon ladder");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help() << std::endl;
    std::cerr << e.what() << std::endl;
    return 64;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(config_path, force, modal);
    if (eig_cmd->parsed()) return cmd_eig(config_path);
    if (bvp_cmd->parsed()) return cmd_bvp(config_path);
    if (ck->parsed()) return cmd_check_kernel(config_path);
    if (cn->parsed()) return cmd_check_nonlinearity(config_path);
    if (study_cmd->parsed()) return cmd_study(config_path, axis, levels);
    if (limit_cmd->parsed()) return cmd_limit(config_path, epsilons);
  } catch (const validation_error& e) {
    std::cerr << "rejected: " << e.what() << std::endl;
    return 1;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 1;
  } catch (const numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return 2;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return 64;
}

}  // namespace cogur
