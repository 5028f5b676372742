#include "cogur/history.hpp"

#include <cmath>
#include <limits>

namespace cogur {

Vec AgeGrid::nodes() const {
  Vec s(n_nodes);
  for (int k = 0; k < n_nodes; ++k) s[k] = k * ds;
  return s;
}

Vec AgeGrid::weights() const {
  Vec w = Vec::Constant(n_nodes, ds);
  w[0] = ds / 2.0;
  w[n_nodes - 1] = ds / 2.0;
  return w;
}

AgeGrid make_age_grid(double dt, double s_max) {
  if (dt <= 0 || s_max <= 0) throw config_error("make_age_grid: dt, s_max > 0 required");
  AgeGrid g;
  g.ds = dt;
  const int cells = std::max(1, static_cast<int>(std::llround(s_max / dt)));
  g.n_nodes = cells + 1;
  g.s_max = cells * dt;
  return g;
}

double default_s_max(const MemoryKernel& k_omega, const MemoryKernel& k_gamma) {
  const auto ro = check_admissible(k_omega), rg = check_admissible(k_gamma);
  if (ro.delta && rg.delta) return 20.0 / std::min(*ro.delta, *rg.delta);
  return 40.0;
}

void MemoryState::shift_and_add(const Vec& increment) {
  if (increment.size() != dim())
    throw shape_error("shift_and_add: increment dimension mismatch");
  const int n = grid.n_nodes;
  for (int k = n - 1; k >= 1; --k) samples.col(k) = samples.col(k - 1) + increment;
  samples.col(0).setZero();
}

MemoryState zero_history(const AgeGrid& grid, int dim) {
  return {grid, Mat::Zero(dim, grid.n_nodes)};
}

void advance_history(MemoryState& state, const Vec& field_now, double dt) {
  if (std::abs(dt - state.grid.ds) > 1e-12 * std::max(1.0, state.grid.ds))
    throw grid_mismatch_error("advance_history: dt must equal the age spacing");
  state.shift_and_add(dt * field_now);
}

namespace {

// per-column quadratic forms against A0 (bulk) and nu*C (boundary)
void history_forms(const MemoryState& state, const WentzellOperator& op,
                   Vec& qa, Vec& qc) {
  const int n = state.grid.n_nodes;
  qa.resize(n);
  qc.resize(n);
  const Geometry& g = *op.geom;
  for (int k = 0; k < n; ++k) {
    const Vec eta = state.samples.col(k);
    qa[k] = eta.dot(op.A0 * eta);
    const Vec xi = trace(g, eta);
    qc[k] = op.nu * xi.dot(op.C_gamma * xi);
  }
}

}  // namespace

Vec memory_load(const MemoryState& state, const KernelPair& kernels,
                const WentzellOperator& op) {
  if (state.dim() != op.dim())
    throw shape_error("memory_load: state dimension does not match operator");
  const Vec w = state.grid.weights();
  const Vec s = state.grid.nodes();
  Vec accO = Vec::Zero(state.dim());
  Vec accG = Vec::Zero(op.geom->n_gamma());
  for (int k = 1; k < state.grid.n_nodes; ++k) {
    const double wo = w[k] * kernels.omega.eval(s[k]);
    const double wg = w[k] * kernels.gamma.eval(s[k]);
    if (wo != 0.0) accO += wo * state.samples.col(k);
    if (wg != 0.0) accG += wg * trace(*op.geom, state.samples.col(k));
  }
  return op.A0 * accO + op.nu * op.geom->lift_boundary(op.C_gamma * accG);
}

double t_dissipation(const MemoryState& state, const KernelPair& kernels,
                     const WentzellOperator& op) {
  Vec qa, qc;
  history_forms(state, op, qa, qc);
  const Vec w = state.grid.weights();
  const Vec s = state.grid.nodes();
  double acc = 0.0;
  for (int k = 0; k < state.grid.n_nodes; ++k)
    acc += w[k] * (kernels.omega.deriv(s[k]) * qa[k] + kernels.gamma.deriv(s[k]) * qc[k]);
  return 0.5 * acc;
}

double m1_norm2(const MemoryState& state, const KernelPair& kernels,
                const WentzellOperator& op) {
  Vec qa, qc;
  history_forms(state, op, qa, qc);
  const Vec w = state.grid.weights();
  const Vec s = state.grid.nodes();
  double acc = 0.0;
  for (int k = 0; k < state.grid.n_nodes; ++k)
    acc += w[k] * (kernels.omega.eval(s[k]) * qa[k] + kernels.gamma.eval(s[k]) * qc[k]);
  return acc;
}

double tail_bound(const MemoryState& state, const KernelPair& kernels,
                  const WentzellOperator& op) {
  Vec qa, qc;
  history_forms(state, op, qa, qc);
  const double sup = (qa + qc).maxCoeff();
  const double S = state.grid.s_max;
  auto tail_mass = [S](const MemoryKernel& k) {
    switch (k.family) {
      case KernelFamily::exponential:
        return k.a0 / k.d0 * std::exp(-k.d0 * S);
      case KernelFamily::biexponential:
        return k.a0 / k.d0 * std::exp(-k.d0 * S) + k.a1 / k.d1 * std::exp(-k.d1 * S);
      case KernelFamily::power_law:
        return k.p > 1 ? k.a0 * std::pow(1.0 + S, 1.0 - k.p) / (k.p - 1.0)
                       : std::numeric_limits<double>::infinity();
      case KernelFamily::tabulated:
        return 0.0;  // tables carry no information beyond their range
    }
    return 0.0;
  };
  return (tail_mass(kernels.omega) + tail_mass(kernels.gamma)) * sup;
}

}  // namespace cogur
