#pragma once

#include "cogur/memory_kernel.hpp"
#include "cogur/wentzell.hpp"

namespace cogur {

/// Uniform age grid s_k = k ds, k = 0..n_nodes-1, with composite trapezoid
/// weights.  ds is locked to the time step so the transport update is an
/// exact characteristic shift.
struct AgeGrid {
  double ds = 0.0;
  double s_max = 0.0;
  int n_nodes = 0;  // includes the structural zero at s = 0

  Vec nodes() const;
  Vec weights() const;
};

AgeGrid make_age_grid(double dt, double s_max);

/// Default truncation horizon: 20 / delta for certified-decay kernels
/// (tail below 1e-8 of the mass), hard default 40 otherwise.
double default_s_max(const MemoryKernel& k_omega, const MemoryKernel& k_gamma);

struct KernelPair {
  MemoryKernel omega;
  MemoryKernel gamma;
};

/// Past-history state sampled on an age grid.  Columns are the per-node
/// fields Phi(s_k); column 0 is the anchor Phi(0) = 0, kept structurally.
/// The field dimension is whatever the caller works in (bulk nodal values
/// for the reference path, modal coefficients inside the Galerkin engine).
struct MemoryState {
  AgeGrid grid;
  Mat samples;  // dim x n_nodes

  int dim() const { return static_cast<int>(samples.rows()); }

  /// Characteristic shift by one grid cell plus an additive increment on
  /// every aged node: new(s_k) = old(s_{k-1}) + inc, new(0) = 0.  The oldest
  /// sample is discarded.
  void shift_and_add(const Vec& increment);
};

MemoryState zero_history(const AgeGrid& grid, int dim);

/// Transport update Phi <- shifted Phi + dt u(t+dt), the discrete mild
/// solution step.  dt must equal the grid spacing.
void advance_history(MemoryState& state, const Vec& field_now, double dt);

/// Weighted load sum_k w_k [mu_O(s_k) A0 eta_k + nu mu_G(s_k) lift(C xi_k)]
/// entering the U-equation.  The state holds trace-consistent bulk fields.
Vec memory_load(const MemoryState& state, const KernelPair& kernels,
                const WentzellOperator& op);

/// 1/2 sum_k w_k [mu_O'(s_k) |eta_k|_A0^2 + nu mu_G'(s_k) |xi_k|_C^2],
/// nonpositive for admissible kernels.
double t_dissipation(const MemoryState& state, const KernelPair& kernels,
                     const WentzellOperator& op);

/// Squared history norm in the kernel-weighted first-order metric.
double m1_norm2(const MemoryState& state, const KernelPair& kernels,
                const WentzellOperator& op);

/// Analytic bound on the mass lost to truncation at s_max, scaled by the
/// largest sampled field norm.
double tail_bound(const MemoryState& state, const KernelPair& kernels,
                  const WentzellOperator& op);

}  // namespace cogur
