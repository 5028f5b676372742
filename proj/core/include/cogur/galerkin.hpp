#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "cogur/history.hpp"
#include "cogur/memory_kernel.hpp"
#include "cogur/nonlinearity.hpp"
#include "cogur/wentzell.hpp"

namespace cogur {

enum class Scheme { imex_euler, imex_bdf2 };

/// Fully built run description: discrete operator, eigenbasis truncation,
/// kernels, reactions, time grid and initial data.
struct SimConfig {
  std::shared_ptr<const Geometry> geom;
  WentzellOperator op;
  EigenBasis basis;
  KernelPair kernels;
  NonlinearitySpec nonlin;

  Scheme scheme = Scheme::imex_euler;
  double dt = 1e-2;
  double t_end = 1.0;
  double s_max = 0.0;  // 0: derive from kernel decay
  int n_modes = 0;
  int stride = 1;

  BulkBoundaryField u0;                 // X2 pair allowed
  std::function<Vec(double)> phi0;      // nodal bulk history per age; null = 0
  bool force = false;                   // skip validators
  bool linear_twin = false;             // drop F (calibration runs)
  bool track_energy = true;             // dense per-step energy accounting
};

/// Modal state: coefficients of U_n on the eigenbasis plus the modally
/// stored history, with the nodal field cached for reaction evaluation.
struct GalerkinState {
  double t = 0.0;
  Vec a;                // n_modes
  MemoryState history;  // dim = n_modes
  Vec u_nodal;          // Psi a, kept consistent after every step
};

/// Precomputed modal engine shared by the steppers.
struct ModalSystem {
  std::shared_ptr<const Geometry> geom;
  WentzellOperator op;
  EigenBasis basis;
  KernelPair kernels;
  NonlinearitySpec nonlin;
  AgeGrid grid;
  bool linear = false;

  Mat G_A0, G_C, G_MOm;    // Psi' A0 Psi, nu Psi' lift(C) Psi, Psi' M_Omega Psi
  Vec kap;                 // implicit diagonal of the (0,beta,nu,omega) part
  Mat R_off;               // explicit remainder: -alpha omega offdiag(G_MOm)
  Mat Psi_b;               // boundary rows of Psi
  Vec wmu_omega, wmu_gamma;    // trapezoid weight x kernel at age nodes
  Vec wdmu_omega, wdmu_gamma;  // weight x kernel derivative
  Vec lumped_bulk;             // vertex-rule bulk quadrature weights

  int n_modes() const { return static_cast<int>(basis.lambda.size()); }

  Vec nodal(const Vec& a) const { return basis.Psi * a; }
  Vec f_modal(const Vec& a) const;          // Psi' M F(U)
  Vec memory_load_modal(const Mat& B) const;
  double f_inner(const Vec& a) const;       // <F(U), U>_X2

  double energy_x2(const Vec& a) const { return a.squaredNorm(); }
  double v1_norm2(const Vec& a) const;
  /// Per-age-node quadratic forms b_k' G_A0 b_k and b_k' G_C b_k.
  void history_forms(const Mat& B, Vec& qa, Vec& qc) const;
  double m1_norm2_modal(const Mat& B) const;
  double dissipation_modal(const Mat& B) const;
  double lr1_norm(const Vec& a, double r1) const;
};

ModalSystem build_modal_system(const SimConfig& cfg);

/// Modal projection of the initial pair and history.  X2 pairs with
/// inconsistent boundary data are projected in the X2 inner product.
GalerkinState project_initial(const BulkBoundaryField& u0,
                              const std::function<Vec(double)>& phi0,
                              const ModalSystem& sys);

struct RhsValue {
  Vec dadt;
  Vec memory_load;
};

/// da/dt = -diag(lambda) a + alpha omega G_MOm a - memory load - Psi' M F.
RhsValue rhs(const GalerkinState& state, const ModalSystem& sys);

/// One-step IMEX integrator; holds the two-level memory BDF2 needs.
class Stepper {
 public:
  Stepper(const ModalSystem& sys, Scheme scheme, double dt);
  void advance(GalerkinState& state);

 private:
  const ModalSystem& sys_;
  Scheme scheme_;
  double dt_;
  bool have_prev_ = false;
  Vec a_prev_, ex_prev_;
};

struct EnergyRow {
  double t = 0;
  double energy_x2 = 0;     // squared X2 norm
  double energy_m1 = 0;     // squared history norm
  double dissipation = 0;   // t-dissipation value, <= 0
  double v1_norm2 = 0;
  double lr1_norm = 0;
  double f_inner = 0;       // <F(U),U>_X2
  double cum_q = 0;         // int_0^t (v1_norm2 - dissipation), dense trapezoid
};

struct Trajectory {
  std::vector<EnergyRow> rows;       // sampled every stride steps
  std::optional<Mat> modal_rows;     // per-row coefficients when requested
  GalerkinState final_state;
  double sup_neg_f_inner = 0.0;      // densely tracked max(0, -2<F,U>)
  int stride = 1;
  double dt = 0.0;
  double r1 = 2.0;
};

/// Validates the configuration (kernel admissibility, reaction
/// classification) unless forced, then integrates to t_end.
Trajectory run(const SimConfig& cfg, bool keep_modal = false);

/// Memoryless limit system u_t - Lap u + f_bar = 0 with the dynamic
/// boundary condition u_t - Lap_G u + dn u + g_bar = 0; same IMEX treatment
/// on the eigenbasis of the full stiffness.
struct LimitSystem {
  std::shared_ptr<const Geometry> geom;
  Mat Psi;
  Vec lambda;
  SpMat M;
  ShiftedPair reactions;
};

LimitSystem build_limit_system(std::shared_ptr<const Geometry> geom,
                               const NonlinearitySpec& spec, double alpha,
                               double beta, double omega, double nu,
                               int n_modes);

/// Integrate the limit system from the given nodal initial field.
Vec run_limit(const LimitSystem& sys, const Vec& u0_nodal, double dt,
              double t_end);

}  // namespace cogur
