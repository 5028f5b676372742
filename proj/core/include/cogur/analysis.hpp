#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cogur/galerkin.hpp"

namespace cogur {

/// Norm and dissipation channels for one state (same quantities run()
/// samples along a trajectory).
EnergyRow energy(const GalerkinState& state, const ModalSystem& sys);

enum class MonitorEnvelope { linear, exponential };

struct MonitorVerdict {
  bool pass = false;
  bool conclusive = false;  // requires stride-1 sampling
  double margin = 0.0;      // smallest envelope-minus-accumulation gap
  double envelope_c = 0.0;  // observed sup of 2 max(0, -<F,U>)
  std::string detail;
};

/// Integrated energy-inequality monitor.  Accumulates
///   D(t) = E(t) - E(0) + 2 int_0^t (||U||_V1^2 - <T Phi, Phi>)
/// and requires D(t) <= C t + margin with C the run's own observed
/// F-product envelope and margin one percent of the energy scale; the
/// exponential option relaxes the envelope by the Gronwall factor
/// e^{2 max(M_f, M_g + nu beta) t}.  Any positive dissipation sample fails.
MonitorVerdict monitor_apriori(const Trajectory& traj, const SimConfig& cfg,
                               MonitorEnvelope envelope = MonitorEnvelope::exponential);

struct ContDepReport {
  bool pass = false;
  double C = 0.0;            // 2 max(M_f, M_g + nu beta)
  double max_ratio = 0.0;    // sup_t lhs / (init e^{Ct})
  double fitted_rate = 0.0;  // least-squares growth rate of the difference
};

/// Two runs from U0 and U0 + delta0 Psi_1; checks
/// ||dU(t)||_X2 + ||dPhi(t)||_M1 <= (initial difference) e^{Ct}.
ContDepReport continuous_dependence(const SimConfig& cfg, double delta0);

enum class StudyAxis { dt, modes, mesh };

struct ConvergenceReport {
  StudyAxis axis = StudyAxis::dt;
  std::vector<double> level_param;
  std::vector<double> error;
  std::vector<double> order;  // pairwise observed orders
  double ls_slope = 0.0;
  bool monotone = true;       // flagged, never thrown
};

/// dt refinement on the base configuration; errors against the supplied
/// reference final coefficients, or an internal run at a quarter of the
/// finest step when none is given.
ConvergenceReport convergence_study_dt(const SimConfig& base,
                                       const std::vector<double>& dts,
                                       const std::optional<Vec>& reference_a = {});

/// Mode-count refinement, errors vs the largest count.
ConvergenceReport convergence_study_modes(const SimConfig& base,
                                          const std::vector<int>& mode_counts);

/// Mesh refinement through the manufactured static problems
/// (cos(pi x) on the interval, u = x on the disk); errors are exact.
ConvergenceReport convergence_study_mesh(Backend backend, double beta,
                                         const std::vector<int>& levels);

struct StrongDiagnostics {
  std::vector<double> t;
  std::vector<double> v1_norm;
  std::vector<double> dt_u_x2;   // central differences
  std::vector<double> m2_proxy;  // M1 norm of A-applied history
  bool cancellation_regime = false;  // mu_Omega identical to mu_Gamma
  bool bounded = false;
};

StrongDiagnostics strong_diagnostics(const SimConfig& cfg);

struct TraceInterpolationCheck {
  double lhs = 0;       // ||u||_{L^s(Gamma)}^s
  double grad2 = 0;     // ||grad u||^2
  double bulk_term = 0; // ||u||_{L^gamma(Omega)}^gamma + 1
  double ratio = 0;     // lhs / (eps grad2 + (1/eps) bulk_term)
};

/// Monitored boundary-trace interpolation inequality with gamma =
/// max(s, 2(s-1)) and the 1/eps constant scaling.
TraceInterpolationCheck trace_interpolation(const Geometry& geom, const Vec& u,
                                            double s, double eps);

struct LimitStudyRow {
  double eps = 0;
  double final_distance = 0;
};

/// Concentrating-kernel comparison against the memoryless limit system:
/// kernels mu_eps(s) = c delta^2 exp(-delta s), delta = 1/eps, with
/// c = (1-omega)/omega resp. (1-nu)/nu, versus the shifted-reaction run.
std::vector<LimitStudyRow> delta_limit_study(const SimConfig& base,
                                             const std::vector<double>& epsilons);

}  // namespace cogur
