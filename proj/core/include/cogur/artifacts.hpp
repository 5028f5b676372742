#pragma once

#include <string>
#include <vector>

#include "cogur/analysis.hpp"
#include "cogur/config.hpp"

namespace cogur {

/// Deterministic float formatting used by every emitter (17 significant
/// digits, C locale).
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);

/// Trajectory table: t plus the selected channels, optionally the modal
/// coefficients a_1..a_n.  Column order is fixed by the channel list.
std::string trajectory_csv(const Trajectory& traj,
                           const std::vector<std::string>& channels,
                           bool with_modal);

std::string eig_csv(const EigenBasis& basis);

std::string study_csv(const ConvergenceReport& rep);

std::string limit_csv(const std::vector<LimitStudyRow>& rows);

/// Self-contained SVG line plot of one channel over time; byte output is a
/// pure function of the data.
std::string svg_line_plot(const std::vector<double>& t,
                          const std::vector<double>& y,
                          const std::string& channel);

/// Channel series extraction from a trajectory (energy_X2, energy_M1,
/// dissipation, V1_norm).
std::vector<double> channel_series(const Trajectory& traj,
                                   const std::string& channel);

/// Run manifest: resolved config hash, tool version, validation reports and
/// output inventory, as ordered JSON.
std::string manifest_json(const RunConfig& rc,
                          const AdmissibilityReport& kernel_omega,
                          const AdmissibilityReport& kernel_gamma,
                          const SignGrowthReport& sign_growth,
                          const BalanceReport& balance,
                          const std::vector<std::string>& outputs);

std::string admissibility_json(const AdmissibilityReport& rep);
std::string nonlinearity_json(const SignGrowthReport& sg, const BalanceReport& bal);

}  // namespace cogur
