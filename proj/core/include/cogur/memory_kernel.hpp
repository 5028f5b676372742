#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cogur/errors.hpp"

namespace cogur {

enum class KernelSide { omega, gamma };

enum class KernelFamily { exponential, biexponential, power_law, tabulated };

/// Admissible fading-memory kernel mu(s) with its derivative and mass.
///
///   exponential    mu(s) = a0 exp(-d0 s)
///   biexponential  mu(s) = a0 exp(-d0 s) + a1 exp(-d1 s)
///   power_law      mu(s) = a0 (1+s)^(-p)      (p > 1 for finite mass)
///   tabulated      samples on an ascending grid; derivative by central
///                  differences with one-sided ends, linear interpolation
struct MemoryKernel {
  KernelFamily family = KernelFamily::exponential;
  KernelSide side = KernelSide::omega;
  double a0 = 1.0, d0 = 1.0;
  double a1 = 0.0, d1 = 1.0;  // biexponential second term
  double p = 2.0;             // power-law exponent
  std::vector<double> tab_s, tab_mu;

  double eval(double s) const;
  double deriv(double s) const;

  /// Total mass mu0 = int_0^inf mu.  Closed form except for tabulated
  /// kernels, which use the trapezoid rule over their table.
  double mass() const;

  /// Certified exponential fading rate, present when mu' + delta mu <= 0
  /// holds on the admissibility sampling grid.
  std::optional<double> decay_delta;
};

MemoryKernel exponential_kernel(double amplitude, double rate,
                                KernelSide side = KernelSide::omega);
MemoryKernel biexponential_kernel(double a0, double d0, double a1, double d1,
                                  KernelSide side = KernelSide::omega);
MemoryKernel power_law_kernel(double amplitude, double exponent,
                              KernelSide side = KernelSide::omega);
MemoryKernel tabulated_kernel(std::vector<double> s, std::vector<double> mu,
                              KernelSide side = KernelSide::omega);

struct AdmissibilityReport {
  bool miu1 = false;  // C1 with finite mass
  bool miu2 = false;  // mu >= 0
  bool miu3 = false;  // mu' <= 0
  bool fading = false;
  std::optional<double> delta;  // 0.99 inf(-mu'/mu) when positive
  double mu0 = 0.0;
  bool pass() const { return miu1 && miu2 && miu3; }
};

struct SamplingPlan {
  double s_lo = 1e-4;
  double s_hi = 40.0;
  int n_log = 400;  // log-dense interior samples, plus s = 0
};

AdmissibilityReport check_admissible(const MemoryKernel& k,
                                     const SamplingPlan& plan = {});

/// Kernel induced by a primitive memory function m through
/// mu = -coeff^{-1} (1 - coeff) m'.  The family maps onto itself
/// (exponential -> exponential, (1+s)^-p -> (1+s)^-(p+1), tables -> tables).
/// Throws if m increases anywhere on the sampling grid.
MemoryKernel from_m_kernel(const MemoryKernel& m, double coeff,
                           KernelSide side = KernelSide::omega);

}  // namespace cogur
