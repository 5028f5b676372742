#include "cogur/memory_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cogur {

namespace {

double interp(const std::vector<double>& xs, const std::vector<double>& ys,
              double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const size_t j = static_cast<size_t>(it - xs.begin());
  const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return (1 - t) * ys[j - 1] + t * ys[j];
}

std::vector<double> table_derivative(const std::vector<double>& s,
                                     const std::vector<double>& mu) {
  const size_t n = s.size();
  std::vector<double> d(n);
  d[0] = (mu[1] - mu[0]) / (s[1] - s[0]);
  d[n - 1] = (mu[n - 1] - mu[n - 2]) / (s[n - 1] - s[n - 2]);
  for (size_t i = 1; i + 1 < n; ++i) d[i] = (mu[i + 1] - mu[i - 1]) / (s[i + 1] - s[i - 1]);
  return d;
}

}  // namespace

double MemoryKernel::eval(double s) const {
  switch (family) {
    case KernelFamily::exponential:
      return a0 * std::exp(-d0 * s);
    case KernelFamily::biexponential:
      return a0 * std::exp(-d0 * s) + a1 * std::exp(-d1 * s);
    case KernelFamily::power_law:
      return a0 * std::pow(1.0 + s, -p);
    case KernelFamily::tabulated:
      return interp(tab_s, tab_mu, s);
  }
  return 0.0;
}

double MemoryKernel::deriv(double s) const {
  switch (family) {
    case KernelFamily::exponential:
      return -d0 * a0 * std::exp(-d0 * s);
    case KernelFamily::biexponential:
      return -d0 * a0 * std::exp(-d0 * s) - d1 * a1 * std::exp(-d1 * s);
    case KernelFamily::power_law:
      return -p * a0 * std::pow(1.0 + s, -p - 1.0);
    case KernelFamily::tabulated: {
      const auto d = table_derivative(tab_s, tab_mu);
      return interp(tab_s, d, s);
    }
  }
  return 0.0;
}

double MemoryKernel::mass() const {
  switch (family) {
    case KernelFamily::exponential:
      return a0 / d0;
    case KernelFamily::biexponential:
      return a0 / d0 + a1 / d1;
    case KernelFamily::power_law:
      return p > 1.0 ? a0 / (p - 1.0) : std::numeric_limits<double>::infinity();
    case KernelFamily::tabulated: {
      double m = 0.0;
      for (size_t i = 1; i < tab_s.size(); ++i)
        m += 0.5 * (tab_mu[i] + tab_mu[i - 1]) * (tab_s[i] - tab_s[i - 1]);
      return m;
    }
  }
  return 0.0;
}

MemoryKernel exponential_kernel(double amplitude, double rate, KernelSide side) {
  if (amplitude < 0 || rate <= 0)
    throw config_error("exponential_kernel: need amplitude >= 0, rate > 0");
  MemoryKernel k;
  k.family = KernelFamily::exponential;
  k.side = side;
  k.a0 = amplitude;
  k.d0 = rate;
  k.decay_delta = 0.99 * rate;
  return k;
}

MemoryKernel biexponential_kernel(double a0, double d0, double a1, double d1,
                                  KernelSide side) {
  if (a0 < 0 || a1 < 0 || d0 <= 0 || d1 <= 0)
    throw config_error("biexponential_kernel: invalid parameters");
  MemoryKernel k;
  k.family = KernelFamily::biexponential;
  k.side = side;
  k.a0 = a0;
  k.d0 = d0;
  k.a1 = a1;
  k.d1 = d1;
  k.decay_delta = 0.99 * std::min(d0, d1);
  return k;
}

MemoryKernel power_law_kernel(double amplitude, double exponent, KernelSide side) {
  if (amplitude < 0 || exponent <= 0)
    throw config_error("power_law_kernel: invalid parameters");
  MemoryKernel k;
  k.family = KernelFamily::power_law;
  k.side = side;
  k.a0 = amplitude;
  k.p = exponent;
  // -mu'/mu = p/(1+s) vanishes at infinity: no certified rate
  return k;
}

MemoryKernel tabulated_kernel(std::vector<double> s, std::vector<double> mu,
                              KernelSide side) {
  if (s.size() < 2 || s.size() != mu.size())
    throw config_error("tabulated_kernel: need matching tables of length >= 2");
  for (size_t i = 1; i < s.size(); ++i)
    if (s[i] <= s[i - 1]) throw config_error("tabulated_kernel: s grid not ascending");
  MemoryKernel k;
  k.family = KernelFamily::tabulated;
  k.side = side;
  k.tab_s = std::move(s);
  k.tab_mu = std::move(mu);
  const auto d = table_derivative(k.tab_s, k.tab_mu);
  double inf_ratio = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < k.tab_s.size(); ++i) {
    if (k.tab_mu[i] > 0) inf_ratio = std::min(inf_ratio, -d[i] / k.tab_mu[i]);
  }
  if (std::isfinite(inf_ratio) && inf_ratio > 0) k.decay_delta = 0.99 * inf_ratio;
  return k;
}

AdmissibilityReport check_admissible(const MemoryKernel& k,
                                     const SamplingPlan& plan) {
  AdmissibilityReport r;
  const double m = k.mass();
  r.mu0 = m;
  r.miu1 = std::isfinite(m);

  std::vector<double> grid{0.0};
  const double llo = std::log(plan.s_lo), lhi = std::log(plan.s_hi);
  for (int i = 0; i < plan.n_log; ++i)
    grid.push_back(std::exp(llo + (lhi - llo) * i / (plan.n_log - 1)));

  const double tol = 1e-13;
  r.miu2 = true;
  r.miu3 = true;
  double inf_ratio = std::numeric_limits<double>::infinity();
  for (double s : grid) {
    const double mu = k.eval(s), dmu = k.deriv(s);
    if (mu < -tol) r.miu2 = false;
    if (dmu > tol * std::max(1.0, std::abs(mu))) r.miu3 = false;
    if (mu > tol) inf_ratio = std::min(inf_ratio, -dmu / mu);
  }

  // certified rates when the family admits one; power-law ratios vanish at
  // infinity, so the sampled infimum cannot certify fading there
  if (k.family == KernelFamily::power_law) {
    r.delta.reset();
  } else if (k.decay_delta) {
    r.delta = k.decay_delta;
  } else if (std::isfinite(inf_ratio) && inf_ratio > 0 && r.miu3) {
    r.delta = 0.99 * inf_ratio;
  }
  r.fading = r.delta.has_value() && r.miu3;
  return r;
}

MemoryKernel from_m_kernel(const MemoryKernel& m, double coeff, KernelSide side) {
  if (coeff <= 0.0 || coeff >= 1.0)
    throw config_error("from_m_kernel: coefficient must lie in (0,1)");
  const double c = (1.0 - coeff) / coeff;

  // reject m that increases somewhere
  SamplingPlan plan;
  std::vector<double> grid{0.0};
  for (int i = 0; i < plan.n_log; ++i)
    grid.push_back(std::exp(std::log(plan.s_lo) +
                            (std::log(plan.s_hi) - std::log(plan.s_lo)) * i /
                                (plan.n_log - 1)));
  for (double s : grid)
    if (m.deriv(s) > 1e-12 * std::max(1.0, std::abs(m.eval(s))))
      throw validation_error("from_m_kernel: m increases at s = " + std::to_string(s));

  MemoryKernel k;
  switch (m.family) {
    case KernelFamily::exponential:
      k = exponential_kernel(c * m.a0 * m.d0, m.d0, side);
      break;
    case KernelFamily::biexponential:
      k = biexponential_kernel(c * m.a0 * m.d0, m.d0, c * m.a1 * m.d1, m.d1, side);
      break;
    case KernelFamily::power_law:
      k = power_law_kernel(c * m.a0 * m.p, m.p + 1.0, side);
      break;
    case KernelFamily::tabulated: {
      std::vector<double> mu(m.tab_s.size());
      for (size_t i = 0; i < m.tab_s.size(); ++i) mu[i] = -c * m.deriv(m.tab_s[i]);
      k = tabulated_kernel(m.tab_s, std::move(mu), side);
      break;
    }
  }
  const auto rep = check_admissible(k);
  if (!rep.pass())
    throw validation_error("from_m_kernel: induced kernel fails admissibility");
  return k;
}

}  // namespace cogur
