#include "cogur/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace cogur {

namespace {

double horner(const std::vector<double>& c, double s) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + *it;
  return acc;
}

std::vector<double> poly_deriv(const std::vector<double>& c) {
  std::vector<double> d;
  for (size_t k = 1; k < c.size(); ++k) d.push_back(k * c[k]);
  return d;
}

std::vector<double> trim(std::vector<double> c) {
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  return c;
}

std::vector<double> poly_real_roots(const std::vector<double>& coeffs) {
  const auto c = trim(coeffs);
  if (c.size() <= 1) return {};
  const int n = static_cast<int>(c.size()) - 1;
  Mat comp = Mat::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i] / c[n];
  Eigen::EigenSolver<Mat> es(comp);
  std::vector<double> roots;
  for (int i = 0; i < n; ++i) {
    const auto z = es.eigenvalues()[i];
    if (std::abs(z.imag()) < 1e-8 * (1.0 + std::abs(z.real())))
      roots.push_back(z.real());
  }
  return roots;
}

// infimum over R of a polynomial; -inf when it escapes below
double poly_inf(const std::vector<double>& coeffs) {
  const auto c = trim(coeffs);
  if (c.empty()) return 0.0;
  if (c.size() == 1) return c[0];
  const int deg = static_cast<int>(c.size()) - 1;
  const double lead = c.back();
  const bool bounded_below = (deg % 2 == 0) && lead > 0;
  if (!bounded_below) return -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (double r : poly_real_roots(poly_deriv(c))) lo = std::min(lo, horner(c, r));
  // stationary-point set can be empty only for degree 0, handled above
  return lo;
}

std::vector<double> log_abs_grid(double lo, double hi, int n) {
  std::vector<double> g;
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) {
    const double s = std::exp(a + (b - a) * i / (n - 1));
    g.push_back(s);
    g.push_back(-s);
  }
  return g;
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int depth) {
  const double m = (a + b) / 2;
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  const double lm = (a + m) / 2, rm = (m + b) / 2;
  const double left = (m - a) / 6 * (fa + 4 * f(lm) + fm);
  const double right = (b - m) / 6 * (fm + 4 * f(rm) + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15 * tol)
    return left + right + (left + right - whole) / 15;
  return adaptive_simpson(f, a, m, tol / 2, depth - 1) +
         adaptive_simpson(f, m, b, tol / 2, depth - 1);
}

}  // namespace

double ScalarFunc::operator()(double s) const {
  switch (kind) {
    case Kind::polynomial: return horner(coeffs, s);
    case Kind::arctan: return std::atan(s);
    case Kind::custom: return fn(s);
  }
  return 0.0;
}

double ScalarFunc::deriv(double s) const {
  switch (kind) {
    case Kind::polynomial: return horner(poly_deriv(coeffs), s);
    case Kind::arctan: return 1.0 / (1.0 + s * s);
    case Kind::custom: return dfn(s);
  }
  return 0.0;
}

int ScalarFunc::degree() const {
  if (kind != Kind::polynomial) return -1;
  const auto c = trim(coeffs);
  return c.empty() ? 0 : static_cast<int>(c.size()) - 1;
}

ScalarFunc ScalarFunc::poly(std::vector<double> ascending_coeffs) {
  ScalarFunc f;
  f.kind = Kind::polynomial;
  f.coeffs = std::move(ascending_coeffs);
  return f;
}

ScalarFunc ScalarFunc::arctan() {
  ScalarFunc f;
  f.kind = Kind::arctan;
  return f;
}

ScalarFunc ScalarFunc::custom(std::function<double(double)> f,
                              std::function<double(double)> df) {
  ScalarFunc s;
  s.kind = Kind::custom;
  s.fn = std::move(f);
  s.dfn = std::move(df);
  return s;
}

ScalarFunc g_tilde(const NonlinearitySpec& spec, double nu, double beta) {
  const double shift = nu * beta;
  if (spec.g.is_poly()) {
    auto c = spec.g.coeffs;
    if (c.size() < 2) c.resize(2, 0.0);
    c[1] -= shift;
    return ScalarFunc::poly(trim(c));
  }
  const ScalarFunc g = spec.g;
  return ScalarFunc::custom([g, shift](double s) { return g(s) - shift * s; },
                            [g, shift](double s) { return g.deriv(s) - shift; });
}

BulkBoundaryField evaluate_F(const BulkBoundaryField& U,
                             const NonlinearitySpec& spec, double nu,
                             double beta) {
  const ScalarFunc gt = g_tilde(spec, nu, beta);
  BulkBoundaryField out;
  out.tag = U.tag;
  out.u.resize(U.u.size());
  out.v.resize(U.v.size());
  for (Eigen::Index i = 0; i < U.u.size(); ++i) {
    out.u[i] = spec.f(U.u[i]);
    if (!std::isfinite(out.u[i]))
      throw numerical_error("evaluate_F: non-finite f at bulk node " +
                            std::to_string(i));
  }
  for (Eigen::Index i = 0; i < U.v.size(); ++i) {
    out.v[i] = gt(U.v[i]);
    if (!std::isfinite(out.v[i]))
      throw numerical_error("evaluate_F: non-finite g_tilde at boundary node " +
                            std::to_string(i));
  }
  return out;
}

namespace {

struct SingleReport {
  double M = 0;       // max(0, -inf f')
  bool bounded = false;
  double ell = 0;
  double r = 2;
};

SingleReport analyze(const ScalarFunc& f) {
  SingleReport rep;
  if (f.is_poly()) {
    const double lo = poly_inf(poly_deriv(trim(f.coeffs)));
    rep.bounded = std::isfinite(lo);
    rep.M = rep.bounded ? std::max(0.0, -lo) : std::numeric_limits<double>::infinity();
    rep.r = std::max(2, f.degree() + 1);
  } else if (f.kind == ScalarFunc::Kind::arctan) {
    rep.bounded = true;
    rep.M = 0.0;
    rep.r = 2;
  } else {
    double lo = std::numeric_limits<double>::infinity();
    for (double s : log_abs_grid(1e-4, 1e6, 200)) lo = std::min(lo, f.deriv(s));
    lo = std::min(lo, f.deriv(0.0));
    rep.bounded = lo > -1e12;  // sampled lower bound only
    rep.M = std::max(0.0, -lo);
    rep.r = 2;
  }
  double ell = 0.0;
  for (double s : log_abs_grid(1e-3, 1e6, 200))
    ell = std::max(ell, std::abs(f(s)) / (1.0 + std::pow(std::abs(s), rep.r - 1.0)));
  ell = std::max(ell, std::abs(f(0.0)));
  rep.ell = ell * (1.0 + 1e-9);
  return rep;
}

}  // namespace

SignGrowthReport validate_sign_growth(const NonlinearitySpec& spec) {
  SignGrowthReport rep;
  const auto rf = analyze(spec.f), rg = analyze(spec.g);
  rep.M_f = rf.M;
  rep.M_g = rg.M;
  rep.ell1 = rf.ell;
  rep.ell2 = rg.ell;
  rep.r1 = rf.r;
  rep.r2 = rg.r;
  rep.pass = rf.bounded && rg.bounded;
  if (!rf.bounded) rep.reason = "f' unbounded below";
  if (!rg.bounded) rep.reason += std::string(rep.reason.empty() ? "" : "; ") + "g' unbounded below";
  return rep;
}

namespace {

// leading behavior c |s|^{deg+1} of p(s) s for an odd-degree polynomial with
// positive leading coefficient; that is the dissipative case of (p s >= C s^r)
bool poly_dissipative(const ScalarFunc& p) {
  if (!p.is_poly()) return false;
  const auto c = trim(p.coeffs);
  if (c.size() < 2) return false;
  const int deg = static_cast<int>(c.size()) - 1;
  return deg % 2 == 1 && c.back() > 0;
}

}  // namespace

BalanceReport check_balance(const NonlinearitySpec& spec, double nu,
                            double beta, const Geometry& geom, double omega) {
  BalanceReport rep;
  const ScalarFunc gt = g_tilde(spec, nu, beta);
  const auto sg = validate_sign_growth(spec);

  if (poly_dissipative(spec.f) && poly_dissipative(gt)) {
    rep.classification = NonlinearityClass::dissipative;
    rep.pass = true;
    rep.reason = "bulk and boundary reactions dissipative; balance not required";
    return rep;
  }
  if (sg.pass && sg.M_f == 0.0 && sg.M_g == 0.0) {
    rep.classification = NonlinearityClass::sign_only;
    rep.pass = true;
    rep.reason = "monotone reactions; balance vacuous";
    return rep;
  }

  rep.classification = NonlinearityClass::balance_condition;
  const double r1 = sg.r1;
  const double r2_gt = gt.is_poly() ? std::max(2, gt.degree() + 1) : 2.0;
  if (r1 < std::max(r2_gt, 2.0 * (r2_gt - 1.0))) {
    rep.pass = false;
    rep.reason = "exponent precondition r1 >= max{r2, 2(r2-1)} violated";
    return rep;
  }

  const double C = geom.poincare_constant();
  const double ratio = geom.surface / geom.volume;
  const double k2 = C * C * ratio * ratio / 4.0;

  // polynomial casework fast path: leading-coefficient conditions at the
  // largest admitted epsilon (the bound tightens as epsilon shrinks)
  if (spec.f.is_poly() && gt.is_poly()) {
    const auto cf = trim(spec.f.coeffs);
    const auto cg = trim(gt.coeffs);
    const double lf = cf.empty() ? 0.0 : cf.back();
    const double lg = cg.empty() ? 0.0 : cg.back();
    const double eps_max = 0.99 * omega;
    if (lf > 0 && lg < 0 && r1 > std::max(r2_gt, 2.0 * (r2_gt - 1.0))) {
      rep.closed_form_pass = true;
    } else if (r1 == 2.0 && r2_gt == 2.0) {
      rep.closed_form_pass =
          lf + ratio * lg > (1.0 / eps_max) * std::pow(C * ratio * lg, 2.0);
    } else if (r2_gt > 2.0 && r1 == 2.0 * (r2_gt - 1.0)) {
      rep.closed_form_pass =
          lf > (1.0 / (4.0 * eps_max)) * std::pow(C * ratio * lg * r2_gt, 2.0);
    }
  }

  // scan |s| on a log grid to 1e6 for each epsilon; require a positive floor
  const double lead = spec.f.is_poly() && !trim(spec.f.coeffs).empty()
                          ? std::abs(trim(spec.f.coeffs).back())
                          : 1.0;
  const double floor = 1e-12 * std::max(1.0, lead);
  const auto sgrid = log_abs_grid(10.0, 1e6, 160);

  double best = -std::numeric_limits<double>::infinity();
  std::optional<double> witness;
  for (int i = 0; i < 32; ++i) {
    const double eps = std::exp(std::log(1e-4 * omega) +
                                (std::log(0.99 * omega) - std::log(1e-4 * omega)) * i / 31.0);
    double worst = std::numeric_limits<double>::infinity();
    for (double s : sgrid) {
      const double gts = gt(s), dgts = gt.deriv(s);
      const double num = spec.f(s) * s + ratio * gts * s -
                         (k2 / eps) * std::pow(std::abs(dgts * s + gts), 2.0);
      worst = std::min(worst, num / std::pow(std::abs(s), r1));
    }
    if (worst > best) {
      best = worst;
      if (worst >= floor) witness = eps;
    }
  }
  rep.liminf_estimate = best;
  rep.pass = best >= floor;
  rep.witness_eps = witness;
  rep.reason = rep.pass ? "sampled liminf positive" : "sampled liminf not positive";
  return rep;
}

Primitives primitives(const NonlinearitySpec& spec) {
  auto make = [](const ScalarFunc& f) -> ScalarFunc {
    if (f.is_poly()) {
      // int_0^s f'(t) t dt for f = sum c_k t^k is sum_{k>=1} k c_k s^{k+1}/(k+1)
      const auto c = trim(f.coeffs);
      std::vector<double> h(c.size() + 1, 0.0);
      for (size_t k = 1; k < c.size(); ++k) h[k + 1] = k * c[k] / (k + 1.0);
      return ScalarFunc::poly(trim(h));
    }
    if (f.kind == ScalarFunc::Kind::arctan) {
      return ScalarFunc::custom(
          [](double s) { return 0.5 * std::log1p(s * s); },
          [](double s) { return s / (1.0 + s * s); });
    }
    const ScalarFunc g = f;
    return ScalarFunc::custom(
        [g](double s) {
          if (s == 0.0) return 0.0;
          auto integrand = [&g](double t) { return g.deriv(t) * t; };
          const double lo = std::min(0.0, s), hi = std::max(0.0, s);
          const double v = adaptive_simpson(integrand, lo, hi, 1e-10, 40);
          return s > 0 ? v : -v;
        },
        [g](double s) { return g.deriv(s) * s; });
  };
  return {make(spec.f), make(spec.g)};
}

ShiftedPair limit_shifted(const NonlinearitySpec& spec, double alpha,
                          double beta, double omega, double nu) {
  auto shift = [](const ScalarFunc& f, double c) -> ScalarFunc {
    if (f.is_poly()) {
      auto co = f.coeffs;
      if (co.size() < 2) co.resize(2, 0.0);
      co[1] += c;
      return ScalarFunc::poly(trim(co));
    }
    const ScalarFunc g = f;
    return ScalarFunc::custom([g, c](double s) { return g(s) + c * s; },
                              [g, c](double s) { return g.deriv(s) + c; });
  };
  return {shift(spec.f, (1.0 - omega) * alpha), shift(spec.g, (1.0 - nu) * beta)};
}

}  // namespace cogur
