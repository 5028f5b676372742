#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cogur/geometry.hpp"
#include "cogur/wentzell.hpp"

namespace cogur {

/// Scalar reaction function with derivative.  Polynomials carry explicit
/// ascending coefficients and support exact calculus; presets (zero, arctan)
/// cover the bounded non-polynomial cases.
struct ScalarFunc {
  enum class Kind { polynomial, arctan, custom } kind = Kind::polynomial;
  std::vector<double> coeffs;  // c0 + c1 s + c2 s^2 + ...
  std::function<double(double)> fn, dfn;  // custom only

  double operator()(double s) const;
  double deriv(double s) const;
  bool is_poly() const { return kind == Kind::polynomial; }
  int degree() const;

  static ScalarFunc poly(std::vector<double> ascending_coeffs);
  static ScalarFunc zero() { return poly({}); }
  static ScalarFunc arctan();
  static ScalarFunc custom(std::function<double(double)> f,
                           std::function<double(double)> df);
};

struct NonlinearitySpec {
  ScalarFunc f;  // bulk reaction
  ScalarFunc g;  // boundary reaction
};

/// g_tilde(s) = g(s) - nu beta s, the boundary reaction seen by the weak form
/// once the nu beta mass moved into the operator.
ScalarFunc g_tilde(const NonlinearitySpec& spec, double nu, double beta);

/// Componentwise F(U) = (f(u), g_tilde(v)); throws naming the first node
/// whose image is non-finite.
BulkBoundaryField evaluate_F(const BulkBoundaryField& U,
                             const NonlinearitySpec& spec, double nu,
                             double beta);

struct SignGrowthReport {
  double M_f = 0, M_g = 0;      // -inf f', -inf g' (clamped at 0)
  double ell1 = 0, ell2 = 0;    // growth amplitudes
  double r1 = 2, r2 = 2;        // growth exponents, >= 2
  bool pass = false;
  std::string reason;
};

/// Exact constants for polynomials via critical-point analysis of the
/// derivative; sampled bounds otherwise.
SignGrowthReport validate_sign_growth(const NonlinearitySpec& spec);

enum class NonlinearityClass { dissipative, balance_condition, sign_only };

struct BalanceReport {
  NonlinearityClass classification = NonlinearityClass::sign_only;
  bool pass = false;
  std::optional<double> witness_eps;
  double liminf_estimate = 0.0;
  std::optional<bool> closed_form_pass;  // polynomial casework fast path
  std::string reason;
};

/// Asymptotic balance check between bulk dissipation and the boundary
/// reaction, using the geometry's Poincare constant and |Gamma|/|Omega|.
/// Dissipative pairs bypass the condition; monotone reactions need nothing.
BalanceReport check_balance(const NonlinearitySpec& spec, double nu,
                            double beta, const Geometry& geom, double omega);

struct Primitives {
  ScalarFunc h_f;  // int_0^s f'(t) t dt
  ScalarFunc h_g;  // int_0^s g'(t) t dt
};

/// Closed forms for polynomials, adaptive quadrature (abs tol 1e-10)
/// otherwise.
Primitives primitives(const NonlinearitySpec& spec);

struct ShiftedPair {
  ScalarFunc f_bar;  // f + (1-omega) alpha s
  ScalarFunc g_bar;  // g + (1-nu) beta s
};

/// Shifted reactions of the memoryless limit system.
ShiftedPair limit_shifted(const NonlinearitySpec& spec, double alpha,
                          double beta, double omega, double nu);

}  // namespace cogur
