#pragma once

// Test-only oracles, kept independent of the library code paths they check.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracles {

// --- discrete shooting for the interval Wentzell eigenproblem -------------
//
// The P1 rows on a uniform mesh of [0,L] are derived by hand here:
//   interior k:  om (-u_{k-1} + 2 u_k - u_{k+1})/h
//                + (al om - lam) h (u_{k-1} + 4 u_k + u_{k+1})/6 = 0
//   endpoints:   om (u_0 - u_1)/h + (al om - lam) h (2 u_0 + u_1)/6
//                + (nu be - lam) u_0 = 0            (mirrored on the right)
// Two fundamental solutions are propagated from seeds (1,0), (0,1) and the
// 2x2 determinant of the two endpoint rows is bisected in lambda.

struct ShootingProblem {
  double L = 1.0;
  int n_cells = 128;
  double alpha = 1.0, beta = 1.0, omega = 0.5, nu = 0.5;
};

inline double shooting_determinant(const ShootingProblem& p, double lam) {
  const double h = p.L / p.n_cells;
  const int n = p.n_cells + 1;
  auto propagate = [&](double u0, double u1) {
    std::vector<double> u(n);
    u[0] = u0;
    u[1] = u1;
    const double cp = -p.omega / h + (p.alpha * p.omega - lam) * h / 6.0;
    const double cc = 2.0 * p.omega / h + (p.alpha * p.omega - lam) * 4.0 * h / 6.0;
    if (cp == 0.0) throw std::runtime_error("shooting: degenerate recurrence");
    for (int k = 1; k + 1 < n; ++k) u[k + 1] = -(cp * u[k - 1] + cc * u[k]) / cp;
    return u;
  };
  auto r_left = [&](const std::vector<double>& u) {
    return p.omega * (u[0] - u[1]) / h +
           (p.alpha * p.omega - lam) * h * (2.0 * u[0] + u[1]) / 6.0 +
           (p.nu * p.beta - lam) * u[0];
  };
  auto r_right = [&](const std::vector<double>& u) {
    return p.omega * (u[n - 1] - u[n - 2]) / h +
           (p.alpha * p.omega - lam) * h * (2.0 * u[n - 1] + u[n - 2]) / 6.0 +
           (p.nu * p.beta - lam) * u[n - 1];
  };
  auto w1 = propagate(1.0, 0.0);
  auto w2 = propagate(0.0, 1.0);
  double sc = 0.0;
  for (double v : w1) sc = std::max(sc, std::abs(v));
  for (double v : w2) sc = std::max(sc, std::abs(v));
  if (sc > 0)
    for (int k = 0; k < n; ++k) {
      w1[k] /= sc;
      w2[k] /= sc;
    }
  return r_left(w1) * r_right(w2) - r_left(w2) * r_right(w1);
}

inline std::vector<double> shooting_eigenvalues(const ShootingProblem& p, int nev,
                                                double lam_hi, int n_grid = 4000) {
  std::vector<double> roots;
  double prev_l = 1e-9;
  double prev_d = shooting_determinant(p, prev_l);
  for (int i = 1; i <= n_grid && static_cast<int>(roots.size()) < nev; ++i) {
    const double l = 1e-9 + (lam_hi - 1e-9) * i / n_grid;
    const double d = shooting_determinant(p, l);
    if (prev_d == 0.0) roots.push_back(prev_l);
    else if (prev_d * d < 0.0) {
      double a = prev_l, b = l;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (shooting_determinant(p, a) * shooting_determinant(p, m) <= 0) b = m;
        else a = m;
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_l = l;
    prev_d = d;
  }
  return roots;
}

// --- matrix-exponential reference for the augmented linear ODE ------------
//
// Single Wentzell mode coupled to the two exponentially weighted history
// moments: d/dt (a, mO, mG) = A (a, mO, mG) with
//   A = [[-kap, -gA0, -gC], [mu0_O, -delta_O, 0], [mu0_G, 0, -delta_G]].

inline double augmented_ode_exact(double t, double kap, double gA0, double gC,
                                  double mu0_O, double delta_O, double mu0_G,
                                  double delta_G, double a0 = 1.0) {
  Eigen::Matrix3d A;
  A << -kap, -gA0, -gC, mu0_O, -delta_O, 0.0, mu0_G, 0.0, -delta_G;
  const Eigen::Matrix3d E = (A * t).exp();
  return E(0, 0) * a0;
}

// --- mild-solution representation formula ----------------------------------
//
// eta^t(s) = int_0^s u(t-y) dy for s <= t, and Phi0(s-t) + int_0^t u(t-y) dy
// beyond; evaluated with the analytic integrals of the supplied u.

inline double representation_formula(const std::function<double(double)>& u_integral,
                                     const std::function<double(double)>& phi0,
                                     double t, double s) {
  // u_integral(x) = int_0^x u(t - y) dy for the fixed final time t
  if (s <= t) return u_integral(s);
  return phi0(s - t) + u_integral(t);
}

inline double ls_slope(const std::vector<double>& h, const std::vector<double>& e) {
  double st = 0, st2 = 0, sy = 0, sty = 0;
  const int n = static_cast<int>(h.size());
  for (int i = 0; i < n; ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(e[i]);
    st += x;
    st2 += x * x;
    sy += y;
    sty += x * y;
  }
  return (n * sty - st * sy) / (n * st2 - st * st);
}

}  // namespace oracles
