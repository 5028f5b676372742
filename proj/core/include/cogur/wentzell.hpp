#pragma once

#include <memory>

#include "cogur/geometry.hpp"

namespace cogur {

enum class SpaceTag { X2, V1 };

/// Pair U = (u, v) of bulk and boundary nodal values.  With tag V1 the
/// boundary component is the trace of the bulk one; with tag X2 the two are
/// independent data.
struct BulkBoundaryField {
  Vec u;
  Vec v;
  SpaceTag tag = SpaceTag::X2;
};

BulkBoundaryField make_v1_field(const Geometry& geom, const Vec& u_bulk);

/// Discrete Wentzell Laplace operator on the trace-consistent space (one
/// unknown per bulk node, boundary dofs shared).
///
///   M = M_bulk + lift(M_gamma)
///   A = omega K_bulk + alpha omega M_bulk + lift(nu K_gamma + nu beta M_gamma)
///   A0 is the (alpha,0,0,omega) sub-block, C_gamma = K_gamma + beta M_gamma,
/// and A = A0 + nu lift(C_gamma).
struct WentzellOperator {
  std::shared_ptr<const Geometry> geom;
  double alpha = 1.0, beta = 1.0, omega = 0.5, nu = 0.5;

  SpMat M;
  SpMat A;
  SpMat A0;
  SpMat C_gamma;  // boundary-local

  int dim() const { return geom->n_bulk(); }

  /// Scatter a boundary-local matrix-vector product into bulk indexing.
  Vec apply_lifted_c(const Vec& u_bulk) const;

  /// X2 inner product of trace-consistent nodal vectors.
  double x2_inner(const Vec& a, const Vec& b) const;
};

WentzellOperator assemble(std::shared_ptr<const Geometry> geom, double alpha,
                          double beta, double omega, double nu);

struct EigenBasis {
  Vec lambda;     // ascending
  Mat Psi;        // M-orthonormal columns on the trace-consistent space
  Vec residual;   // ||A psi - lambda M psi|| / ||A psi|| per mode
  int n_modes = 0;
};

/// Dense symmetric-generalized eigensolve of A psi = lambda M psi.  Ties are
/// ordered by the first nonzero coefficient index and that coefficient is
/// normalized positive, so repeated runs emit identical bases.
EigenBasis eigenbasis(const WentzellOperator& op, int n_modes);

struct BvpSolution {
  BulkBoundaryField field;      // trace-consistent
  double regularity_ratio = 0;  // H2-proxy norm over data norm
};

/// Static boundary value problem -Lap u = p1 in Omega,
/// -Lap_Gamma u + dn u + beta u = p2 on Gamma (weak form, unit diffusivities).
/// The regularity ratio mirrors the elliptic estimate: the strong-form
/// M^{-1}-weighted residual norm over ||p1|| + ||p2||.
BvpSolution solve_bvp(const Geometry& geom, const Vec& p1_bulk,
                      const Vec& p2_gamma, double beta);

}  // namespace cogur
