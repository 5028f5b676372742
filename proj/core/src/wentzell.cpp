#include "cogur/wentzell.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

namespace cogur {

namespace {

// add a boundary-local matrix into bulk-indexed triplets
void add_lifted(const Geometry& g, const SpMat& bmat, double scale,
                std::vector<Eigen::Triplet<double>>& out) {
  for (int k = 0; k < bmat.outerSize(); ++k)
    for (SpMat::InnerIterator it(bmat, k); it; ++it)
      out.emplace_back(g.boundary_nodes[it.row()], g.boundary_nodes[it.col()],
                       scale * it.value());
}

void add_sparse(const SpMat& m, double scale,
                std::vector<Eigen::Triplet<double>>& out) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      out.emplace_back(it.row(), it.col(), scale * it.value());
}

SpMat build(int n, std::vector<Eigen::Triplet<double>>& t) {
  SpMat m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

BulkBoundaryField make_v1_field(const Geometry& geom, const Vec& u_bulk) {
  return {u_bulk, trace(geom, u_bulk), SpaceTag::V1};
}

Vec WentzellOperator::apply_lifted_c(const Vec& u_bulk) const {
  Vec w = C_gamma * trace(*geom, u_bulk);
  return geom->lift_boundary(w);
}

double WentzellOperator::x2_inner(const Vec& a, const Vec& b) const {
  return a.dot(M * b);
}

WentzellOperator assemble(std::shared_ptr<const Geometry> geom, double alpha,
                          double beta, double omega, double nu) {
  if (nu <= 0.0)
    throw unsupported_parameter_error(
        "assemble: nu must be strictly positive (the nu=0 domain is unsupported)");
  if (nu >= 1.0 || omega <= 0.0 || omega >= 1.0)
    throw unsupported_parameter_error("assemble: omega, nu must lie in (0,1)");
  if (alpha <= 0.0 || beta <= 0.0)
    throw unsupported_parameter_error("assemble: alpha, beta must be positive");

  WentzellOperator op;
  op.geom = std::move(geom);
  op.alpha = alpha;
  op.beta = beta;
  op.omega = omega;
  op.nu = nu;
  const Geometry& g = *op.geom;
  const int n = g.n_bulk();

  std::vector<Eigen::Triplet<double>> tm, ta, ta0, tc;
  add_sparse(g.mass_bulk, 1.0, tm);
  add_lifted(g, g.mass_gamma, 1.0, tm);
  op.M = build(n, tm);

  add_sparse(g.stiffness_bulk, omega, ta0);
  add_sparse(g.mass_bulk, alpha * omega, ta0);
  op.A0 = build(n, ta0);

  add_sparse(g.stiffness_gamma, 1.0, tc);
  add_sparse(g.mass_gamma, beta, tc);
  {
    SpMat c(g.n_gamma(), g.n_gamma());
    c.setFromTriplets(tc.begin(), tc.end());
    c.makeCompressed();
    op.C_gamma = c;
  }

  add_sparse(op.A0, 1.0, ta);
  add_lifted(g, op.C_gamma, nu, ta);
  op.A = build(n, ta);
  return op;
}

EigenBasis eigenbasis(const WentzellOperator& op, int n_modes) {
  const int n = op.dim();
  if (n_modes < 1 || n_modes > n)
    throw config_error("eigenbasis: n_modes out of range");

  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(Mat(op.A), Mat(op.M));
  if (es.info() != Eigen::Success)
    throw numerical_error("eigenbasis: dense generalized eigensolve failed");

  Vec lam = es.eigenvalues();
  Mat psi = es.eigenvectors();

  // deterministic ordering: ascending lambda, ties by first nonzero index
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto first_nonzero = [&](int col) {
    const double tol = 1e-12 * psi.col(col).cwiseAbs().maxCoeff();
    for (int i = 0; i < n; ++i)
      if (std::abs(psi(i, col)) > tol) return i;
    return n;
  };
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (std::abs(lam[a] - lam[b]) > 1e-11 * (1.0 + std::abs(lam[a])))
      return lam[a] < lam[b];
    return first_nonzero(a) < first_nonzero(b);
  });

  EigenBasis basis;
  basis.n_modes = n_modes;
  basis.lambda.resize(n_modes);
  basis.Psi.resize(n, n_modes);
  basis.residual.resize(n_modes);
  for (int k = 0; k < n_modes; ++k) {
    const int c = order[k];
    basis.lambda[k] = lam[c];
    Vec col = psi.col(c);
    const int fi = first_nonzero(c);
    if (fi < n && col[fi] < 0) col = -col;
    basis.Psi.col(k) = col;
    const Vec Ap = op.A * col;
    const Vec res = Ap - lam[c] * (op.M * col);
    const double denom = Ap.norm();
    basis.residual[k] = denom > 0 ? res.norm() / denom : res.norm();
    if (basis.residual[k] > 1e-9)
      throw numerical_error("eigenbasis: residual above 1e-9 at mode " +
                            std::to_string(k + 1));
  }
  return basis;
}

BvpSolution solve_bvp(const Geometry& geom, const Vec& p1_bulk,
                      const Vec& p2_gamma, double beta) {
  if (beta <= 0.0)
    throw config_error("solve_bvp: beta must be positive (system singular otherwise)");
  if (p1_bulk.size() != geom.n_bulk() || p2_gamma.size() != geom.n_gamma())
    throw shape_error("solve_bvp: data sized inconsistently with geometry");

  const int n = geom.n_bulk();
  std::vector<Eigen::Triplet<double>> ts;
  add_sparse(geom.stiffness_bulk, 1.0, ts);
  add_lifted(geom, geom.stiffness_gamma, 1.0, ts);
  add_lifted(geom, geom.mass_gamma, beta, ts);
  SpMat S = build(n, ts);

  Vec rhs = geom.mass_bulk * p1_bulk + geom.lift_boundary(geom.mass_gamma * p2_gamma);

  Eigen::SimplicialLDLT<SpMat> solver(S);
  if (solver.info() != Eigen::Success)
    throw numerical_error("solve_bvp: factorization failed");
  Vec u = solver.solve(rhs);
  if (solver.info() != Eigen::Success)
    throw numerical_error("solve_bvp: solve failed");

  BvpSolution out;
  out.field = make_v1_field(geom, u);

  // H2 proxy: L2 norms of the discrete strong operators applied to u
  Eigen::SimplicialLDLT<SpMat> mb(geom.mass_bulk);
  Eigen::SimplicialLDLT<SpMat> mg(geom.mass_gamma);
  const Vec ku = geom.stiffness_bulk * u;
  const Vec cv = (geom.stiffness_gamma * out.field.v) + beta * (geom.mass_gamma * out.field.v);
  const double bulk2 = ku.dot(mb.solve(ku));
  const double gam2 = cv.dot(mg.solve(cv));
  const double proxy = std::sqrt(std::max(0.0, bulk2 + gam2));

  const double np1 = std::sqrt(std::max(0.0, p1_bulk.dot(geom.mass_bulk * p1_bulk)));
  const double np2 = std::sqrt(std::max(0.0, p2_gamma.dot(geom.mass_gamma * p2_gamma)));
  out.regularity_ratio = (np1 + np2) > 0 ? proxy / (np1 + np2) : 0.0;
  return out;
}

}  // namespace cogur
