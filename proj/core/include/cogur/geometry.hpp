#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cogur/errors.hpp"

namespace cogur {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Backend { interval, disk };

/// Discrete geometry with consistent P1 bulk and boundary matrices.
///
/// Boundary matrices are indexed boundary-locally; `boundary_nodes[j]` is the
/// bulk node carrying boundary dof j.  The interval backend uses the counting
/// measure on its two endpoints (M_gamma = I, K_gamma = 0); the disk backend
/// carries P1 edge mass and arclength (Laplace-Beltrami) stiffness on the
/// polygonal boundary with nodes projected to the circle.
struct Geometry {
  Backend backend = Backend::interval;
  Mat nodes;                        // n_bulk x dim coordinates
  Eigen::MatrixXi cells;            // n_cells x 2 (interval) or x 3 (disk)
  std::vector<int> boundary_nodes;  // bulk indices of boundary dofs

  SpMat mass_bulk;        // volume L2 inner product
  SpMat stiffness_bulk;   // grad.grad
  SpMat mass_gamma;       // boundary-local
  SpMat stiffness_gamma;  // boundary-local

  double volume = 0.0;
  double surface = 0.0;

  int n_bulk() const { return static_cast<int>(nodes.rows()); }
  int n_gamma() const { return static_cast<int>(boundary_nodes.size()); }

  /// Smallest C with ||u - <u>_Gamma|| <= C ||grad u|| discretely.
  /// Computed lazily from a dense generalized eigensolve and cached.
  double poincare_constant() const;

  /// Scatter a boundary-local vector into a bulk-sized vector.
  Vec lift_boundary(const Vec& w) const;

 private:
  mutable std::optional<double> poincare_cache_;
};

Geometry build_interval(double length, int n_cells);

/// Structured refinement of an inscribed hexagon; boundary midpoints are
/// projected to the circle of the given radius at every level.
Geometry build_disk(double radius, int n_refine);

/// P1 Dirichlet trace: restriction of bulk nodal values to boundary nodes.
Vec trace(const Geometry& geom, const Vec& u_bulk);

/// Node and cell tables as CSV (debug export).
void export_mesh_csv(const Geometry& geom, const std::string& node_path,
                     const std::string& cell_path);

}  // namespace cogur
