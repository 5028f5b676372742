#include "cogur/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <utility>

#include <Eigen/Eigenvalues>

namespace cogur {

namespace {

SpMat from_triplets(int rows, int cols,
                    const std::vector<Eigen::Triplet<double>>& t) {
  SpMat m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

Vec Geometry::lift_boundary(const Vec& w) const {
  if (w.size() != n_gamma()) throw shape_error("lift_boundary: size mismatch");
  Vec out = Vec::Zero(n_bulk());
  for (int j = 0; j < n_gamma(); ++j) out[boundary_nodes[j]] = w[j];
  return out;
}

Geometry build_interval(double length, int n_cells) {
  if (length <= 0.0) throw config_error("build_interval: length must be positive");
  if (n_cells < 1) throw config_error("build_interval: need at least one cell");

  Geometry g;
  g.backend = Backend::interval;
  const int n = n_cells + 1;
  const double h = length / n_cells;

  g.nodes.resize(n, 1);
  for (int i = 0; i < n; ++i) g.nodes(i, 0) = i * h;
  g.cells.resize(n_cells, 2);
  for (int e = 0; e < n_cells; ++e) {
    g.cells(e, 0) = e;
    g.cells(e, 1) = e + 1;
  }
  g.boundary_nodes = {0, n - 1};

  std::vector<Eigen::Triplet<double>> tm, tk;
  for (int e = 0; e < n_cells; ++e) {
    const int i = e, j = e + 1;
    tm.emplace_back(i, i, h / 3.0);
    tm.emplace_back(j, j, h / 3.0);
    tm.emplace_back(i, j, h / 6.0);
    tm.emplace_back(j, i, h / 6.0);
    tk.emplace_back(i, i, 1.0 / h);
    tk.emplace_back(j, j, 1.0 / h);
    tk.emplace_back(i, j, -1.0 / h);
    tk.emplace_back(j, i, -1.0 / h);
  }
  g.mass_bulk = from_triplets(n, n, tm);
  g.stiffness_bulk = from_triplets(n, n, tk);

  // counting measure on the two endpoints, no surface diffusion in 1D
  std::vector<Eigen::Triplet<double>> tg{{0, 0, 1.0}, {1, 1, 1.0}};
  g.mass_gamma = from_triplets(2, 2, tg);
  g.stiffness_gamma = SpMat(2, 2);

  g.volume = length;
  g.surface = 2.0;
  return g;
}

Geometry build_disk(double radius, int n_refine) {
  if (radius <= 0.0) throw config_error("build_disk: radius must be positive");
  if (n_refine < 0) throw config_error("build_disk: n_refine must be >= 0");
  if (n_refine > 8) throw resource_error("build_disk: n_refine > 8 exceeds desk scale");

  // hexagon fan around the center
  std::vector<std::array<double, 2>> pts;
  std::vector<bool> on_bnd;
  pts.push_back({0.0, 0.0});
  on_bnd.push_back(false);
  for (int k = 0; k < 6; ++k) {
    const double th = k * M_PI / 3.0;
    pts.push_back({radius * std::cos(th), radius * std::sin(th)});
    on_bnd.push_back(true);
  }
  std::vector<std::array<int, 3>> tris;
  for (int k = 0; k < 6; ++k) tris.push_back({0, 1 + k, 1 + (k + 1) % 6});

  for (int level = 0; level < n_refine; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int i, int j) {
      const auto key = std::minmax(i, j);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      std::array<double, 2> p{(pts[i][0] + pts[j][0]) / 2.0,
                              (pts[i][1] + pts[j][1]) / 2.0};
      const bool on = on_bnd[i] && on_bnd[j];
      if (on) {
        const double r = std::hypot(p[0], p[1]);
        p = {p[0] * radius / r, p[1] * radius / r};
      }
      pts.push_back(p);
      on_bnd.push_back(on);
      const int idx = static_cast<int>(pts.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(4 * tris.size());
    for (const auto& [a, b, c] : tris) {
      const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
      next.push_back({a, ab, ca});
      next.push_back({ab, b, bc});
      next.push_back({ca, bc, c});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }

  Geometry g;
  g.backend = Backend::disk;
  const int n = static_cast<int>(pts.size());
  g.nodes.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    g.nodes(i, 0) = pts[i][0];
    g.nodes(i, 1) = pts[i][1];
  }
  g.cells.resize(static_cast<int>(tris.size()), 3);
  for (int t = 0; t < static_cast<int>(tris.size()); ++t)
    for (int k = 0; k < 3; ++k) g.cells(t, k) = tris[t][k];

  // exact P1 mass and stiffness on each triangle
  std::vector<Eigen::Triplet<double>> tm, tk;
  double area = 0.0;
  for (const auto& [a, b, c] : tris) {
    Eigen::Matrix2d J;
    J.col(0) = (g.nodes.row(b) - g.nodes.row(a)).transpose();
    J.col(1) = (g.nodes.row(c) - g.nodes.row(a)).transpose();
    const double detJ = J.determinant();
    const double A = std::abs(detJ) / 2.0;
    area += A;
    Eigen::Matrix3d Ml;
    Ml << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    Ml *= A / 12.0;
    Eigen::Matrix<double, 2, 3> gref;
    gref << -1, 1, 0, -1, 0, 1;
    const Eigen::Matrix<double, 2, 3> G = J.inverse().transpose() * gref;
    const Eigen::Matrix3d Kl = A * (G.transpose() * G);
    const std::array<int, 3> idx{a, b, c};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        tm.emplace_back(idx[i], idx[j], Ml(i, j));
        tk.emplace_back(idx[i], idx[j], Kl(i, j));
      }
  }
  g.mass_bulk = from_triplets(n, n, tm);
  g.stiffness_bulk = from_triplets(n, n, tk);
  g.volume = area;

  // boundary edges appear in exactly one triangle
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& [a, b, c] : tris) {
    for (auto [i, j] : {std::pair{a, b}, std::pair{b, c}, std::pair{c, a}})
      edge_count[std::minmax(i, j)]++;
  }
  std::vector<std::pair<int, int>> bedges;
  for (const auto& [e, cnt] : edge_count)
    if (cnt == 1) bedges.push_back(e);

  std::vector<int> bnodes;
  for (const auto& [i, j] : bedges) {
    bnodes.push_back(i);
    bnodes.push_back(j);
  }
  std::sort(bnodes.begin(), bnodes.end());
  bnodes.erase(std::unique(bnodes.begin(), bnodes.end()), bnodes.end());
  g.boundary_nodes = bnodes;

  std::vector<int> local(n, -1);
  for (int j = 0; j < static_cast<int>(bnodes.size()); ++j) local[bnodes[j]] = j;

  const int nb = static_cast<int>(bnodes.size());
  std::vector<Eigen::Triplet<double>> tgm, tgk;
  double per = 0.0;
  for (const auto& [i, j] : bedges) {
    const double len = (g.nodes.row(i) - g.nodes.row(j)).norm();
    per += len;
    const int li = local[i], lj = local[j];
    tgm.emplace_back(li, li, len / 3.0);
    tgm.emplace_back(lj, lj, len / 3.0);
    tgm.emplace_back(li, lj, len / 6.0);
    tgm.emplace_back(lj, li, len / 6.0);
    tgk.emplace_back(li, li, 1.0 / len);
    tgk.emplace_back(lj, lj, 1.0 / len);
    tgk.emplace_back(li, lj, -1.0 / len);
    tgk.emplace_back(lj, li, -1.0 / len);
  }
  g.mass_gamma = from_triplets(nb, nb, tgm);
  g.stiffness_gamma = from_triplets(nb, nb, tgk);
  g.surface = per;
  return g;
}

Vec trace(const Geometry& geom, const Vec& u_bulk) {
  if (u_bulk.size() != geom.n_bulk())
    throw shape_error("trace: bulk vector has wrong size");
  Vec v(geom.n_gamma());
  for (int j = 0; j < geom.n_gamma(); ++j) v[j] = u_bulk[geom.boundary_nodes[j]];
  return v;
}

double Geometry::poincare_constant() const {
  if (poincare_cache_) return *poincare_cache_;

  const int n = n_bulk();
  // deflated quotient: maximize ||u - <u>_G||_M^2 / ||grad u||^2 over
  // non-constant u; the quotient's inverse square root is the constant.
  Vec gw = Vec::Zero(n);
  {
    Vec ones_g = Vec::Ones(n_gamma());
    Vec mg = mass_gamma * ones_g;
    for (int j = 0; j < n_gamma(); ++j) gw[boundary_nodes[j]] = mg[j] / surface;
  }
  Mat P = Mat::Identity(n, n) - Vec::Ones(n) * gw.transpose();
  Mat B = P.transpose() * Mat(mass_bulk) * P;
  Mat K = Mat(stiffness_bulk);
  const double scale = K.trace() / n;
  K += scale * Mat::Ones(n, n);  // rank-one shift removes the constant kernel

  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(B, K);
  if (es.info() != Eigen::Success)
    throw numerical_error("poincare_constant: generalized eigensolve failed");
  const double theta = es.eigenvalues().maxCoeff();
  if (!(theta > 0.0))
    throw numerical_error("poincare_constant: nonpositive quotient");
  poincare_cache_ = std::sqrt(theta);
  return *poincare_cache_;
}

void export_mesh_csv(const Geometry& geom, const std::string& node_path,
                     const std::string& cell_path) {
  std::FILE* f = std::fopen(node_path.c_str(), "w");
  if (!f) throw resource_error("export_mesh_csv: cannot open " + node_path);
  std::fprintf(f, geom.backend == Backend::interval ? "id,x,on_boundary\n"
                                                    : "id,x,y,on_boundary\n");
  std::vector<char> onb(geom.n_bulk(), 0);
  for (int j : geom.boundary_nodes) onb[j] = 1;
  for (int i = 0; i < geom.n_bulk(); ++i) {
    if (geom.backend == Backend::interval)
      std::fprintf(f, "%d,%.17g,%d\n", i, geom.nodes(i, 0), onb[i]);
    else
      std::fprintf(f, "%d,%.17g,%.17g,%d\n", i, geom.nodes(i, 0),
                   geom.nodes(i, 1), onb[i]);
  }
  std::fclose(f);

  f = std::fopen(cell_path.c_str(), "w");
  if (!f) throw resource_error("export_mesh_csv: cannot open " + cell_path);
  std::fprintf(f, geom.cells.cols() == 2 ? "id,n0,n1\n" : "id,n0,n1,n2\n");
  for (int t = 0; t < geom.cells.rows(); ++t) {
    if (geom.cells.cols() == 2)
      std::fprintf(f, "%d,%d,%d\n", t, geom.cells(t, 0), geom.cells(t, 1));
    else
      std::fprintf(f, "%d,%d,%d,%d\n", t, geom.cells(t, 0), geom.cells(t, 1),
                   geom.cells(t, 2));
  }
  std::fclose(f);
}

}  // namespace cogur
