#include <doctest.h>

#include <cmath>
#include <random>

#include "cogur/wentzell.hpp"
#include "oracles.hpp"

using namespace cogur;

namespace {

std::shared_ptr<const Geometry> interval_ptr(double L, int n) {
  return std::make_shared<Geometry>(build_interval(L, n));
}

}  // namespace

TEST_CASE("assemble: constants are eigenvectors when al om = be nu") {
  const auto op = assemble(interval_ptr(1.0, 16), 2.0, 1.0, 0.25, 0.5);
  const Vec ones = Vec::Ones(op.dim());
  CHECK((op.A * ones - 0.5 * (op.M * ones)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("assemble: symmetry and positivity") {
  for (auto geom : {interval_ptr(1.0, 24),
                    std::make_shared<const Geometry>(build_disk(1.0, 2))}) {
    const auto op = assemble(geom, 1.3, 0.7, 0.4, 0.6);
    CHECK((Mat(op.A) - Mat(op.A).transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((Mat(op.M) - Mat(op.M).transpose()).cwiseAbs().maxCoeff() < 1e-12);
    std::mt19937 rng(5);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 8; ++trial) {
      Vec x(op.dim());
      for (int i = 0; i < x.size(); ++i) x[i] = gauss(rng);
      CHECK(x.dot(op.A * x) > 0.0);
      CHECK(x.dot(op.M * x) > 0.0);
    }
  }
}

TEST_CASE("assemble: self-adjointness in the X2 pairing") {
  const auto op = assemble(interval_ptr(1.0, 32), 1.0, 1.0, 0.5, 0.5);
  std::mt19937 rng(7);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 8; ++trial) {
    Vec x(op.dim()), y(op.dim());
    for (int i = 0; i < x.size(); ++i) {
      x[i] = gauss(rng);
      y[i] = gauss(rng);
    }
    CHECK(x.dot(op.A * y) == doctest::Approx(y.dot(op.A * x)).epsilon(1e-12));
  }
}

TEST_CASE("assemble: splitting A = A0 + nu lift(C)") {
  const auto op = assemble(interval_ptr(1.0, 20), 1.5, 0.8, 0.3, 0.7);
  Mat lifted = Mat::Zero(op.dim(), op.dim());
  const auto& bn = op.geom->boundary_nodes;
  const Mat C = Mat(op.C_gamma);
  for (int i = 0; i < static_cast<int>(bn.size()); ++i)
    for (int j = 0; j < static_cast<int>(bn.size()); ++j)
      lifted(bn[i], bn[j]) = op.nu * C(i, j);
  CHECK((Mat(op.A) - (Mat(op.A0) + lifted)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("assemble: parameter domain") {
  CHECK_THROWS_AS(assemble(interval_ptr(1.0, 4), 1.0, 1.0, 0.5, 0.0),
                  unsupported_parameter_error);
  CHECK_THROWS_AS(assemble(interval_ptr(1.0, 4), 1.0, 1.0, 0.5, -0.2),
                  unsupported_parameter_error);
  CHECK_THROWS_AS(assemble(interval_ptr(1.0, 4), 1.0, 1.0, 1.0, 0.5),
                  unsupported_parameter_error);
  CHECK_THROWS_AS(assemble(interval_ptr(1.0, 4), 0.0, 1.0, 0.5, 0.5),
                  unsupported_parameter_error);
}

TEST_CASE("eigenbasis: orthonormality, residuals, constant mode") {
  const auto op = assemble(interval_ptr(1.0, 16), 2.0, 1.0, 0.25, 0.5);
  const auto basis = eigenbasis(op, 6);
  CHECK(std::abs(basis.lambda[0] - 0.5) < 1e-10);
  const Mat gram = basis.Psi.transpose() * (op.M * basis.Psi);
  CHECK((gram - Mat::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
  for (int k = 0; k < 6; ++k) CHECK(basis.residual[k] <= 1e-9);
  for (int k = 1; k < 6; ++k) CHECK(basis.lambda[k] >= basis.lambda[k - 1]);
}

TEST_CASE("eigenbasis: repeated solves emit identical bases") {
  const auto op = assemble(interval_ptr(1.0, 24), 1.0, 1.0, 0.5, 0.5);
  const auto b1 = eigenbasis(op, 5);
  const auto b2 = eigenbasis(op, 5);
  CHECK((b1.lambda - b2.lambda).cwiseAbs().maxCoeff() == 0.0);
  CHECK((b1.Psi - b2.Psi).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("eigenbasis: interval matches the discrete shooting oracle") {
  const auto op = assemble(interval_ptr(1.0, 64), 1.0, 1.0, 0.5, 0.5);
  const auto basis = eigenbasis(op, 4);
  const auto sh = oracles::shooting_eigenvalues({1.0, 64, 1.0, 1.0, 0.5, 0.5}, 4, 60.0);
  REQUIRE(sh.size() == 4);
  for (int k = 0; k < 4; ++k)
    CHECK(basis.lambda[k] == doctest::Approx(sh[k]).epsilon(1e-8));
}

TEST_CASE("eigenbasis: disk eigenvalues self-converge at second order") {
  std::vector<Vec> lams;
  for (int k = 2; k <= 4; ++k) {
    auto geom = std::make_shared<const Geometry>(build_disk(1.0, k));
    lams.push_back(eigenbasis(assemble(geom, 1.0, 1.0, 0.5, 0.5), 4).lambda);
  }
  // Richardson ratio between successive refinements
  for (int m = 1; m < 4; ++m) {
    const double d1 = std::abs(lams[0][m] - lams[1][m]);
    const double d2 = std::abs(lams[1][m] - lams[2][m]);
    const double order = std::log2(d1 / d2);
    CHECK(order > 1.4);
    CHECK(order < 2.6);
  }
}

TEST_CASE("eigenbasis: n_modes must fit the space") {
  const auto op = assemble(interval_ptr(1.0, 4), 1.0, 1.0, 0.5, 0.5);
  CHECK_THROWS_AS(eigenbasis(op, 6), config_error);
  CHECK_THROWS_AS(eigenbasis(op, 0), config_error);
}

TEST_CASE("solve_bvp: constants for p1 = 0, p2 = beta c") {
  for (const Geometry& g : {build_interval(1.0, 12), build_disk(1.0, 2)}) {
    const double beta = 1.7, c = 2.5;
    const Vec p1 = Vec::Zero(g.n_bulk());
    const Vec p2 = Vec::Constant(g.n_gamma(), beta * c);
    const auto sol = solve_bvp(g, p1, p2, beta);
    CHECK((sol.field.u - Vec::Constant(g.n_bulk(), c)).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("solve_bvp: interval closed form is nodally exact") {
  const double beta = 3.0, L = 1.0;
  const Geometry g = build_interval(L, 40);
  const auto sol = solve_bvp(g, Vec::Ones(g.n_bulk()), Vec::Zero(2), beta);
  for (int i = 0; i < g.n_bulk(); ++i) {
    const double x = g.nodes(i, 0);
    const double exact = -x * x / 2.0 + (L / 2.0) * x + L / (2.0 * beta);
    CHECK(std::abs(sol.field.u[i] - exact) < 1e-11);
  }
  CHECK(sol.field.tag == SpaceTag::V1);
}

TEST_CASE("solve_bvp: disk manufactured solution at second order") {
  double prev = 0;
  for (int k = 2; k <= 3; ++k) {
    const Geometry g = build_disk(1.0, k);
    Vec p1 = Vec::Zero(g.n_bulk());
    Vec p2(g.n_gamma());
    for (int j = 0; j < g.n_gamma(); ++j) {
      const int b = g.boundary_nodes[j];
      p2[j] = 3.0 * g.nodes(b, 0);  // (2 + beta) cos(theta) with beta = 1
    }
    const auto sol = solve_bvp(g, p1, p2, 1.0);
    const Vec d = sol.field.u - g.nodes.col(0);
    const double err = std::sqrt(d.dot(g.mass_bulk * d));
    if (k > 2) CHECK(prev / err > 3.2);
    prev = err;
  }
}

TEST_CASE("solve_bvp: regularity ratio stays bounded under refinement") {
  std::vector<double> ratios;
  for (int n : {16, 32, 64, 128}) {
    const Geometry g = build_interval(1.0, n);
    Vec p1(g.n_bulk());
    for (int i = 0; i < g.n_bulk(); ++i)
      p1[i] = std::cos(M_PI * g.nodes(i, 0));
    const auto sol = solve_bvp(g, p1, Vec::Zero(2), 1.0);
    ratios.push_back(sol.regularity_ratio);
  }
  const double lo = *std::min_element(ratios.begin(), ratios.end());
  const double hi = *std::max_element(ratios.begin(), ratios.end());
  CHECK(lo > 0.0);
  CHECK(hi / lo < 1.5);
}

TEST_CASE("solve_bvp: rejects nonpositive beta and bad shapes") {
  const Geometry g = build_interval(1.0, 8);
  CHECK_THROWS_AS(solve_bvp(g, Vec::Ones(g.n_bulk()), Vec::Zero(2), 0.0),
                  config_error);
  CHECK_THROWS_AS(solve_bvp(g, Vec::Ones(3), Vec::Zero(2), 1.0), shape_error);
}

TEST_CASE("make_v1_field keeps the trace identity") {
  const Geometry g = build_disk(1.0, 2);
  const auto f = make_v1_field(g, g.nodes.col(1));
  CHECK(f.tag == SpaceTag::V1);
  CHECK(f.v.isApprox(trace(g, f.u)));
}
