#include <doctest.h>

#include <cmath>
#include <random>

#include "cogur/geometry.hpp"

using namespace cogur;

TEST_CASE("interval: endpoint counting measure") {
  const Geometry g = build_interval(1.0, 1);
  CHECK(g.n_bulk() == 2);
  CHECK(Mat(g.mass_gamma).isApprox(Mat::Identity(2, 2)));
  CHECK(Mat(g.stiffness_gamma).norm() == 0.0);
  CHECK(g.volume == doctest::Approx(1.0));
  CHECK(g.surface == doctest::Approx(2.0));
}

TEST_CASE("interval: mass partitions unity") {
  const Geometry g = build_interval(1.0, 4);
  CHECK(std::abs(Mat(g.mass_bulk).sum() - 1.0) < 1e-12);
  CHECK(std::abs(Mat(g.mass_gamma).sum() - 2.0) < 1e-12);
}

TEST_CASE("interval: stiffness applied to coordinates gives boundary fluxes") {
  const Geometry g = build_interval(2.0, 8);
  const Vec x = g.nodes.col(0);
  const Vec f = g.stiffness_bulk * x;
  CHECK(f[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(f[g.n_bulk() - 1] == doctest::Approx(1.0).epsilon(1e-12));
  for (int i = 1; i + 1 < g.n_bulk(); ++i) CHECK(std::abs(f[i]) < 1e-12);
}

TEST_CASE("interval: consistent mass reproduces int x^2 exactly") {
  const Geometry g = build_interval(2.0, 16);
  const Vec x = g.nodes.col(0);
  CHECK(x.dot(g.mass_bulk * x) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("disk: area and circumference converge at second order") {
  double prev_ea = 0, prev_ep = 0;
  for (int k = 1; k <= 4; ++k) {
    const Geometry g = build_disk(1.0, k);
    const double ea = std::abs(M_PI - Mat(g.mass_bulk).sum());
    const double ep = std::abs(2.0 * M_PI - Mat(g.mass_gamma).sum());
    CHECK(std::abs(g.volume - Mat(g.mass_bulk).sum()) < 1e-10);
    if (k > 1) {
      CHECK(prev_ea / ea > 3.5);
      CHECK(prev_ep / ep > 3.5);
    }
    prev_ea = ea;
    prev_ep = ep;
  }
}

TEST_CASE("disk: boundary stiffness annihilates constants exactly") {
  const Geometry g = build_disk(1.0, 3);
  const Vec ones_g = Vec::Ones(g.n_gamma());
  CHECK((g.stiffness_gamma * ones_g).cwiseAbs().maxCoeff() < 1e-13);
  const Vec ones_b = Vec::Ones(g.n_bulk());
  CHECK((g.stiffness_bulk * ones_b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("matrices are SPD / PSD on random vectors") {
  std::mt19937 rng(3);
  std::normal_distribution<double> gauss;
  for (const Geometry& g : {build_interval(1.5, 12), build_disk(1.0, 2)}) {
    for (int trial = 0; trial < 10; ++trial) {
      Vec x(g.n_bulk());
      for (int i = 0; i < x.size(); ++i) x[i] = gauss(rng);
      CHECK(x.dot(g.mass_bulk * x) > 0.0);
      CHECK(x.dot(g.stiffness_bulk * x) >= -1e-12 * x.squaredNorm());
      Vec w(g.n_gamma());
      for (int i = 0; i < w.size(); ++i) w[i] = gauss(rng);
      CHECK(w.dot(g.mass_gamma * w) > 0.0);
      CHECK(w.dot(g.stiffness_gamma * w) >= -1e-12 * w.squaredNorm());
    }
  }
}

TEST_CASE("trace: restriction behavior") {
  const Geometry gi = build_interval(1.0, 8);
  CHECK(trace(gi, Vec::Ones(gi.n_bulk())).isApprox(Vec::Ones(2)));
  const Vec tv = trace(gi, gi.nodes.col(0));
  CHECK(tv[0] == doctest::Approx(0.0));
  CHECK(tv[1] == doctest::Approx(1.0));

  const Geometry gd = build_disk(1.0, 2);
  const Vec tx = trace(gd, gd.nodes.col(0));
  for (int j = 0; j < gd.n_gamma(); ++j) {
    const int b = gd.boundary_nodes[j];
    const double th = std::atan2(gd.nodes(b, 1), gd.nodes(b, 0));
    CHECK(tx[j] == doctest::Approx(std::cos(th)).epsilon(1e-12));
  }

  CHECK_THROWS_AS(trace(gi, Vec::Zero(3)), shape_error);
}

TEST_CASE("trace is linear and inverts boundary lifting") {
  const Geometry g = build_disk(1.0, 2);
  std::mt19937 rng(11);
  std::normal_distribution<double> gauss;
  Vec w(g.n_gamma());
  for (int i = 0; i < w.size(); ++i) w[i] = gauss(rng);
  CHECK(trace(g, g.lift_boundary(w)).isApprox(w, 1e-14));
  Vec u(g.n_bulk()), v(g.n_bulk());
  for (int i = 0; i < u.size(); ++i) {
    u[i] = gauss(rng);
    v[i] = gauss(rng);
  }
  CHECK(trace(g, u + 2.0 * v).isApprox(trace(g, u) + 2.0 * trace(g, v), 1e-14));
}

TEST_CASE("poincare constant: interval stable under refinement") {
  const double c64 = build_interval(1.0, 64).poincare_constant();
  const double c128 = build_interval(1.0, 128).poincare_constant();
  CHECK(std::abs(c64 - c128) < 1e-3 * c64);
  // the continuum constant on the unit interval is 1/pi
  CHECK(c128 == doctest::Approx(1.0 / M_PI).epsilon(1e-3));
}

TEST_CASE("poincare constant: disk sequence converges monotonically") {
  // the discrete quotient grows with the space, so the sequence approaches
  // its limit from below with differences shrinking at the mesh rate
  std::vector<double> c;
  for (int k = 1; k <= 3; ++k) c.push_back(build_disk(1.0, k).poincare_constant());
  CHECK(c[1] > c[0]);
  CHECK(c[2] > c[1]);
  CHECK((c[2] - c[1]) < 0.5 * (c[1] - c[0]));
}

TEST_CASE("geometry construction errors") {
  CHECK_THROWS_AS(build_interval(-1.0, 4), config_error);
  CHECK_THROWS_AS(build_interval(1.0, 0), config_error);
  CHECK_THROWS_AS(build_disk(1.0, 9), resource_error);
  CHECK_THROWS_AS(build_disk(0.0, 2), config_error);
}

TEST_CASE("mesh csv export") {
  const Geometry g = build_disk(1.0, 1);
  export_mesh_csv(g, "nodes_test.csv", "cells_test.csv");
  std::FILE* f = std::fopen("nodes_test.csv", "r");
  REQUIRE(f != nullptr);
  char line[256];
  REQUIRE(std::fgets(line, sizeof(line), f) != nullptr);
  CHECK(std::string(line) == "id,x,y,on_boundary\n");
  int rows = 0;
  while (std::fgets(line, sizeof(line), f)) ++rows;
  std::fclose(f);
  CHECK(rows == g.n_bulk());
}
