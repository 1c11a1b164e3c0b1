#include "quadcurl/analysis.hpp"
#include "quadcurl/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace quadcurl;

namespace {

Vec random_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  return Vec::NullaryExpr(n, [&] { return n01(rng); });
}

ErrorRecord record(double l2, double energy, double p) {
  ErrorRecord r;
  r.l2_error = l2;
  r.energy_error = energy;
  r.p_norm = p;
  return r;
}

}  // namespace

TEST(EnergyNorm, NormAxioms) {
  std::mt19937_64 rng(1);
  const Mesh mesh = generate_tet_mesh(1);
  const Discretization disc(mesh, 2);
  const Index n = disc.layout().total_size;
  EXPECT_EQ(energy_norm(disc, Vec::Zero(n)), 0.0);
  for (int trial = 0; trial < 5; ++trial) {
    const Vec v = random_vector(n, rng), w = random_vector(n, rng);
    const double nv = energy_norm(disc, v);
    EXPECT_NEAR(energy_norm(disc, -3.5 * v), 3.5 * nv, 1e-12 * nv);
    EXPECT_LE(energy_norm(disc, v + w), (nv + energy_norm(disc, w)) * (1 + 1e-14));
  }
}

TEST(EnergyNorm, VanishesOnProjectedCurlFreeFields) {
  // w = grad phi with deg w <= k: curl curl w = 0 and every trace jump vanishes.
  std::mt19937_64 rng(2);
  for (const Mesh& m : {generate_hex_mesh(2), generate_tet_mesh(1)}) {
    const Discretization disc(m, 2);
    const VectorPolynomial w = VectorPolynomial::gradient(Polynomial3::random(3, rng));
    const Vec q = project_exact(disc, ExactSolution{w.as_field(), w.curl().as_field(), {}});
    EXPECT_LT(energy_norm(disc, q), 1e-11 * q.norm());
  }
}

TEST(EnergyNorm, ReproducesCurlCurlOfPolynomials) {
  // For deg w <= k the first part of the norm is ||curl curl w||.
  const Mesh m = generate_hex_mesh(1);
  const Discretization disc(m, 2);
  // w = (0, 0, x^2): curl curl w = (0, 0, -2), so ||.||^2 over the unit cube is 4.
  const VectorField w = [](const Vec3& x) { return Vec3(0.0, 0.0, x[0] * x[0]); };
  const VectorField cw = [](const Vec3& x) { return Vec3(0.0, -2.0 * x[0], 0.0); };
  const Vec q = project_exact(disc, ExactSolution{w, cw, {}});
  EXPECT_NEAR(energy_norm(disc, q), 2.0, 1e-12);
}

TEST(AuxNorm, BoundsTheEnergyNorm) {
  std::mt19937_64 rng(3);
  const Mesh mesh = generate_hex_mesh(2);
  const Discretization disc(mesh, 2);
  const Index n = disc.layout().total_size;
  EXPECT_EQ(aux_norm_1(disc, Vec::Zero(n)), 0.0);
  for (int trial = 0; trial < 3; ++trial) {
    const Vec v = random_vector(n, rng);
    EXPECT_GE(aux_norm_1(disc, v), energy_norm(disc, v));
  }
}

TEST(AuxNorm, ExtraTermsVanishForSmoothDivergenceFreeFields) {
  std::mt19937_64 rng(4);
  const VectorPolynomial u = VectorPolynomial::random(3, rng).curl();
  const Mesh mesh = generate_tet_mesh(2);
  const Discretization disc(mesh, 2);
  const Vec q = project_exact(disc, ExactSolution{u.as_field(), u.curl().as_field(), {}});
  EXPECT_NEAR(aux_norm_1(disc, q), energy_norm(disc, q), 1e-10 * (1.0 + energy_norm(disc, q)));
}

TEST(L2Errors, IdenticalInputsLeaveOnlyThePressure) {
  const Mesh mesh = generate_tet_mesh(1);
  const Discretization disc(mesh, 1);
  const Vec x = project_exact(
      disc, ExactSolution{[](const Vec3& p) { return Vec3(p[1], 1.0, 0.0); }, [](const Vec3&) { return Vec3(0, 0, -1); },
                          [](const Vec3&) { return 3.0; }});
  const L2Errors e = l2_errors(disc, x, x);
  EXPECT_EQ(e.l2_error, 0.0);
  // p = 3 on the unit cube.
  EXPECT_NEAR(e.p_norm, 3.0, 1e-13);
}

TEST(L2Errors, ConstantDifference) {
  const Mesh mesh = generate_hex_mesh(2);
  const Discretization disc(mesh, 2);
  const Vec one = project_exact(
      disc, ExactSolution{[](const Vec3&) { return Vec3(0.0, 2.0, 0.0); }, [](const Vec3&) { return Vec3::Zero(); }, {}});
  const L2Errors e = l2_errors(disc, Vec::Zero(one.size()), one);
  EXPECT_NEAR(e.l2_error, 2.0, 1e-13);
  EXPECT_EQ(e.p_norm, 0.0);
}

TEST(Projection, InteriorProjectionIsBestApproximation) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  const Mesh m = generate_tet_mesh(1);
  const Discretization disc(m, 2);
  const ExactSolution exact{[](const Vec3& x) { return Vec3(std::sin(3 * x[0]), x[1] * x[2] * x[2], std::exp(x[2])); },
                            [](const Vec3&) { return Vec3::Zero(); },
                            {}};
  const Vec q = project_exact(disc, exact);
  const DofLayout& L = disc.layout();
  const Index e = 3;
  const ScalarBasis3D basis = ScalarBasis3D::for_element(m.element(e), 2);
  const QuadratureRule rule = element_quadrature(m, e, 12);
  auto distance = [&](const Vec& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const Vec phi = basis.values(rule.points[i]);
      const Vec3 v(c.segment(0, L.n_cell).dot(phi), c.segment(L.n_cell, L.n_cell).dot(phi),
                   c.segment(2 * L.n_cell, L.n_cell).dot(phi));
      s += rule.weights[i] * (exact.u(rule.points[i]) - v).squaredNorm();
    }
    return std::sqrt(s);
  };
  const Vec best = q.segment(L.u0_offset(e), 3 * L.n_cell);
  const double d0 = distance(best);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec c = best + 0.1 * Vec::NullaryExpr(best.size(), [&] { return n01(rng); });
    EXPECT_GE(distance(c), d0);
  }
}

TEST(Rates, LogRatios) {
  const auto r = convergence_rates({record(0.5263, 1.0, 2.0), record(0.03345, 1.0, 1.0), record(0.0, 0.5, 0.25)});
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].l2, 0.0);
  EXPECT_EQ(r[0].energy, 0.0);
  EXPECT_EQ(r[0].p, 0.0);
  EXPECT_NEAR(*r[1].l2, 3.98, 0.005);
  EXPECT_EQ(*r[1].energy, 0.0);
  EXPECT_EQ(*r[1].p, 1.0);
  EXPECT_FALSE(r[2].l2.has_value());
  EXPECT_EQ(*r[2].energy, 1.0);
  EXPECT_EQ(*r[2].p, 2.0);
  EXPECT_TRUE(convergence_rates({}).empty());
}
