#include "quadcurl/driver.hpp"
#include "quadcurl/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace quadcurl;

namespace {

/// u = (-2x^2y^2z, 2x^2y^3z, -3x^2y^2z^2 + 2xy^2z^2) built from monomials.
VectorPolynomial manufactured_polynomial() {
  VectorPolynomial u;
  u.c[0] = Polynomial3::monomial(-2, 2, 2, 1);
  u.c[1] = Polynomial3::monomial(2, 2, 3, 1);
  u.c[2] = Polynomial3::monomial(-3, 2, 2, 2) + Polynomial3::monomial(2, 1, 2, 2);
  return u;
}

std::vector<Vec3> random_points(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i) pts.emplace_back(u01(rng), u01(rng), u01(rng));
  return pts;
}

StudyConfig small_config(MeshFamily family, int k, int level_max) {
  StudyConfig c;
  c.family = family;
  c.k = k;
  c.level_min = 1;
  c.level_max = level_max;
  return c;
}

}  // namespace

TEST(Manufactured, ValueAtTheFarCorner) {
  const Vec3 u = manufactured_problem().exact.u(Vec3(1, 1, 1));
  EXPECT_EQ(u, Vec3(-2, 2, -1));
}

TEST(Manufactured, DivergenceFree) {
  const VectorPolynomial u = manufactured_polynomial();
  EXPECT_TRUE(u.divergence().is_zero(1e-15));
  // Central differences of the hard-coded field, exact up to fourth derivatives.
  const VectorField f = manufactured_problem().exact.u;
  const double h = 1e-4;
  for (const Vec3& x : random_points(100, 1)) {
    double div = 0.0;
    for (int d = 0; d < 3; ++d) {
      Vec3 e = Vec3::Zero();
      e[d] = h;
      div += (f(x + e)[d] - f(x - e)[d]) / (2 * h);
    }
    EXPECT_NEAR(div, 0.0, 1e-7);
  }
}

TEST(Manufactured, HardCodedDerivativesMatchSymbolicCurls) {
  const Problem p = manufactured_problem();
  const VectorPolynomial u = manufactured_polynomial();
  const VectorPolynomial cu = u.curl();
  const VectorPolynomial f = cu.curl().curl().curl();
  EXPECT_EQ(u.degree(), 6);
  EXPECT_EQ(f.degree(), 2);
  for (const Vec3& x : random_points(100, 2)) {
    EXPECT_LT((p.exact.u(x) - u(x)).norm(), 1e-14);
    EXPECT_LT((p.exact.curl_u(x) - cu(x)).norm(), 1e-13);
    EXPECT_LT((p.f(x) - f(x)).norm(), 1e-12);
  }
}

TEST(Manufactured, BoundaryDataAreTangentialTraces) {
  const Problem p = manufactured_problem();
  const Vec3 x(0.3, 0.7, 1.0), n(0, 0, 1);
  EXPECT_LT((p.boundary.g1(x, n) - p.exact.u(x).cross(n)).norm(), 1e-15);
  EXPECT_LT((p.boundary.g2(x, n) - p.exact.curl_u(x).cross(n)).norm(), 1e-15);
  EXPECT_NEAR(p.boundary.g1(x, n).dot(n), 0.0, 1e-15);
}

TEST(Parsing, NamesRoundTrip) {
  EXPECT_EQ(parse_mesh_family("tet"), MeshFamily::Tet);
  EXPECT_EQ(to_string(MeshFamily::Hex), "hex");
  EXPECT_EQ(parse_table_format("latex"), TableFormat::Latex);
  EXPECT_THROW(parse_mesh_family("prism"), std::invalid_argument);
  EXPECT_THROW(parse_table_format("json"), std::invalid_argument);
}

TEST(DefaultLevels, PerFamilyAndDegree) {
  EXPECT_EQ(default_levels(MeshFamily::Hex, 2), std::make_pair(1, 4));
  EXPECT_EQ(default_levels(MeshFamily::Hex, 5), std::make_pair(1, 3));
  EXPECT_EQ(default_levels(MeshFamily::Tet, 2), std::make_pair(1, 4));
  EXPECT_EQ(default_levels(MeshFamily::Tet, 4), std::make_pair(1, 3));
}

TEST(SizeEstimate, CountsMatchGeneratedMeshes) {
  for (MeshFamily fam : {MeshFamily::Hex, MeshFamily::Tet})
    for (int level = 1; level <= 3; ++level)
      for (int k = 1; k <= 3; ++k) {
        const SizeEstimate est = estimate_size(fam, level, k);
        const Mesh mesh = make_mesh(fam, level);
        const Discretization disc(mesh, k);
        EXPECT_EQ(est.elements, mesh.num_elements());
        EXPECT_EQ(est.faces, mesh.num_faces());
        EXPECT_EQ(est.boundary_faces, mesh.num_boundary_faces());
        EXPECT_EQ(est.free_dofs, disc.layout().num_free());
        if (level >= 2 && k <= 2) {
          const Index nnz = assemble_saddle_matrix(disc).nonZeros();
          EXPECT_GE(est.nonzeros, nnz) << to_string(fam) << " L" << level << " k" << k;
        }
      }
  EXPECT_THROW(estimate_size(MeshFamily::Hex, 0, 2), std::invalid_argument);
}

TEST(FormatError, TableStyle) {
  EXPECT_EQ(format_error(0.03345), "0.3345E-01");
  EXPECT_EQ(format_error(7.541), "0.7541E+01");
  EXPECT_EQ(format_error(0.2151e-2), "0.2151E-02");
  EXPECT_EQ(format_error(0.99996), "0.1000E+01");
  EXPECT_EQ(format_error(0.0), "0.0000E+00");
  EXPECT_EQ(format_error(0.444, 3), "0.444E+00");
  EXPECT_THROW(format_error(1.0, 0), std::invalid_argument);
}

TEST(Render, SingleLevelShowsZeroRate) {
  ConvergenceReport r;
  r.k = 2;
  r.problem = "manufactured";
  ErrorRecord e;
  e.level = 1;
  e.dofs = 40;
  e.l2_error = 7.559;
  e.energy_error = 13.36;
  e.p_norm = 0.2551;
  r.levels = {e};
  r.rates = convergence_rates(r.levels);
  const std::string plain = render_table(r, TableFormat::Plain);
  EXPECT_NE(plain.find("0.7559E+01   0.0"), std::string::npos) << plain;
  const std::string latex = render_table(r, TableFormat::Latex);
  EXPECT_NE(latex.find("1 & 0.7559E+01 & 0.0 & 0.1336E+02 & 0.0 & 0.2551E+00 & 0.0 \\\\"), std::string::npos)
      << latex;
  r.rates.clear();
  EXPECT_THROW(render_table(r, TableFormat::Plain), std::invalid_argument);
  EXPECT_THROW(render_table(ConvergenceReport{}, TableFormat::Csv), std::invalid_argument);
}

TEST(Render, CsvRoundTrip) {
  const ConvergenceReport r = run_study(small_config(MeshFamily::Hex, 1, 2));
  const ConvergenceReport back = parse_csv(render_table(r, TableFormat::Csv));
  ASSERT_EQ(back.levels.size(), r.levels.size());
  EXPECT_EQ(back.k, 1);
  EXPECT_EQ(back.problem, "manufactured");
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    EXPECT_EQ(back.levels[i].l2_error, r.levels[i].l2_error);
    EXPECT_EQ(back.levels[i].energy_error, r.levels[i].energy_error);
    EXPECT_EQ(back.levels[i].p_norm, r.levels[i].p_norm);
    EXPECT_EQ(back.levels[i].dofs, r.levels[i].dofs);
    EXPECT_EQ(back.rates[i].l2, r.rates[i].l2);
  }
  EXPECT_THROW(parse_csv("level,error\n1,2\n"), std::invalid_argument);
}

TEST(Render, LatexHasOneRowPerLevel) {
  const ConvergenceReport r = run_study(small_config(MeshFamily::Tet, 1, 2));
  const std::string latex = render_table(r, TableFormat::Latex);
  std::size_t rows = 0;
  for (std::size_t p = latex.find(" \\\\\n"); p != std::string::npos; p = latex.find(" \\\\\n", p + 1)) ++rows;
  EXPECT_EQ(rows, r.levels.size() + 1);  // header row included
}

TEST(Study, RatesAreConsistentWithErrors) {
  const ConvergenceReport r = run_study(small_config(MeshFamily::Hex, 2, 3));
  ASSERT_EQ(r.levels.size(), 3u);
  for (std::size_t i = 1; i < r.levels.size(); ++i) {
    EXPECT_NEAR(*r.rates[i].l2, std::log2(r.levels[i - 1].l2_error / r.levels[i].l2_error), 0.05);
    EXPECT_NEAR(*r.rates[i].energy, std::log2(r.levels[i - 1].energy_error / r.levels[i].energy_error), 0.05);
    EXPECT_NEAR(r.levels[i].h, 0.5 * r.levels[i - 1].h, 1e-15);
    EXPECT_EQ(r.levels[i].dofs, estimate_size(MeshFamily::Hex, static_cast<int>(i) + 1, 2).free_dofs);
  }
}

TEST(Study, CsvIsDeterministicAcrossThreadCounts) {
  StudyConfig a = small_config(MeshFamily::Tet, 2, 2), b = a;
  a.threads = 1;
  b.threads = 3;
  EXPECT_EQ(render_table(run_study(a), TableFormat::Csv), render_table(run_study(b), TableFormat::Csv));
}

TEST(Study, PolynomialOverrideIsReproduced) {
  const ConvergenceReport r = run_study(small_config(MeshFamily::Hex, 2, 2), patch_problem(2, 17));
  for (const ErrorRecord& e : r.levels) {
    EXPECT_LE(e.l2_error, 1e-9);
    EXPECT_LE(e.energy_error, 1e-9);
    EXPECT_LE(e.p_norm, 1e-9);
  }
}

TEST(Study, RefusesOversizedLevels) {
  StudyConfig c = small_config(MeshFamily::Tet, 3, 4);
  c.memory_limit_bytes = 1e6;
  try {
    run_study(c);
    FAIL() << "expected a refusal";
  } catch (const ResourceError& e) {
    EXPECT_NE(std::string(e.what()).find("refused"), std::string::npos);
  }
}

TEST(Study, ErrorsCarryTheLevel) {
  StudyConfig c = small_config(MeshFamily::Hex, 2, 1);
  c.solver.tol = 1e-3;
  try {
    run_study(c);
    FAIL() << "expected invalid_argument";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("level 1"), std::string::npos) << e.what();
  }
  c = small_config(MeshFamily::Hex, 2, 1);
  c.level_min = 2;
  EXPECT_THROW(run_study(c), std::invalid_argument);
}

TEST(Study, AuxNormIsReportedOnRequest) {
  StudyConfig c = small_config(MeshFamily::Hex, 2, 2);
  c.with_aux_norm = true;
  const ConvergenceReport r = run_study(c);
  for (const ErrorRecord& e : r.levels) {
    ASSERT_TRUE(e.aux_norm.has_value());
    EXPECT_GE(*e.aux_norm, e.energy_error);
  }
}
