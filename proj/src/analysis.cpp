#include "quadcurl/analysis.hpp"

#include "quadcurl/parallel.hpp"
#include "quadcurl/polyspace.hpp"
#include "quadcurl/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace quadcurl {

namespace {

int default_exactness(int k) { return std::max(2 * k + 2, k + 6); }

double quad_form(const Mat& m, const Eigen::Ref<const Vec>& x) { return x.dot(m * x); }

// Vector v0 of element e evaluated at x from its component-major coefficients.
Vec3 eval_vector(const ScalarBasis3D& basis, const Eigen::Ref<const Vec>& coeffs, const Vec3& x) {
  const Vec phi = basis.values(x);
  const int n = basis.dim();
  return {coeffs.segment(0, n).dot(phi), coeffs.segment(n, n).dot(phi), coeffs.segment(2 * n, n).dot(phi)};
}

}  // namespace

Vec project_exact(const Discretization& disc, const ExactSolution& exact, int exactness) {
  const Mesh& mesh = disc.mesh();
  const DofLayout& L = disc.layout();
  const int k = disc.k();
  const int ex = exactness >= 0 ? exactness : default_exactness(k);
  Vec out = Vec::Zero(L.total_size);
  const ScalarField p = exact.p ? exact.p : ScalarField([](const Vec3&) { return 0.0; });

  parallel_for(static_cast<std::size_t>(mesh.num_elements()), disc.threads(), [&](std::size_t i) {
    const auto e = static_cast<Index>(i);
    const ScalarBasis3D basis = ScalarBasis3D::for_element(mesh.element(e), k);
    const QuadratureRule rule = element_quadrature(mesh, e, ex);
    out.segment(L.u0_offset(e), 3 * L.n_cell) = project_vector(basis, rule, exact.u);
    out.segment(L.p0_offset(e), L.n_cell) = project(basis, rule, p);
  });
  parallel_for(static_cast<std::size_t>(mesh.num_faces()), disc.threads(), [&](std::size_t i) {
    const Face& face = mesh.face(static_cast<Index>(i));
    const QuadratureRule rule = face_quadrature(mesh, face.id, ex);
    const ScalarBasis2D fb = ScalarBasis2D::for_face(face, k);
    out.segment(L.ub_offset(face.id), 2 * L.n_face) = project_tangential(fb, rule, exact.u);
    out.segment(L.un_offset(face.id), 2 * L.n_face_curl) =
        project_tangential(ScalarBasis2D::for_face(face, k - 1), rule, exact.curl_u);
    out.segment(L.pb_offset(face.id), L.n_face) = project(fb, rule, p);
  });
  return out;
}

double energy_norm(const Discretization& disc, const Vec& v) {
  double sum = 0.0;
  for (Index e = 0; e < disc.mesh().num_elements(); ++e) {
    const LocalOperators& op = disc.local(e);
    const Vec x = disc.gather(e, v).head(op.layout.velocity_size());
    sum += quad_form(op.a, x) + quad_form(op.s1, x);
  }
  return std::sqrt(std::max(0.0, sum));
}

double aux_norm_1(const Discretization& disc, const Vec& v) {
  const Mesh& mesh = disc.mesh();
  const DofLayout& L = disc.layout();
  const int k = disc.k();
  const int n = L.n_cell;

  double div2 = 0.0;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const ScalarBasis3D basis = ScalarBasis3D::for_element(mesh.element(e), k);
    const QuadratureRule rule = element_quadrature(mesh, e, 2 * k);
    const auto c = v.segment(L.u0_offset(e), 3 * n);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto g = basis.gradients(rule.points[q]);
      double div = 0.0;
      for (int d = 0; d < 3; ++d) div += c.segment(d * n, n).dot(g.col(d));
      div2 += rule.weights[q] * div * div;
    }
  }

  double jump2 = 0.0;
  for (const Face& f : mesh.faces()) {
    if (f.neighbors.size() != 2) continue;
    const Element& a = mesh.element(f.neighbors[0]);
    const Element& b = mesh.element(f.neighbors[1]);
    const ScalarBasis3D ba = ScalarBasis3D::for_element(a, k), bb = ScalarBasis3D::for_element(b, k);
    const QuadratureRule rule = face_quadrature(mesh, f.id, 2 * k);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec3& x = rule.points[q];
      const double j = (eval_vector(ba, v.segment(L.u0_offset(a.id), 3 * n), x) -
                        eval_vector(bb, v.segment(L.u0_offset(b.id), 3 * n), x))
                           .dot(f.normal);
      s += rule.weights[q] * j * j;
    }
    jump2 += s / std::max(mesh_size(mesh, a, disc.scheme().mesh_size), mesh_size(mesh, b, disc.scheme().mesh_size));
  }
  return energy_norm(disc, v) + std::sqrt(div2) + std::sqrt(jump2);
}

L2Errors l2_errors(const Discretization& disc, const Vec& solution, const Vec& projected) {
  const DofLayout& L = disc.layout();
  const int n = L.n_cell;
  double e2 = 0.0, p2 = 0.0;
  for (Index e = 0; e < disc.mesh().num_elements(); ++e) {
    const Mat& m = disc.local(e).cell_mass;
    for (int c = 0; c < 3; ++c) {
      const Index off = L.u0_offset(e) + c * n;
      const Vec d = projected.segment(off, n) - solution.segment(off, n);
      e2 += quad_form(m, d);
    }
    p2 += quad_form(m, solution.segment(L.p0_offset(e), n));
  }
  return {std::sqrt(std::max(0.0, e2)), std::sqrt(std::max(0.0, p2))};
}

std::vector<RateRecord> convergence_rates(const std::vector<ErrorRecord>& errors) {
  std::vector<RateRecord> rates(errors.size());
  auto rate = [](double prev, double cur) -> std::optional<double> {
    if (!(prev > 0.0) || !(cur > 0.0)) return std::nullopt;
    return std::log2(prev / cur);
  };
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (i == 0) {
      rates[i] = {0.0, 0.0, 0.0};
      continue;
    }
    rates[i].l2 = rate(errors[i - 1].l2_error, errors[i].l2_error);
    rates[i].energy = rate(errors[i - 1].energy_error, errors[i].energy_error);
    rates[i].p = rate(errors[i - 1].p_norm, errors[i].p_norm);
  }
  return rates;
}

}  // namespace quadcurl
