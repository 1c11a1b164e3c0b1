#include "quadcurl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace quadcurl {

double QuadratureRule::measure() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

namespace {

// (P_n(t), P_n'(t)) by the three-term recurrence.
std::pair<double, double> legendre(int n, double t) {
  double p0 = 1.0, p1 = t;
  for (int j = 2; j <= n; ++j) {
    const double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (t * p1 - p0) / (t * t - 1.0)};
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  if (n == 1) return {{0.5}, {1.0}};
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, t);
      const double dt = p / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    const double dp = legendre(n, t).second;
    const double weight = 1.0 / ((1.0 - t * t) * dp * dp);  // half of the [-1,1] weight
    const auto lo = static_cast<std::size_t>(i), hi = static_cast<std::size_t>(n - 1 - i);
    x[lo] = 0.5 * (1.0 - t);
    x[hi] = 0.5 * (1.0 + t);
    w[lo] = w[hi] = weight;
  }
  if (n % 2 == 1) x[static_cast<std::size_t>(n / 2)] = 0.5;
  return {x, w};
}

namespace {

int points_for(int degree) { return std::max(1, (degree + 2) / 2); }

QuadratureRule reference_hex(int p) {
  const auto [x, w] = gauss_legendre(points_for(p));
  QuadratureRule r{Domain::Hex, {}, {}, p};
  for (std::size_t k = 0; k < x.size(); ++k)
    for (std::size_t j = 0; j < x.size(); ++j)
      for (std::size_t i = 0; i < x.size(); ++i) {
        r.points.emplace_back(x[i], x[j], x[k]);
        r.weights.push_back(w[i] * w[j] * w[k]);
      }
  return r;
}

QuadratureRule reference_quad(int p) {
  const auto [x, w] = gauss_legendre(points_for(p));
  QuadratureRule r{Domain::QuadFace, {}, {}, p};
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t i = 0; i < x.size(); ++i) {
      r.points.emplace_back(x[i], x[j], 0.0);
      r.weights.push_back(w[i] * w[j]);
    }
  return r;
}

// Collapsed coordinates: x = a, y = b (1 - a), Jacobian (1 - a).
QuadratureRule reference_tri(int p) {
  const auto [xa, wa] = gauss_legendre(points_for(p + 1));
  const auto [xb, wb] = gauss_legendre(points_for(p));
  QuadratureRule r{Domain::TriFace, {}, {}, p};
  for (std::size_t i = 0; i < xa.size(); ++i)
    for (std::size_t j = 0; j < xb.size(); ++j) {
      const double a = xa[i], b = xb[j];
      r.points.emplace_back(a, b * (1.0 - a), 0.0);
      r.weights.push_back(wa[i] * wb[j] * (1.0 - a));
    }
  return r;
}

// x = a, y = b (1 - a), z = c (1 - a)(1 - b), Jacobian (1 - a)^2 (1 - b).
QuadratureRule reference_tet(int p) {
  const auto [xa, wa] = gauss_legendre(points_for(p + 2));
  const auto [xb, wb] = gauss_legendre(points_for(p + 1));
  const auto [xc, wc] = gauss_legendre(points_for(p));
  QuadratureRule r{Domain::Tet, {}, {}, p};
  for (std::size_t i = 0; i < xa.size(); ++i)
    for (std::size_t j = 0; j < xb.size(); ++j)
      for (std::size_t l = 0; l < xc.size(); ++l) {
        const double a = xa[i], b = xb[j], c = xc[l];
        r.points.emplace_back(a, b * (1.0 - a), c * (1.0 - a) * (1.0 - b));
        r.weights.push_back(wa[i] * wb[j] * wc[l] * (1.0 - a) * (1.0 - a) * (1.0 - b));
      }
  return r;
}

// Map a reference rule through x = origin + J * xi, weights scaled by |det J|.
void append_affine(const QuadratureRule& ref, const Vec3& origin, const Eigen::Matrix3d& jac, double scale,
                   QuadratureRule& out) {
  for (std::size_t q = 0; q < ref.size(); ++q) {
    out.points.push_back(origin + jac * ref.points[q]);
    out.weights.push_back(ref.weights[q] * scale);
  }
}

void append_tet(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const QuadratureRule& ref,
                QuadratureRule& out) {
  Eigen::Matrix3d jac;
  jac << b - a, c - a, d - a;
  append_affine(ref, a, jac, std::abs(jac.determinant()), out);
}

void append_triangle(const Vec3& a, const Vec3& b, const Vec3& c, const QuadratureRule& ref, QuadratureRule& out) {
  Eigen::Matrix3d jac;
  const Vec3 e1 = b - a, e2 = c - a;
  jac << e1, e2, Vec3::Zero();
  append_affine(ref, a, jac, e1.cross(e2).norm(), out);
}

}  // namespace

QuadratureRule quadrature(Domain domain, int exactness) {
  if (exactness < 0) throw std::invalid_argument("quadrature: exactness must be >= 0");
  switch (domain) {
    case Domain::Hex: return reference_hex(exactness);
    case Domain::Tet: return reference_tet(exactness);
    case Domain::QuadFace: return reference_quad(exactness);
    case Domain::TriFace: return reference_tri(exactness);
    case Domain::Polyhedron: break;
  }
  throw std::invalid_argument("quadrature: no reference rule for this domain kind");
}

QuadratureRule element_quadrature(const Mesh& mesh, Index elem, int exactness) {
  const Element& el = mesh.element(elem);
  if (el.shape == Shape::Tetrahedron && el.vertices.size() == 4) {
    QuadratureRule out{Domain::Tet, {}, {}, exactness};
    append_tet(mesh.vertex(el.vertices[0]).coords, mesh.vertex(el.vertices[1]).coords,
               mesh.vertex(el.vertices[2]).coords, mesh.vertex(el.vertices[3]).coords,
               quadrature(Domain::Tet, exactness), out);
    return out;
  }
  if (el.shape == Shape::Hexahedron) {
    Vec3 lo = mesh.vertex(el.vertices[0]).coords, hi = lo;
    for (Index v : el.vertices) {
      lo = lo.cwiseMin(mesh.vertex(v).coords);
      hi = hi.cwiseMax(mesh.vertex(v).coords);
    }
    const Vec3 ext = hi - lo;
    const double box = ext.prod();
    if (el.vertices.size() == 8 && std::abs(box - el.volume) <= 1e-12 * box) {
      QuadratureRule out{Domain::Hex, {}, {}, exactness};
      append_affine(quadrature(Domain::Hex, exactness), lo, ext.asDiagonal().toDenseMatrix(), box, out);
      return out;
    }
  }
  // General convex cell: tetrahedra (centroid, face centroid, edge) per face edge.
  QuadratureRule out{Domain::Polyhedron, {}, {}, exactness};
  const QuadratureRule ref = quadrature(Domain::Tet, exactness);
  for (Index fid : el.faces) {
    const Face& f = mesh.face(fid);
    const std::size_t n = f.vertex_loop.size();
    for (std::size_t i = 0; i < n; ++i)
      append_tet(el.centroid, f.centroid, mesh.vertex(f.vertex_loop[i]).coords,
                 mesh.vertex(f.vertex_loop[(i + 1) % n]).coords, ref, out);
  }
  return out;
}

QuadratureRule face_quadrature(const Mesh& mesh, Index fid, int exactness) {
  const Face& f = mesh.face(fid);
  if (!(f.area > 0.0)) throw GeometryError("face_quadrature: degenerate face " + std::to_string(fid));
  auto vtx = [&](std::size_t i) -> const Vec3& { return mesh.vertex(f.vertex_loop[i]).coords; };
  const std::size_t n = f.vertex_loop.size();
  if (n == 3) {
    QuadratureRule out{Domain::TriFace, {}, {}, exactness};
    append_triangle(vtx(0), vtx(1), vtx(2), quadrature(Domain::TriFace, exactness), out);
    return out;
  }
  if (n == 4 && (vtx(0) + vtx(2) - vtx(1) - vtx(3)).norm() <= 1e-13 * f.diameter) {
    QuadratureRule out{Domain::QuadFace, {}, {}, exactness};
    Eigen::Matrix3d jac;
    const Vec3 e1 = vtx(1) - vtx(0), e2 = vtx(3) - vtx(0);
    jac << e1, e2, Vec3::Zero();
    append_affine(quadrature(Domain::QuadFace, exactness), vtx(0), jac, e1.cross(e2).norm(), out);
    return out;
  }
  QuadratureRule out{Domain::TriFace, {}, {}, exactness};
  const QuadratureRule ref = quadrature(Domain::TriFace, exactness);
  for (std::size_t i = 0; i < n; ++i) append_triangle(f.centroid, vtx(i), vtx((i + 1) % n), ref, out);
  return out;
}

}  // namespace quadcurl
