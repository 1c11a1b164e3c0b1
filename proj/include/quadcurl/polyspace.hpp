// Scaled monomial bases of P_k on elements and faces, and their Gram matrices.
#pragma once

#include "quadcurl/common.hpp"
#include "quadcurl/mesh.hpp"
#include "quadcurl/quadrature.hpp"

#include <array>
#include <vector>

namespace quadcurl {

/// Monomials ((x - c)/h)^a ((y - c)/h)^b ((z - c)/h)^c with a + b + c <= k,
/// ordered by total degree so that the first poly_dim_3d(r) functions span P_r.
class ScalarBasis3D {
 public:
  /// Hessian columns: xx, yy, zz, xy, xz, yz.
  using Hessians = Eigen::Matrix<double, Eigen::Dynamic, 6>;
  using Gradients = Eigen::Matrix<double, Eigen::Dynamic, 3>;

  ScalarBasis3D(Vec3 center, double scale, int degree);
  static ScalarBasis3D for_element(const Element& element, int degree);

  int degree() const { return degree_; }
  int dim() const { return static_cast<int>(exponents_.size()); }
  const Vec3& center() const { return center_; }
  double scale() const { return scale_; }
  const std::vector<std::array<int, 3>>& exponents() const { return exponents_; }

  Vec values(const Vec3& x) const;
  Gradients gradients(const Vec3& x) const;
  Hessians hessians(const Vec3& x) const;
  /// Value of sum_i coeffs[i] * phi_i at x.
  double evaluate(const Eigen::Ref<const Vec>& coeffs, const Vec3& x) const;

 private:
  Vec3 center_;
  double scale_;
  int degree_;
  std::vector<std::array<int, 3>> exponents_;
};

/// Monomials in face-frame coordinates (xi, eta) = ((x - o).t1, (x - o).t2) / h_e,
/// with o the face centroid and h_e the face diameter.
class ScalarBasis2D {
 public:
  ScalarBasis2D(const FaceFrame& frame, Vec3 origin, double scale, int degree);
  static ScalarBasis2D for_face(const Face& face, int degree);

  int degree() const { return degree_; }
  int dim() const { return static_cast<int>(exponents_.size()); }
  const FaceFrame& frame() const { return frame_; }

  /// Throws GeometryError for points more than 1e-12 off the face plane.
  Vec values(const Vec3& x) const;
  double evaluate(const Eigen::Ref<const Vec>& coeffs, const Vec3& x) const;

 private:
  FaceFrame frame_;
  Vec3 origin_;
  double scale_;
  int degree_;
  std::vector<std::array<int, 2>> exponents_;
};

/// Basis values at every rule point: row q holds phi_i(x_q).
Mat tabulate(const ScalarBasis3D& basis, const QuadratureRule& rule);
Mat tabulate(const ScalarBasis2D& basis, const QuadratureRule& rule);

/// M_ij = integral of phi_i phi_j. Requires rule.exactness >= 2 * degree.
Mat mass_matrix(const ScalarBasis3D& basis, const QuadratureRule& rule);
Mat mass_matrix(const ScalarBasis2D& basis, const QuadratureRule& rule);

/// L2 projection coefficients of a scalar field onto span(basis).
Vec project(const ScalarBasis3D& basis, const QuadratureRule& rule, const ScalarField& f);
Vec project(const ScalarBasis2D& basis, const QuadratureRule& rule, const ScalarField& f);
/// Componentwise projection onto [P_k]^3; coefficients stored component-major.
Vec project_vector(const ScalarBasis3D& basis, const QuadratureRule& rule, const VectorField& f);
/// Projection of the tangential components f.t1, f.t2 onto P_k(e); stored
/// [t1 block; t2 block] in the basis' face frame.
Vec project_tangential(const ScalarBasis2D& basis, const QuadratureRule& rule, const VectorField& f);

}  // namespace quadcurl
