// Element-local discrete weak gradient and weak curl-curl, the stabilizers
// s_{1,T}, s_{2,T}, and local L2 projections of smooth fields.
//
// Local coefficient layouts on an element T with faces e_0..e_{m-1}:
//   vector weak function {v0, vb, vn}:
//     [ v0: 3 blocks (x, y, z) of dim P_k(T) ]
//     per face j: [ vb: blocks (t1, t2) of dim P_k(e) ][ vn: blocks (t1, t2) of dim P_{k-1}(e) ]
//   scalar weak function {s0, sb}:
//     [ s0: dim P_k(T) ] per face j: [ sb: dim P_k(e) ]
// Face components are tangential coordinates in the shared face frame, so
// neighbouring elements see identical face unknowns.
#pragma once

#include "quadcurl/common.hpp"
#include "quadcurl/mesh.hpp"
#include "quadcurl/polynomial.hpp"
#include "quadcurl/polyspace.hpp"
#include "quadcurl/quadrature.hpp"

#include <optional>
#include <vector>

namespace quadcurl {

/// Mesh size h_T in the stabilizer weights.
enum class MeshSizeRule {
  Diameter,  ///< largest vertex distance
  Width,     ///< largest extent along a coordinate axis (the cell side on cube-based grids)
};

/// Choices that fix the discrete scheme beyond k.
struct SchemeOptions {
  /// The weak curl-curl takes values in [P_{k - curlcurl_offset}(T)]^3; 1 or 2.
  int curlcurl_offset = 1;
  MeshSizeRule mesh_size = MeshSizeRule::Width;
  /// Powers of h_T weighting the tangential-trace and tangential-curl parts
  /// of s_1 and the jump term of s_2.
  double trace_exponent = -3.0;
  double curl_exponent = -1.0;
  double pressure_exponent = 3.0;
};

/// Throws std::invalid_argument for an offset outside {1, 2} or non-finite exponents.
void validate(const SchemeOptions& scheme);

/// h_T of an element under the given rule.
double mesh_size(const Mesh& mesh, const Element& el, MeshSizeRule rule);

struct LocalLayout {
  int k = 1;
  int num_faces = 0;
  int n_cell = 0;       // dim P_k(T)
  int n_face = 0;       // dim P_k(e)
  int n_face_curl = 0;  // dim P_{k-1}(e)
  int target_degree = -1;  // r = k - curlcurl_offset
  int n_target = 0;        // dim P_r(T), 0 for r < 0

  LocalLayout() = default;
  LocalLayout(int degree, int faces, int curlcurl_offset = 1);

  int velocity_interior() const { return 3 * n_cell; }
  int velocity_per_face() const { return 2 * (n_face + n_face_curl); }
  int velocity_size() const { return velocity_interior() + num_faces * velocity_per_face(); }
  int ub_offset(int j) const { return velocity_interior() + j * velocity_per_face(); }
  int un_offset(int j) const { return ub_offset(j) + 2 * n_face; }
  int scalar_size() const { return n_cell + num_faces * n_face; }
  int pb_offset(int j) const { return n_cell + j * n_face; }
};

/// G_T: scalar weak coefficients -> coefficients of the weak gradient in [P_k(T)]^3.
struct LocalWeakGradient {
  Mat matrix;  // 3 n_cell x scalar_size
  Mat rhs;     // right-hand side of the defining identity; matrix = M^{-1} rhs
};

/// C_T: vector weak coefficients -> coefficients of the weak curl-curl in
/// [P_r(T)]^3. Zero rows when r < 0.
struct LocalWeakCurlCurl {
  Mat matrix;  // 3 n_target x velocity_size
  Mat rhs;
};

/// Bases, frames and quadrature of one element, plus the local operator and
/// projection routines built on them.
class LocalElement {
 public:
  LocalElement(const Mesh& mesh, Index elem, int k, const SchemeOptions& scheme = {});

  const LocalLayout& layout() const { return layout_; }
  int k() const { return layout_.k; }
  double h() const { return h_; }
  Index id() const { return elem_; }
  const ScalarBasis3D& cell_basis() const { return cell_basis_; }
  const SchemeOptions& scheme() const { return scheme_; }
  /// Basis of P_r(T); absent for r < 0.
  const std::optional<ScalarBasis3D>& target_basis() const { return target_basis_; }
  const ScalarBasis2D& face_basis(int j) const { return face_basis_[static_cast<std::size_t>(j)]; }
  const ScalarBasis2D& face_curl_basis(int j) const { return face_curl_basis_[static_cast<std::size_t>(j)]; }
  const Vec3& outward_normal(int j) const { return normals_[static_cast<std::size_t>(j)]; }
  const QuadratureRule& cell_rule() const { return cell_rule_; }
  const QuadratureRule& face_rule(int j) const { return face_rules_[static_cast<std::size_t>(j)]; }

  /// Block-diagonal vector mass matrix of [P_k(T)]^3.
  Mat vector_mass() const;
  /// Block-diagonal vector mass matrix of [P_r(T)]^3 (empty for r < 0).
  Mat target_vector_mass() const;

  LocalWeakGradient weak_gradient() const;
  LocalWeakCurlCurl weak_curlcurl() const;
  /// s_{1,T}: tangential traces and tangential curls weighted by h_T to the
  /// scheme's trace and curl exponents (-3 and -1 by default).
  Mat velocity_stabilizer() const;
  /// s_{2,T} weighted by h_T to the pressure exponent (3 by default).
  Mat pressure_stabilizer() const;

  /// (f, v0)_T for every velocity basis function; zero on face unknowns.
  Vec load(const VectorField& f, int exactness) const;
  /// Local coefficients of Q_h w = {Q0 w, Qb w, Qn curl w}.
  Vec project_velocity(const VectorField& w, const VectorField& curl_w, int exactness) const;
  /// Local coefficients of Q_h s = {Q0 s, Qb s}.
  Vec project_scalar(const ScalarField& s, int exactness) const;

  /// Quadrature exactness used for operator integrals (2k + 2).
  int operator_exactness() const { return 2 * layout_.k + 2; }
  /// Default exactness for data integrals: max(2k + 2, k + 6).
  int data_exactness() const;

 private:
  Index elem_;
  LocalLayout layout_;
  SchemeOptions scheme_;
  double h_;
  ScalarBasis3D cell_basis_;
  std::optional<ScalarBasis3D> target_basis_;
  std::vector<ScalarBasis2D> face_basis_;
  std::vector<ScalarBasis2D> face_curl_basis_;
  std::vector<Vec3> normals_;
  std::vector<Index> faces_;
  QuadratureRule cell_rule_;
  std::vector<QuadratureRule> face_rules_;
  const Mesh* mesh_;
};

LocalWeakGradient weak_gradient_local(const Mesh& mesh, Index elem, int k);
LocalWeakCurlCurl weak_curlcurl_local(const Mesh& mesh, Index elem, int k, const SchemeOptions& scheme = {});

struct CommutativityResidual {
  /// ||C_T(Q_h w) - Q^r(curl curl w)||_T, absolute and relative to
  /// max(||Q^r curl curl w||_T, ||Q0 w||_T / h_T^2).
  double curlcurl_abs = 0.0;
  double curlcurl_rel = 0.0;
  /// ||G_T(Q_h s) - Q^k(grad s)||_T, relative to max(||Q^k grad s||_T, ||Q0 s||_T / h_T).
  double gradient_abs = 0.0;
  double gradient_rel = 0.0;
};

/// Both sides of the commuting-projection identities on one element. The
/// right-hand sides come from exact symbolic derivatives of the inputs.
CommutativityResidual check_commutativity(const Mesh& mesh, Index elem, int k, const VectorPolynomial& w,
                                          const Polynomial3& sigma, const SchemeOptions& scheme = {});

}  // namespace quadcurl
