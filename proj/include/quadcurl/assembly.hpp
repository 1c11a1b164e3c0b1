// Global degrees of freedom, cached local operators, and assembly of the
// saddle-point system with boundary data imposed by elimination.
//
// Global ordering (N = velocity_size + pressure part):
//   [ u0 of element 0..E-1 (3 dim P_k(T) each) ]
//   [ per face f: ub (t1, t2 blocks of dim P_k(e)), un (t1, t2 blocks of dim P_{k-1}(e)) ]
//   [ p0 of element 0..E-1 (dim P_k(T) each) ]
//   [ pb of face 0..F-1 (dim P_k(e) each) ]
// Face DOFs on the boundary are constrained; everything else is free.
#pragma once

#include "quadcurl/common.hpp"
#include "quadcurl/mesh.hpp"
#include "quadcurl/weak_ops.hpp"

#include <Eigen/Sparse>

#include <iosfwd>
#include <vector>

namespace quadcurl {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

struct DofLayout {
  int k = 1;
  Index num_elements = 0;
  Index num_faces = 0;
  int n_cell = 0;
  int n_face = 0;
  int n_face_curl = 0;

  Index velocity_size = 0;
  Index total_size = 0;
  /// -1 for constrained DOFs, otherwise the position in the free vector.
  std::vector<Index> free_index;
  std::vector<Index> free_dofs;

  int face_velocity_size() const { return 2 * (n_face + n_face_curl); }
  Index u0_offset(Index e) const { return e * 3 * n_cell; }
  Index ub_offset(Index f) const { return num_elements * 3 * n_cell + f * face_velocity_size(); }
  Index un_offset(Index f) const { return ub_offset(f) + 2 * n_face; }
  Index p0_offset(Index e) const { return velocity_size + e * n_cell; }
  Index pb_offset(Index f) const { return velocity_size + num_elements * n_cell + f * n_face; }

  Index num_free() const { return static_cast<Index>(free_dofs.size()); }
  Index num_constrained() const { return total_size - num_free(); }
  bool is_constrained(Index dof) const { return free_index[static_cast<std::size_t>(dof)] < 0; }
};

DofLayout build_dof_layout(const Mesh& mesh, int k);

/// Local matrices of one element shape class.
struct LocalOperators {
  LocalLayout layout;
  Mat curlcurl;     ///< C_T
  Mat target_mass;  ///< block-diagonal mass of [P_r(T)]^3
  Mat a;            ///< a_T = (C u, C v)
  Mat s1;
  Mat b;            ///< b_T(v, q) = (v0, grad_w q); velocity x scalar
  Mat s2;
  Mat saddle;       ///< [[a + s1, b], [b^T, -s2]]
  Mat cell_mass;    ///< scalar mass of P_k(T)
};

/// Mesh, degree, DOF layout and the per-class local operators. Elements whose
/// geometry and face frames coincide up to translation share one class.
class Discretization {
 public:
  /// Keeps a reference to the mesh.
  Discretization(const Mesh& mesh, int k, int threads = 0, const SchemeOptions& scheme = {});
  Discretization(Mesh&&, int, int = 0, const SchemeOptions& = {}) = delete;

  const Mesh& mesh() const { return *mesh_; }
  int k() const { return k_; }
  int threads() const { return threads_; }
  const SchemeOptions& scheme() const { return scheme_; }
  const DofLayout& layout() const { return layout_; }
  Index num_classes() const { return static_cast<Index>(classes_.size()); }
  const LocalOperators& local(Index e) const { return classes_[static_cast<std::size_t>(class_of_[static_cast<std::size_t>(e)])]; }
  /// Global DOFs of element e in local order: velocity layout, then scalar layout.
  const std::vector<Index>& element_dofs(Index e) const { return dofs_[static_cast<std::size_t>(e)]; }
  int velocity_local_size(Index e) const { return local(e).layout.velocity_size(); }

  /// Local coefficients (velocity then scalar) of a global vector.
  Vec gather(Index e, const Vec& global) const;

 private:
  const Mesh* mesh_;
  int k_;
  int threads_;
  SchemeOptions scheme_;
  DofLayout layout_;
  std::vector<LocalOperators> classes_;
  std::vector<Index> class_of_;
  std::vector<std::vector<Index>> dofs_;
};

/// The four bilinear forms over all DOFs (constrained included).
struct FormBlocks {
  SparseMatrix a;   ///< velocity x velocity
  SparseMatrix s1;  ///< velocity x velocity
  SparseMatrix b;   ///< velocity x pressure
  SparseMatrix s2;  ///< pressure x pressure
};

FormBlocks assemble_forms(const Discretization& disc);

/// Full-length vector with (f, v0)_T in the u0 entries. exactness < 0 selects
/// the element default.
Vec assemble_load(const Discretization& disc, const VectorField& f, int exactness = -1);

/// Field on the boundary evaluated at a point x with outward unit normal n.
using BoundaryField = std::function<Vec3(const Vec3& x, const Vec3& n)>;

/// Boundary data: g1 = u x n and g2 = (curl u) x n on the boundary. Empty
/// callables mean homogeneous data.
struct BoundaryData {
  BoundaryField g1;
  BoundaryField g2;
};

/// Full-length vector that holds the projected boundary values in the
/// constrained entries and zero elsewhere. ub and un on a boundary face are
/// the face-frame projections of n x g1 and n x g2; pb = 0.
Vec boundary_values(const Discretization& disc, const BoundaryData& data, int exactness = -1);

/// Free-DOF system K x = F with the constrained columns moved to the load.
struct SaddleSystem {
  SparseMatrix matrix;
  Vec rhs;
  /// Full-length lift: boundary values in constrained slots, zero elsewhere.
  Vec constrained_values;
  const DofLayout* layout = nullptr;

  Index size() const { return matrix.rows(); }
  /// Full-length vector from a free-DOF solution.
  Vec expand(const Vec& free) const;
};

/// Saddle matrix over the free DOFs only.
SparseMatrix assemble_saddle_matrix(const Discretization& disc);

/// Eliminates the constrained DOFs: rhs = load[free] - K_fc * values[constrained].
SaddleSystem impose_boundary(const Discretization& disc, SparseMatrix matrix, const Vec& full_load,
                             const Vec& constrained_values);

SaddleSystem assemble_saddle(const Discretization& disc, const VectorField& f, const BoundaryData& data,
                             int data_exactness = -1);

/// Coordinate text dump: a header line "% rows cols nnz", then "row col value"
/// per stored entry with 0-based indices.
void write_coordinate(std::ostream& out, const SparseMatrix& m);

}  // namespace quadcurl
