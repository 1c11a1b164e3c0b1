// Polyhedral meshes of the unit cube: data model, generators, validation, text I/O.
#pragma once

#include "quadcurl/common.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace quadcurl {

enum class Shape { Hexahedron, Tetrahedron, Polyhedron };

struct Vertex {
  Index id = 0;
  Vec3 coords = Vec3::Zero();
};

/// A planar polygonal face. The normal points out of neighbors[0], which is
/// always the lower-id adjacent element.
struct Face {
  Index id = 0;
  std::vector<Index> vertex_loop;
  double area = 0.0;
  Vec3 normal = Vec3::Zero();
  Vec3 centroid = Vec3::Zero();
  double diameter = 0.0;
  std::vector<Index> neighbors;
  bool is_boundary = false;
};

struct Element {
  Index id = 0;
  Shape shape = Shape::Polyhedron;
  std::vector<Index> vertices;
  std::vector<Index> faces;
  /// +1 when faces[i].normal is outward for this element, -1 otherwise.
  std::vector<int> face_signs;
  double volume = 0.0;
  double diameter = 0.0;
  Vec3 centroid = Vec3::Zero();
};

/// Orthonormal right-handed frame attached to a face: t1 x t2 = n.
struct FaceFrame {
  Vec3 t1;
  Vec3 t2;
  Vec3 n;
};

/// Immutable after construction; all geometry is precomputed.
class Mesh {
 public:
  /// Face of a cell given as a vertex loop (any orientation).
  using CellFaces = std::vector<std::vector<Index>>;

  Mesh() = default;

  /// Builds a mesh from vertex coordinates and cells described by their face
  /// loops. Faces shared by two cells are matched by vertex set. Cells must be
  /// convex with planar faces.
  static Mesh from_cells(std::vector<Vec3> coords, const std::vector<CellFaces>& cells,
                         const std::vector<Shape>& shapes, int level);

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<Element>& elements() const { return elements_; }
  const Vertex& vertex(Index i) const { return vertices_[static_cast<std::size_t>(i)]; }
  const Face& face(Index i) const { return faces_[static_cast<std::size_t>(i)]; }
  const Element& element(Index i) const { return elements_[static_cast<std::size_t>(i)]; }
  Index num_vertices() const { return static_cast<Index>(vertices_.size()); }
  Index num_faces() const { return static_cast<Index>(faces_.size()); }
  Index num_elements() const { return static_cast<Index>(elements_.size()); }
  Index num_boundary_faces() const;

  int level() const { return level_; }
  /// max_T h_T.
  double h() const { return h_; }

  /// Outward unit normal of face `local` of element `elem`.
  Vec3 outward_normal(Index elem, std::size_t local) const;

  /// Unchecked construction from raw incidence records; face and element
  /// geometry is recomputed from the vertex loops. Face normals follow the
  /// loop orientation (right-hand rule). Use validate() to check the result.
  static Mesh from_parts(std::vector<Vertex> vertices, std::vector<Face> faces,
                         std::vector<Element> elements, int level);

 private:
  void compute_geometry();

  std::vector<Vertex> vertices_;
  std::vector<Face> faces_;
  std::vector<Element> elements_;
  int level_ = 1;
  double h_ = 0.0;
};

/// Uniform grid of n^3 cubes of side 1/n, n = 2^(level-1).
Mesh generate_hex_mesh(int level);

/// Each cube of the level's hex grid split into 6 tetrahedra sharing one cube
/// diagonal (Kuhn subdivision). The default diagonal runs (0,0,0)-(1,1,1) in
/// local cube coordinates; `diagonal_origin` selects the cube corner (bit 0 = x,
/// bit 1 = y, bit 2 = z) at which the shared diagonal starts.
Mesh generate_tet_mesh(int level, unsigned diagonal_origin = 0);

/// Deterministic face frame with n equal to face.normal.
FaceFrame face_frame(const Face& face);

struct MeshDiagnostics {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks manifoldness, normal/orientation consistency, closure of each cell
/// and total volume of the unit cube.
MeshDiagnostics validate(const Mesh& mesh, bool expect_unit_cube = true);

/// Text format, see README "Mesh file format".
void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh(std::istream& in);

}  // namespace quadcurl
