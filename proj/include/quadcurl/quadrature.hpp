// Quadrature rules on reference and physical cells/faces.
#pragma once

#include "quadcurl/common.hpp"
#include "quadcurl/mesh.hpp"

#include <utility>
#include <vector>

namespace quadcurl {

enum class Domain { Hex, Tet, QuadFace, TriFace, Polyhedron };

/// Points are stored in physical (or reference) 3D coordinates; face rules
/// for reference domains live in the z = 0 plane.
struct QuadratureRule {
  Domain domain = Domain::Hex;
  std::vector<Vec3> points;
  std::vector<double> weights;
  int exactness = 0;

  std::size_t size() const { return points.size(); }
  double measure() const;
};

/// Gauss-Legendre nodes and weights on [0, 1]; exact for degree 2n-1.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

/// Rule on the reference domain: [0,1]^3, the unit simplex, [0,1]^2 or the
/// unit triangle. Tensor Gauss on boxes, collapsed (Duffy) Gauss on simplices.
/// Throws std::invalid_argument for Domain::Polyhedron (geometry required).
QuadratureRule quadrature(Domain domain, int exactness);

/// Physical rule for a mesh element. Axis-aligned boxes and tetrahedra use
/// affine maps; other cells are split into tetrahedra about the centroid.
QuadratureRule element_quadrature(const Mesh& mesh, Index elem, int exactness);

/// Physical rule for a mesh face. Triangles and parallelograms use affine
/// maps; other polygons are fanned into triangles.
QuadratureRule face_quadrature(const Mesh& mesh, Index face, int exactness);

}  // namespace quadcurl
