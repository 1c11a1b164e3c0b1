#include "quadcurl/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace quadcurl;

namespace {

Index count_incidences(const Mesh& m) {
  Index s = 0;
  for (const auto& e : m.elements()) s += static_cast<Index>(e.faces.size());
  return s;
}

double total_volume(const Mesh& m) {
  double v = 0.0;
  for (const auto& e : m.elements()) v += e.volume;
  return v;
}

}  // namespace

TEST(HexMesh, CountsMatchClosedForm) {
  for (int level = 1; level <= 4; ++level) {
    const Mesh m = generate_hex_mesh(level);
    const Index n = Index{1} << (level - 1);
    EXPECT_EQ(m.num_elements(), n * n * n);
    EXPECT_EQ(m.num_faces(), 3 * n * n * (n + 1));
    EXPECT_EQ(m.num_vertices(), (n + 1) * (n + 1) * (n + 1));
    EXPECT_EQ(m.num_boundary_faces(), 6 * n * n);
  }
  const Mesh l1 = generate_hex_mesh(1);
  EXPECT_EQ(l1.num_elements(), 1);
  EXPECT_EQ(l1.num_faces(), 6);
  EXPECT_EQ(l1.num_vertices(), 8);
  EXPECT_EQ(generate_hex_mesh(2).num_faces(), 36);
  EXPECT_EQ(generate_hex_mesh(3).num_faces(), 240);
}

TEST(HexMesh, GeometryOfCells) {
  const Mesh m = generate_hex_mesh(3);
  for (const auto& e : m.elements()) {
    EXPECT_NEAR(e.diameter, std::sqrt(3.0) / 4.0, 1e-15);
    EXPECT_NEAR(e.volume, 1.0 / 64.0, 1e-15);
    EXPECT_EQ(e.faces.size(), 6u);
  }
  for (const auto& f : m.faces()) {
    EXPECT_EQ(f.vertex_loop.size(), 4u);
    EXPECT_NEAR(f.area, 1.0 / 16.0, 1e-15);
  }
}

TEST(TetMesh, CountsMatchIncidenceCount) {
  const Mesh l1 = generate_tet_mesh(1);
  EXPECT_EQ(l1.num_elements(), 6);
  EXPECT_EQ(l1.num_faces(), 18);
  EXPECT_EQ(count_incidences(l1), 24);
  EXPECT_EQ(l1.num_boundary_faces(), 12);
  EXPECT_EQ(l1.num_faces() - l1.num_boundary_faces(), 6);

  const Mesh l2 = generate_tet_mesh(2);
  EXPECT_EQ(l2.num_elements(), 48);
  EXPECT_EQ(l2.num_faces(), 120);
  EXPECT_EQ(count_incidences(l2), 192);
  EXPECT_EQ(l2.num_boundary_faces(), 48);
  EXPECT_EQ(l2.num_faces() - l2.num_boundary_faces(), 72);
}

TEST(TetMesh, EveryLevelOneTetContainsTheCubeDiagonal) {
  const Mesh m = generate_tet_mesh(1);
  for (const auto& e : m.elements()) {
    EXPECT_NEAR(e.diameter, std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(e.volume, 1.0 / 6.0, 1e-15);
  }
}

TEST(TetMesh, AllDiagonalChoicesAreConforming) {
  for (unsigned origin = 0; origin < 8; ++origin) {
    const Mesh m = generate_tet_mesh(2, origin);
    EXPECT_TRUE(validate(m).ok()) << "origin " << origin;
    EXPECT_EQ(m.num_faces(), 120);
  }
  EXPECT_THROW(generate_tet_mesh(1, 8), std::invalid_argument);
}

TEST(Mesh, InvalidLevelThrows) {
  EXPECT_THROW(generate_hex_mesh(0), std::invalid_argument);
  EXPECT_THROW(generate_tet_mesh(-1), std::invalid_argument);
}

TEST(Mesh, GeneratedMeshesValidate) {
  for (int level = 1; level <= 3; ++level) {
    const auto hex = validate(generate_hex_mesh(level));
    EXPECT_TRUE(hex.ok()) << (hex.ok() ? "" : hex.violations.front());
    const auto tet = validate(generate_tet_mesh(level));
    EXPECT_TRUE(tet.ok()) << (tet.ok() ? "" : tet.violations.front());
  }
  EXPECT_NEAR(total_volume(generate_tet_mesh(2)), 1.0, 1e-12);
  EXPECT_NEAR(total_volume(generate_hex_mesh(4)), 1.0, 1e-12);
}

TEST(Mesh, RefinementHalvesMeshSize) {
  for (int level = 1; level < 4; ++level) {
    EXPECT_DOUBLE_EQ(generate_hex_mesh(level + 1).h(), generate_hex_mesh(level).h() / 2);
    EXPECT_DOUBLE_EQ(generate_tet_mesh(level + 1).h(), generate_tet_mesh(level).h() / 2);
  }
}

TEST(Mesh, InteriorNormalsPointOutOfOwner) {
  for (const Mesh& m : {generate_hex_mesh(3), generate_tet_mesh(2)}) {
    for (const auto& f : m.faces()) {
      EXPECT_NEAR(f.normal.norm(), 1.0, 1e-14);
      const auto& owner = m.element(f.neighbors.front());
      EXPECT_GT((f.centroid - owner.centroid).dot(f.normal), 0.0);
      if (f.neighbors.size() == 2) {
        EXPECT_LT(f.neighbors[0], f.neighbors[1]);
        const auto& other = m.element(f.neighbors[1]);
        EXPECT_LT((f.centroid - other.centroid).dot(f.normal), 0.0);
      }
    }
    for (const auto& e : m.elements()) {
      Vec3 closure = Vec3::Zero();
      for (std::size_t i = 0; i < e.faces.size(); ++i) closure += m.outward_normal(e.id, i) * m.face(e.faces[i]).area;
      EXPECT_LT(closure.norm(), 1e-14);
    }
  }
}

TEST(Mesh, ValidatorReportsNonManifoldFace) {
  const Mesh good = generate_hex_mesh(2);
  std::vector<Face> faces = good.faces();
  // An interior face claimed by a third element.
  const auto it = std::find_if(faces.begin(), faces.end(), [](const Face& f) { return f.neighbors.size() == 2; });
  ASSERT_NE(it, faces.end());
  it->neighbors.push_back(7);
  const Mesh bad = Mesh::from_parts(good.vertices(), faces, good.elements(), good.level());
  const auto d = validate(bad);
  ASSERT_FALSE(d.ok());
  EXPECT_NE(d.violations.front().find("non-manifold"), std::string::npos);
}

TEST(Mesh, ValidatorReportsFlippedSign) {
  const Mesh good = generate_tet_mesh(1);
  std::vector<Element> elements = good.elements();
  elements[2].face_signs[0] *= -1;
  const auto d = validate(Mesh::from_parts(good.vertices(), good.faces(), elements, 1));
  EXPECT_FALSE(d.ok());
}

TEST(FaceFrame, AxisAlignedHexFace) {
  const Mesh m = generate_hex_mesh(1);
  const auto f = std::find_if(m.faces().begin(), m.faces().end(),
                              [](const Face& face) { return std::abs(face.centroid.x() - 1.0) < 1e-14; });
  ASSERT_NE(f, m.faces().end());
  const FaceFrame fr = face_frame(*f);
  EXPECT_NEAR((fr.n - Vec3(1, 0, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(fr.t1.dot(fr.n), 0.0, 1e-15);
  EXPECT_NEAR(fr.t2.dot(fr.n), 0.0, 1e-15);
  EXPECT_NEAR(fr.t1.norm(), 1.0, 1e-15);
  EXPECT_NEAR(fr.t2.norm(), 1.0, 1e-15);
}

TEST(FaceFrame, RightHandedOnEveryFace) {
  for (const Mesh& m : {generate_hex_mesh(2), generate_tet_mesh(2)})
    for (const auto& f : m.faces()) {
      const FaceFrame fr = face_frame(f);
      EXPECT_LT((fr.t1.cross(fr.t2) - fr.n).norm(), 1e-14);
      EXPECT_NEAR(fr.t1.dot(fr.t2), 0.0, 1e-14);
      // Deterministic.
      const FaceFrame again = face_frame(f);
      EXPECT_EQ(fr.t1, again.t1);
    }
}

TEST(FaceFrame, SlantedTriangle) {
  // Single tet cut from the corner of the cube; the slanted face is owned by it.
  std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const Mesh m = Mesh::from_cells(pts, {{{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}}, {Shape::Tetrahedron}, 1);
  const Face& slanted = m.face(m.element(0).faces[0]);
  const FaceFrame fr = face_frame(slanted);
  EXPECT_LT((fr.n - Vec3(1, 1, 1) / std::sqrt(3.0)).norm(), 1e-15);
  EXPECT_LT((fr.t1.cross(fr.t2) - fr.n).norm(), 1e-14);
}

TEST(FaceFrame, DegenerateFaceThrows) {
  Face f;
  f.area = 0.0;
  EXPECT_THROW(face_frame(f), GeometryError);
}

TEST(MeshIO, WriteReadPreservesGeometry) {
  for (const Mesh& m : {generate_hex_mesh(2), generate_tet_mesh(2)}) {
    std::stringstream ss;
    write_mesh(ss, m);
    const Mesh r = read_mesh(ss);
    ASSERT_EQ(r.num_faces(), m.num_faces());
    ASSERT_EQ(r.num_elements(), m.num_elements());
    EXPECT_TRUE(validate(r).ok());
    for (Index i = 0; i < m.num_faces(); ++i) {
      EXPECT_EQ(r.face(i).neighbors, m.face(i).neighbors);
      EXPECT_LT((r.face(i).normal - m.face(i).normal).norm(), 1e-15);
    }
    for (Index i = 0; i < m.num_elements(); ++i) EXPECT_NEAR(r.element(i).volume, m.element(i).volume, 1e-16);
    std::stringstream again;
    write_mesh(again, r);
    std::stringstream first;
    write_mesh(first, m);
    EXPECT_EQ(again.str(), first.str());
  }
}

TEST(MeshIO, RejectsMalformedInput) {
  std::stringstream ss("quadcurl-mesh 1\nlevel 1\nvertices 2\n0 0 0\n");
  EXPECT_THROW(read_mesh(ss), std::runtime_error);
  std::stringstream bad("not-a-mesh");
  EXPECT_THROW(read_mesh(bad), std::runtime_error);
}
