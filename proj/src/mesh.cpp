#include "quadcurl/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace quadcurl {

namespace {

struct PolygonGeometry {
  Vec3 area_normal = Vec3::Zero();  // Newell vector, |area_normal| = area
  Vec3 centroid = Vec3::Zero();
  double diameter = 0.0;
};

PolygonGeometry polygon_geometry(const std::vector<Vec3>& pts) {
  PolygonGeometry g;
  const std::size_t n = pts.size();
  Vec3 mean = Vec3::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) g.area_normal += 0.5 * pts[i].cross(pts[(i + 1) % n]);
  // Area-weighted fan centroid about the vertex mean.
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& a = pts[i];
    const Vec3& b = pts[(i + 1) % n];
    const double w = 0.5 * (a - mean).cross(b - mean).norm();
    g.centroid += w * (mean + a + b) / 3.0;
    total += w;
  }
  g.centroid = total > 0.0 ? Vec3(g.centroid / total) : mean;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) g.diameter = std::max(g.diameter, (pts[i] - pts[j]).norm());
  return g;
}

const char* shape_name(Shape s) {
  switch (s) {
    case Shape::Hexahedron: return "hex";
    case Shape::Tetrahedron: return "tet";
    case Shape::Polyhedron: return "poly";
  }
  return "poly";
}

Shape shape_from_name(const std::string& s) {
  if (s == "hex") return Shape::Hexahedron;
  if (s == "tet") return Shape::Tetrahedron;
  if (s == "poly") return Shape::Polyhedron;
  throw std::invalid_argument("unknown element shape '" + s + "'");
}

}  // namespace

Index Mesh::num_boundary_faces() const {
  return static_cast<Index>(std::count_if(faces_.begin(), faces_.end(), [](const Face& f) { return f.is_boundary; }));
}

Vec3 Mesh::outward_normal(Index elem, std::size_t local) const {
  const Element& e = element(elem);
  return static_cast<double>(e.face_signs[local]) * face(e.faces[local]).normal;
}

void Mesh::compute_geometry() {
  for (auto& f : faces_) {
    std::vector<Vec3> pts;
    pts.reserve(f.vertex_loop.size());
    for (Index v : f.vertex_loop) pts.push_back(vertex(v).coords);
    const PolygonGeometry g = polygon_geometry(pts);
    f.area = g.area_normal.norm();
    f.normal = f.area > 0.0 ? Vec3(g.area_normal / f.area) : Vec3::Zero();
    f.centroid = g.centroid;
    f.diameter = g.diameter;
    f.is_boundary = f.neighbors.size() == 1;
  }
  h_ = 0.0;
  for (auto& e : elements_) {
    Vec3 mean = Vec3::Zero();
    for (Index v : e.vertices) mean += vertex(v).coords;
    mean /= static_cast<double>(e.vertices.size());
    // Pyramids from the vertex mean over each face.
    double vol = 0.0;
    Vec3 moment = Vec3::Zero();
    for (std::size_t i = 0; i < e.faces.size(); ++i) {
      const Face& f = face(e.faces[i]);
      const double pv = static_cast<double>(e.face_signs[i]) * (f.centroid - mean).dot(f.normal) * f.area / 3.0;
      vol += pv;
      moment += pv * (mean + 0.75 * (f.centroid - mean));
    }
    e.volume = vol;
    e.centroid = vol != 0.0 ? Vec3(moment / vol) : mean;
    e.diameter = 0.0;
    for (std::size_t i = 0; i < e.vertices.size(); ++i)
      for (std::size_t j = i + 1; j < e.vertices.size(); ++j)
        e.diameter = std::max(e.diameter, (vertex(e.vertices[i]).coords - vertex(e.vertices[j]).coords).norm());
    h_ = std::max(h_, e.diameter);
  }
}

Mesh Mesh::from_parts(std::vector<Vertex> vertices, std::vector<Face> faces, std::vector<Element> elements,
                      int level) {
  Mesh m;
  m.vertices_ = std::move(vertices);
  m.faces_ = std::move(faces);
  m.elements_ = std::move(elements);
  m.level_ = level;
  m.compute_geometry();
  return m;
}

Mesh Mesh::from_cells(std::vector<Vec3> coords, const std::vector<CellFaces>& cells,
                      const std::vector<Shape>& shapes, int level) {
  if (shapes.size() != cells.size()) throw std::invalid_argument("from_cells: one shape per cell required");
  std::vector<Vertex> vertices(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) vertices[i] = {static_cast<Index>(i), coords[i]};

  std::vector<Face> faces;
  std::vector<Element> elements;
  std::map<std::vector<Index>, Index> face_index;
  elements.reserve(cells.size());

  for (std::size_t c = 0; c < cells.size(); ++c) {
    Element el;
    el.id = static_cast<Index>(c);
    el.shape = shapes[c];
    for (const auto& loop : cells[c])
      for (Index v : loop)
        if (std::find(el.vertices.begin(), el.vertices.end(), v) == el.vertices.end()) el.vertices.push_back(v);
    Vec3 mean = Vec3::Zero();
    for (Index v : el.vertices) mean += coords[static_cast<std::size_t>(v)];
    mean /= static_cast<double>(el.vertices.size());

    for (const auto& loop : cells[c]) {
      std::vector<Index> key = loop;
      std::sort(key.begin(), key.end());
      auto it = face_index.find(key);
      if (it == face_index.end()) {
        std::vector<Vec3> pts;
        for (Index v : loop) pts.push_back(coords[static_cast<std::size_t>(v)]);
        const PolygonGeometry g = polygon_geometry(pts);
        if (g.area_normal.norm() <= 0.0) throw GeometryError("from_cells: degenerate face");
        Face f;
        f.id = static_cast<Index>(faces.size());
        f.vertex_loop = loop;
        // Orient the loop so the normal points out of this (owning, lower-id) cell.
        if ((g.centroid - mean).dot(g.area_normal) < 0.0) std::reverse(f.vertex_loop.begin(), f.vertex_loop.end());
        f.neighbors.push_back(el.id);
        face_index.emplace(std::move(key), f.id);
        el.faces.push_back(f.id);
        el.face_signs.push_back(+1);
        faces.push_back(std::move(f));
      } else {
        Face& f = faces[static_cast<std::size_t>(it->second)];
        f.neighbors.push_back(el.id);
        el.faces.push_back(f.id);
        el.face_signs.push_back(-1);
      }
    }
    elements.push_back(std::move(el));
  }
  return from_parts(std::move(vertices), std::move(faces), std::move(elements), level);
}

namespace {

int cells_per_side(int level) {
  if (level < 1) throw std::invalid_argument("mesh level must be >= 1, got " + std::to_string(level));
  if (level > 12) throw std::invalid_argument("mesh level too large: " + std::to_string(level));
  return 1 << (level - 1);
}

std::vector<Vec3> grid_vertices(int n) {
  std::vector<Vec3> coords;
  coords.reserve(static_cast<std::size_t>((n + 1) * (n + 1) * (n + 1)));
  for (int l = 0; l <= n; ++l)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) coords.emplace_back(double(i) / n, double(j) / n, double(l) / n);
  return coords;
}

// Global ids of the 8 corners of cube (i,j,l); corner bit 0 = x, bit 1 = y, bit 2 = z.
std::array<Index, 8> cube_corners(int n, int i, int j, int l) {
  std::array<Index, 8> c{};
  for (int b = 0; b < 8; ++b) {
    const int ii = i + (b & 1), jj = j + ((b >> 1) & 1), ll = l + ((b >> 2) & 1);
    c[static_cast<std::size_t>(b)] = ii + (n + 1) * (jj + (n + 1) * ll);
  }
  return c;
}

}  // namespace

Mesh generate_hex_mesh(int level) {
  const int n = cells_per_side(level);
  std::vector<Mesh::CellFaces> cells;
  cells.reserve(static_cast<std::size_t>(n * n * n));
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const auto c = cube_corners(n, i, j, l);
        cells.push_back({
            {c[0], c[4], c[6], c[2]},  // x-
            {c[1], c[3], c[7], c[5]},  // x+
            {c[0], c[1], c[5], c[4]},  // y-
            {c[2], c[6], c[7], c[3]},  // y+
            {c[0], c[2], c[3], c[1]},  // z-
            {c[4], c[5], c[7], c[6]},  // z+
        });
      }
  std::vector<Shape> shapes(cells.size(), Shape::Hexahedron);
  return Mesh::from_cells(grid_vertices(n), cells, shapes, level);
}

Mesh generate_tet_mesh(int level, unsigned diagonal_origin) {
  const int n = cells_per_side(level);
  if (diagonal_origin > 7) throw std::invalid_argument("diagonal_origin must be a cube corner in [0, 7]");
  static constexpr std::array<std::array<unsigned, 3>, 6> kAxisOrders = {{
      {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
  }};
  std::vector<Mesh::CellFaces> cells;
  cells.reserve(static_cast<std::size_t>(6 * n * n * n));
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const auto c = cube_corners(n, i, j, l);
        for (const auto& order : kAxisOrders) {
          // Monotone path from the diagonal origin to the opposite corner.
          std::array<Index, 4> t{};
          unsigned corner = diagonal_origin;
          t[0] = c[corner];
          for (std::size_t s = 0; s < 3; ++s) {
            corner ^= 1u << order[s];
            t[s + 1] = c[corner];
          }
          cells.push_back({{t[1], t[2], t[3]}, {t[0], t[2], t[3]}, {t[0], t[1], t[3]}, {t[0], t[1], t[2]}});
        }
      }
  std::vector<Shape> shapes(cells.size(), Shape::Tetrahedron);
  return Mesh::from_cells(grid_vertices(n), cells, shapes, level);
}

FaceFrame face_frame(const Face& face) {
  if (!(face.area > 0.0)) throw GeometryError("face_frame: degenerate face " + std::to_string(face.id));
  const Vec3& n = face.normal;
  // Project the coordinate axis least aligned with n (lowest index on ties).
  int axis = 0;
  for (int a = 1; a < 3; ++a)
    if (std::abs(n[a]) < std::abs(n[axis]) - 1e-12) axis = a;
  Vec3 t1 = Vec3::Unit(axis) - n[axis] * n;
  t1.normalize();
  Vec3 t2 = n.cross(t1);
  t2.normalize();
  return {t1, t2, n};
}

MeshDiagnostics validate(const Mesh& mesh, bool expect_unit_cube) {
  MeshDiagnostics d;
  auto report = [&](std::string msg) { d.violations.push_back(std::move(msg)); };
  constexpr double kTol = 1e-12;

  for (const Face& f : mesh.faces()) {
    const std::string tag = "face " + std::to_string(f.id) + ": ";
    if (f.neighbors.empty() || f.neighbors.size() > 2)
      report(tag + "non-manifold, " + std::to_string(f.neighbors.size()) + " neighbors");
    if (f.is_boundary != (f.neighbors.size() == 1)) report(tag + "boundary flag inconsistent with neighbor count");
    if (!(f.area > 0.0)) report(tag + "non-positive area");
    if (std::abs(f.normal.norm() - 1.0) > 1e-14) report(tag + "normal not unit length");
    for (Index v : f.vertex_loop) {
      const double off = (mesh.vertex(v).coords - f.centroid).dot(f.normal);
      if (std::abs(off) > 1e-14 * std::max(1.0, f.diameter) + 1e-14) report(tag + "vertex loop not planar");
    }
    if (f.neighbors.size() == 2 && f.neighbors[0] >= f.neighbors[1]) report(tag + "owner is not the lower-id neighbor");
    for (Index e : f.neighbors) {
      if (e < 0 || e >= mesh.num_elements()) {
        report(tag + "neighbor id out of range");
        continue;
      }
      const Element& el = mesh.element(e);
      const auto it = std::find(el.faces.begin(), el.faces.end(), f.id);
      if (it == el.faces.end()) {
        report(tag + "neighbor " + std::to_string(e) + " does not list the face");
        continue;
      }
      const int sign = el.face_signs[static_cast<std::size_t>(it - el.faces.begin())];
      const int expected = (e == f.neighbors.front()) ? +1 : -1;
      if (sign != expected) report(tag + "orientation sign mismatch for element " + std::to_string(e));
      // Out of the element: the face centroid lies on the positive side.
      if (sign * (f.centroid - el.centroid).dot(f.normal) <= 0.0)
        report(tag + "normal does not point out of element " + std::to_string(e));
    }
  }

  double total = 0.0;
  for (const Element& el : mesh.elements()) {
    const std::string tag = "element " + std::to_string(el.id) + ": ";
    if (el.faces.size() != el.face_signs.size()) report(tag + "face/sign count mismatch");
    if (!(el.volume > 0.0)) report(tag + "non-positive volume");
    if (!(el.diameter > 0.0)) report(tag + "non-positive diameter");
    Vec3 closure = Vec3::Zero();
    double surface = 0.0;
    for (std::size_t i = 0; i < el.faces.size() && i < el.face_signs.size(); ++i) {
      const Face& f = mesh.face(el.faces[i]);
      closure += el.face_signs[i] * f.area * f.normal;
      surface += f.area;
      if (std::find(f.neighbors.begin(), f.neighbors.end(), el.id) == f.neighbors.end())
        report(tag + "face " + std::to_string(f.id) + " does not list the element");
    }
    if (closure.norm() > kTol * surface) report(tag + "surface not closed");
    total += el.volume;
  }
  if (expect_unit_cube && std::abs(total - 1.0) > kTol) {
    std::ostringstream os;
    os << std::setprecision(17) << "total volume " << total << " differs from 1";
    report(os.str());
  }
  return d;
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << "quadcurl-mesh 1\n";
  out << "level " << mesh.level() << '\n';
  out << "vertices " << mesh.num_vertices() << '\n' << std::setprecision(17);
  for (const Vertex& v : mesh.vertices()) out << v.coords.x() << ' ' << v.coords.y() << ' ' << v.coords.z() << '\n';
  out << "faces " << mesh.num_faces() << '\n';
  for (const Face& f : mesh.faces()) {
    out << f.vertex_loop.size();
    for (Index v : f.vertex_loop) out << ' ' << v;
    out << ' ' << f.neighbors.size();
    for (Index e : f.neighbors) out << ' ' << e;
    out << '\n';
  }
  out << "elements " << mesh.num_elements() << '\n';
  for (const Element& e : mesh.elements()) {
    out << shape_name(e.shape) << ' ' << e.vertices.size();
    for (Index v : e.vertices) out << ' ' << v;
    out << ' ' << e.faces.size();
    for (std::size_t i = 0; i < e.faces.size(); ++i) out << ' ' << e.faces[i] << ' ' << e.face_signs[i];
    out << '\n';
  }
  out << "end\n";
}

Mesh read_mesh(std::istream& in) {
  auto fail = [](const std::string& what) -> void { throw std::runtime_error("read_mesh: " + what); };
  auto expect = [&](const std::string& word) {
    std::string w;
    if (!(in >> w) || w != word) fail("expected '" + word + "'");
  };
  expect("quadcurl-mesh");
  int version = 0;
  if (!(in >> version) || version != 1) fail("unsupported version");
  expect("level");
  int level = 0;
  in >> level;
  expect("vertices");
  std::size_t nv = 0;
  in >> nv;
  std::vector<Vertex> vertices(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    vertices[i].id = static_cast<Index>(i);
    in >> vertices[i].coords.x() >> vertices[i].coords.y() >> vertices[i].coords.z();
  }
  expect("faces");
  std::size_t nf = 0;
  in >> nf;
  std::vector<Face> faces(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    Face& f = faces[i];
    f.id = static_cast<Index>(i);
    std::size_t cnt = 0;
    in >> cnt;
    f.vertex_loop.resize(cnt);
    for (auto& v : f.vertex_loop) in >> v;
    in >> cnt;
    f.neighbors.resize(cnt);
    for (auto& e : f.neighbors) in >> e;
  }
  expect("elements");
  std::size_t ne = 0;
  in >> ne;
  std::vector<Element> elements(ne);
  for (std::size_t i = 0; i < ne; ++i) {
    Element& e = elements[i];
    e.id = static_cast<Index>(i);
    std::string shape;
    in >> shape;
    e.shape = shape_from_name(shape);
    std::size_t cnt = 0;
    in >> cnt;
    e.vertices.resize(cnt);
    for (auto& v : e.vertices) in >> v;
    in >> cnt;
    e.faces.resize(cnt);
    e.face_signs.resize(cnt);
    for (std::size_t j = 0; j < cnt; ++j) in >> e.faces[j] >> e.face_signs[j];
  }
  expect("end");
  if (!in) fail("truncated input");
  for (const Face& f : faces)
    for (Index v : f.vertex_loop)
      if (v < 0 || static_cast<std::size_t>(v) >= nv) fail("face vertex id out of range");
  for (const Element& e : elements) {
    for (Index v : e.vertices)
      if (v < 0 || static_cast<std::size_t>(v) >= nv) fail("element vertex id out of range");
    for (Index f : e.faces)
      if (f < 0 || static_cast<std::size_t>(f) >= nf) fail("element face id out of range");
  }
  return Mesh::from_parts(std::move(vertices), std::move(faces), std::move(elements), level);
}

}  // namespace quadcurl
