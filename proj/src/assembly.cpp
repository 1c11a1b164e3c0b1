#include "quadcurl/assembly.hpp"

#include "quadcurl/parallel.hpp"
#include "quadcurl/polyspace.hpp"
#include "quadcurl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace quadcurl {

DofLayout build_dof_layout(const Mesh& mesh, int k) {
  if (k < 1) throw std::invalid_argument("polynomial degree k must be >= 1");
  DofLayout L;
  L.k = k;
  L.num_elements = mesh.num_elements();
  L.num_faces = mesh.num_faces();
  L.n_cell = poly_dim_3d(k);
  L.n_face = poly_dim_2d(k);
  L.n_face_curl = poly_dim_2d(k - 1);
  L.velocity_size = L.num_elements * 3 * L.n_cell + L.num_faces * L.face_velocity_size();
  L.total_size = L.velocity_size + L.num_elements * L.n_cell + L.num_faces * L.n_face;

  std::vector<char> constrained(static_cast<std::size_t>(L.total_size), 0);
  for (const Face& f : mesh.faces()) {
    if (!f.is_boundary) continue;
    for (int i = 0; i < L.face_velocity_size(); ++i) constrained[static_cast<std::size_t>(L.ub_offset(f.id) + i)] = 1;
    for (int i = 0; i < L.n_face; ++i) constrained[static_cast<std::size_t>(L.pb_offset(f.id) + i)] = 1;
  }
  L.free_index.assign(static_cast<std::size_t>(L.total_size), -1);
  for (Index d = 0; d < L.total_size; ++d) {
    if (constrained[static_cast<std::size_t>(d)]) continue;
    L.free_index[static_cast<std::size_t>(d)] = static_cast<Index>(L.free_dofs.size());
    L.free_dofs.push_back(d);
  }
  return L;
}

namespace {

using ClassKey = std::vector<long long>;

long long quantize(double v) { return std::llround(v * 1e10); }

// Vertex offsets from the centroid and face normals, in local order.
ClassKey class_key(const Mesh& mesh, const Element& el) {
  ClassKey key{static_cast<long long>(el.vertices.size()), static_cast<long long>(el.faces.size())};
  for (Index v : el.vertices) {
    const Vec3 d = mesh.vertex(v).coords - el.centroid;
    for (int c = 0; c < 3; ++c) key.push_back(quantize(d[c]));
  }
  for (Index f : el.faces) {
    const Vec3& n = mesh.face(f).normal;
    for (int c = 0; c < 3; ++c) key.push_back(quantize(n[c]));
  }
  return key;
}

LocalOperators build_local(const Mesh& mesh, Index elem, int k, const SchemeOptions& scheme) {
  const LocalElement el(mesh, elem, k, scheme);
  const LocalLayout& L = el.layout();
  const int nv = L.velocity_size(), ns = L.scalar_size();
  LocalOperators op;
  op.layout = L;

  const LocalWeakCurlCurl cc = el.weak_curlcurl();
  op.curlcurl = cc.matrix;
  op.target_mass = el.target_vector_mass();
  if (cc.matrix.rows() > 0) {
    const Mat a = cc.matrix.transpose() * cc.rhs;
    op.a = 0.5 * (a + a.transpose());
  } else {
    op.a = Mat::Zero(nv, nv);
  }
  op.s1 = el.velocity_stabilizer();
  op.s2 = el.pressure_stabilizer();
  op.b = Mat::Zero(nv, ns);
  op.b.topRows(L.velocity_interior()) = el.weak_gradient().rhs;

  op.saddle.resize(nv + ns, nv + ns);
  op.saddle.topLeftCorner(nv, nv) = op.a + op.s1;
  op.saddle.topRightCorner(nv, ns) = op.b;
  op.saddle.bottomLeftCorner(ns, nv) = op.b.transpose();
  op.saddle.bottomRightCorner(ns, ns) = -op.s2;
  op.cell_mass = mass_matrix(el.cell_basis(), el.cell_rule());
  return op;
}

}  // namespace

Discretization::Discretization(const Mesh& mesh, int k, int threads, const SchemeOptions& scheme)
    : mesh_(&mesh), k_(k), threads_(threads), scheme_(scheme), layout_(build_dof_layout(mesh, k)) {
  validate(scheme);
  std::map<ClassKey, Index> index;
  std::vector<Index> representative;
  class_of_.resize(static_cast<std::size_t>(mesh.num_elements()));
  for (const Element& el : mesh.elements()) {
    const auto [it, inserted] = index.emplace(class_key(mesh, el), static_cast<Index>(representative.size()));
    if (inserted) representative.push_back(el.id);
    class_of_[static_cast<std::size_t>(el.id)] = it->second;
  }
  classes_.resize(representative.size());
  parallel_for(representative.size(), threads,
               [&](std::size_t c) { classes_[c] = build_local(mesh, representative[c], k, scheme); });

  const DofLayout& L = layout_;
  dofs_.resize(static_cast<std::size_t>(mesh.num_elements()));
  for (const Element& el : mesh.elements()) {
    auto& d = dofs_[static_cast<std::size_t>(el.id)];
    for (int i = 0; i < 3 * L.n_cell; ++i) d.push_back(L.u0_offset(el.id) + i);
    for (Index f : el.faces)
      for (int i = 0; i < L.face_velocity_size(); ++i) d.push_back(L.ub_offset(f) + i);
    for (int i = 0; i < L.n_cell; ++i) d.push_back(L.p0_offset(el.id) + i);
    for (Index f : el.faces)
      for (int i = 0; i < L.n_face; ++i) d.push_back(L.pb_offset(f) + i);
  }
}

Vec Discretization::gather(Index e, const Vec& global) const {
  const auto& d = element_dofs(e);
  Vec out(static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) out[static_cast<Eigen::Index>(i)] = global[d[i]];
  return out;
}

namespace {

/// A local matrix together with the offsets of its rows and columns inside
/// the element's DOF list.
struct LocalView {
  const Mat* m;
  int row0;
  int col0;
};

/// Sum over elements of the scattered local views. Row and column maps send a
/// global DOF to its compact index or -1 (dropped). Values are accumulated in
/// element order, so the result does not depend on threading.
template <class Get, class RowMap, class ColMap>
SparseMatrix assemble_matrix(const Discretization& d, Index nrows, Index ncols, Get get, RowMap rmap, ColMap cmap) {
  const Index ne = d.mesh().num_elements();

  std::vector<Index> start(static_cast<std::size_t>(ncols) + 1, 0);
  for (Index e = 0; e < ne; ++e) {
    const LocalView v = get(d.local(e));
    const auto& dofs = d.element_dofs(e);
    for (Eigen::Index l = 0; l < v.m->cols(); ++l) {
      const Index c = cmap(dofs[static_cast<std::size_t>(v.col0 + l)]);
      if (c >= 0) ++start[static_cast<std::size_t>(c) + 1];
    }
  }
  for (std::size_t c = 0; c < static_cast<std::size_t>(ncols); ++c) start[c + 1] += start[c];
  std::vector<std::pair<Index, int>> contrib(static_cast<std::size_t>(start.back()));
  {
    std::vector<Index> fill(start.begin(), start.end() - 1);
    for (Index e = 0; e < ne; ++e) {
      const LocalView v = get(d.local(e));
      const auto& dofs = d.element_dofs(e);
      for (Eigen::Index l = 0; l < v.m->cols(); ++l) {
        const Index c = cmap(dofs[static_cast<std::size_t>(v.col0 + l)]);
        if (c >= 0) contrib[static_cast<std::size_t>(fill[static_cast<std::size_t>(c)]++)] = {e, static_cast<int>(l)};
      }
    }
  }

  std::vector<int> outer(static_cast<std::size_t>(ncols) + 1, 0);
  std::vector<int> inner;
  std::vector<int> rows;
  for (Index c = 0; c < ncols; ++c) {
    rows.clear();
    for (Index s = start[static_cast<std::size_t>(c)]; s < start[static_cast<std::size_t>(c) + 1]; ++s) {
      const auto [e, l] = contrib[static_cast<std::size_t>(s)];
      const LocalView v = get(d.local(e));
      const auto& dofs = d.element_dofs(e);
      for (Eigen::Index r = 0; r < v.m->rows(); ++r) {
        if ((*v.m)(r, l) == 0.0) continue;
        const Index rr = rmap(dofs[static_cast<std::size_t>(v.row0 + r)]);
        if (rr >= 0) rows.push_back(static_cast<int>(rr));
      }
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    inner.insert(inner.end(), rows.begin(), rows.end());
    if (inner.size() > static_cast<std::size_t>(std::numeric_limits<int>::max()))
      throw std::length_error("assemble: too many nonzeros for 32-bit sparse indices");
    outer[static_cast<std::size_t>(c) + 1] = static_cast<int>(inner.size());
  }
  std::vector<int>().swap(rows);
  std::vector<std::pair<Index, int>>().swap(contrib);

  std::vector<double> values(inner.size(), 0.0);
  for (Index e = 0; e < ne; ++e) {
    const LocalView v = get(d.local(e));
    const auto& dofs = d.element_dofs(e);
    for (Eigen::Index l = 0; l < v.m->cols(); ++l) {
      const Index c = cmap(dofs[static_cast<std::size_t>(v.col0 + l)]);
      if (c < 0) continue;
      const auto first = inner.begin() + outer[static_cast<std::size_t>(c)];
      const auto last = inner.begin() + outer[static_cast<std::size_t>(c) + 1];
      for (Eigen::Index r = 0; r < v.m->rows(); ++r) {
        const double x = (*v.m)(r, l);
        if (x == 0.0) continue;
        const Index rr = rmap(dofs[static_cast<std::size_t>(v.row0 + r)]);
        if (rr < 0) continue;
        const auto pos = std::lower_bound(first, last, static_cast<int>(rr));
        values[static_cast<std::size_t>(pos - inner.begin())] += x;
      }
    }
  }
  return Eigen::Map<const SparseMatrix>(nrows, ncols, static_cast<Eigen::Index>(inner.size()), outer.data(),
                                        inner.data(), values.data());
}

}  // namespace

FormBlocks assemble_forms(const Discretization& disc) {
  const DofLayout& L = disc.layout();
  const Index nv = L.velocity_size, np = L.total_size - L.velocity_size;
  auto vel = [nv](Index g) { return g < nv ? g : Index{-1}; };
  auto pre = [nv](Index g) { return g >= nv ? g - nv : Index{-1}; };
  FormBlocks blocks;
  blocks.a = assemble_matrix(disc, nv, nv, [](const LocalOperators& o) { return LocalView{&o.a, 0, 0}; }, vel, vel);
  blocks.s1 = assemble_matrix(disc, nv, nv, [](const LocalOperators& o) { return LocalView{&o.s1, 0, 0}; }, vel, vel);
  blocks.b = assemble_matrix(
      disc, nv, np, [](const LocalOperators& o) { return LocalView{&o.b, 0, o.layout.velocity_size()}; }, vel, pre);
  blocks.s2 = assemble_matrix(
      disc, np, np,
      [](const LocalOperators& o) {
        const int nvl = o.layout.velocity_size();
        return LocalView{&o.s2, nvl, nvl};
      },
      pre, pre);
  return blocks;
}

SparseMatrix assemble_saddle_matrix(const Discretization& disc) {
  const DofLayout& L = disc.layout();
  auto map = [&L](Index g) { return L.free_index[static_cast<std::size_t>(g)]; };
  return assemble_matrix(disc, L.num_free(), L.num_free(),
                         [](const LocalOperators& o) { return LocalView{&o.saddle, 0, 0}; }, map, map);
}

Vec assemble_load(const Discretization& disc, const VectorField& f, int exactness) {
  const Mesh& mesh = disc.mesh();
  const DofLayout& L = disc.layout();
  const int k = disc.k();
  const int ex = exactness >= 0 ? exactness : std::max(2 * k + 2, k + 6);
  Vec out = Vec::Zero(L.total_size);
  parallel_for(static_cast<std::size_t>(mesh.num_elements()), disc.threads(), [&](std::size_t i) {
    const auto e = static_cast<Index>(i);
    const ScalarBasis3D basis = ScalarBasis3D::for_element(mesh.element(e), k);
    const QuadratureRule rule = element_quadrature(mesh, e, ex);
    const int n = basis.dim();
    Vec local = Vec::Zero(3 * n);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      Vec3 fv;
      try {
        fv = f(rule.points[q]);
      } catch (const std::exception& err) {
        throw DataError(std::string("load: source evaluation failed: ") + err.what());
      }
      if (!fv.allFinite()) throw DataError("load: source is not finite");
      const Vec phi = basis.values(rule.points[q]);
      for (int c = 0; c < 3; ++c) local.segment(c * n, n) += rule.weights[q] * fv[c] * phi;
    }
    out.segment(L.u0_offset(e), 3 * n) = local;  // disjoint slots per element
  });
  return out;
}

Vec boundary_values(const Discretization& disc, const BoundaryData& data, int exactness) {
  const Mesh& mesh = disc.mesh();
  const DofLayout& L = disc.layout();
  const int k = disc.k();
  const int ex = exactness >= 0 ? exactness : std::max(2 * k + 2, k + 6);
  Vec out = Vec::Zero(L.total_size);
  if (!data.g1 && !data.g2) return out;
  parallel_for(static_cast<std::size_t>(mesh.num_faces()), disc.threads(), [&](std::size_t i) {
    const Face& face = mesh.face(static_cast<Index>(i));
    if (!face.is_boundary) return;
    const Vec3 n = face.normal;
    auto tangential = [&](const BoundaryField& g, const char* which) -> VectorField {
      return [&g, n, which](const Vec3& x) -> Vec3 {
        Vec3 v;
        try {
          v = g(x, n);
        } catch (const std::exception& err) {
          throw DataError(std::string("boundary data ") + which + " evaluation failed: " + err.what());
        }
        if (!v.allFinite()) throw DataError(std::string("boundary data ") + which + " is not finite");
        return n.cross(v);
      };
    };
    const QuadratureRule rule = face_quadrature(mesh, face.id, ex);
    if (data.g1)
      out.segment(L.ub_offset(face.id), 2 * L.n_face) =
          project_tangential(ScalarBasis2D::for_face(face, k), rule, tangential(data.g1, "g1"));
    if (data.g2)
      out.segment(L.un_offset(face.id), 2 * L.n_face_curl) =
          project_tangential(ScalarBasis2D::for_face(face, k - 1), rule, tangential(data.g2, "g2"));
  });
  return out;
}

Vec SaddleSystem::expand(const Vec& free) const {
  Vec full = constrained_values;
  for (Index i = 0; i < layout->num_free(); ++i) full[layout->free_dofs[static_cast<std::size_t>(i)]] = free[i];
  return full;
}

SaddleSystem impose_boundary(const Discretization& disc, SparseMatrix matrix, const Vec& full_load,
                             const Vec& constrained_values) {
  const DofLayout& L = disc.layout();
  SaddleSystem sys;
  sys.layout = &L;
  sys.matrix = std::move(matrix);
  sys.constrained_values = Vec::Zero(L.total_size);
  sys.rhs.resize(L.num_free());
  for (Index i = 0; i < L.num_free(); ++i) sys.rhs[i] = full_load[L.free_dofs[static_cast<std::size_t>(i)]];
  for (Index g = 0; g < L.total_size; ++g)
    if (L.is_constrained(g)) sys.constrained_values[g] = constrained_values[g];

  for (Index e = 0; e < disc.mesh().num_elements(); ++e) {
    const auto& dofs = disc.element_dofs(e);
    Vec x = Vec::Zero(static_cast<Eigen::Index>(dofs.size()));
    bool any = false;
    for (std::size_t i = 0; i < dofs.size(); ++i)
      if (L.is_constrained(dofs[i]) && sys.constrained_values[dofs[i]] != 0.0) {
        x[static_cast<Eigen::Index>(i)] = sys.constrained_values[dofs[i]];
        any = true;
      }
    if (!any) continue;
    const Vec y = disc.local(e).saddle * x;
    for (std::size_t i = 0; i < dofs.size(); ++i) {
      const Index fi = L.free_index[static_cast<std::size_t>(dofs[i])];
      if (fi >= 0) sys.rhs[fi] -= y[static_cast<Eigen::Index>(i)];
    }
  }
  return sys;
}

SaddleSystem assemble_saddle(const Discretization& disc, const VectorField& f, const BoundaryData& data,
                             int data_exactness) {
  const Vec load = f ? assemble_load(disc, f, data_exactness) : Vec::Zero(disc.layout().total_size);
  return impose_boundary(disc, assemble_saddle_matrix(disc), load, boundary_values(disc, data, data_exactness));
}

void write_coordinate(std::ostream& out, const SparseMatrix& m) {
  const auto old = out.precision(17);
  out << "% " << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  for (int c = 0; c < m.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  out.precision(old);
}

}  // namespace quadcurl
