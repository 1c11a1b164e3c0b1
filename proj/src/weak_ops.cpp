#include "quadcurl/weak_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace quadcurl {

namespace {

Eigen::Map<const Vec> weights_of(const QuadratureRule& rule) {
  return {rule.weights.data(), static_cast<Eigen::Index>(rule.weights.size())};
}

// Tabulated gradients (component beta) and Hessian entries of a 3D basis at rule points.
struct Tables3D {
  Mat values;
  std::array<Mat, 3> grad;
  std::array<Mat, 6> hess;  // xx, yy, zz, xy, xz, yz
};

Tables3D tabulate_all(const ScalarBasis3D& basis, const QuadratureRule& rule, bool with_hessians) {
  const auto nq = static_cast<Eigen::Index>(rule.size());
  Tables3D t;
  t.values.resize(nq, basis.dim());
  for (auto& g : t.grad) g.resize(nq, basis.dim());
  if (with_hessians)
    for (auto& h : t.hess) h.resize(nq, basis.dim());
  for (Eigen::Index q = 0; q < nq; ++q) {
    const Vec3& x = rule.points[static_cast<std::size_t>(q)];
    t.values.row(q) = basis.values(x);
    const auto g = basis.gradients(x);
    for (int b = 0; b < 3; ++b) t.grad[static_cast<std::size_t>(b)].row(q) = g.col(b).transpose();
    if (with_hessians) {
      const auto hs = basis.hessians(x);
      for (int m = 0; m < 6; ++m) t.hess[static_cast<std::size_t>(m)].row(q) = hs.col(m).transpose();
    }
  }
  return t;
}

int hessian_slot(int c, int d) {
  if (c == d) return c;
  const int lo = std::min(c, d), hi = std::max(c, d);
  if (lo == 0) return hi == 1 ? 3 : 4;
  return 5;
}

Eigen::Matrix3d skew(const Vec3& a) {
  Eigen::Matrix3d s;
  s << 0.0, -a[2], a[1], a[2], 0.0, -a[0], -a[1], a[0], 0.0;
  return s;
}

Eigen::LLT<Mat> factor(const Mat& m, const char* what) {
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-15))
    throw ConditioningError(std::string(what) + ": local mass matrix is singular or ill-conditioned");
  return llt;
}

// Solve blockdiag(M, M, M) X = B with M factored once.
Mat block_solve(const Eigen::LLT<Mat>& llt, const Mat& rhs, int n) {
  Mat out(rhs.rows(), rhs.cols());
  for (int c = 0; c < 3; ++c) out.middleRows(c * n, n) = llt.solve(rhs.middleRows(c * n, n));
  return out;
}

Mat block_diag3(const Mat& m) {
  const auto n = m.rows();
  Mat out = Mat::Zero(3 * n, 3 * n);
  for (int c = 0; c < 3; ++c) out.block(c * n, c * n, n, n) = m;
  return out;
}

}  // namespace

void validate(const SchemeOptions& scheme) {
  if (scheme.curlcurl_offset != 1 && scheme.curlcurl_offset != 2)
    throw std::invalid_argument("curl-curl degree offset must be 1 or 2");
  if (!std::isfinite(scheme.trace_exponent) || !std::isfinite(scheme.curl_exponent) ||
      !std::isfinite(scheme.pressure_exponent))
    throw std::invalid_argument("stabilizer exponents must be finite");
}

LocalLayout::LocalLayout(int degree, int faces, int curlcurl_offset)
    : k(degree),
      num_faces(faces),
      n_cell(poly_dim_3d(degree)),
      n_face(poly_dim_2d(degree)),
      n_face_curl(poly_dim_2d(degree - 1)),
      target_degree(degree - curlcurl_offset),
      n_target(poly_dim_3d(degree - curlcurl_offset)) {
  if (degree < 1) throw std::invalid_argument("polynomial degree k must be >= 1");
  if (curlcurl_offset < 1) throw std::invalid_argument("curl-curl degree offset must be >= 1");
}

double mesh_size(const Mesh& mesh, const Element& el, MeshSizeRule rule) {
  if (rule == MeshSizeRule::Diameter) return el.diameter;
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
  for (Index v : el.vertices) {
    lo = lo.cwiseMin(mesh.vertex(v).coords);
    hi = hi.cwiseMax(mesh.vertex(v).coords);
  }
  return (hi - lo).maxCoeff();
}

LocalElement::LocalElement(const Mesh& mesh, Index elem, int k, const SchemeOptions& scheme)
    : elem_(elem),
      layout_(k, static_cast<int>(mesh.element(elem).faces.size()), scheme.curlcurl_offset),
      scheme_(scheme),
      h_(mesh_size(mesh, mesh.element(elem), scheme.mesh_size)),
      cell_basis_(ScalarBasis3D::for_element(mesh.element(elem), k)),
      mesh_(&mesh) {
  validate(scheme);
  const Element& el = mesh.element(elem);
  if (layout_.target_degree >= 0) target_basis_.emplace(ScalarBasis3D::for_element(el, layout_.target_degree));
  cell_rule_ = element_quadrature(mesh, elem, operator_exactness());
  for (std::size_t j = 0; j < el.faces.size(); ++j) {
    const Face& f = mesh.face(el.faces[j]);
    faces_.push_back(f.id);
    face_basis_.push_back(ScalarBasis2D::for_face(f, k));
    face_curl_basis_.push_back(ScalarBasis2D::for_face(f, k - 1));
    normals_.push_back(mesh.outward_normal(elem, j));
    face_rules_.push_back(face_quadrature(mesh, f.id, operator_exactness()));
  }
}

int LocalElement::data_exactness() const { return std::max(2 * layout_.k + 2, layout_.k + 6); }

Mat LocalElement::vector_mass() const { return block_diag3(mass_matrix(cell_basis_, cell_rule_)); }

Mat LocalElement::target_vector_mass() const {
  if (!target_basis_) return Mat(0, 0);
  return block_diag3(mass_matrix(*target_basis_, cell_rule_));
}

LocalWeakGradient LocalElement::weak_gradient() const {
  const LocalLayout& L = layout_;
  const int n = L.n_cell;
  Mat rhs = Mat::Zero(3 * n, L.scalar_size());

  // -(s0, div psi)_T with psi = phi_i e_c.
  const Tables3D cell = tabulate_all(cell_basis_, cell_rule_, false);
  const auto w = weights_of(cell_rule_);
  for (int c = 0; c < 3; ++c)
    rhs.block(c * n, 0, n, n) = -cell.grad[static_cast<std::size_t>(c)].transpose() * w.asDiagonal() * cell.values;

  // <sb, psi . n>_{dT}.
  for (int j = 0; j < L.num_faces; ++j) {
    const QuadratureRule& fr = face_rules_[static_cast<std::size_t>(j)];
    const auto fw = weights_of(fr);
    const Mat phi = tabulate(cell_basis_, fr);
    const Mat psi = tabulate(face_basis_[static_cast<std::size_t>(j)], fr);
    const Mat cross = phi.transpose() * fw.asDiagonal() * psi;
    const Vec3& nrm = normals_[static_cast<std::size_t>(j)];
    for (int c = 0; c < 3; ++c) rhs.block(c * n, L.pb_offset(j), n, L.n_face) = nrm[c] * cross;
  }

  const auto llt = factor(mass_matrix(cell_basis_, cell_rule_), "weak_gradient");
  return {block_solve(llt, rhs, n), std::move(rhs)};
}

LocalWeakCurlCurl LocalElement::weak_curlcurl() const {
  const LocalLayout& L = layout_;
  if (!target_basis_) return {Mat(0, L.velocity_size()), Mat(0, L.velocity_size())};
  const ScalarBasis3D& tb = *target_basis_;
  const int n = L.n_cell, m = L.n_target;
  Mat rhs = Mat::Zero(3 * m, L.velocity_size());

  // (v0, curl curl q)_T with q = chi_i e_c: (curl curl q)_d = d_d d_c chi - delta_cd lap chi.
  {
    const Tables3D tt = tabulate_all(tb, cell_rule_, true);
    const Mat phi = tabulate(cell_basis_, cell_rule_);
    const auto w = weights_of(cell_rule_);
    const Mat lap = tt.hess[0] + tt.hess[1] + tt.hess[2];
    for (int c = 0; c < 3; ++c)
      for (int d = 0; d < 3; ++d) {
        Mat op = tt.hess[static_cast<std::size_t>(hessian_slot(c, d))];
        if (c == d) op -= lap;
        rhs.block(c * m, d * n, m, n) = op.transpose() * w.asDiagonal() * phi;
      }
  }

  for (int j = 0; j < L.num_faces; ++j) {
    const auto sj = static_cast<std::size_t>(j);
    const QuadratureRule& fr = face_rules_[sj];
    const auto fw = weights_of(fr);
    const Tables3D tt = tabulate_all(tb, fr, false);
    const Mat psi = tabulate(face_basis_[sj], fr);
    const Mat psi_c = tabulate(face_curl_basis_[sj], fr);
    const FaceFrame& fr3 = face_basis_[sj].frame();
    const Vec3& nrm = normals_[sj];
    const std::array<Vec3, 2> tangents{fr3.t1, fr3.t2};
    for (int a = 0; a < 2; ++a) {
      const Vec3 tau = tangents[static_cast<std::size_t>(a)].cross(nrm);  // (t_a x n) per unit coefficient
      const Eigen::Matrix3d tx = skew(tau);
      // -<vb x n, curl q> = -int psi (tau x grad chi)_c.
      for (int c = 0; c < 3; ++c) {
        Mat g = Mat::Zero(fr.size(), m);
        for (int b = 0; b < 3; ++b) g += tx(c, b) * tt.grad[static_cast<std::size_t>(b)];
        rhs.block(c * m, L.ub_offset(j) + a * L.n_face, m, L.n_face) = -g.transpose() * fw.asDiagonal() * psi;
        // -<vn x n, q> = -int psi' tau_c chi.
        rhs.block(c * m, L.un_offset(j) + a * L.n_face_curl, m, L.n_face_curl) =
            -tau[c] * tt.values.transpose() * fw.asDiagonal() * psi_c;
      }
    }
  }

  const auto llt = factor(mass_matrix(tb, cell_rule_), "weak_curlcurl");
  return {block_solve(llt, rhs, m), std::move(rhs)};
}

Mat LocalElement::velocity_stabilizer() const {
  const LocalLayout& L = layout_;
  const int n = L.n_cell;
  Mat s = Mat::Zero(L.velocity_size(), L.velocity_size());
  const double w_trace = std::pow(h_, scheme_.trace_exponent), w_curl = std::pow(h_, scheme_.curl_exponent);
  for (int j = 0; j < L.num_faces; ++j) {
    const auto sj = static_cast<std::size_t>(j);
    const QuadratureRule& fr = face_rules_[sj];
    const auto nq = static_cast<Eigen::Index>(fr.size());
    const auto fw = weights_of(fr);
    const Tables3D ct = tabulate_all(cell_basis_, fr, false);
    const Mat psi = tabulate(face_basis_[sj], fr);
    const Mat psi_c = tabulate(face_curl_basis_[sj], fr);
    const FaceFrame& frame = face_basis_[sj].frame();
    const std::array<Vec3, 2> tangents{frame.t1, frame.t2};
    for (int a = 0; a < 2; ++a) {
      const Vec3& t = tangents[static_cast<std::size_t>(a)];
      // (u0 - ub) . t_a at face points.
      Mat j0 = Mat::Zero(nq, L.velocity_size());
      for (int d = 0; d < 3; ++d) j0.middleCols(d * n, n) = t[d] * ct.values;
      j0.middleCols(L.ub_offset(j) + a * L.n_face, L.n_face) = -psi;
      s.noalias() += w_trace * j0.transpose() * fw.asDiagonal() * j0;
      // (curl u0 - un) . t_a, with (curl(phi e_d)) . t = (t x grad phi)_d.
      const Eigen::Matrix3d tx = skew(t);
      Mat j1 = Mat::Zero(nq, L.velocity_size());
      for (int d = 0; d < 3; ++d) {
        Mat col = Mat::Zero(nq, n);
        for (int b = 0; b < 3; ++b) col += tx(d, b) * ct.grad[static_cast<std::size_t>(b)];
        j1.middleCols(d * n, n) = col;
      }
      j1.middleCols(L.un_offset(j) + a * L.n_face_curl, L.n_face_curl) = -psi_c;
      s.noalias() += w_curl * j1.transpose() * fw.asDiagonal() * j1;
    }
  }
  return 0.5 * (s + s.transpose());
}

Mat LocalElement::pressure_stabilizer() const {
  const LocalLayout& L = layout_;
  Mat s = Mat::Zero(L.scalar_size(), L.scalar_size());
  const double weight = std::pow(h_, scheme_.pressure_exponent);
  for (int j = 0; j < L.num_faces; ++j) {
    const auto sj = static_cast<std::size_t>(j);
    const QuadratureRule& fr = face_rules_[sj];
    const auto fw = weights_of(fr);
    Mat jump = Mat::Zero(static_cast<Eigen::Index>(fr.size()), L.scalar_size());
    jump.leftCols(L.n_cell) = tabulate(cell_basis_, fr);
    jump.middleCols(L.pb_offset(j), L.n_face) = -tabulate(face_basis_[sj], fr);
    s.noalias() += weight * jump.transpose() * fw.asDiagonal() * jump;
  }
  return 0.5 * (s + s.transpose());
}

Vec LocalElement::load(const VectorField& f, int exactness) const {
  const QuadratureRule rule = element_quadrature(*mesh_, elem_, exactness);
  const int n = layout_.n_cell;
  Vec out = Vec::Zero(layout_.velocity_size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Vec3 fv = f(rule.points[q]);
    const Vec phi = cell_basis_.values(rule.points[q]);
    for (int c = 0; c < 3; ++c) out.segment(c * n, n) += rule.weights[q] * fv[c] * phi;
  }
  return out;
}

Vec LocalElement::project_velocity(const VectorField& w, const VectorField& curl_w, int exactness) const {
  const LocalLayout& L = layout_;
  Vec out(L.velocity_size());
  out.head(L.velocity_interior()) =
      project_vector(cell_basis_, element_quadrature(*mesh_, elem_, exactness), w);
  for (int j = 0; j < L.num_faces; ++j) {
    const auto sj = static_cast<std::size_t>(j);
    const QuadratureRule fr = face_quadrature(*mesh_, faces_[sj], exactness);
    out.segment(L.ub_offset(j), 2 * L.n_face) = project_tangential(face_basis_[sj], fr, w);
    out.segment(L.un_offset(j), 2 * L.n_face_curl) = project_tangential(face_curl_basis_[sj], fr, curl_w);
  }
  return out;
}

Vec LocalElement::project_scalar(const ScalarField& s, int exactness) const {
  const LocalLayout& L = layout_;
  Vec out(L.scalar_size());
  out.head(L.n_cell) = project(cell_basis_, element_quadrature(*mesh_, elem_, exactness), s);
  for (int j = 0; j < L.num_faces; ++j) {
    const auto sj = static_cast<std::size_t>(j);
    out.segment(L.pb_offset(j), L.n_face) =
        project(face_basis_[sj], face_quadrature(*mesh_, faces_[sj], exactness), s);
  }
  return out;
}

LocalWeakGradient weak_gradient_local(const Mesh& mesh, Index elem, int k) {
  return LocalElement(mesh, elem, k).weak_gradient();
}

LocalWeakCurlCurl weak_curlcurl_local(const Mesh& mesh, Index elem, int k, const SchemeOptions& scheme) {
  return LocalElement(mesh, elem, k, scheme).weak_curlcurl();
}

CommutativityResidual check_commutativity(const Mesh& mesh, Index elem, int k, const VectorPolynomial& w,
                                          const Polynomial3& sigma, const SchemeOptions& scheme) {
  const LocalElement local(mesh, elem, k, scheme);
  const int ex = std::max(local.data_exactness(), 2 * k + std::max(w.degree(), sigma.degree()) + 2);
  const QuadratureRule rule = element_quadrature(mesh, elem, ex);
  const VectorPolynomial curl_w = w.curl();
  const VectorPolynomial cc_w = curl_w.curl();
  const VectorPolynomial grad_s = VectorPolynomial::gradient(sigma);
  CommutativityResidual r;

  auto l2 = [](const Vec& coeffs, const Mat& mass) { return std::sqrt(std::max(0.0, coeffs.dot(mass * coeffs))); };

  const Vec qw = local.project_velocity(w.as_field(), curl_w.as_field(), ex);
  const double w_norm = l2(qw.head(local.layout().velocity_interior()), local.vector_mass());
  if (local.target_basis()) {
    const Vec lhs = local.weak_curlcurl().matrix * qw;
    const Vec rhs = project_vector(*local.target_basis(), rule, cc_w.as_field());
    const Mat m2 = local.target_vector_mass();
    r.curlcurl_abs = l2(lhs - rhs, m2);
    const double scale = std::max(l2(rhs, m2), w_norm / (local.h() * local.h()));
    r.curlcurl_rel = scale > 0.0 ? r.curlcurl_abs / scale : r.curlcurl_abs;
  }

  const Vec qs = local.project_scalar([&](const Vec3& x) { return sigma(x); }, ex);
  const Vec lhs = local.weak_gradient().matrix * qs;
  const Vec rhs = project_vector(local.cell_basis(), rule, grad_s.as_field());
  const Mat m = local.vector_mass();
  r.gradient_abs = l2(lhs - rhs, m);
  const double s_norm = l2(qs.head(local.layout().n_cell), mass_matrix(local.cell_basis(), local.cell_rule()));
  const double scale = std::max(l2(rhs, m), s_norm / local.h());
  r.gradient_rel = scale > 0.0 ? r.gradient_abs / scale : r.gradient_abs;
  return r;
}

}  // namespace quadcurl
