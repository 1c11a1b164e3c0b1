#include "quadcurl/polyspace.hpp"

#include <cmath>

namespace quadcurl {

namespace {

// pw[a] = s^a for a = 0..k.
void powers(double s, int k, double* pw) {
  pw[0] = 1.0;
  for (int a = 1; a <= k; ++a) pw[a] = pw[a - 1] * s;
}

double pow_or_zero(const double* pw, int a) { return a < 0 ? 0.0 : pw[a]; }

constexpr int kMaxDegree = 32;

}  // namespace

ScalarBasis3D::ScalarBasis3D(Vec3 center, double scale, int degree)
    : center_(std::move(center)), scale_(scale), degree_(degree) {
  if (degree < 0 || degree > kMaxDegree) throw std::invalid_argument("ScalarBasis3D: degree out of range");
  if (!(scale > 0.0)) throw GeometryError("ScalarBasis3D: non-positive scale");
  for (int d = 0; d <= degree; ++d)
    for (int a = d; a >= 0; --a)
      for (int b = d - a; b >= 0; --b) exponents_.push_back({a, b, d - a - b});
}

ScalarBasis3D ScalarBasis3D::for_element(const Element& element, int degree) {
  return ScalarBasis3D(element.centroid, element.diameter, degree);
}

Vec ScalarBasis3D::values(const Vec3& x) const {
  double px[kMaxDegree + 1], py[kMaxDegree + 1], pz[kMaxDegree + 1];
  const Vec3 s = (x - center_) / scale_;
  powers(s[0], degree_, px);
  powers(s[1], degree_, py);
  powers(s[2], degree_, pz);
  Vec v(dim());
  for (int i = 0; i < dim(); ++i) {
    const auto& e = exponents_[static_cast<std::size_t>(i)];
    v[i] = px[e[0]] * py[e[1]] * pz[e[2]];
  }
  return v;
}

ScalarBasis3D::Gradients ScalarBasis3D::gradients(const Vec3& x) const {
  double px[kMaxDegree + 1], py[kMaxDegree + 1], pz[kMaxDegree + 1];
  const Vec3 s = (x - center_) / scale_;
  powers(s[0], degree_, px);
  powers(s[1], degree_, py);
  powers(s[2], degree_, pz);
  Gradients g(dim(), 3);
  const double inv = 1.0 / scale_;
  for (int i = 0; i < dim(); ++i) {
    const auto [a, b, c] = exponents_[static_cast<std::size_t>(i)];
    g(i, 0) = a * pow_or_zero(px, a - 1) * py[b] * pz[c] * inv;
    g(i, 1) = b * px[a] * pow_or_zero(py, b - 1) * pz[c] * inv;
    g(i, 2) = c * px[a] * py[b] * pow_or_zero(pz, c - 1) * inv;
  }
  return g;
}

ScalarBasis3D::Hessians ScalarBasis3D::hessians(const Vec3& x) const {
  double px[kMaxDegree + 1], py[kMaxDegree + 1], pz[kMaxDegree + 1];
  const Vec3 s = (x - center_) / scale_;
  powers(s[0], degree_, px);
  powers(s[1], degree_, py);
  powers(s[2], degree_, pz);
  Hessians hs(dim(), 6);
  const double inv2 = 1.0 / (scale_ * scale_);
  for (int i = 0; i < dim(); ++i) {
    const auto [a, b, c] = exponents_[static_cast<std::size_t>(i)];
    hs(i, 0) = a * (a - 1) * pow_or_zero(px, a - 2) * py[b] * pz[c] * inv2;
    hs(i, 1) = b * (b - 1) * px[a] * pow_or_zero(py, b - 2) * pz[c] * inv2;
    hs(i, 2) = c * (c - 1) * px[a] * py[b] * pow_or_zero(pz, c - 2) * inv2;
    hs(i, 3) = a * b * pow_or_zero(px, a - 1) * pow_or_zero(py, b - 1) * pz[c] * inv2;
    hs(i, 4) = a * c * pow_or_zero(px, a - 1) * py[b] * pow_or_zero(pz, c - 1) * inv2;
    hs(i, 5) = b * c * px[a] * pow_or_zero(py, b - 1) * pow_or_zero(pz, c - 1) * inv2;
  }
  return hs;
}

double ScalarBasis3D::evaluate(const Eigen::Ref<const Vec>& coeffs, const Vec3& x) const {
  return coeffs.dot(values(x));
}

ScalarBasis2D::ScalarBasis2D(const FaceFrame& frame, Vec3 origin, double scale, int degree)
    : frame_(frame), origin_(std::move(origin)), scale_(scale), degree_(degree) {
  if (degree < 0 || degree > kMaxDegree) throw std::invalid_argument("ScalarBasis2D: degree out of range");
  if (!(scale > 0.0)) throw GeometryError("ScalarBasis2D: non-positive scale");
  for (int d = 0; d <= degree; ++d)
    for (int a = d; a >= 0; --a) exponents_.push_back({a, d - a});
}

ScalarBasis2D ScalarBasis2D::for_face(const Face& face, int degree) {
  return ScalarBasis2D(face_frame(face), face.centroid, face.diameter, degree);
}

Vec ScalarBasis2D::values(const Vec3& x) const {
  const Vec3 r = x - origin_;
  if (std::abs(r.dot(frame_.n)) > 1e-12) throw GeometryError("ScalarBasis2D: point off the face plane");
  double pu[kMaxDegree + 1], pv[kMaxDegree + 1];
  powers(r.dot(frame_.t1) / scale_, degree_, pu);
  powers(r.dot(frame_.t2) / scale_, degree_, pv);
  Vec v(dim());
  for (int i = 0; i < dim(); ++i) {
    const auto& e = exponents_[static_cast<std::size_t>(i)];
    v[i] = pu[e[0]] * pv[e[1]];
  }
  return v;
}

double ScalarBasis2D::evaluate(const Eigen::Ref<const Vec>& coeffs, const Vec3& x) const {
  return coeffs.dot(values(x));
}

Mat tabulate(const ScalarBasis3D& basis, const QuadratureRule& rule) {
  Mat t(static_cast<Eigen::Index>(rule.size()), basis.dim());
  for (std::size_t q = 0; q < rule.size(); ++q) t.row(static_cast<Eigen::Index>(q)) = basis.values(rule.points[q]);
  return t;
}

Mat tabulate(const ScalarBasis2D& basis, const QuadratureRule& rule) {
  Mat t(static_cast<Eigen::Index>(rule.size()), basis.dim());
  for (std::size_t q = 0; q < rule.size(); ++q) t.row(static_cast<Eigen::Index>(q)) = basis.values(rule.points[q]);
  return t;
}

namespace {

Mat gram(const Mat& table, const QuadratureRule& rule) {
  const Eigen::Map<const Vec> w(rule.weights.data(), static_cast<Eigen::Index>(rule.weights.size()));
  Mat m = table.transpose() * w.asDiagonal() * table;
  return 0.5 * (m + m.transpose());
}

void require_exactness(int degree, const QuadratureRule& rule) {
  if (rule.exactness < 2 * degree)
    throw PreconditionError("mass_matrix: rule exactness " + std::to_string(rule.exactness) + " < 2 * degree " +
                            std::to_string(2 * degree));
}

}  // namespace

Mat mass_matrix(const ScalarBasis3D& basis, const QuadratureRule& rule) {
  require_exactness(basis.degree(), rule);
  return gram(tabulate(basis, rule), rule);
}

Mat mass_matrix(const ScalarBasis2D& basis, const QuadratureRule& rule) {
  require_exactness(basis.degree(), rule);
  return gram(tabulate(basis, rule), rule);
}

namespace {

template <class Basis>
Eigen::LLT<Mat> factor_mass(const Basis& basis, const QuadratureRule& rule) {
  Eigen::LLT<Mat> llt(mass_matrix(basis, rule));
  if (llt.info() != Eigen::Success) throw ConditioningError("projection: mass matrix not positive definite");
  return llt;
}

template <class Basis>
Vec project_impl(const Basis& basis, const QuadratureRule& rule, const ScalarField& f) {
  const Mat t = tabulate(basis, rule);
  Vec rhs = Vec::Zero(basis.dim());
  for (std::size_t q = 0; q < rule.size(); ++q)
    rhs += rule.weights[q] * f(rule.points[q]) * t.row(static_cast<Eigen::Index>(q)).transpose();
  return factor_mass(basis, rule).solve(rhs);
}

}  // namespace

Vec project(const ScalarBasis3D& basis, const QuadratureRule& rule, const ScalarField& f) {
  return project_impl(basis, rule, f);
}

Vec project(const ScalarBasis2D& basis, const QuadratureRule& rule, const ScalarField& f) {
  return project_impl(basis, rule, f);
}

Vec project_vector(const ScalarBasis3D& basis, const QuadratureRule& rule, const VectorField& f) {
  const Mat t = tabulate(basis, rule);
  const int n = basis.dim();
  Mat rhs = Mat::Zero(n, 3);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Vec3 v = f(rule.points[q]);
    rhs += rule.weights[q] * t.row(static_cast<Eigen::Index>(q)).transpose() * v.transpose();
  }
  const Mat sol = factor_mass(basis, rule).solve(rhs);
  Vec out(3 * n);
  for (int c = 0; c < 3; ++c) out.segment(c * n, n) = sol.col(c);
  return out;
}

Vec project_tangential(const ScalarBasis2D& basis, const QuadratureRule& rule, const VectorField& f) {
  const Mat t = tabulate(basis, rule);
  const int n = basis.dim();
  Mat rhs = Mat::Zero(n, 2);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Vec3 v = f(rule.points[q]);
    const Eigen::Vector2d tan(v.dot(basis.frame().t1), v.dot(basis.frame().t2));
    rhs += rule.weights[q] * t.row(static_cast<Eigen::Index>(q)).transpose() * tan.transpose();
  }
  const Mat sol = factor_mass(basis, rule).solve(rhs);
  Vec out(2 * n);
  out << sol.col(0), sol.col(1);
  return out;
}

}  // namespace quadcurl
