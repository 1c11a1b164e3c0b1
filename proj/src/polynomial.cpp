#include "quadcurl/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace quadcurl {

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

}  // namespace

Polynomial3 Polynomial3::constant(double c) { return monomial(c, 0, 0, 0); }

Polynomial3 Polynomial3::monomial(double coeff, int a, int b, int c) {
  if (a < 0 || b < 0 || c < 0) throw std::invalid_argument("Polynomial3: negative exponent");
  Polynomial3 p;
  if (coeff != 0.0) p.terms_[{a, b, c}] = coeff;
  return p;
}

double Polynomial3::operator()(const Vec3& x) const {
  double s = 0.0;
  for (const auto& [e, v] : terms_) s += v * ipow(x[0], e[0]) * ipow(x[1], e[1]) * ipow(x[2], e[2]);
  return s;
}

Polynomial3 Polynomial3::derivative(int axis) const {
  Polynomial3 d;
  for (const auto& [e, v] : terms_) {
    const auto a = static_cast<std::size_t>(axis);
    if (e[a] == 0) continue;
    Exponent ne = e;
    ne[a] -= 1;
    d.terms_[ne] += v * e[a];
  }
  d.prune();
  return d;
}

int Polynomial3::degree() const {
  int deg = -1;
  for (const auto& [e, v] : terms_) deg = std::max(deg, e[0] + e[1] + e[2]);
  return deg;
}

bool Polynomial3::is_zero(double tol) const {
  return std::all_of(terms_.begin(), terms_.end(), [tol](const auto& t) { return std::abs(t.second) <= tol; });
}

Polynomial3& Polynomial3::operator+=(const Polynomial3& o) {
  for (const auto& [e, v] : o.terms_) terms_[e] += v;
  prune();
  return *this;
}

Polynomial3& Polynomial3::operator-=(const Polynomial3& o) {
  for (const auto& [e, v] : o.terms_) terms_[e] -= v;
  prune();
  return *this;
}

Polynomial3& Polynomial3::operator*=(double s) {
  for (auto& [e, v] : terms_) v *= s;
  prune();
  return *this;
}

void Polynomial3::prune() { std::erase_if(terms_, [](const auto& t) { return t.second == 0.0; }); }

Polynomial3 Polynomial3::random(int degree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Polynomial3 p;
  for (int d = 0; d <= degree; ++d)
    for (int a = d; a >= 0; --a)
      for (int b = d - a; b >= 0; --b) p.terms_[{a, b, d - a - b}] = dist(rng);
  p.prune();
  return p;
}

VectorPolynomial VectorPolynomial::curl() const {
  return {{c[2].derivative(1) - c[1].derivative(2), c[0].derivative(2) - c[2].derivative(0),
           c[1].derivative(0) - c[0].derivative(1)}};
}

Polynomial3 VectorPolynomial::divergence() const {
  return c[0].derivative(0) + c[1].derivative(1) + c[2].derivative(2);
}

int VectorPolynomial::degree() const { return std::max({c[0].degree(), c[1].degree(), c[2].degree()}); }

VectorField VectorPolynomial::as_field() const {
  return [p = *this](const Vec3& x) { return p(x); };
}

VectorPolynomial VectorPolynomial::gradient(const Polynomial3& p) {
  return {{p.derivative(0), p.derivative(1), p.derivative(2)}};
}

VectorPolynomial VectorPolynomial::random(int degree, std::mt19937_64& rng) {
  return {{Polynomial3::random(degree, rng), Polynomial3::random(degree, rng), Polynomial3::random(degree, rng)}};
}

}  // namespace quadcurl
