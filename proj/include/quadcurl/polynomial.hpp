// Sparse symbolic polynomials in (x, y, z): exact differentiation for
// manufactured data and for test fields.
#pragma once

#include "quadcurl/common.hpp"

#include <array>
#include <map>
#include <random>

namespace quadcurl {

class Polynomial3 {
 public:
  using Exponent = std::array<int, 3>;

  Polynomial3() = default;
  static Polynomial3 constant(double c);
  static Polynomial3 monomial(double coeff, int a, int b, int c);

  double operator()(const Vec3& x) const;
  /// Exact partial derivative along axis 0, 1 or 2.
  Polynomial3 derivative(int axis) const;
  /// Total degree; -1 for the zero polynomial.
  int degree() const;
  bool is_zero(double tol = 0.0) const;

  Polynomial3& operator+=(const Polynomial3& o);
  Polynomial3& operator-=(const Polynomial3& o);
  Polynomial3& operator*=(double s);
  friend Polynomial3 operator+(Polynomial3 a, const Polynomial3& b) { return a += b; }
  friend Polynomial3 operator-(Polynomial3 a, const Polynomial3& b) { return a -= b; }
  friend Polynomial3 operator*(double s, Polynomial3 a) { return a *= s; }

  const std::map<Exponent, double>& terms() const { return terms_; }

  /// Random coefficients in [-1, 1] on every monomial of degree <= `degree`.
  static Polynomial3 random(int degree, std::mt19937_64& rng);

 private:
  void prune();
  std::map<Exponent, double> terms_;
};

/// Vector of three polynomials with the usual vector-calculus operators.
struct VectorPolynomial {
  std::array<Polynomial3, 3> c;

  Vec3 operator()(const Vec3& x) const { return {c[0](x), c[1](x), c[2](x)}; }
  VectorPolynomial curl() const;
  Polynomial3 divergence() const;
  int degree() const;
  VectorField as_field() const;

  static VectorPolynomial gradient(const Polynomial3& p);
  static VectorPolynomial random(int degree, std::mt19937_64& rng);
};

}  // namespace quadcurl
