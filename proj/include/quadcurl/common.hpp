// Shared scalar/vector types and the exception hierarchy used across quadcurl.
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace quadcurl {

using Index = std::int64_t;
using Vec3 = Eigen::Vector3d;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Vector field R^3 -> R^3.
using VectorField = std::function<Vec3(const Vec3&)>;
/// Scalar field R^3 -> R.
using ScalarField = std::function<double(const Vec3&)>;

/// Base class for all library failures that are not plain argument errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Degenerate or inconsistent geometry (zero-area faces, off-plane points).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// A local dense factorization failed (singular or numerically rank-deficient).
class ConditioningError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine was called with inputs it cannot handle exactly,
/// e.g. a quadrature rule that is not exact enough for the requested integrand.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The global linear solve failed or missed its residual target.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Boundary or source data could not be evaluated.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Number of monomials of total degree <= k in three variables; 0 for k < 0.
constexpr int poly_dim_3d(int k) { return k < 0 ? 0 : (k + 1) * (k + 2) * (k + 3) / 6; }

/// Number of monomials of total degree <= k in two variables; 0 for k < 0.
constexpr int poly_dim_2d(int k) { return k < 0 ? 0 : (k + 1) * (k + 2) / 2; }

}  // namespace quadcurl
