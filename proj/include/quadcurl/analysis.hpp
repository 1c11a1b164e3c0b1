// Projections of exact solutions, discrete norms, and convergence rates.
#pragma once

#include "quadcurl/assembly.hpp"

#include <optional>
#include <vector>

namespace quadcurl {

struct ExactSolution {
  VectorField u;
  VectorField curl_u;
  ScalarField p;  ///< may be empty, meaning p = 0
};

/// Full-length global vector of Q_h u = {Q0 u, Qb u, Qn curl u} and
/// Q_h p = {Q0 p, Qb p}. exactness < 0 selects the element default.
Vec project_exact(const Discretization& disc, const ExactSolution& exact, int exactness = -1);

/// |||v||| with |||v|||^2 = sum_T ||C_T v||_T^2 + s1(v, v); reads the velocity
/// part of a full-length vector.
double energy_norm(const Discretization& disc, const Vec& v);

/// |||v||| + (sum_T ||div v0||_T^2)^{1/2} + (sum_e h^{-1} ||[v0 . n]||_e^2)^{1/2},
/// the jump sum running over interior faces with h the larger neighbour size
/// under the scheme's mesh-size rule.
double aux_norm_1(const Discretization& disc, const Vec& v);

struct L2Errors {
  double l2_error = 0.0;  ///< (sum_T ||Q0 u - u0||_T^2)^{1/2}
  double p_norm = 0.0;    ///< (sum_T ||p0||_T^2)^{1/2}
};

L2Errors l2_errors(const Discretization& disc, const Vec& solution, const Vec& projected);

struct ErrorRecord {
  int level = 0;
  double h = 0.0;
  Index dofs = 0;
  double l2_error = 0.0;
  double energy_error = 0.0;
  double p_norm = 0.0;
  std::optional<double> aux_norm;
};

struct RateRecord {
  std::optional<double> l2;
  std::optional<double> energy;
  std::optional<double> p;
};

/// log2(e_{l-1} / e_l) per column; 0.0 on the first level and absent where
/// either error is not positive.
std::vector<RateRecord> convergence_rates(const std::vector<ErrorRecord>& errors);

}  // namespace quadcurl
