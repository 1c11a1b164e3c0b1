// Linear solvers for the assembled saddle-point system.
#pragma once

#include "quadcurl/assembly.hpp"

#include <string>

namespace quadcurl {

enum class SolverKind { Direct, Krylov };

struct SolverOptions {
  SolverKind kind = SolverKind::Direct;
  /// Target for ||K x - F|| / ||F||; must lie in (0, 1e-6].
  double tol = 1e-10;
  /// Iterative refinement sweeps after the direct solve.
  int refinement_steps = 10;
  int max_iterations = 50000;
};

struct SolveReport {
  Vec solution;
  double relative_residual = 0.0;
  std::string method;
  /// Krylov iterations, or refinement sweeps for the direct method.
  int iterations = 0;
  Index nonzeros = 0;
  double factor_seconds = 0.0;
  double solve_seconds = 0.0;
  double wall_seconds = 0.0;
};

SolverKind parse_solver_kind(const std::string& name);
std::string to_string(SolverKind kind);

/// Throws std::invalid_argument for a tolerance outside (0, 1e-6] and
/// SolverError when the matrix is singular or the residual target is missed.
SolveReport solve_saddle(const SaddleSystem& system, const SolverOptions& options = {});

}  // namespace quadcurl
