// Manufactured problems, convergence studies over mesh hierarchies, and table output.
#pragma once

#include "quadcurl/analysis.hpp"
#include "quadcurl/assembly.hpp"
#include "quadcurl/polynomial.hpp"
#include "quadcurl/solver.hpp"

#include <string>
#include <utility>
#include <vector>

namespace quadcurl {

enum class MeshFamily { Hex, Tet };
enum class TableFormat { Plain, Csv, Latex };

MeshFamily parse_mesh_family(const std::string& name);
std::string to_string(MeshFamily family);
TableFormat parse_table_format(const std::string& name);

/// Exact solution, source and boundary data of one test problem.
struct Problem {
  std::string name;
  ExactSolution exact;
  VectorField f;
  BoundaryData boundary;
};

/// u = (-2x^2y^2z, 2x^2y^3z, -xy^2z^2(3x-2)), p = 0, f = curl^4 u, with
/// g1 = u x n and g2 = (curl u) x n. The derivatives are hard-coded from
/// tools/manufactured_oracle.py.
Problem manufactured_problem();

/// Polynomial exact solution with p = 0 and f = curl^4 u by symbolic differentiation.
Problem polynomial_problem(const VectorPolynomial& u, std::string name = "polynomial");

/// f = 0 and homogeneous boundary data.
Problem zero_problem();

struct StudyConfig {
  int k = 2;
  MeshFamily family = MeshFamily::Hex;
  int level_min = 1;
  int level_max = 4;
  SolverOptions solver;
  TableFormat format = TableFormat::Plain;
  int threads = 0;
  /// Corner at which the shared Kuhn diagonal starts (tet meshes).
  unsigned tet_diagonal = 0;
  SchemeOptions scheme;
  /// Write each level's mesh / free-DOF matrix; "{level}" in the path is
  /// replaced by the level number.
  std::string dump_mesh;
  std::string dump_matrix;
  /// Levels whose estimated memory exceeds this are refused.
  double memory_limit_bytes = 4.0e9;
  bool with_aux_norm = false;
};

/// Default level range per family and degree.
std::pair<int, int> default_levels(MeshFamily family, int k);

struct SizeEstimate {
  Index elements = 0;
  Index faces = 0;
  Index boundary_faces = 0;
  Index free_dofs = 0;
  Index nonzeros = 0;
  double bytes = 0.0;
};

/// Closed-form counts for generated meshes and an upper estimate of the
/// memory used by assembly and the direct factorization.
SizeEstimate estimate_size(MeshFamily family, int level, int k);

/// The estimate exceeds the configured memory limit.
class ResourceError : public Error {
 public:
  using Error::Error;
};

Mesh make_mesh(MeshFamily family, int level, unsigned tet_diagonal = 0);

struct LevelStats {
  Index elements = 0;
  Index free_dofs = 0;
  Index nonzeros = 0;
  Index local_classes = 0;
  double relative_residual = 0.0;
  std::string method;
  double assemble_seconds = 0.0;
  double solve_seconds = 0.0;
};

struct LevelOutcome {
  ErrorRecord errors;
  LevelStats stats;
  Vec solution;   ///< full-length (u_h; p_h)
  Vec projected;  ///< full-length (Q_h u; Q_h p)
};

/// Assemble, impose boundary data, solve and measure errors on one mesh.
LevelOutcome solve_level(const Mesh& mesh, int k, const Problem& problem, const StudyConfig& config);

struct ConvergenceReport {
  int k = 0;
  MeshFamily family = MeshFamily::Hex;
  std::string problem;
  std::vector<ErrorRecord> levels;
  std::vector<RateRecord> rates;
  std::vector<LevelStats> stats;
};

/// Runs levels sequentially; errors from a level are rethrown with the level
/// in the message (same exception type).
ConvergenceReport run_study(const StudyConfig& config, const Problem& problem);
ConvergenceReport run_study(const StudyConfig& config);

/// Plain and LaTeX print errors as 0.dddd E+xx and rates with one decimal;
/// CSV carries full precision and no timings.
std::string render_table(const ConvergenceReport& report, TableFormat format);

/// Inverse of the CSV rendering.
ConvergenceReport parse_csv(const std::string& text);

/// Error in the table style: mantissa in [0.1, 1) with `digits` digits.
std::string format_error(double value, int digits = 4);

}  // namespace quadcurl
