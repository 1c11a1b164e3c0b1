#include "quadcurl/solver.hpp"

#include <Eigen/CholmodSupport>
#include <Eigen/UmfPackSupport>
#include <unsupported/Eigen/IterativeSolvers>

#include <chrono>
#include <cmath>
#include <cstdio>

namespace quadcurl {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Diagonal SPD preconditioner for [[P, B], [B^T, -S]]: |diag P| on the
/// velocity block and diag(S) + diag(B^T |diag P|^{-1} B) on the pressure block.
class SaddleDiagonalPreconditioner {
 public:
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic };

  SaddleDiagonalPreconditioner() = default;

  void setup(const SparseMatrix& k, Index velocity_free) {
    const Index n = k.rows();
    Vec d = Vec::Zero(n);
    for (int c = 0; c < k.outerSize(); ++c)
      for (SparseMatrix::InnerIterator it(k, c); it; ++it)
        if (it.row() == c) d[c] = std::abs(it.value());
    for (Index c = velocity_free; c < n; ++c)
      for (SparseMatrix::InnerIterator it(k, static_cast<int>(c)); it; ++it)
        if (it.row() < velocity_free && d[it.row()] > 0.0) d[c] += it.value() * it.value() / d[it.row()];
    inv_.resize(n);
    for (Index i = 0; i < n; ++i) inv_[i] = d[i] > 0.0 ? 1.0 / d[i] : 1.0;
  }

  template <class M>
  SaddleDiagonalPreconditioner& analyzePattern(const M&) { return *this; }
  template <class M>
  SaddleDiagonalPreconditioner& factorize(const M&) { return *this; }
  template <class M>
  SaddleDiagonalPreconditioner& compute(const M&) { return *this; }

  template <class Rhs>
  Vec solve(const Eigen::MatrixBase<Rhs>& b) const { return inv_.cwiseProduct(b.derived()); }

  Eigen::ComputationInfo info() const { return Eigen::Success; }

 private:
  Vec inv_;
};

double relative(const SparseMatrix& k, const Vec& x, const Vec& f, double fnorm) {
  return (f - k * x).norm() / fnorm;
}

/// Iterative refinement with a fixed factorization; returns the sweeps taken.
template <class Factor>
int refine(const Factor& factor, const SaddleSystem& sys, const SolverOptions& opt, double fnorm, Vec& x,
           double& rel) {
  int steps = 0;
  while (steps < opt.refinement_steps && rel > 1e-3 * opt.tol) {
    const Vec dx = factor.solve(Vec(sys.rhs - sys.matrix * x));
    const Vec candidate = x + dx;
    const double next = relative(sys.matrix, candidate, sys.rhs, fnorm);
    ++steps;
    if (!(next < rel)) break;
    x = candidate;
    const bool stalled = next > 0.5 * rel;
    rel = next;
    if (stalled) break;
  }
  return steps;
}

/// Shift added to the unit-scaled diagonal: +delta on velocity rows and
/// -delta on pressure rows, which makes the factored matrix quasi-definite.
constexpr double kQuasiDefiniteShift = 1e-8;

using Ldlt = Eigen::CholmodSimplicialLDLT<SparseMatrix, Eigen::Upper>;

/// x = D (D K D + Delta)^{-1} D r, an approximate inverse of K.
struct ScaledShiftedFactor {
  const Ldlt* ldlt;
  const Vec* scale;
  Vec solve(const Vec& r) const { return scale->cwiseProduct(ldlt->solve(Vec(scale->cwiseProduct(r)))); }
};

/// Unpivoted sparse LDL^T of the diagonally scaled, shifted matrix under a
/// nested-dissection ordering, followed by refinement against K itself.
/// Returns false on a failed factorization or when refinement cannot reach
/// the tolerance.
bool solve_ldlt(const SaddleSystem& sys, const SolverOptions& opt, double fnorm, SolveReport& rep) {
  auto t0 = Clock::now();
  const Index n = sys.size();
  Vec scale(n), shift(n);
  {
    const Vec d = sys.matrix.diagonal();
    for (Index i = 0; i < n; ++i) {
      scale[i] = d[i] != 0.0 ? 1.0 / std::sqrt(std::abs(d[i])) : 1.0;
      shift[i] = sys.layout->free_dofs[static_cast<std::size_t>(i)] < sys.layout->velocity_size ? kQuasiDefiniteShift
                                                                                                : -kQuasiDefiniteShift;
    }
  }
  Ldlt ldlt;
  ldlt.cholmod().nmethods = 1;
  ldlt.cholmod().method[0].ordering = CHOLMOD_METIS;
  ldlt.cholmod().postorder = 1;
  {
    SparseMatrix shifted = scale.asDiagonal() * sys.matrix * scale.asDiagonal();
    shifted += SparseMatrix(shift.asDiagonal());
    ldlt.compute(shifted);
  }
  rep.factor_seconds = seconds_since(t0);
  if (ldlt.info() != Eigen::Success) return false;
  t0 = Clock::now();
  const ScaledShiftedFactor factor{&ldlt, &scale};
  Vec x = factor.solve(sys.rhs);
  if (!x.allFinite()) return false;
  double rel = relative(sys.matrix, x, sys.rhs, fnorm);
  const int steps = refine(factor, sys, opt, fnorm, x, rel);
  rep.solve_seconds = seconds_since(t0);
  if (!(rel <= opt.tol)) return false;
  rep.solution = std::move(x);
  rep.relative_residual = rel;
  rep.iterations = steps;
  rep.method = "direct (CHOLMOD LDL^T)";
  return true;
}

/// Threshold-pivoted sparse LU with 64-bit indices.
void solve_lu(const SaddleSystem& sys, const SolverOptions& opt, double fnorm, SolveReport& rep) {
  using LongMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, SuiteSparse_long>;
  auto t0 = Clock::now();
  const LongMatrix k = sys.matrix.cast<double>();
  Eigen::UmfPackLU<LongMatrix> lu;
  lu.umfpackControl()(UMFPACK_STRATEGY) = UMFPACK_STRATEGY_SYMMETRIC;
  lu.umfpackControl()(UMFPACK_ORDERING) = UMFPACK_ORDERING_METIS;
  lu.compute(k);
  rep.factor_seconds += seconds_since(t0);
  if (lu.info() != Eigen::Success) {
    const int status = lu.umfpackFactorizeReturncode();
    throw SolverError(status == UMFPACK_ERROR_out_of_memory
                          ? std::string("direct solver: out of memory in the LU factorization")
                          : "direct solver: factorization failed (singular or rank-deficient matrix, UMFPACK status " +
                                std::to_string(status) + ")");
  }
  t0 = Clock::now();
  Vec x = lu.solve(sys.rhs);
  if (!x.allFinite()) throw SolverError("direct solver: non-finite solution");
  double rel = relative(sys.matrix, x, sys.rhs, fnorm);
  const int steps = refine(lu, sys, opt, fnorm, x, rel);
  rep.solve_seconds += seconds_since(t0);
  rep.solution = std::move(x);
  rep.relative_residual = rel;
  rep.iterations = steps;
  rep.method = "direct (UMFPACK LU)";
}

void solve_direct(const SaddleSystem& sys, const SolverOptions& opt, double fnorm, SolveReport& rep) {
  if (solve_ldlt(sys, opt, fnorm, rep)) return;
  solve_lu(sys, opt, fnorm, rep);
}

void solve_krylov(const SaddleSystem& sys, const SolverOptions& opt, double fnorm, SolveReport& rep) {
  const auto t0 = Clock::now();
  Index velocity_free = 0;
  for (Index g : sys.layout->free_dofs)
    if (g < sys.layout->velocity_size) ++velocity_free;
  Eigen::MINRES<SparseMatrix, Eigen::Lower | Eigen::Upper, SaddleDiagonalPreconditioner> minres;
  minres.setMaxIterations(opt.max_iterations);
  minres.setTolerance(0.1 * opt.tol);
  minres.compute(sys.matrix);
  minres.preconditioner().setup(sys.matrix, velocity_free);
  rep.factor_seconds = seconds_since(t0);

  const auto t1 = Clock::now();
  Vec x = Vec::Zero(sys.size());
  double rel = 1.0;
  int iterations = 0;
  // Restarts on the true residual guard against drift in the recurrence.
  for (int restart = 0; restart < 5 && rel > opt.tol; ++restart) {
    const Vec r = sys.rhs - sys.matrix * x;
    const Vec dx = minres.solve(r);
    iterations += static_cast<int>(minres.iterations());
    if (!dx.allFinite()) throw SolverError("krylov solver: non-finite iterate");
    x += dx;
    rel = relative(sys.matrix, x, sys.rhs, fnorm);
    if (minres.iterations() == 0) break;
  }
  rep.solve_seconds = seconds_since(t1);
  rep.solution = std::move(x);
  rep.relative_residual = rel;
  rep.iterations = iterations;
  rep.method = "krylov (preconditioned MINRES)";
}

}  // namespace

SolverKind parse_solver_kind(const std::string& name) {
  if (name == "direct") return SolverKind::Direct;
  if (name == "krylov") return SolverKind::Krylov;
  throw std::invalid_argument("unknown solver '" + name + "' (expected direct or krylov)");
}

std::string to_string(SolverKind kind) { return kind == SolverKind::Direct ? "direct" : "krylov"; }

SolveReport solve_saddle(const SaddleSystem& system, const SolverOptions& options) {
  if (!(options.tol > 0.0 && options.tol <= 1e-6))
    throw std::invalid_argument("solver tolerance must lie in (0, 1e-6]");
  if (system.matrix.rows() != system.matrix.cols() || system.matrix.rows() != system.rhs.size())
    throw std::invalid_argument("solve_saddle: matrix and right-hand side sizes differ");
  const auto t0 = Clock::now();
  SolveReport rep;
  rep.nonzeros = system.matrix.nonZeros();
  if (system.size() == 0) {
    rep.solution = Vec::Zero(0);
    rep.method = to_string(options.kind) + " (empty system)";
    return rep;
  }
  // A zero load still goes through the factorization so that singular
  // systems are reported; the residual is then absolute.
  const double fnorm = system.rhs.norm() > 0.0 ? system.rhs.norm() : 1.0;
  if (options.kind == SolverKind::Direct)
    solve_direct(system, options, fnorm, rep);
  else
    solve_krylov(system, options, fnorm, rep);
  rep.wall_seconds = seconds_since(t0);
  if (!(rep.relative_residual <= options.tol)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, ": relative residual %.3e above tolerance %.3e", rep.relative_residual, options.tol);
    throw SolverError(rep.method + buf);
  }
  return rep;
}

}  // namespace quadcurl
