#include "quadcurl/verify.hpp"

#include "quadcurl/parallel.hpp"
#include "quadcurl/weak_ops.hpp"

#include <algorithm>
#include <random>

namespace quadcurl {

CommutativitySummary commutativity_suite(const Mesh& mesh, int k, int fields, std::uint64_t seed, int threads,
                                         const SchemeOptions& scheme) {
  if (fields < 1) throw std::invalid_argument("commutativity_suite: fields must be >= 1");
  const auto ne = static_cast<std::size_t>(mesh.num_elements());
  std::vector<CommutativityResidual> worst(ne);
  parallel_for(ne, threads, [&](std::size_t e) {
    std::mt19937_64 rng(seed + 7919 * e);
    CommutativityResidual& w = worst[e];
    for (int deg = 0; deg <= k + 1; ++deg)
      for (int i = 0; i < fields; ++i) {
        const VectorPolynomial v = VectorPolynomial::random(deg, rng);
        const Polynomial3 s = Polynomial3::random(deg, rng);
        const CommutativityResidual r = check_commutativity(mesh, static_cast<Index>(e), k, v, s, scheme);
        w.curlcurl_rel = std::max(w.curlcurl_rel, r.curlcurl_rel);
        w.gradient_rel = std::max(w.gradient_rel, r.gradient_rel);
      }
  });
  CommutativitySummary out;
  for (const auto& w : worst) {
    out.max_curlcurl_rel = std::max(out.max_curlcurl_rel, w.curlcurl_rel);
    out.max_gradient_rel = std::max(out.max_gradient_rel, w.gradient_rel);
  }
  out.checks = static_cast<Index>(ne) * (k + 2) * fields;
  return out;
}

Problem patch_problem(int k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("polynomial degree k must be >= 1");
  std::mt19937_64 rng(seed);
  const VectorPolynomial psi = VectorPolynomial::random(k + 1, rng);
  return polynomial_problem(psi.curl(), "patch");
}

namespace {

CheckOutcome run_check(MeshFamily family, int level, int k, const Problem& problem, const StudyConfig& config) {
  const Mesh mesh = make_mesh(family, level, config.tet_diagonal);
  const LevelOutcome res = solve_level(mesh, k, problem, config);
  return {res.errors, res.solution.norm()};
}

}  // namespace

CheckOutcome patch_test(MeshFamily family, int level, int k, std::uint64_t seed, const StudyConfig& config) {
  return run_check(family, level, k, patch_problem(k, seed), config);
}

CheckOutcome zero_data_test(MeshFamily family, int level, int k, const StudyConfig& config) {
  return run_check(family, level, k, zero_problem(), config);
}

}  // namespace quadcurl
