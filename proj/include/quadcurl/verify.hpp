// Self-checks shared by the CLI `verify` subcommand and the acceptance suite:
// commuting projections over whole meshes, polynomial patch tests and the
// zero-data solve.
#pragma once

#include "quadcurl/driver.hpp"

#include <cstdint>

namespace quadcurl {

struct CommutativitySummary {
  double max_curlcurl_rel = 0.0;
  double max_gradient_rel = 0.0;
  Index checks = 0;
};

/// For every element and every degree 0..k+1, `fields` random vector and
/// scalar polynomials go through check_commutativity. Results do not depend
/// on the thread count.
CommutativitySummary commutativity_suite(const Mesh& mesh, int k, int fields, std::uint64_t seed, int threads = 0,
                                         const SchemeOptions& scheme = {});

/// u = curl psi for a random polynomial psi of degree k + 1, so div u = 0 and
/// deg u <= k.
Problem patch_problem(int k, std::uint64_t seed);

struct CheckOutcome {
  ErrorRecord errors;
  /// Euclidean norm of the full solution vector (u_h; p_h).
  double solution_norm = 0.0;
};

CheckOutcome patch_test(MeshFamily family, int level, int k, std::uint64_t seed, const StudyConfig& config = {});
CheckOutcome zero_data_test(MeshFamily family, int level, int k, const StudyConfig& config = {});

}  // namespace quadcurl
