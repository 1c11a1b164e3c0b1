// quadcurl: convergence studies, single solves and self-checks for the weak
// Galerkin quad-curl discretization.
//
//   quadcurl study  --k 2 --mesh hex --levels 1..4 --format plain
//   quadcurl solve  --k 3 --mesh tet --level 2
//   quadcurl verify --k 2
//
// Exit codes: 0 success, 1 usage error or refused configuration, 2 numerical failure.
#include "quadcurl/driver.hpp"
#include "quadcurl/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>
#include <string>

using namespace quadcurl;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flag values as strings, so that the config file and the command line go
/// through the same conversion.
struct Settings {
  std::map<std::string, std::string> values{
      {"k", "2"},           {"mesh", "hex"},          {"levels", ""},     {"level", "2"},
      {"format", "plain"},  {"tol", "1e-10"},         {"solver", "direct"}, {"threads", "0"},
      {"dump_mesh", ""},    {"dump_matrix", ""},      {"tet_diagonal", "0"}, {"memory_limit_gb", "4"},
      {"aux_norm", "false"}, {"seed", "1"},           {"curlcurl_offset", "1"}, {"mesh_size", "width"},
      {"trace_exponent", "-3"}, {"curl_exponent", "-1"}, {"pressure_exponent", "3"}};
};

void apply_config_file(const std::string& path, Settings& s) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::string line;
  int lineno = 0;
  const std::regex kv(R"(^\s*([A-Za-z_]+)\s*=\s*(.*?)\s*$)");
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::smatch m;
    if (!std::regex_match(line, m, kv))
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = m[1];
    if (!s.values.count(key)) throw UsageError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    s.values[key] = m[2];
  }
}

int to_int(const Settings& s, const std::string& key) {
  const std::string& v = s.values.at(key);
  try {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw UsageError(key + ": expected an integer, got '" + v + "'");
}

double to_double(const Settings& s, const std::string& key) {
  const std::string& v = s.values.at(key);
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw UsageError(key + ": expected a number, got '" + v + "'");
}

bool to_bool(const Settings& s, const std::string& key) {
  const std::string& v = s.values.at(key);
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw UsageError(key + ": expected true or false, got '" + v + "'");
}

std::pair<int, int> parse_levels(const std::string& v) {
  const std::regex range(R"(^\s*(\d+)\s*(?:\.\.\s*(\d+))?\s*$)");
  std::smatch m;
  if (!std::regex_match(v, m, range)) throw UsageError("levels: expected a..b or a single level, got '" + v + "'");
  const int a = std::stoi(m[1]);
  const int b = m[2].matched ? std::stoi(m[2]) : a;
  if (a < 1 || b < a) throw UsageError("levels: range must be ascending and start at 1 or above");
  return {a, b};
}

StudyConfig to_config(const Settings& s) {
  StudyConfig c;
  c.k = to_int(s, "k");
  if (c.k < 1) throw UsageError("k must be >= 1");
  c.family = parse_mesh_family(s.values.at("mesh"));
  std::tie(c.level_min, c.level_max) =
      s.values.at("levels").empty() ? default_levels(c.family, c.k) : parse_levels(s.values.at("levels"));
  c.format = parse_table_format(s.values.at("format"));
  c.solver.tol = to_double(s, "tol");
  if (!(c.solver.tol > 0.0 && c.solver.tol <= 1e-6)) throw UsageError("tol must lie in (0, 1e-6]");
  c.solver.kind = parse_solver_kind(s.values.at("solver"));
  c.threads = to_int(s, "threads");
  if (c.threads < 0) throw UsageError("threads must be >= 0");
  c.dump_mesh = s.values.at("dump_mesh");
  c.dump_matrix = s.values.at("dump_matrix");
  const int diag = to_int(s, "tet_diagonal");
  if (diag < 0 || diag > 7) throw UsageError("tet_diagonal must lie in [0, 7]");
  c.tet_diagonal = static_cast<unsigned>(diag);
  c.memory_limit_bytes = to_double(s, "memory_limit_gb") * 1e9;
  c.with_aux_norm = to_bool(s, "aux_norm");
  c.scheme.curlcurl_offset = to_int(s, "curlcurl_offset");
  const std::string& rule = s.values.at("mesh_size");
  if (rule == "width") c.scheme.mesh_size = MeshSizeRule::Width;
  else if (rule == "diameter") c.scheme.mesh_size = MeshSizeRule::Diameter;
  else throw UsageError("mesh_size: expected width or diameter, got '" + rule + "'");
  c.scheme.trace_exponent = to_double(s, "trace_exponent");
  c.scheme.curl_exponent = to_double(s, "curl_exponent");
  c.scheme.pressure_exponent = to_double(s, "pressure_exponent");
  validate(c.scheme);
  return c;
}

void print_stats(const ConvergenceReport& r) {
  for (std::size_t i = 0; i < r.stats.size(); ++i) {
    const LevelStats& s = r.stats[i];
    std::fprintf(stderr,
                 "level %d: %lld elements, %lld free dofs, %lld nonzeros, %lld local classes, %s residual %.2e, "
                 "assemble %.2fs, solve %.2fs\n",
                 r.levels[i].level, static_cast<long long>(s.elements), static_cast<long long>(s.free_dofs),
                 static_cast<long long>(s.nonzeros), static_cast<long long>(s.local_classes), s.method.c_str(),
                 s.relative_residual, s.assemble_seconds, s.solve_seconds);
  }
}

int run_study_cmd(const StudyConfig& c, bool quiet) {
  const ConvergenceReport r = run_study(c);
  std::cout << render_table(r, c.format);
  if (!quiet) print_stats(r);
  return 0;
}

int run_solve_cmd(StudyConfig c, int level) {
  c.level_min = c.level_max = level;
  c.with_aux_norm = true;
  const ConvergenceReport r = run_study(c);
  const ErrorRecord& e = r.levels.front();
  std::printf("k=%d mesh=%s level=%d h=%.6g dofs=%lld\n", r.k, to_string(r.family).c_str(), e.level, e.h,
              static_cast<long long>(e.dofs));
  std::printf("  |Q_h u - u_h|    = %s\n", format_error(e.l2_error).c_str());
  std::printf("  |||Q_h u - u_h||| = %s\n", format_error(e.energy_error).c_str());
  std::printf("  |p_h|            = %s\n", format_error(e.p_norm).c_str());
  if (e.aux_norm) std::printf("  aux norm         = %s\n", format_error(*e.aux_norm).c_str());
  print_stats(r);
  return 0;
}

int run_verify_cmd(const StudyConfig& c, std::uint64_t seed) {
  bool ok = true;
  auto line = [&](bool pass, const std::string& what) {
    ok = ok && pass;
    std::printf("%s  %s\n", pass ? "PASS" : "FAIL", what.c_str());
  };
  char buf[256];
  for (MeshFamily fam : {MeshFamily::Hex, MeshFamily::Tet}) {
    const Mesh mesh = make_mesh(fam, 2, c.tet_diagonal);
    const CommutativitySummary s = commutativity_suite(mesh, c.k, 20, seed, c.threads, c.scheme);
    std::snprintf(buf, sizeof buf, "commutativity %s L2 k=%d: %lld checks, curlcurl %.2e, gradient %.2e",
                  to_string(fam).c_str(), c.k, static_cast<long long>(s.checks), s.max_curlcurl_rel,
                  s.max_gradient_rel);
    line(s.max_curlcurl_rel <= 1e-10 && s.max_gradient_rel <= 1e-10, buf);
  }
  for (auto [fam, level] : {std::pair{MeshFamily::Hex, 2}, std::pair{MeshFamily::Tet, 1}}) {
    const CheckOutcome p = patch_test(fam, level, c.k, seed, c);
    const double worst = std::max({p.errors.l2_error, p.errors.energy_error, p.errors.p_norm});
    std::snprintf(buf, sizeof buf, "patch test %s L%d k=%d: max error %.2e", to_string(fam).c_str(), level, c.k,
                  worst);
    line(worst <= 1e-8, buf);
    const CheckOutcome z = zero_data_test(fam, level, c.k, c);
    std::snprintf(buf, sizeof buf, "zero data %s L%d k=%d: |x| = %.2e", to_string(fam).c_str(), level, c.k,
                  z.solution_norm);
    line(z.solution_norm <= 1e-9, buf);
  }
  return ok ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak Galerkin solver for the quad-curl problem on the unit cube"};
  app.require_subcommand(1);
  Settings s;
  std::string config_file;
  bool quiet = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--k", s.values["k"], "polynomial degree (>= 1)");
    sub->add_option("--mesh", s.values["mesh"], "mesh family: hex or tet");
    sub->add_option("--tol", s.values["tol"], "relative residual target, in (0, 1e-6]");
    sub->add_option("--solver", s.values["solver"], "direct or krylov");
    sub->add_option("--threads", s.values["threads"], "worker threads (0: hardware concurrency)");
    sub->add_option("--tet-diagonal", s.values["tet_diagonal"], "cube corner of the shared Kuhn diagonal [0, 7]");
    sub->add_option("--memory-limit-gb", s.values["memory_limit_gb"], "refuse levels estimated above this");
    sub->add_option("--curlcurl-offset", s.values["curlcurl_offset"], "weak curl-curl in P_{k-offset}: 1 or 2");
    sub->add_option("--mesh-size", s.values["mesh_size"], "h_T in the stabilizers: width or diameter");
    sub->add_option("--trace-exponent", s.values["trace_exponent"], "power of h_T on the tangential trace jump");
    sub->add_option("--curl-exponent", s.values["curl_exponent"], "power of h_T on the tangential curl jump");
    sub->add_option("--pressure-exponent", s.values["pressure_exponent"], "power of h_T on the pressure jump");
    sub->add_option("--config", config_file, "file of key=value lines that override flags");
  };

  CLI::App* study = app.add_subcommand("study", "convergence study over a range of levels");
  add_common(study);
  study->add_option("--levels", s.values["levels"], "level range a..b (default depends on mesh and k)");
  study->add_option("--format", s.values["format"], "plain, csv or latex");
  study->add_option("--dump-mesh", s.values["dump_mesh"], "write each mesh; {level} is substituted");
  study->add_option("--dump-matrix", s.values["dump_matrix"], "write each free-dof matrix; {level} is substituted");
  study->add_flag("--quiet", quiet, "omit per-level statistics on stderr");

  CLI::App* solve = app.add_subcommand("solve", "single level with error printout");
  add_common(solve);
  solve->add_option("--level", s.values["level"], "mesh level");
  solve->add_option("--dump-mesh", s.values["dump_mesh"], "write the mesh");
  solve->add_option("--dump-matrix", s.values["dump_matrix"], "write the free-dof matrix");

  CLI::App* verify = app.add_subcommand("verify", "commutativity, patch and zero-data checks");
  add_common(verify);
  verify->add_option("--seed", s.values["seed"], "seed for random polynomials");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (!config_file.empty()) apply_config_file(config_file, s);
    const StudyConfig c = to_config(s);
    if (*study) return run_study_cmd(c, quiet);
    if (*solve) return run_solve_cmd(c, to_int(s, "level"));
    return run_verify_cmd(c, static_cast<std::uint64_t>(to_int(s, "seed")));
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ResourceError& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}
