#include "quadcurl/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace quadcurl {

MeshFamily parse_mesh_family(const std::string& name) {
  if (name == "hex") return MeshFamily::Hex;
  if (name == "tet") return MeshFamily::Tet;
  throw std::invalid_argument("unknown mesh family '" + name + "' (expected hex or tet)");
}

std::string to_string(MeshFamily family) { return family == MeshFamily::Hex ? "hex" : "tet"; }

TableFormat parse_table_format(const std::string& name) {
  if (name == "plain") return TableFormat::Plain;
  if (name == "csv") return TableFormat::Csv;
  if (name == "latex") return TableFormat::Latex;
  throw std::invalid_argument("unknown table format '" + name + "' (expected plain, csv or latex)");
}

Problem manufactured_problem() {
  Problem p;
  p.name = "manufactured";
  p.exact.u = [](const Vec3& v) -> Vec3 {
    const double x = v[0], y = v[1], z = v[2];
    return {-2 * x * x * y * y * z, 2 * x * x * y * y * y * z, -x * y * y * z * z * (3 * x - 2)};
  };
  p.exact.curl_u = [](const Vec3& v) -> Vec3 {
    const double x = v[0], y = v[1], z = v[2];
    return {-2 * x * x * y * y * y - 6 * x * x * y * z * z + 4 * x * y * z * z,
            -2 * x * x * y * y + 6 * x * y * y * z * z - 2 * y * y * z * z,
            4 * x * x * y * z + 4 * x * y * y * y * z};
  };
  p.f = [](const Vec3& v) -> Vec3 {
    const double x = v[0], y = v[1], z = v[2];
    return {-16 * z, 48 * y * z, -24 * x * x + 16 * x - 24 * y * y - 24 * z * z};
  };
  const VectorField u = p.exact.u, cu = p.exact.curl_u;
  p.boundary.g1 = [u](const Vec3& x, const Vec3& n) -> Vec3 { return u(x).cross(n); };
  p.boundary.g2 = [cu](const Vec3& x, const Vec3& n) -> Vec3 { return cu(x).cross(n); };
  return p;
}

Problem polynomial_problem(const VectorPolynomial& u, std::string name) {
  const VectorPolynomial cu = u.curl();
  const VectorPolynomial f = cu.curl().curl().curl();
  Problem p;
  p.name = std::move(name);
  p.exact.u = u.as_field();
  p.exact.curl_u = cu.as_field();
  p.f = f.as_field();
  p.boundary.g1 = [u](const Vec3& x, const Vec3& n) -> Vec3 { return u(x).cross(n); };
  p.boundary.g2 = [cu](const Vec3& x, const Vec3& n) -> Vec3 { return cu(x).cross(n); };
  return p;
}

Problem zero_problem() {
  Problem p;
  p.name = "zero";
  p.exact.u = [](const Vec3&) -> Vec3 { return Vec3::Zero(); };
  p.exact.curl_u = p.exact.u;
  p.f = p.exact.u;
  return p;
}

std::pair<int, int> default_levels(MeshFamily family, int k) {
  if (k < 1) throw std::invalid_argument("polynomial degree k must be >= 1");
  if (family == MeshFamily::Hex) return {1, k >= 5 ? 3 : 4};
  return {1, k <= 2 ? 4 : 3};
}

/// Peak bytes per estimated nonzero: a fixed part for the assembled matrix
/// and its scaled copy, plus a part that grows with the E^{1/3} fill of the
/// nested-dissection LDL^T factor. Bounds the measured peaks of hex k = 2, 3
/// level 4, tet k = 2 level 4 and tet k = 3 level 3 with about 5% to spare.
constexpr double kBytesPerNonzero = 36.0;
constexpr double kBytesPerNonzeroPerCubeRoot = 4.0;

SizeEstimate estimate_size(MeshFamily family, int level, int k) {
  if (level < 1 || level > 12) throw std::invalid_argument("level must lie in [1, 12]");
  if (k < 1) throw std::invalid_argument("polynomial degree k must be >= 1");
  const Index n = Index{1} << (level - 1);
  SizeEstimate s;
  int faces_per_element = 0;
  if (family == MeshFamily::Hex) {
    s.elements = n * n * n;
    s.faces = 3 * n * n * (n + 1);
    s.boundary_faces = 6 * n * n;
    faces_per_element = 6;
  } else {
    s.elements = 6 * n * n * n;
    s.faces = 12 * n * n * n + 6 * n * n;
    s.boundary_faces = 12 * n * n;
    faces_per_element = 4;
  }
  const Index nc = poly_dim_3d(k), nf = poly_dim_2d(k), nfc = poly_dim_2d(k - 1);
  const Index per_face = 2 * (nf + nfc) + nf;
  s.free_dofs = s.elements * 4 * nc + (s.faces - s.boundary_faces) * per_face;
  // Element blocks with m free faces: the velocity block is full, p0 couples
  // with everything in the element, and pb on a face couples only with
  // itself, p0 and u0. Bounding m^2 by (faces per element) * m over-counts
  // elements that touch the boundary; the self blocks of interior faces are
  // shared by two elements.
  const Index fv = 2 * (nf + nfc);
  const Index interior_faces = s.faces - s.boundary_faces;
  const Index sum_m = 2 * interior_faces, sum_m2 = faces_per_element * sum_m;
  const Index u0 = 3 * nc;
  s.nonzeros = s.elements * (u0 * u0 + 2 * u0 * nc + nc * nc) + sum_m * (2 * u0 * fv + 2 * u0 * nf + 2 * nc * nf + nf * nf) +
               sum_m2 * fv * fv - interior_faces * (fv * fv + nf * nf);
  s.bytes = static_cast<double>(s.nonzeros) *
            (kBytesPerNonzero + kBytesPerNonzeroPerCubeRoot * std::cbrt(static_cast<double>(s.elements)));
  return s;
}

Mesh make_mesh(MeshFamily family, int level, unsigned tet_diagonal) {
  return family == MeshFamily::Hex ? generate_hex_mesh(level) : generate_tet_mesh(level, tet_diagonal);
}

namespace {

std::string with_level(const std::string& path, int level) {
  std::string out = path;
  const std::string key = "{level}";
  for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos))
    out.replace(pos, key.size(), std::to_string(level));
  return out;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class E>
[[noreturn]] void rethrow_as(const E&, const std::string& msg) {
  throw E(msg);
}

[[noreturn]] void rethrow_with_context(const std::exception& e, const std::string& ctx) {
  const std::string msg = ctx + ": " + e.what();
  if (auto* x = dynamic_cast<const ResourceError*>(&e)) rethrow_as(*x, msg);
  if (auto* x = dynamic_cast<const SolverError*>(&e)) rethrow_as(*x, msg);
  if (auto* x = dynamic_cast<const DataError*>(&e)) rethrow_as(*x, msg);
  if (auto* x = dynamic_cast<const ConditioningError*>(&e)) rethrow_as(*x, msg);
  if (auto* x = dynamic_cast<const PreconditionError*>(&e)) rethrow_as(*x, msg);
  if (auto* x = dynamic_cast<const GeometryError*>(&e)) rethrow_as(*x, msg);
  if (auto* x = dynamic_cast<const Error*>(&e)) rethrow_as(*x, msg);
  if (auto* x = dynamic_cast<const std::invalid_argument*>(&e)) rethrow_as(*x, msg);
  if (auto* x = dynamic_cast<const std::length_error*>(&e)) rethrow_as(*x, msg);
  if (dynamic_cast<const std::bad_alloc*>(&e)) throw ResourceError(ctx + ": out of memory");
  throw std::runtime_error(msg);
}

}  // namespace

LevelOutcome solve_level(const Mesh& mesh, int k, const Problem& problem, const StudyConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const Discretization disc(mesh, k, config.threads, config.scheme);
  const SaddleSystem sys = assemble_saddle(disc, problem.f, problem.boundary);
  if (!config.dump_matrix.empty()) {
    auto out = open_output(with_level(config.dump_matrix, mesh.level()));
    write_coordinate(out, sys.matrix);
  }
  LevelOutcome res;
  res.stats.assemble_seconds = seconds_since(t0);

  const SolveReport rep = solve_saddle(sys, config.solver);
  res.stats.solve_seconds = rep.wall_seconds;
  res.stats.elements = mesh.num_elements();
  res.stats.free_dofs = sys.size();
  res.stats.nonzeros = sys.matrix.nonZeros();
  res.stats.local_classes = disc.num_classes();
  res.stats.relative_residual = rep.relative_residual;
  res.stats.method = rep.method;

  res.solution = sys.expand(rep.solution);
  res.projected = project_exact(disc, problem.exact);
  const Vec diff = res.projected - res.solution;
  const L2Errors l2 = l2_errors(disc, res.solution, res.projected);

  ErrorRecord& r = res.errors;
  r.level = mesh.level();
  r.h = mesh.h();
  r.dofs = sys.size();
  r.l2_error = l2.l2_error;
  r.energy_error = energy_norm(disc, diff);
  r.p_norm = l2.p_norm;
  if (config.with_aux_norm) r.aux_norm = aux_norm_1(disc, diff);
  return res;
}

ConvergenceReport run_study(const StudyConfig& config, const Problem& problem) {
  if (config.k < 1) throw std::invalid_argument("polynomial degree k must be >= 1");
  if (config.level_min < 1 || config.level_max < config.level_min)
    throw std::invalid_argument("level range must be ascending and start at 1 or above");
  for (int level = config.level_min; level <= config.level_max; ++level) {
    const SizeEstimate est = estimate_size(config.family, level, config.k);
    if (est.bytes > config.memory_limit_bytes) {
      char buf[256];
      std::snprintf(buf, sizeof buf,
                    "level %d (%s, k=%d) refused: estimated %.2f GB for %lld free dofs and %lld nonzeros exceeds the "
                    "%.2f GB limit",
                    level, to_string(config.family).c_str(), config.k, est.bytes / 1e9,
                    static_cast<long long>(est.free_dofs), static_cast<long long>(est.nonzeros),
                    config.memory_limit_bytes / 1e9);
      throw ResourceError(buf);
    }
  }

  ConvergenceReport report;
  report.k = config.k;
  report.family = config.family;
  report.problem = problem.name;
  for (int level = config.level_min; level <= config.level_max; ++level) {
    try {
      const Mesh mesh = make_mesh(config.family, level, config.tet_diagonal);
      if (!config.dump_mesh.empty()) {
        auto out = open_output(with_level(config.dump_mesh, level));
        write_mesh(out, mesh);
      }
      LevelOutcome res = solve_level(mesh, config.k, problem, config);
      report.levels.push_back(res.errors);
      report.stats.push_back(res.stats);
    } catch (const std::exception& e) {
      rethrow_with_context(e, "level " + std::to_string(level));
    }
  }
  report.rates = convergence_rates(report.levels);
  return report;
}

ConvergenceReport run_study(const StudyConfig& config) { return run_study(config, manufactured_problem()); }

std::string format_error(double value, int digits) {
  if (digits < 1 || digits > 17) throw std::invalid_argument("digits must lie in [1, 17]");
  if (std::isnan(value)) return "NaN";
  if (std::isinf(value)) return value > 0 ? "Inf" : "-Inf";
  const char* sign = value < 0 ? "-" : "";
  double a = std::fabs(value);
  int exponent = 0;
  if (a > 0.0) {
    exponent = static_cast<int>(std::floor(std::log10(a))) + 1;
    double m = a / std::pow(10.0, exponent);
    // Correct log10 roundoff and rounding up to 1.0.
    char probe[64];
    std::snprintf(probe, sizeof probe, "%.*f", digits, m);
    if (std::atof(probe) >= 1.0) ++exponent;
    else if (std::atof(probe) < 0.1) --exponent;
  }
  const double m = a / std::pow(10.0, exponent);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%.*fE%c%02d", sign, digits, m, exponent < 0 ? '-' : '+', std::abs(exponent));
  return buf;
}

namespace {

std::string format_rate(const std::optional<double>& r) {
  if (!r) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", *r == 0.0 ? 0.0 : *r);
  return buf;
}

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string full(const std::optional<double>& v) { return v ? full(*v) : std::string(); }

const char* kCsvHeader = "k,mesh,problem,level,h,dofs,l2_error,l2_rate,energy_error,energy_rate,p_norm,p_rate,aux_norm";

std::string render_plain(const ConvergenceReport& r) {
  std::ostringstream out;
  out << "k=" << r.k << " mesh=" << to_string(r.family) << " problem=" << r.problem << '\n';
  char buf[256];
  std::snprintf(buf, sizeof buf, "%5s %9s %12s %5s %12s %5s %12s %5s\n", "level", "dofs", "|Qu-uh|", "rate",
                "|||Qu-uh|||", "rate", "|ph|", "rate");
  out << buf;
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const ErrorRecord& e = r.levels[i];
    const RateRecord& q = r.rates[i];
    std::snprintf(buf, sizeof buf, "%5d %9lld %12s %5s %12s %5s %12s %5s\n", e.level,
                  static_cast<long long>(e.dofs), format_error(e.l2_error).c_str(), format_rate(q.l2).c_str(),
                  format_error(e.energy_error).c_str(), format_rate(q.energy).c_str(),
                  format_error(e.p_norm).c_str(), format_rate(q.p).c_str());
    out << buf;
  }
  return out.str();
}

std::string render_latex(const ConvergenceReport& r) {
  std::ostringstream out;
  out << "% k=" << r.k << " mesh=" << to_string(r.family) << " problem=" << r.problem << '\n';
  out << "\\begin{tabular}{c|cc|cc|cc}\n\\hline\n";
  out << "level & $\\|Q_hu-u_h\\|$ & rate & $|||Q_hu-u_h|||$ & rate & $\\|p_h\\|$ & rate \\\\\n\\hline\n";
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const ErrorRecord& e = r.levels[i];
    const RateRecord& q = r.rates[i];
    out << e.level << " & " << format_error(e.l2_error) << " & " << format_rate(q.l2) << " & "
        << format_error(e.energy_error) << " & " << format_rate(q.energy) << " & " << format_error(e.p_norm)
        << " & " << format_rate(q.p) << " \\\\\n";
  }
  out << "\\hline\n\\end{tabular}\n";
  return out.str();
}

std::string render_csv(const ConvergenceReport& r) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const ErrorRecord& e = r.levels[i];
    const RateRecord& q = r.rates[i];
    out << r.k << ',' << to_string(r.family) << ',' << r.problem << ',' << e.level << ',' << full(e.h) << ','
        << e.dofs << ',' << full(e.l2_error) << ',' << full(q.l2) << ',' << full(e.energy_error) << ','
        << full(q.energy) << ',' << full(e.p_norm) << ',' << full(q.p) << ',' << full(e.aux_norm) << '\n';
  }
  return out.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("csv: bad number '" + s + "'");
  return v;
}

std::optional<double> to_optional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return to_double(s);
}

}  // namespace

std::string render_table(const ConvergenceReport& report, TableFormat format) {
  if (report.levels.empty()) throw std::invalid_argument("render_table: empty report");
  if (report.rates.size() != report.levels.size())
    throw std::invalid_argument("render_table: rates and levels differ in length");
  switch (format) {
    case TableFormat::Plain: return render_plain(report);
    case TableFormat::Latex: return render_latex(report);
    case TableFormat::Csv: return render_csv(report);
  }
  throw std::invalid_argument("render_table: unknown format");
}

ConvergenceReport parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::invalid_argument("csv: missing or unknown header");
  ConvergenceReport r;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split(line, ',');
    if (c.size() != 13) throw std::invalid_argument("csv: expected 13 fields in '" + line + "'");
    const int k = std::stoi(c[0]);
    const MeshFamily fam = parse_mesh_family(c[1]);
    if (first) {
      r.k = k;
      r.family = fam;
      r.problem = c[2];
      first = false;
    } else if (k != r.k || fam != r.family || c[2] != r.problem) {
      throw std::invalid_argument("csv: rows mix different configurations");
    }
    ErrorRecord e;
    e.level = std::stoi(c[3]);
    e.h = to_double(c[4]);
    e.dofs = std::stoll(c[5]);
    e.l2_error = to_double(c[6]);
    e.energy_error = to_double(c[8]);
    e.p_norm = to_double(c[10]);
    e.aux_norm = to_optional(c[12]);
    r.levels.push_back(e);
    r.rates.push_back({to_optional(c[7]), to_optional(c[9]), to_optional(c[11])});
  }
  if (r.levels.empty()) throw std::invalid_argument("csv: no data rows");
  return r;
}

}  // namespace quadcurl
