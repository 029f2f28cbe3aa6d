#pragma once

// Command-line front end. run_cli is the whole program; tools/kreinx.cpp only
// forwards argv, which keeps every command testable in-process.
//
// Exit codes: 0 success, 2 usage/config/validation failure, 3 numeric failure.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "kreinx/config.hpp"
#include "kreinx/csv.hpp"
#include "kreinx/errors.hpp"
#include "kreinx/green.hpp"
#include "kreinx/krein_core.hpp"
#include "kreinx/matrix_oracle.hpp"
#include "kreinx/spectral.hpp"
#include "kreinx/verification.hpp"

namespace kreinx::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr std::uint64_t kDefaultSeed = 42;

inline bool is_config_error(ErrorKind k) {
  return k == ErrorKind::SchemaError || k == ErrorKind::InvariantError;
}

/// Seed precedence: --seed, then the config, then KREINX_SEED, then 42.
inline std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> from_config) {
  if (flag) return *flag;
  if (from_config) return *from_config;
  if (const char* env = std::getenv("KREINX_SEED")) {
    try {
      std::size_t used = 0;
      const std::string text(env);
      const unsigned long long v = std::stoull(text, &used);
      if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorKind::SchemaError, "KREINX_SEED must be an unsigned integer");
  }
  return kDefaultSeed;
}

inline ProblemConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::SchemaError, "cannot read config " + path);
  std::ostringstream text;
  text << f.rdbuf();
  return parse_config(text.str());
}

inline Complex parse_z(const std::vector<double>& parts) {
  return parts.size() == 2 ? Complex(parts[0], parts[1]) : Complex(parts.at(0), 0.0);
}

/// Table to the output file, or to `out` when no path is given.
inline void emit(const CsvTable& table, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") out << table.str();
  else table.write(path);
}

inline std::ostream& summary_stream(const std::string& path, std::ostream& out, std::ostream& err) {
  return path.empty() || path == "-" ? err : out;
}

struct VerifyArgs {
  std::optional<std::uint64_t> seed;
  int models = 100;
  double tol_matrix = 1e-11;
  double tol_quad = 1e-6;
  std::string output;
};

inline int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  SuiteOptions opt;
  opt.seed = resolve_seed(args.seed, std::nullopt);
  opt.models = args.models;
  opt.tol_matrix = args.tol_matrix;
  opt.tol_quad = args.tol_quad;
  const VerificationReport report = run_suite(opt);

  CsvTable table({"check", "max_residual", "tolerance", "pass", "count", "note"});
  for (const CheckResult& c : report.checks())
    table.add_row({c.name, c.max_residual, c.tolerance, std::string(c.pass ? "true" : "false"),
                   static_cast<std::int64_t>(c.count), c.note});
  emit(table, args.output, out);
  const auto checks = report.checks();
  const auto failed = std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.pass; });
  summary_stream(args.output, out, err) << "verify seed=" << opt.seed << ": " << (checks.size() - failed) << "/"
                                        << checks.size() << " checks pass (" << report.summary << ")\n";
  return report.pass() ? kExitOk : kExitNumeric;
}

struct SpectrumArgs {
  std::string config;
  std::optional<double> a, b;
  std::optional<int> grid;
  std::string output;
};

inline int cmd_spectrum(const SpectrumArgs& args, std::ostream& out, std::ostream& err) {
  ProblemConfig cfg = load_config(args.config);
  if (args.a || args.b || args.grid) {
    ScanConfig scan = cfg.scan.value_or(ScanConfig{});
    if (args.a) scan.a = *args.a;
    if (args.b) scan.b = *args.b;
    if (args.grid) scan.grid = *args.grid;
    cfg.scan = scan;
    // Overrides go through the same validation as the file.
    cfg = parse_config(serialize_config(cfg));
  }
  if (!cfg.scan) throw Error(ErrorKind::SchemaError, "spectrum needs a scan interval (config 'scan' or --a/--b)");
  const ExtensionProblem problem = build_problem(cfg);
  const SpectrumReport report = scan_spectrum(problem, cfg.scan->a, cfg.scan->b, {cfg.scan->grid});

  const Index n = problem.charge_dim();
  std::vector<std::string> columns{"root_index", "z0", "energy", "multiplicity", "residual"};
  for (Index i = 1; i <= n; ++i) columns.push_back("Q_re_" + std::to_string(i));
  for (Index i = 1; i <= n; ++i) columns.push_back("Q_im_" + std::to_string(i));
  CsvTable table(columns);
  std::int64_t index = 0;
  for (const SpectralRoot& r : report.roots) {
    std::vector<CsvCell> row{index++, r.z0, r.energy(), static_cast<std::int64_t>(r.multiplicity), r.residual};
    for (Index i = 0; i < n; ++i) row.push_back(r.charge(i).real());
    for (Index i = 0; i < n; ++i) row.push_back(r.charge(i).imag());
    table.add_row(std::move(row));
  }
  emit(table, args.output, out);
  for (const auto& w : report.diagnostics.warnings) err << "warning: " << w << "\n";
  auto& summary = summary_stream(args.output, out, err);
  if (report.roots.empty()) {
    summary << "spectrum: no sign change bracketed on [" << format_double(cfg.scan->a) << ", "
            << format_double(cfg.scan->b) << "] with grid " << cfg.scan->grid << "\n";
    return kExitNumeric;
  }
  summary << "spectrum: " << report.roots.size() << " root(s) on [" << format_double(cfg.scan->a) << ", "
          << format_double(cfg.scan->b) << "], lowest z0 = " << format_double(report.roots.front().z0) << "\n";
  return kExitOk;
}

struct ResolventArgs {
  std::string config;
  std::vector<double> z;
  std::string output;
};

/// Theta + Gamma(z) and its inverse, the finite-rank core of the perturbed
/// resolvent, entry by entry.
inline int cmd_resolvent(const ResolventArgs& args, std::ostream& out, std::ostream& err) {
  const ProblemConfig cfg = load_config(args.config);
  const ExtensionProblem problem = build_problem(cfg);
  const Complex z = parse_z(args.z);
  const CMatrix pencil = gamma_theta(problem, z);
  Eigen::JacobiSVD<CMatrix> svd(pencil, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  const double scale = spectral_norm(problem.theta().entries()) + spectral_norm(CMatrix(pencil - problem.theta().entries()));
  if (s(s.size() - 1) <= problem.tolerances().linear * scale)
    throw Error(ErrorKind::SingularPencil, "Theta + Gamma(z) is singular at z = " + format_complex(z));
  const CMatrix inverse = svd.solve(CMatrix::Identity(pencil.rows(), pencil.cols()));

  CsvTable table({"row", "col", "pencil_re", "pencil_im", "inverse_re", "inverse_im"});
  for (Index r = 0; r < pencil.rows(); ++r)
    for (Index c = 0; c < pencil.cols(); ++c)
      table.add_row({static_cast<std::int64_t>(r), static_cast<std::int64_t>(c), pencil(r, c).real(),
                     pencil(r, c).imag(), inverse(r, c).real(), inverse(r, c).imag()});
  emit(table, args.output, out);
  summary_stream(args.output, out, err) << "resolvent at z = " << format_complex(z)
                                        << ": smallest singular value of the pencil " << format_double(s(s.size() - 1))
                                        << "\n";
  return kExitOk;
}

struct GreenArgs {
  int dim = 3;
  std::vector<double> z{1.0};
  double r_min = 0.25;
  double r_max = 4.0;
  int steps = 16;
  std::string output;
};

inline int cmd_green(const GreenArgs& args, std::ostream& out, std::ostream& err) {
  if (args.steps < 1 || !(args.r_min > 0.0) || !(args.r_max >= args.r_min))
    throw Error(ErrorKind::SchemaError, "green needs 0 < r-min <= r-max and steps >= 1");
  const LaplacianKernel kernel(args.dim);
  const Complex z = parse_z(args.z);
  const Complex diag = kernel.renormalized_diagonal(z);
  CsvTable table({"r", "g0", "gz_re", "gz_im", "diagonal_re", "diagonal_im"});
  for (int k = 0; k < args.steps; ++k) {
    const double r = args.steps == 1 ? args.r_min
                                     : args.r_min + (args.r_max - args.r_min) * k / (args.steps - 1);
    const Complex g = kernel.gz(r, z);
    table.add_row({r, kernel.g0(r), g.real(), g.imag(), diag.real(), diag.imag()});
  }
  emit(table, args.output, out);
  summary_stream(args.output, out, err) << "green dim=" << args.dim << " z=" << format_complex(z) << ": "
                                        << args.steps << " rows\n";
  return kExitOk;
}

struct OracleArgs {
  std::optional<std::uint64_t> seed;
  std::optional<int> n;
  std::optional<int> charge;
  std::string output;
  std::string emit_config;
};

/// Random matrix system: eigenvalues of the additive oracle against the
/// Krein pencil poles.
inline int cmd_oracle(const OracleArgs& args, std::ostream& out, std::ostream& err) {
  const std::uint64_t seed = resolve_seed(args.seed, std::nullopt);
  Rng rng(seed);
  std::optional<RandomSystem> sys;
  if (args.n || args.charge) {
    const Index n = args.n.value_or(6);
    const Index charge = args.charge.value_or(1);
    if (n < 1 || charge < 1 || charge > n) throw Error(ErrorKind::SchemaError, "oracle needs 1 <= charge <= n");
    MatrixModel model = random_model(rng, n, charge);
    sys.emplace(RandomSystem{std::move(model), random_theta(rng, charge)});
  } else {
    sys.emplace(random_system(rng));
  }
  if (!args.emit_config.empty()) {
    ProblemConfig cfg;
    cfg.backend = "matrix";
    cfg.a = sys->model.a();
    cfg.tau = sys->model.tau();
    cfg.theta = sys->theta.entries();
    cfg.seed = seed;
    std::ofstream f(args.emit_config, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::IoError, "cannot open " + args.emit_config);
    f << serialize_config(cfg);
  }

  const std::vector<double> direct = direct_eigs(sys->model, sys->theta);
  const ExtensionProblem problem(std::make_shared<MatrixEvaluator>(sys->model), sys->theta);
  const std::vector<SpectralRoot> poles = matrix_poles(problem, sys->model);

  CsvTable table({"index", "oracle_eigenvalue", "krein_pole", "abs_difference"});
  double worst = 0.0;
  const std::size_t common = std::min(direct.size(), poles.size());
  for (std::size_t i = 0; i < common; ++i) {
    const double diff = std::abs(direct[i] - poles[i].z0);
    worst = std::max(worst, diff / std::max(1.0, std::abs(direct[i])));
    table.add_row({static_cast<std::int64_t>(i), direct[i], poles[i].z0, diff});
  }
  emit(table, args.output, out);
  auto& summary = summary_stream(args.output, out, err);
  summary << "oracle seed=" << seed << " n=" << sys->model.n() << " N=" << sys->model.charge_dim() << ": "
          << direct.size() << " oracle eigenvalues, " << poles.size() << " Krein poles, max relative difference "
          << format_double(worst) << "\n";
  return direct.size() == poles.size() && worst <= 1e-9 ? kExitOk : kExitNumeric;
}

inline int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"kreinx: Krein-type singular perturbations", "kreinx"};
  app.require_subcommand(1);

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "run the identity and oracle suite on seeded random models");
  v->add_option("--seed", verify.seed, "64-bit seed (default: KREINX_SEED or 42)");
  v->add_option("--models", verify.models, "number of random matrix models")->check(CLI::NonNegativeNumber);
  v->add_option("--tol-matrix", verify.tol_matrix, "relative tolerance for matrix-backend checks");
  v->add_option("--tol-quad", verify.tol_quad, "tolerance for quadrature-backed checks");
  v->add_option("-o,--output", verify.output, "CSV output path (default stdout)");

  SpectrumArgs spectrum;
  auto* s = app.add_subcommand("spectrum", "locate real poles on the configured scan interval");
  s->add_option("-c,--config", spectrum.config, "problem config (JSON)")->required();
  s->add_option("--a", spectrum.a, "scan interval start");
  s->add_option("--b", spectrum.b, "scan interval end");
  s->add_option("--grid", spectrum.grid, "scan grid size");
  s->add_option("-o,--output", spectrum.output, "CSV output path (default stdout)");

  ResolventArgs resolvent;
  auto* r = app.add_subcommand("resolvent", "tabulate Theta + Gamma(z) and its inverse");
  r->add_option("-c,--config", resolvent.config, "problem config (JSON)")->required();
  r->add_option("--z", resolvent.z, "spectral parameter: re [im]")->required()->expected(1, 2);
  r->add_option("-o,--output", resolvent.output, "CSV output path (default stdout)");

  GreenArgs green;
  auto* g = app.add_subcommand("green", "tabulate G, G_z and the renormalized diagonal");
  g->add_option("--dim", green.dim, "dimension 1, 2 or 3")->check(CLI::Range(1, 3));
  g->add_option("--z", green.z, "spectral parameter: re [im]")->expected(1, 2);
  g->add_option("--r-min", green.r_min, "first radius");
  g->add_option("--r-max", green.r_max, "last radius");
  g->add_option("--steps", green.steps, "number of radii");
  g->add_option("-o,--output", green.output, "CSV output path (default stdout)");

  OracleArgs oracle;
  auto* o = app.add_subcommand("oracle", "compare Krein poles with the additive oracle on a random model");
  o->add_option("--seed", oracle.seed, "64-bit seed (default: KREINX_SEED or 42)");
  o->add_option("--n", oracle.n, "matrix size (random when omitted)");
  o->add_option("--charge", oracle.charge, "trace rank N (random when omitted)");
  o->add_option("-o,--output", oracle.output, "CSV output path (default stdout)");
  o->add_option("--emit-config", oracle.emit_config, "also write the drawn model as a config file");

  try {
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (v->parsed()) return cmd_verify(verify, out, err);
    if (s->parsed()) return cmd_spectrum(spectrum, out, err);
    if (r->parsed()) return cmd_resolvent(resolvent, out, err);
    if (g->parsed()) return cmd_green(green, out, err);
    if (o->parsed()) return cmd_oracle(oracle, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_config_error(e.kind()) ? kExitConfig : kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitConfig;
}

}  // namespace kreinx::cli
