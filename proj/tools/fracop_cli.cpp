#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fracop/block3.hpp"
#include "fracop/closed_forms.hpp"
#include "fracop/core.hpp"
#include "fracop/errors.hpp"
#include "fracop/io.hpp"
#include "fracop/oracle.hpp"
#include "fracop/pde_lab.hpp"
#include "fracop/quadrature.hpp"

namespace {

// Family names come from the command line, so a bad one is a usage error.
fracop::Family family_arg(const std::string& name) {
  try {
    return fracop::parse_family(name);
  } catch (const fracop::Error& e) {
    fracop::fail(fracop::ErrorKind::kParse, e.what());
  }
}

using fracop::BlockOperator3;
using fracop::ErrorKind;
using fracop::Matrix;
using fracop::OperatorMatrix;
using fracop::io::Json;

constexpr int kExitOk = 0;
constexpr int kExitMath = 2;
constexpr int kExitIo = 3;
constexpr int kExitTolerance = 4;

constexpr double kPi = std::numbers::pi;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse:
    case ErrorKind::kIo: return kExitIo;
    case ErrorKind::kNotConverged:
    case ErrorKind::kAdjugateFormulaFailed: return kExitTolerance;
    default: return kExitMath;
  }
}

struct Global {
  double rel_tol = 1e-8;
  double residual_tol = 1e-8;
  double commutation_tol = -1.0;
  std::string manifest;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

fracop::QuadratureScheme scheme_from(const Global& g) {
  fracop::QuadratureScheme s;
  s.rel_tol = g.rel_tol;
  s.validate();
  return s;
}

fracop::AdjugateOptions adjugate_from(const Global& g) {
  fracop::AdjugateOptions a;
  a.residual_tol = g.residual_tol;
  a.commutation_tol = g.commutation_tol;
  return a;
}

std::map<std::string, double> tolerances_of(const Global& g) {
  return {{"rel_tol", g.rel_tol}, {"residual_tol", g.residual_tol}, {"commutation_tol", g.commutation_tol}};
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    fracop::io::write_text_file(path, text);
  }
}

void finish_manifest(const Global& g, const std::string& path, fracop::io::RunManifest m, const Timer& timer) {
  if (path.empty()) return;
  m.tolerances = tolerances_of(g);
  m.wall_time = timer.seconds();
  m.timestamp = fracop::io::utc_timestamp();
  fracop::io::write_json_file(path, fracop::io::manifest_to_json(m));
}

std::vector<std::string> outputs_of(std::initializer_list<std::string> paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) {
    if (!p.empty() && p != "-") out.push_back(p);
  }
  return out;
}

// Either a plain matrix or a block operator read from one JSON file.
struct Operand {
  OperatorMatrix matrix;
  std::optional<BlockOperator3> block;
};

Operand read_operand(const std::string& path) {
  const Json j = fracop::io::read_json_file(path);
  Operand op;
  if (fracop::io::is_block_json(j)) {
    op.block = fracop::io::block_from_json(j);
    op.matrix = op.block->assembled();
  } else {
    op.matrix = fracop::io::matrix_from_json(j);
  }
  return op;
}

// ---------------------------------------------------------------- certify

struct CertifyArgs {
  std::string input;
  std::string out;
  int points = 64;
  double s_min = 1e-4;
  double s_max_factor = 1e4;
  bool strict = false;
};

int run_certify(const Global& g, const CertifyArgs& a) {
  Timer timer;
  const Operand op = read_operand(a.input);
  fracop::GridSpec grid;
  grid.points = a.points;
  grid.s_min = a.s_min;
  grid.s_max_factor = a.s_max_factor;
  grid.prescreen = a.strict ? fracop::PrescreenMode::kHalfPlane : fracop::PrescreenMode::kNegativeAxis;
  const auto cert = fracop::certify_positive(op.matrix, grid);

  Json j;
  j["M"] = cert.m;
  j["theta_M"] = cert.theta_m;
  j["r0"] = cert.r0;
  j["sup_bound"] = cert.sup_bound;
  j["grid"] = cert.s_grid;
  emit(a.out, j.dump(2) + "\n");

  fracop::io::RunManifest m;
  m.command = "certify";
  m.inputs = {a.input};
  m.outputs = outputs_of({a.out});
  finish_manifest(g, g.manifest, m, timer);
  return kExitOk;
}

// ---------------------------------------------------------------- fracpow

struct FracpowArgs {
  std::string input;
  double alpha = 0.5;
  std::vector<std::string> routes;
  bool positive = false;
  bool allow_alpha_1 = false;
  std::string out;
  std::string report;
  double agree_tol = 1e-6;
};

struct RouteResult {
  std::string route;
  OperatorMatrix value;
  int nodes = 0;
};

RouteResult run_route(const Global& g, const FracpowArgs& a, const Operand& op, const std::string& route) {
  RouteResult r;
  r.route = route;
  const double exponent = a.positive ? a.alpha : -a.alpha;
  if (route == "oracle") {
    r.value = fracop::oracle_power(op.matrix, exponent).value;
  } else if (route == "quad-e1" || route.rfind("quad-e2:", 0) == 0) {
    if (a.positive) fracop::fail(ErrorKind::kInvalidParams, "quadrature routes compute negative powers only");
    fracop::Quadrature<OperatorMatrix> q;
    if (route == "quad-e1") {
      q = fracop::balakrishnan_e1(op.matrix, a.alpha, scheme_from(g));
    } else {
      int m = 0;
      try {
        m = std::stoi(route.substr(8));
      } catch (const std::exception&) {
        fracop::fail(ErrorKind::kParse, "route '" + route + "' needs an integer m");
      }
      q = fracop::balakrishnan_e2(op.matrix, a.alpha, m, scheme_from(g));
    }
    r.value = q.value;
    r.nodes = q.nodes;
  } else if (route.rfind("closed:", 0) == 0) {
    if (!op.block) fracop::fail(ErrorKind::kInvalidParams, "closed-form routes need a block JSON input");
    fracop::ClosedFormOptions options;
    options.allow_alpha_eq_1 = a.allow_alpha_1;
    options.commutation_tol = g.commutation_tol;
    const auto family = family_arg(route.substr(7));
    const auto sign = a.positive ? fracop::Sign::kPositive : fracop::Sign::kNegative;
    r.value = fracop::family_fracpow(*op.block, family, a.alpha, sign, options).assembled();
  } else {
    fracop::fail(ErrorKind::kParse, "unknown route '" + route + "'");
  }
  return r;
}

int run_fracpow(const Global& g, FracpowArgs a) {
  Timer timer;
  if (a.routes.empty()) a.routes = {"oracle"};
  const Operand op = read_operand(a.input);

  std::vector<RouteResult> results;
  for (const auto& route : a.routes) results.push_back(run_route(g, a, op, route));

  Json report;
  report["alpha"] = a.alpha;
  report["sign"] = a.positive ? "+" : "-";
  Json routes = Json::array();
  for (const auto& r : results) routes.push_back({{"route", r.route}, {"nodes", r.nodes}});
  report["routes"] = std::move(routes);
  Json pairs = Json::array();
  double worst = 0.0;
  fracop::io::RunManifest m;
  for (std::size_t i = 0; i < results.size(); ++i) {
    for (std::size_t k = i + 1; k < results.size(); ++k) {
      const double err = fracop::relative_error(results[i].value, results[k].value);
      worst = std::max(worst, err);
      pairs.push_back({{"a", results[i].route}, {"b", results[k].route}, {"relative_error", err}});
      m.checks.push_back({results[i].route + " vs " + results[k].route, err, a.agree_tol, err <= a.agree_tol});
      std::fprintf(stderr, "%s vs %s: relative error %.3e\n", results[i].route.c_str(), results[k].route.c_str(), err);
    }
  }
  report["pairwise"] = std::move(pairs);
  report["max_relative_error"] = worst;
  report["agree_tol"] = a.agree_tol;

  emit(a.out, fracop::io::matrix_to_json(results.front().value).dump(2) + "\n");
  if (!a.report.empty()) fracop::io::write_json_file(a.report, report);

  m.command = "fracpow";
  m.inputs = {a.input};
  m.outputs = outputs_of({a.out, a.report});
  finish_manifest(g, g.manifest, m, timer);
  return worst <= a.agree_tol ? kExitOk : kExitTolerance;
}

// ----------------------------------------------------------- block-fracpow

struct BlockFracpowArgs {
  std::string input;
  double alpha = 0.5;
  std::string out;
  std::string report;
  bool compare = false;
  double agree_tol = 1e-5;
};

int run_block_fracpow(const Global& g, const BlockFracpowArgs& a) {
  Timer timer;
  const Json j = fracop::io::read_json_file(a.input);
  const BlockOperator3 b = fracop::io::block_from_json(j);
  const auto scheme = scheme_from(g);
  const auto adj = adjugate_from(g);
  const auto q = fracop::block_fracpow_quadrature(b, a.alpha, scheme, adj);
  emit(a.out, fracop::io::block_to_json(q.value).dump(2) + "\n");

  fracop::io::RunManifest m;
  Json report;
  report["alpha"] = a.alpha;
  report["nodes"] = q.nodes;
  report["commutator_norm"] = fracop::commutation_report(b).max_commutator_norm;
  int code = kExitOk;
  if (a.compare) {
    const auto direct = fracop::assembled_fracpow_quadrature(b, a.alpha, scheme);
    const OperatorMatrix oracle = fracop::oracle_power(b.assembled(), -a.alpha).value;
    const double vs_direct = fracop::relative_error(q.value.assembled(), direct.value);
    const double vs_oracle = fracop::relative_error(q.value.assembled(), oracle);
    report["relative_error_vs_assembled"] = vs_direct;
    report["relative_error_vs_oracle"] = vs_oracle;
    m.checks.push_back({"block vs assembled quadrature", vs_direct, a.agree_tol, vs_direct <= a.agree_tol});
    m.checks.push_back({"block quadrature vs oracle", vs_oracle, a.agree_tol, vs_oracle <= a.agree_tol});
    std::fprintf(stderr, "block vs assembled: %.3e\nblock vs oracle: %.3e\n", vs_direct, vs_oracle);
    if (vs_direct > a.agree_tol || vs_oracle > a.agree_tol) code = kExitTolerance;
  }
  if (!a.report.empty()) fracop::io::write_json_file(a.report, report);

  m.command = "block-fracpow";
  m.inputs = {a.input};
  m.outputs = outputs_of({a.out, a.report});
  finish_manifest(g, g.manifest, m, timer);
  return code;
}

// ---------------------------------------------------------------- spectrum

struct SpectrumArgs {
  std::string kind;
  int n = 0;
  double length = 1.0;
  std::optional<double> scalar;
  std::vector<double> a;
  std::string block_file;
  std::string family;
  double alpha = 0.85;
  std::string out;
  double residual_limit = 1e-6;
};

OperatorMatrix base_operator(const SpectrumArgs& a) {
  if (a.scalar) return OperatorMatrix(fracop::RealMatrix(fracop::RealMatrix::Constant(1, 1, *a.scalar)), "A");
  if (a.n < 1) fracop::fail(ErrorKind::kParse, "give --n (Laplacian size) or --scalar");
  return fracop::DirichletLaplacian::make(a.n, a.length).matrix;
}

int run_spectrum(const Global& g, const SpectrumArgs& a) {
  Timer timer;
  fracop::ClosedFormOptions options;
  options.allow_alpha_eq_1 = true;
  options.commutation_tol = g.commutation_tol;

  BlockOperator3 b;
  OperatorMatrix power;
  std::vector<std::string> inputs;
  if (!a.block_file.empty()) {
    inputs.push_back(a.block_file);
    b = fracop::io::block_from_json(fracop::io::read_json_file(a.block_file));
    if (a.alpha == 1.0) {
      power = b.assembled();
    } else if (!a.family.empty()) {
      power = fracop::family_fracpow(b, family_arg(a.family), a.alpha, fracop::Sign::kPositive, options)
                  .assembled();
    } else {
      power = fracop::oracle_power(b.assembled(), a.alpha).value;
    }
  } else {
    const auto family = family_arg(a.kind);
    if (family == fracop::Family::kLambda3) {
      if (a.a.size() != 3) fracop::fail(ErrorKind::kParse, "lambda3 needs --a a1,a2,a3");
      OperatorMatrix base = a.n >= 1 ? fracop::DirichletLaplacian::make(a.n, a.length).matrix
                                     : OperatorMatrix::identity(1);
      const OperatorMatrix a1(Matrix(a.a[0] * base.matrix()), "A1");
      const OperatorMatrix a2(Matrix(a.a[1] * base.matrix()), "A2");
      const OperatorMatrix a3(Matrix(a.a[2] * base.matrix()), "A3");
      b = fracop::lambda3(a1, a2, a3);
    } else {
      const OperatorMatrix base = base_operator(a);
      b = family == fracop::Family::kLambda1     ? fracop::lambda1(base)
          : family == fracop::Family::kLambda312 ? fracop::lambda312(base)
                                                 : fracop::lambda4(base);
    }
    power = a.alpha == 1.0
                ? b.assembled()
                : fracop::family_fracpow(b, family, a.alpha, fracop::Sign::kPositive, options).assembled();
  }

  const auto report = fracop::spectrum_report(b, a.alpha, power);
  emit(a.out, fracop::spectrum_csv(report));
  std::fprintf(stderr, "max match residual %.3e over %zu eigenvalues\n", report.max_match_residual,
               report.points.size());

  fracop::io::RunManifest m;
  m.command = "spectrum";
  m.inputs = inputs;
  m.outputs = outputs_of({a.out});
  const bool pass = report.max_match_residual <= a.residual_limit;
  m.checks.push_back({"max_match_residual", report.max_match_residual, a.residual_limit, pass});
  finish_manifest(g, g.manifest, m, timer);
  return pass ? kExitOk : kExitTolerance;
}

// --------------------------------------------------------------------- pde

struct PdeArgs {
  std::string scenario;
  std::string out;
  std::string method = "implicit";
  double check_tol = 5e-3;
};

double max_abs(const fracop::Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

int run_pde(const Global& g, const PdeArgs& a) {
  Timer timer;
  const auto scenario = fracop::io::scenario_from_json(fracop::io::read_json_file(a.scenario));
  if (a.method != "implicit" && a.method != "exact") {
    fracop::fail(ErrorKind::kParse, "--method must be implicit or exact");
  }
  const auto lap = fracop::DirichletLaplacian::make(scenario.n, scenario.length);
  const fracop::SystemParams params{scenario.a};
  const BlockOperator3 b = fracop::build_system(scenario.kind, lap, params);
  const fracop::Vector u0 = fracop::io::initial_state(scenario, lap);

  const OperatorMatrix generator =
      scenario.alpha ? fracop::system_power(scenario.kind, lap, params, *scenario.alpha, true) : b.assembled();
  const fracop::Vector forcing = fracop::Vector::Zero(generator.dim());
  auto implicit = fracop::evolve(generator, u0, forcing, scenario.dt, scenario.t_end,
                                 fracop::EvolutionMethod::kImplicitEuler);
  auto exact =
      fracop::evolve(generator, u0, forcing, scenario.dt, scenario.t_end, fracop::EvolutionMethod::kEigenExact);
  implicit.alpha = exact.alpha = scenario.alpha.value_or(1.0);

  const double gap = max_abs(implicit.states.back() - exact.states.back());
  const bool pass = gap <= a.check_tol;
  std::fprintf(stderr, "%s n=%d: implicit vs exact endpoint max difference %.3e (limit %.1e)\n",
              fracop::to_string(scenario.kind).c_str(), scenario.n, gap, a.check_tol);

  const auto& chosen = a.method == "exact" ? exact : implicit;
  emit(a.out, fracop::io::trajectory_csv(chosen));

  std::string manifest = g.manifest;
  if (manifest.empty() && !a.out.empty() && a.out != "-") manifest = a.out + ".manifest.json";
  fracop::io::RunManifest m;
  m.command = "pde";
  m.inputs = {a.scenario};
  m.outputs = outputs_of({a.out});
  m.checks.push_back({"implicit_vs_exact_endpoint", gap, a.check_tol, pass});
  finish_manifest(g, manifest, m, timer);
  return pass ? kExitOk : kExitTolerance;
}

// ------------------------------------------------------- verify-identities

struct VerifyArgs {
  std::string out;
  int n = 8;
};

struct Row {
  std::string suite;
  std::string label;
  double value = 0.0;
  double reference = 0.0;
  double error = 0.0;
  double tolerance = 0.0;
  bool pass() const { return error <= tolerance; }
};

std::string fmt(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

int run_verify(const Global& g, const VerifyArgs& a) {
  Timer timer;
  const auto scheme = scheme_from(g);
  const double tol = 10.0 * g.rel_tol;
  const auto lap = fracop::DirichletLaplacian::make(a.n);
  const OperatorMatrix& l = lap.matrix;
  std::vector<Row> rows;

  for (int k = 1; k <= 9; ++k) {
    const double alpha = k / 10.0;
    const auto q = fracop::weighted_resolvent_integral(OperatorMatrix::identity(1), -alpha, 1, scheme);
    const double value = q.value(0, 0).real();
    const double reference = kPi / std::sin(kPi * alpha);
    rows.push_back({"scalar-identity", "alpha=" + fmt(alpha), value, reference,
                    std::abs(value - reference) / reference, g.rel_tol});
  }

  for (double gamma : {0.25, 0.5, 0.75, 1.25, 1.75}) {
    const auto q = fracop::weighted_resolvent_integral(l, 1.0 - gamma, 2, scheme);
    const Matrix predicted = kPi / std::sin(kPi * gamma) * (1.0 - gamma) * fracop::power(l, -gamma);
    rows.push_back({"weighted-resolvent", "gamma=" + fmt(gamma), fracop::spectral_norm(q.value),
                    fracop::spectral_norm(predicted), fracop::relative_error(q.value.matrix(), predicted), tol});
  }

  for (double gamma : {0.25, 0.5, 0.75}) {
    for (double omega : {0.5, 1.0, 2.0}) {
      for (double theta : {1.5, 2.0, 3.0}) {
        const auto c = fracop::change_of_variables_integral(l, gamma, omega, theta, scheme);
        rows.push_back({"change-of-variables",
                        "gamma=" + fmt(gamma) + " omega=" + fmt(omega) + " theta=" + fmt(theta),
                        fracop::spectral_norm(c.integral.value), fracop::spectral_norm(c.predicted),
                        fracop::relative_error(c.integral.value, c.predicted), tol});
      }
    }
  }

  const OperatorMatrix a1(Matrix(2.0 * l.matrix()), "2L");
  for (double lam : {0.0, 1.0, 10.0}) {
    const auto r = fracop::second_resolvent_product(a1, l, lam, g.commutation_tol);
    const double norm = fracop::spectral_norm(r.value);
    rows.push_back({"second-resolvent", "lambda=" + fmt(lam), norm, fracop::spectral_norm(r.direct),
                    r.discrepancy / norm, 1e-10});
  }
  for (double alpha : {0.25, 0.5, 0.75}) {
    const auto r = fracop::resolvent_product_fracpow(a1, l, alpha, scheme);
    rows.push_back({"resolvent-product-power", "alpha=" + fmt(alpha), fracop::spectral_norm(r.quadrature.value),
                    fracop::spectral_norm(r.value), r.discrepancy, 1e-6});
  }

  std::string csv = "suite,case,value,reference,error,tolerance,pass\n";
  bool all = true;
  fracop::io::RunManifest m;
  for (const auto& r : rows) {
    all = all && r.pass();
    csv += r.suite + "," + r.label + "," + fracop::io::format_real(r.value) + "," +
           fracop::io::format_real(r.reference) + "," + fracop::io::format_real(r.error) + "," +
           fracop::io::format_real(r.tolerance) + "," + (r.pass() ? "pass" : "fail") + "\n";
    m.checks.push_back({r.suite + " " + r.label, r.error, r.tolerance, r.pass()});
  }
  emit(a.out, csv);
  if (!a.out.empty() && a.out != "-") {
    std::size_t passed = 0;
    for (const auto& r : rows) passed += r.pass() ? 1 : 0;
    std::fprintf(stderr, "%zu/%zu identity checks passed\n", passed, rows.size());
  }

  m.command = "verify-identities";
  m.outputs = outputs_of({a.out});
  finish_manifest(g, g.manifest, m, timer);
  return all ? kExitOk : kExitTolerance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional powers of operators and 3x3 block operator matrices"};
  app.require_subcommand(1);
  app.fallthrough();

  Global g;
  app.add_option("--rel-tol", g.rel_tol, "Quadrature convergence tolerance")->capture_default_str();
  app.add_option("--residual-tol", g.residual_tol, "Adjugate resolvent residual tolerance")->capture_default_str();
  app.add_option("--commutation-tol", g.commutation_tol,
                 "Absolute commutator tolerance (default 1e-10 * max entry norm)");
  app.add_option("--manifest", g.manifest, "Write a run manifest JSON to this path");

  CertifyArgs certify;
  auto* c = app.add_subcommand("certify", "Grid-certify positivity of a matrix");
  c->add_option("matrix", certify.input, "Matrix or block JSON")->required();
  c->add_option("-o,--out", certify.out, "Certificate JSON (stdout if omitted)");
  c->add_option("--points", certify.points)->capture_default_str();
  c->add_option("--s-min", certify.s_min)->capture_default_str();
  c->add_option("--s-max-factor", certify.s_max_factor)->capture_default_str();
  c->add_flag("--strict-half-plane", certify.strict, "Reject any eigenvalue with Re <= 0");

  FracpowArgs fracpow;
  auto* f = app.add_subcommand("fracpow", "A^{-alpha} by one or more routes");
  f->add_option("input", fracpow.input, "Matrix or block JSON")->required();
  f->add_option("--alpha", fracpow.alpha)->required();
  f->add_option("--route", fracpow.routes, "quad-e1 | quad-e2:<m> | closed:<family> | oracle (repeatable)");
  f->add_flag("--positive", fracpow.positive, "Compute A^{+alpha} (closed and oracle routes)");
  f->add_flag("--allow-alpha-1", fracpow.allow_alpha_1, "Admit alpha = 1 in closed forms");
  f->add_option("-o,--out", fracpow.out, "Matrix JSON of the first route (stdout if omitted)");
  f->add_option("--report", fracpow.report, "Comparison report JSON");
  f->add_option("--agree-tol", fracpow.agree_tol, "Pairwise relative error limit")->capture_default_str();

  BlockFracpowArgs block;
  auto* bf = app.add_subcommand("block-fracpow", "Entrywise block quadrature of Lambda^{-alpha}");
  bf->add_option("block", block.input, "Block JSON")->required();
  bf->add_option("--alpha", block.alpha)->required();
  bf->add_option("-o,--out", block.out, "Block JSON result (stdout if omitted)");
  bf->add_option("--report", block.report, "Report JSON");
  bf->add_flag("--compare", block.compare, "Compare with assembled quadrature and the oracle");
  bf->add_option("--agree-tol", block.agree_tol)->capture_default_str();

  SpectrumArgs spectrum;
  auto* s = app.add_subcommand("spectrum", "Spectral mapping of a block operator and its power");
  s->add_option("--kind", spectrum.kind, "lambda1 | lambda312 | lambda3 | lambda4");
  s->add_option("--n", spectrum.n, "Dirichlet Laplacian size for A");
  s->add_option("--length", spectrum.length)->capture_default_str();
  s->add_option("--scalar", spectrum.scalar, "Use A = [[mu]]");
  s->add_option("--a", spectrum.a, "Coefficients a1,a2,a3 for lambda3")->delimiter(',');
  s->add_option("--block", spectrum.block_file, "Block JSON instead of --kind");
  s->add_option("--family", spectrum.family, "Closed form to use with --block (oracle otherwise)");
  s->add_option("--alpha", spectrum.alpha)->capture_default_str();
  s->add_option("-o,--out", spectrum.out, "Spectrum CSV (stdout if omitted)");
  s->add_option("--residual-limit", spectrum.residual_limit)->capture_default_str();

  PdeArgs pde;
  auto* p = app.add_subcommand("pde", "Run a PDE scenario");
  p->add_option("scenario", pde.scenario, "Scenario JSON")->required();
  p->add_option("-o,--out", pde.out, "Trajectory CSV (stdout if omitted)");
  p->add_option("--method", pde.method, "implicit | exact")->capture_default_str();
  p->add_option("--check-tol", pde.check_tol, "Implicit vs exact endpoint limit")->capture_default_str();

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify-identities", "Check the integral identities and write a table");
  v->add_option("-o,--out", verify.out, "Table CSV (stdout if omitted)");
  v->add_option("--n", verify.n, "Laplacian size for operator identities")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitIo;
  }

  try {
    if (c->parsed()) return run_certify(g, certify);
    if (f->parsed()) return run_fracpow(g, fracpow);
    if (bf->parsed()) return run_block_fracpow(g, block);
    if (s->parsed()) return run_spectrum(g, spectrum);
    if (p->parsed()) return run_pde(g, pde);
    if (v->parsed()) return run_verify(g, verify);
  } catch (const fracop::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  }
  return kExitOk;
}
