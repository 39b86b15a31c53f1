#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fracop/block3.hpp"
#include "fracop/pde_lab.hpp"

namespace fracop::io {

using Json = nlohmann::ordered_json;

// Matrix JSON: {"dim": n, "entries": [[re, im], ...]} in row-major order.
// Readers also accept a plain number for a real entry.
Json matrix_to_json(const OperatorMatrix& m);
OperatorMatrix matrix_from_json(const Json& j);

// Block JSON: {"n": n, "blocks": [[matrix, matrix, matrix], ... x3]}.
Json block_to_json(const BlockOperator3& b);
BlockOperator3 block_from_json(const Json& j);
bool is_block_json(const Json& j);

/// Parse failures raise Parse, unreadable files raise Io.
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
/// Pretty-printed with two-space indentation and a trailing newline.
void write_json_file(const std::string& path, const Json& j);

/// Long format: t,component,value_re,value_im.
std::string trajectory_csv(const EvolutionResult& result);

struct Scenario {
  SystemKind kind = SystemKind::kEdp1;
  int n = 0;
  double length = 1.0;
  std::optional<double> alpha;
  double dt = 0.0;
  double t_end = 0.0;
  std::optional<std::array<double, 3>> a;
  std::string u0_mode = "zero";  // "zero", "first_mode", or "explicit"
  std::vector<Complex> u0_values;
};

Scenario scenario_from_json(const Json& j);
Json scenario_to_json(const Scenario& s);
/// Initial state of length 3n; first_mode places the lowest Laplacian mode in
/// every component.
Vector initial_state(const Scenario& s, const DirichletLaplacian& lap);

struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
};

struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::map<std::string, double> tolerances;
  double wall_time = 0.0;
  std::vector<Check> checks;
  std::string timestamp;  // UTC, ISO 8601
};

Json manifest_to_json(const RunManifest& m);
std::string utc_timestamp();

/// %.17g, the same rendering used by every CSV writer.
std::string format_real(double x);

}  // namespace fracop::io
