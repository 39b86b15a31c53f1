#include "fracop/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "fracop/errors.hpp"

namespace fracop::io {

namespace {

Complex entry_from_json(const Json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    return {e[0].get<double>(), e[1].get<double>()};
  }
  fail(ErrorKind::kParse, "matrix entry must be a number or a [re, im] pair");
}

int required_int(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    fail(ErrorKind::kParse, std::string("field '") + key + "' must be an integer");
  }
  return j[key].get<int>();
}

double required_real(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) fail(ErrorKind::kParse, std::string("field '") + key + "' must be a number");
  return j[key].get<double>();
}

}  // namespace

Json matrix_to_json(const OperatorMatrix& m) {
  Json entries = Json::array();
  for (Eigen::Index i = 0; i < m.dim(); ++i) {
    for (Eigen::Index j = 0; j < m.dim(); ++j) entries.push_back({m(i, j).real(), m(i, j).imag()});
  }
  Json out;
  out["dim"] = m.dim();
  out["entries"] = std::move(entries);
  return out;
}

OperatorMatrix matrix_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorKind::kParse, "matrix JSON must be an object");
  const int n = required_int(j, "dim");
  if (n < 1) fail(ErrorKind::kParse, "matrix dim must be >= 1");
  if (!j.contains("entries") || !j["entries"].is_array()) fail(ErrorKind::kParse, "matrix JSON needs an 'entries' array");
  const Json& entries = j["entries"];
  if (entries.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    fail(ErrorKind::kParse, "expected " + std::to_string(n * n) + " entries, found " + std::to_string(entries.size()));
  }
  Matrix m(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) m(r, c) = entry_from_json(entries[static_cast<std::size_t>(r * n + c)]);
  }
  if (!m.allFinite()) fail(ErrorKind::kParse, "matrix entries must be finite");
  return OperatorMatrix(std::move(m));
}

Json block_to_json(const BlockOperator3& b) {
  Json blocks = Json::array();
  for (int i = 0; i < 3; ++i) {
    Json row = Json::array();
    for (int j = 0; j < 3; ++j) row.push_back(matrix_to_json(b.entry(i, j)));
    blocks.push_back(std::move(row));
  }
  Json out;
  out["n"] = b.n();
  out["blocks"] = std::move(blocks);
  return out;
}

bool is_block_json(const Json& j) { return j.is_object() && j.contains("blocks"); }

BlockOperator3 block_from_json(const Json& j) {
  if (!is_block_json(j)) fail(ErrorKind::kParse, "block JSON needs a 'blocks' field");
  const int n = required_int(j, "n");
  const Json& blocks = j["blocks"];
  if (!blocks.is_array() || blocks.size() != 3) fail(ErrorKind::kParse, "'blocks' must be a 3x3 array");
  BlockGrid grid;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!blocks[i].is_array() || blocks[i].size() != 3) fail(ErrorKind::kParse, "'blocks' must be a 3x3 array");
    for (std::size_t k = 0; k < 3; ++k) {
      grid[i][k] = matrix_from_json(blocks[i][k]);
      if (grid[i][k].dim() != n) fail(ErrorKind::kParse, "block dimension disagrees with 'n'");
    }
  }
  return assemble(std::move(grid));
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::kParse, "'" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write '" + path + "'");
  out << text;
  if (!out) fail(ErrorKind::kIo, "write to '" + path + "' failed");
}

void write_json_file(const std::string& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trajectory_csv(const EvolutionResult& result) {
  std::string out = "t,component,value_re,value_im\n";
  for (std::size_t k = 0; k < result.times.size(); ++k) {
    const std::string t = format_real(result.times[k]);
    const Vector& u = result.states[k];
    for (Eigen::Index c = 0; c < u.size(); ++c) {
      out += t;
      out += ',';
      out += std::to_string(c);
      out += ',';
      out += format_real(u(c).real());
      out += ',';
      out += format_real(u(c).imag());
      out += '\n';
    }
  }
  return out;
}

Scenario scenario_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorKind::kParse, "scenario must be a JSON object");
  Scenario s;
  if (!j.contains("kind") || !j["kind"].is_string()) fail(ErrorKind::kParse, "scenario needs a string 'kind'");
  try {
    s.kind = parse_system_kind(j["kind"].get<std::string>());
  } catch (const Error& e) {
    fail(ErrorKind::kParse, e.what());
  }
  s.n = required_int(j, "n");
  if (j.contains("length")) s.length = required_real(j, "length");
  if (j.contains("alpha") && !j["alpha"].is_null()) s.alpha = required_real(j, "alpha");
  s.dt = required_real(j, "dt");
  s.t_end = required_real(j, "T");
  if (j.contains("a") && !j["a"].is_null()) {
    const Json& a = j["a"];
    if (!a.is_array() || a.size() != 3 || !a[0].is_number() || !a[1].is_number() || !a[2].is_number()) {
      fail(ErrorKind::kParse, "'a' must be an array of three numbers");
    }
    s.a = std::array<double, 3>{a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
  }
  if (j.contains("u0")) {
    const Json& u = j["u0"];
    if (u.is_string()) {
      s.u0_mode = u.get<std::string>();
      if (s.u0_mode != "zero" && s.u0_mode != "first_mode") {
        fail(ErrorKind::kParse, "'u0' must be \"zero\", \"first_mode\" or an array");
      }
    } else if (u.is_array()) {
      s.u0_mode = "explicit";
      for (const Json& e : u) s.u0_values.push_back(entry_from_json(e));
    } else {
      fail(ErrorKind::kParse, "'u0' must be \"zero\", \"first_mode\" or an array");
    }
  }
  return s;
}

Json scenario_to_json(const Scenario& s) {
  Json j;
  j["kind"] = to_string(s.kind);
  j["n"] = s.n;
  j["length"] = s.length;
  j["alpha"] = s.alpha ? Json(*s.alpha) : Json(nullptr);
  j["dt"] = s.dt;
  j["T"] = s.t_end;
  j["a"] = s.a ? Json::array({(*s.a)[0], (*s.a)[1], (*s.a)[2]}) : Json(nullptr);
  if (s.u0_mode == "explicit") {
    Json u = Json::array();
    for (const Complex& z : s.u0_values) u.push_back({z.real(), z.imag()});
    j["u0"] = std::move(u);
  } else {
    j["u0"] = s.u0_mode;
  }
  return j;
}

Vector initial_state(const Scenario& s, const DirichletLaplacian& lap) {
  const Eigen::Index n = lap.n;
  Vector u = Vector::Zero(3 * n);
  if (s.u0_mode == "first_mode") {
    const Vector phi = lap.mode(1);
    for (int c = 0; c < 3; ++c) u.segment(c * n, n) = phi;
  } else if (s.u0_mode == "explicit") {
    if (static_cast<Eigen::Index>(s.u0_values.size()) != 3 * n) {
      fail(ErrorKind::kDimensionMismatch, "explicit u0 must have 3n = " + std::to_string(3 * n) + " entries");
    }
    for (Eigen::Index i = 0; i < 3 * n; ++i) u(i) = s.u0_values[static_cast<std::size_t>(i)];
  }
  return u;
}

Json manifest_to_json(const RunManifest& m) {
  Json j;
  j["command"] = m.command;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  Json tol = Json::object();
  for (const auto& [k, v] : m.tolerances) tol[k] = v;
  j["tolerances"] = std::move(tol);
  j["wall_time"] = m.wall_time;
  Json checks = Json::array();
  for (const auto& c : m.checks) {
    checks.push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"pass", c.pass}});
  }
  j["checks"] = std::move(checks);
  j["timestamp"] = m.timestamp;
  return j;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace fracop::io
