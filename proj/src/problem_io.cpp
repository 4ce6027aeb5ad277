#include "hjj/problem_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "hjj/expression.hpp"

namespace hjj {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void fail(std::string const& field, std::string const& message) {
  throw ProblemError(field, message);
}

void only_keys(json const& j, std::string const& field, std::set<std::string> const& allowed) {
  if (!j.is_object()) {
    fail(field, "must be an object");
  }
  for (auto const& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      fail(field.empty() ? key : field + "." + key, "unknown field");
    }
  }
}

json const& require(json const& j, std::string const& field, std::string const& key) {
  auto const it = j.find(key);
  if (it == j.end()) {
    fail(field.empty() ? key : field + "." + key, "missing");
  }
  return *it;
}

std::string join(std::string const& field, std::string const& key) {
  return field.empty() ? key : field + "." + key;
}

double number(json const& j, std::string const& field) {
  if (!j.is_number()) {
    fail(field, "must be a number");
  }
  double const v = j.get<double>();
  if (!std::isfinite(v)) {
    fail(field, "must be finite");
  }
  return v;
}

int integer(json const& j, std::string const& field) {
  if (!j.is_number_integer()) {
    fail(field, "must be an integer");
  }
  return j.get<int>();
}

std::string text(json const& j, std::string const& field) {
  if (!j.is_string()) {
    fail(field, "must be a string");
  }
  return j.get<std::string>();
}

double number_or(json const& j, std::string const& field, std::string const& key, double fallback) {
  auto const it = j.find(key);
  return it == j.end() ? fallback : number(*it, join(field, key));
}

std::vector<double> eps_list(json const& j, std::string const& field) {
  if (!j.is_array() || j.empty()) {
    fail(field, "must be a non-empty array");
  }
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    double const v = number(j[k], field + "[" + std::to_string(k) + "]");
    if (!(v > 0.0)) {
      fail(field + "[" + std::to_string(k) + "]", "must be positive");
    }
    if (!out.empty() && !(v < out.back())) {
      fail(field, "eps_list must decrease");
    }
    out.push_back(v);
  }
  return out;
}

FarBC parse_bc(json const& j, std::string const& field) {
  only_keys(j, field, {"kind", "value", "slope"});
  std::string const kind = text(require(j, field, "kind"), join(field, "kind"));
  if (kind == "dirichlet") {
    return Dirichlet{number(require(j, field, "value"), join(field, "value"))};
  }
  if (kind == "neumann") {
    return Neumann{number_or(j, field, "slope", 0.0)};
  }
  if (kind == "state_constraint") {
    return StateConstraint{};
  }
  fail(join(field, "kind"), "unknown boundary condition '" + kind + "'");
}

HamiltonianSpec parse_hamiltonian(json const& j, std::string const& field) {
  only_keys(j, field, {"family", "b", "c", "expr", "minima"});
  HamiltonianSpec s;
  s.family = text(require(j, field, "family"), join(field, "family"));
  if (s.family == "expression") {
    s.expr = text(require(j, field, "expr"), join(field, "expr"));
  } else if (s.family == "abs_shift" || s.family == "quadratic" || s.family == "double_well") {
    s.b = number_or(j, field, "b", 0.0);
    s.c = number_or(j, field, "c", 0.0);
  } else {
    fail(join(field, "family"), "unknown Hamiltonian family '" + s.family + "'");
  }
  if (auto const it = j.find("minima"); it != j.end()) {
    if (!it->is_array()) {
      fail(join(field, "minima"), "must be an array");
    }
    std::vector<double> m;
    for (std::size_t k = 0; k < it->size(); ++k) {
      m.push_back(number((*it)[k], join(field, "minima") + "[" + std::to_string(k) + "]"));
    }
    if (!std::is_sorted(m.begin(), m.end())) {
      fail(join(field, "minima"), "must be sorted");
    }
    s.minima = std::move(m);
  }
  return s;
}

ojson bc_json(FarBC const& bc) {
  ojson j;
  if (auto const* d = std::get_if<Dirichlet>(&bc)) {
    j["kind"] = "dirichlet";
    j["value"] = d->value;
  } else if (auto const* n = std::get_if<Neumann>(&bc)) {
    j["kind"] = "neumann";
    j["slope"] = n->slope;
  } else {
    j["kind"] = "state_constraint";
  }
  return j;
}

bool same_bc(FarBC const& a, FarBC const& b) {
  if (a.index() != b.index()) {
    return false;
  }
  if (auto const* d = std::get_if<Dirichlet>(&a)) {
    return d->value == std::get<Dirichlet>(b).value;
  }
  if (auto const* n = std::get_if<Neumann>(&a)) {
    return n->slope == std::get<Neumann>(b).slope;
  }
  return true;
}

std::pair<int, int> line_column(std::string const& src, std::size_t byte) {
  int line = 1;
  int column = 1;
  for (std::size_t k = 0; k < std::min(byte, src.size()); ++k) {
    if (src[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

ProblemError::ProblemError(std::string field, std::string const& message, int line, int column)
    : std::runtime_error(field.empty() ? message : field + ": " + message),
      field_(std::move(field)),
      line_(line),
      column_(column) {}

std::vector<EdgeSpec> ProblemFile::edge_specs() const {
  std::vector<EdgeSpec> out;
  for (auto const& e : edges) {
    out.push_back(EdgeSpec{e.length, e.n_cells, e.far_bc});
  }
  return out;
}

JunctionProblem ProblemFile::junction_problem() const {
  return make_junction_problem(name, edge_specs(), hamiltonians, junction);
}

Hamiltonian build_hamiltonian(HamiltonianSpec const& spec, double length) {
  Hamiltonian h = [&] {
    if (spec.family == "expression") {
      return parse_expression(spec.expr, length);
    }
    double const params[2] = {spec.b, spec.c};
    return make_builtin(spec.family, params, length);
  }();
  return spec.minima ? h.with_minima(*spec.minima) : h;
}

ProblemFile parse_problem(std::string const& src) {
  json root;
  try {
    root = json::parse(src);
  } catch (json::parse_error const& e) {
    auto const [line, column] = line_column(src, e.byte == 0 ? 0 : e.byte - 1);
    throw ProblemError("", "JSON parse error at line " + std::to_string(line) + ", column " +
                               std::to_string(column) + ": " + e.what(),
                       line, column);
  }

  only_keys(root, "", {"schema_version", "name", "K", "edges", "junction", "node_bc", "viscous",
                       "fatten", "convergence"});
  ProblemFile p;
  p.schema_version = integer(require(root, "", "schema_version"), "schema_version");
  if (p.schema_version != kSchemaVersion) {
    fail("schema_version", "unsupported version " + std::to_string(p.schema_version));
  }
  p.name = root.contains("name") ? text(root["name"], "name") : std::string("problem");

  json const& edges = require(root, "", "edges");
  if (!edges.is_array() || edges.empty()) {
    fail("edges", "must be a non-empty array");
  }
  int const k = integer(require(root, "", "K"), "K");
  if (k != static_cast<int>(edges.size())) {
    fail("K", "is " + std::to_string(k) + " but " + std::to_string(edges.size()) +
                  " edges are listed");
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    std::string const field = "edges[" + std::to_string(i) + "]";
    json const& e = edges[i];
    only_keys(e, field, {"length", "n_cells", "far_bc", "hamiltonian"});
    EdgeEntry entry;
    entry.length = number(require(e, field, "length"), field + ".length");
    if (!(entry.length > 0.0)) {
      fail(field + ".length", "must be positive");
    }
    if (e.contains("n_cells")) {
      entry.n_cells = integer(e["n_cells"], field + ".n_cells");
    }
    if (entry.n_cells < 8) {
      fail(field + ".n_cells", "must be at least 8");
    }
    if (e.contains("far_bc")) {
      entry.far_bc = parse_bc(e["far_bc"], field + ".far_bc");
    }
    entry.hamiltonian = parse_hamiltonian(require(e, field, "hamiltonian"), field + ".hamiltonian");
    p.edges.push_back(std::move(entry));
  }

  if (root.contains("junction")) {
    json const& j = root["junction"];
    only_keys(j, "junction", {"kind", "A"});
    std::string const kind = text(require(j, "junction", "kind"), "junction.kind");
    if (kind == "state_constraint") {
      p.junction = JunctionCondition::state_constraint();
    } else if (kind == "flux_limited") {
      p.junction = JunctionCondition::flux_limited(number(require(j, "junction", "A"), "junction.A"));
    } else {
      fail("junction.kind", "unknown junction condition '" + kind + "'");
    }
  }

  if (root.contains("node_bc")) {
    FarBC const bc = parse_bc(root["node_bc"], "node_bc");
    if (std::holds_alternative<Neumann>(bc)) {
      fail("node_bc.kind", "must be dirichlet or state_constraint");
    }
    if (auto const* d = std::get_if<Dirichlet>(&bc)) {
      p.node_bc = *d;
    } else {
      p.node_bc = StateConstraint{};
    }
  }

  if (root.contains("viscous")) {
    json const& v = root["viscous"];
    only_keys(v, "viscous", {"eps_list"});
    p.viscous = ViscousSpec{eps_list(require(v, "viscous", "eps_list"), "viscous.eps_list")};
  }

  if (root.contains("fatten")) {
    json const& f = root["fatten"];
    only_keys(f, "fatten", {"hamiltonian", "eps_list", "h2_ratio", "a1", "a2"});
    FattenSpec s;
    s.expr = text(require(f, "fatten", "hamiltonian"), "fatten.hamiltonian");
    s.eps_list = eps_list(require(f, "fatten", "eps_list"), "fatten.eps_list");
    s.h2_ratio = number_or(f, "fatten", "h2_ratio", 8.0);
    s.a1 = number_or(f, "fatten", "a1", 1.0);
    s.a2 = number_or(f, "fatten", "a2", 1.0);
    if (!(s.h2_ratio >= 4.0)) {
      fail("fatten.h2_ratio", "must be at least 4 (4 cells across the tube)");
    }
    if (!(s.a1 > 0.0) || !(s.a2 > 0.0)) {
      fail("fatten.a1", "arm lengths must be positive");
    }
    if (!(s.eps_list.front() < std::min(s.a1, s.a2) / 2.0)) {
      fail("fatten.eps_list", "tube width must be below half the shortest arm");
    }
    p.fatten = std::move(s);
  }

  if (root.contains("convergence")) {
    json const& c = root["convergence"];
    only_keys(c, "convergence", {"n_cells", "exact"});
    ConvergenceSpec s;
    json const& n = require(c, "convergence", "n_cells");
    if (!n.is_array() || n.size() < 2) {
      fail("convergence.n_cells", "needs at least two grids");
    }
    for (std::size_t k = 0; k < n.size(); ++k) {
      int const v = integer(n[k], "convergence.n_cells[" + std::to_string(k) + "]");
      if (v < 8 || (!s.n_cells.empty() && v <= s.n_cells.back())) {
        fail("convergence.n_cells", "must increase and start at 8 or more");
      }
      s.n_cells.push_back(v);
    }
    s.exact = text(require(c, "convergence", "exact"), "convergence.exact");
    try {
      Expression const check(s.exact, {"x"});
    } catch (ParseError const& e) {
      fail("convergence.exact", e.what());
    }
    p.convergence = std::move(s);
  }

  for (int i = 0; i < p.K(); ++i) {
    std::string const field = "edges[" + std::to_string(i) + "].hamiltonian";
    try {
      p.hamiltonians.push_back(build_hamiltonian(p.edges[i].hamiltonian, p.edges[i].length));
    } catch (ParseError const& e) {
      fail(field + ".expr", e.what());
    } catch (HamiltonianError const& e) {
      fail(field, e.what());
    }
  }
  if (p.fatten) {
    try {
      p.hamiltonian_2d = parse_expression_2d(p.fatten->expr, p.fatten->a1, p.fatten->a2);
    } catch (ParseError const& e) {
      fail("fatten.hamiltonian", e.what());
    } catch (HamiltonianError const& e) {
      fail("fatten.hamiltonian", e.what());
    }
  }
  return p;
}

ProblemFile load_problem(std::filesystem::path const& path) {
  std::ifstream in(path);
  if (!in) {
    throw ProblemError("", "cannot open problem file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str());
}

std::string write_problem(ProblemFile const& p) {
  ojson root;
  root["schema_version"] = p.schema_version;
  root["name"] = p.name;
  root["K"] = p.K();
  root["edges"] = ojson::array();
  for (auto const& e : p.edges) {
    ojson h;
    h["family"] = e.hamiltonian.family;
    if (e.hamiltonian.family == "expression") {
      h["expr"] = e.hamiltonian.expr;
    } else {
      h["b"] = e.hamiltonian.b;
      h["c"] = e.hamiltonian.c;
    }
    if (e.hamiltonian.minima) {
      h["minima"] = *e.hamiltonian.minima;
    }
    ojson j;
    j["length"] = e.length;
    j["n_cells"] = e.n_cells;
    j["far_bc"] = bc_json(e.far_bc);
    j["hamiltonian"] = std::move(h);
    root["edges"].push_back(std::move(j));
  }
  ojson junction;
  if (p.junction.kind == JunctionCondition::Kind::FluxLimited) {
    junction["kind"] = "flux_limited";
    junction["A"] = p.junction.A;
  } else {
    junction["kind"] = "state_constraint";
  }
  root["junction"] = std::move(junction);
  if (p.node_bc) {
    root["node_bc"] = std::holds_alternative<Dirichlet>(*p.node_bc)
                          ? bc_json(std::get<Dirichlet>(*p.node_bc))
                          : bc_json(StateConstraint{});
  }
  if (p.viscous) {
    root["viscous"]["eps_list"] = p.viscous->eps_list;
  }
  if (p.fatten) {
    ojson f;
    f["hamiltonian"] = p.fatten->expr;
    f["eps_list"] = p.fatten->eps_list;
    f["h2_ratio"] = p.fatten->h2_ratio;
    f["a1"] = p.fatten->a1;
    f["a2"] = p.fatten->a2;
    root["fatten"] = std::move(f);
  }
  if (p.convergence) {
    root["convergence"]["n_cells"] = p.convergence->n_cells;
    root["convergence"]["exact"] = p.convergence->exact;
  }
  return root.dump(2) + "\n";
}

bool same_problem(ProblemFile const& a, ProblemFile const& b) {
  if (a.schema_version != b.schema_version || a.name != b.name || a.K() != b.K()) {
    return false;
  }
  for (int i = 0; i < a.K(); ++i) {
    auto const& x = a.edges[i];
    auto const& y = b.edges[i];
    if (x.length != y.length || x.n_cells != y.n_cells || !same_bc(x.far_bc, y.far_bc) ||
        !(x.hamiltonian == y.hamiltonian)) {
      return false;
    }
  }
  if (a.junction.kind != b.junction.kind || a.junction.A != b.junction.A) {
    return false;
  }
  if (a.node_bc.has_value() != b.node_bc.has_value()) {
    return false;
  }
  if (a.node_bc) {
    if (a.node_bc->index() != b.node_bc->index()) {
      return false;
    }
    if (auto const* d = std::get_if<Dirichlet>(&*a.node_bc);
        d && d->value != std::get<Dirichlet>(*b.node_bc).value) {
      return false;
    }
  }
  return a.viscous == b.viscous && a.fatten == b.fatten && a.convergence == b.convergence;
}

}  // namespace hjj
