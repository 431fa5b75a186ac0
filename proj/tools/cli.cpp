#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ultragap/dendrogram.hpp"
#include "ultragap/errors.hpp"
#include "ultragap/io.hpp"
#include "ultragap/metric.hpp"
#include "ultragap/simplex.hpp"
#include "ultragap/solver.hpp"

namespace ultragap::cli {
namespace {

using nlohmann::json;

struct RunConfig {
  std::string input;
  std::string format;
  std::string mode = "float";
  std::optional<double> p;
  std::string grid;
  std::size_t trials = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string g;
  std::string simplex;
};

// Signals an exit code after the message has been written.
struct Abort {
  int code;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string resolved_format(const RunConfig& c) {
  if (!c.format.empty()) return c.format;
  const bool json_ext = c.input.size() >= 5 && c.input.compare(c.input.size() - 5, 5, ".json") == 0;
  return json_ext ? "json-dendrogram" : "csv-matrix";
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open '" + path + "'", 0, 0);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

template <class T>
std::string str(const T& v) {
  return Scalar<T>::str(v);
}

template <class T>
void print_report(std::ostream& out, const ViolationReport<T>& report, const std::vector<std::string>& labels) {
  auto name = [&](std::size_t i) { return i < labels.size() ? labels[i] : "#" + std::to_string(i + 1); };
  out << "kind: not-a-metric\n";
  for (const auto& s : report.structural) {
    out << "structural: " << to_string(s.issue) << " at (" << name(s.i) << ", " << name(s.j) << ")\n";
  }
  for (const auto& t : report.triangle) {
    out << "triangle violation: d(" << name(t.i) << ", " << name(t.j) << ") = " << str(t.distance) << " > d("
        << name(t.i) << ", " << name(t.k) << ") + d(" << name(t.k) << ", " << name(t.j) << ") = " << str(t.bound)
        << '\n';
  }
}

template <class T>
Validation<T> load_validation(const RunConfig& c) {
  std::istringstream in(read_input(c.input));
  const std::string format = resolved_format(c);
  if (format == "json-dendrogram") {
    try {
      return dendrogram_to_metric(io::read_dendrogram_json<T>(in));
    } catch (const StructuralError& e) {
      throw ParseError(std::string("invalid dendrogram: ") + e.what(), 0, 0);
    }
  }
  if (format != "csv-matrix") throw UsageError("unknown input format '" + format + "'");
  io::CsvMatrix<T> csv = io::read_matrix_csv<T>(in);
  return validate<T>(csv.rows, std::move(csv.labels));
}

template <class T>
FiniteMetric<T> load(const RunConfig& c, std::ostream& err) {
  Validation<T> v = load_validation<T>(c);
  if (auto* report = std::get_if<ViolationReport<T>>(&v)) {
    std::ostringstream msg;
    print_report(msg, *report, {});
    err << msg.str();
    throw Abort{NotAMetric};
  }
  return std::get<FiniteMetric<T>>(std::move(v));
}

template <class T>
FiniteMetric<T> load_ultrametric(const RunConfig& c, std::ostream& err) {
  FiniteMetric<T> m = load<T>(c, err);
  if (!m.is_ultrametric()) {
    err << "this command needs an ultrametric; the input is a general metric\n";
    throw Abort{GeneralMetric};
  }
  return m;
}

FiniteMetric<double> load_float(const RunConfig& c, std::ostream& err) {
  if (c.mode == "rational") return to_float(load<Rational>(c, err));
  return load<double>(c, err);
}

void require_out(const RunConfig& c, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (c.out == a) return;
  }
  throw UsageError("output format '" + c.out + "' is not available for this command");
}

double require_p(const RunConfig& c) {
  if (!c.p) throw UsageError("--p is required");
  return *c.p;
}

std::vector<double> parse_grid(const std::string& text) {
  const auto first = text.find(':');
  const auto second = first == std::string::npos ? std::string::npos : text.find(':', first + 1);
  if (second == std::string::npos) throw UsageError("--grid expects a:b:steps");
  double a = 0.0;
  double b = 0.0;
  long steps = 0;
  try {
    a = parse_real(text.substr(0, first));
    b = parse_real(text.substr(first + 1, second - first - 1));
    std::size_t used = 0;
    const std::string s = text.substr(second + 1);
    steps = std::stol(s, &used);
    if (used != s.size()) throw UsageError("bad step count");
  } catch (const std::exception&) {
    throw UsageError("--grid expects a:b:steps with numeric a, b and an integer step count");
  }
  if (steps < 1 || !(a < b)) throw UsageError("--grid needs a < b and at least one step");
  std::vector<double> grid;
  for (long k = 0; k <= steps; ++k) grid.push_back(k == steps ? b : a + (b - a) * static_cast<double>(k) / steps);
  return grid;
}

json omega_json(const std::vector<double>& omega) {
  json arr = json::array();
  for (double v : omega) arr.push_back(round_decimal(v));
  return arr;
}

template <class T>
int cmd_validate(const RunConfig& c, std::ostream& out) {
  Validation<T> v = load_validation<T>(c);
  if (auto* report = std::get_if<ViolationReport<T>>(&v)) {
    print_report(out, *report, {});
    return NotAMetric;
  }
  const auto& m = std::get<FiniteMetric<T>>(v);
  out << "kind: " << to_string(m.kind()) << '\n';
  out << "points: " << m.size() << '\n';
  const auto& l = m.labels();
  for (const auto& t : strong_triangle_violations(m)) {
    out << "strong triangle violation: d(" << l[t.i] << ", " << l[t.j] << ") = " << str(t.distance) << " > max(d("
        << l[t.i] << ", " << l[t.k] << "), d(" << l[t.j] << ", " << l[t.k] << ")) = " << str(t.bound) << '\n';
  }
  return m.is_ultrametric() ? Ok : GeneralMetric;
}

template <class T>
int cmd_dendrogram(const RunConfig& c, std::ostream& out, std::ostream& err) {
  io::write_dendrogram_json(out, build_dendrogram(load_ultrametric<T>(c, err)));
  return Ok;
}

template <class T>
int cmd_matrix(const RunConfig& c, std::ostream& out, std::ostream& err) {
  io::write_matrix_csv(out, load<T>(c, err));
  return Ok;
}

int cmd_gap(const RunConfig& c, std::ostream& out, std::ostream& err) {
  require_out(c, {"json"});
  const double p = require_p(c);
  io::write_gap_json(out, gap(load_float(c, err), p));
  return Ok;
}

int cmd_oracle(const RunConfig& c, std::ostream& out, std::ostream& err) {
  require_out(c, {"json"});
  const double p = require_p(c);
  if (c.trials == 0) throw UsageError("--trials must be positive");
  const OracleResult r = gap_oracle(load_float(c, err), p, c.trials, *c.seed);
  const json doc = {{"p", p},
                    {"value", round_decimal(r.value)},
                    {"witness", omega_json(r.best.omega())},
                    {"trials", r.trials},
                    {"polished", r.polished}};
  out << doc.dump() << '\n';
  return Ok;
}

int cmd_curve(const RunConfig& c, std::ostream& out, std::ostream& err) {
  require_out(c, {"csv"});
  std::vector<double> grid;
  if (!c.grid.empty()) {
    grid = parse_grid(c.grid);
  } else if (c.p) {
    grid = {*c.p};
  } else {
    throw UsageError("--grid is required");
  }
  FiniteMetric<double> m = load_float(c, err);
  if (!m.is_ultrametric()) {
    err << "this command needs an ultrametric; the input is a general metric\n";
    return GeneralMetric;
  }
  io::write_curve_csv(out, gap_curve(m, grid));
  return Ok;
}

template <class T>
int cmd_asymptote(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Rational g = gamma_infinity(build_tree(build_dendrogram(load_ultrametric<T>(c, err))));
  if (c.out == "json") {
    out << json{{"gamma_infinity", to_string(g)}, {"decimal", round_decimal(to_double(g))}}.dump() << '\n';
  } else {
    out << to_string(g) << '\n' << format_decimal(to_double(g)) << '\n';
  }
  return Ok;
}

template <class T>
int cmd_classify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  require_out(c, {"json"});
  const ConstancyClass k = classify(load_ultrametric<T>(c, err));
  const json doc = {{"verdict", to_string(k.verdict)},
                    {"gamma_zero", to_string(k.gamma_zero)},
                    {"gamma_infinity", to_string(k.gamma_infinity)},
                    {"levels", k.levels},
                    {"coterie_sizes", k.profile.sizes},
                    {"covered", k.profile.covered},
                    {"uncovered", k.profile.uncovered}};
  out << doc.dump() << '\n';
  return Ok;
}

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  require_out(c, {"json"});
  const double p = require_p(c);
  if (c.g.empty()) throw UsageError("--G is required");
  double g = 0.0;
  try {
    g = parse_real(c.g);
  } catch (const DomainError&) {
    throw UsageError("--G expects a decimal or a fraction");
  }
  const EnhancedVerdict v = verify_enhanced(load_float(c, err), g, p, c.trials, c.seed.value_or(0));
  json doc = {{"holds", v.holds},
              {"G", g},
              {"p", p},
              {"alpha", round_decimal(v.alpha)},
              {"threshold", round_decimal(v.threshold)},
              {"gap", v.gap ? json(round_decimal(*v.gap)) : json(nullptr)},
              {"samples", v.samples},
              {"max_sampled_lhs", round_decimal(v.max_sampled_lhs)},
              {"samples_consistent", v.samples_consistent}};
  if (v.violating_zeta) doc["violating_zeta"] = omega_json(*v.violating_zeta);
  out << doc.dump() << '\n';
  return Ok;
}

template <class T>
int cmd_coefficients(const RunConfig& c, std::ostream& out, std::ostream& err) {
  require_out(c, {"csv"});
  if (c.simplex.empty()) throw UsageError("--simplex is required");
  const FiniteMetric<T> m = load_ultrametric<T>(c, err);
  std::istringstream in(read_input(c.simplex));
  const Simplex<T> w = io::read_simplex_json<T>(in);
  if (w.size() != m.size()) throw UsageError("simplex has " + std::to_string(w.size()) + " entries, metric has " +
                                             std::to_string(m.size()) + " points");
  io::write_coefficients_csv(out, level_coefficients(build_tree(build_dendrogram(m)), w));
  return Ok;
}

template <class T>
int dispatch(const std::string& cmd, const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (cmd == "validate") return cmd_validate<T>(c, out);
  if (cmd == "dendrogram") return cmd_dendrogram<T>(c, out, err);
  if (cmd == "matrix") return cmd_matrix<T>(c, out, err);
  if (cmd == "asymptote") return cmd_asymptote<T>(c, out, err);
  if (cmd == "classify") return cmd_classify<T>(c, out, err);
  if (cmd == "coefficients") return cmd_coefficients<T>(c, out, err);
  if (cmd == "gap") return cmd_gap(c, out, err);
  if (cmd == "oracle") return cmd_oracle(c, out, err);
  if (cmd == "curve") return cmd_curve(c, out, err);
  if (cmd == "verify") return cmd_verify(c, out, err);
  throw UsageError("unknown command '" + cmd + "'");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Enhanced negative-type gaps of finite metric and ultrametric spaces"};
  app.require_subcommand(1);
  RunConfig c;

  struct Command {
    const char* name;
    const char* help;
    bool p;
    bool grid;
    bool trials;
    bool g;
    bool simplex;
    const char* default_out;
  };
  const Command commands[] = {
      {"validate", "check the metric axioms and report the kind", false, false, false, false, false, "text"},
      {"dendrogram", "convert an ultrametric matrix to a JSON dendrogram", false, false, false, false, false, "json"},
      {"matrix", "write the distance matrix as CSV", false, false, false, false, false, "csv"},
      {"gap", "exact Gamma_X(p) by sign-partition enumeration", true, false, false, false, false, "json"},
      {"oracle", "randomized upper bound on Gamma_X(p)", true, false, true, false, false, "json"},
      {"curve", "normalized gaps on a p grid, with the limit row", true, true, false, false, false, "csv"},
      {"asymptote", "exact Gamma_X(infinity) from the coteries", false, false, false, false, false, "text"},
      {"classify", "decide whether the normalized gap is constant in p", false, false, false, false, false, "json"},
      {"verify", "decide the enhanced inequality for a constant G", true, false, true, true, false, "json"},
      {"coefficients", "level coefficients c_k of a simplex", false, false, false, false, true, "csv"},
  };
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--input", c.input, "input file, '-' for stdin")->required();
    sub->add_option("--format", c.format, "csv-matrix or json-dendrogram (default: by extension)")
        ->check(CLI::IsMember({"csv-matrix", "json-dendrogram"}));
    sub->add_option("--mode", c.mode, "float or rational arithmetic")->check(CLI::IsMember({"float", "rational"}));
    sub->add_option("--out", c.out, "output format")->check(CLI::IsMember({"json", "csv", "text"}));
    if (cmd.p) sub->add_option("--p", c.p, "exponent p in [0, 30]");
    if (cmd.grid) sub->add_option("--grid", c.grid, "p grid a:b:steps (steps intervals)");
    if (cmd.trials) {
      sub->add_option("--trials", c.trials, "random trials or zeta samples");
      sub->add_option("--seed", c.seed, "RNG seed, required with --trials");
    }
    if (cmd.g) sub->add_option("--G", c.g, "constant G > 0, decimal or fraction");
    if (cmd.simplex) sub->add_option("--simplex", c.simplex, "simplex JSON file");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o;
    std::ostringstream e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? Ok : Malformed;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const std::string cmd = chosen->get_name();
  if (c.out.empty()) {
    for (const auto& k : commands) {
      if (cmd == k.name) c.out = k.default_out;
    }
  }

  try {
    if (c.trials > 0 && !c.seed) throw UsageError("--seed is required whenever --trials is positive");
    if (c.mode == "rational") return dispatch<Rational>(cmd, c, out, err);
    return dispatch<double>(cmd, c, out, err);
  } catch (const Abort& a) {
    return a.code;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return Malformed;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return Malformed;
  } catch (const NegativeTypeFailure& e) {
    out << json{{"error", "negative-type"}, {"p", e.p()}, {"gamma", e.gamma()}, {"omega", omega_json(e.omega())}}.dump()
        << '\n';
    err << "solver failure: " << e.what() << '\n';
    return SolverFailure;
  } catch (const CapacityError& e) {
    out << json{{"error", "capacity"}, {"message", e.what()}}.dump() << '\n';
    err << "solver failure: " << e.what() << '\n';
    return SolverFailure;
  } catch (const SolverError& e) {
    out << json{{"error", "solver"}, {"message", e.what()}}.dump() << '\n';
    err << "solver failure: " << e.what() << '\n';
    return SolverFailure;
  } catch (const StructuralError& e) {
    err << "structural error: " << e.what() << '\n';
    return NotAMetric;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return Malformed;
  }
}

}  // namespace ultragap::cli
