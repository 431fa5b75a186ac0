#include "ultragap/io.hpp"

#include <charconv>
#include <istream>
#include <iterator>
#include <ostream>
#include <string_view>

#include "json.hpp"
#include "ultragap/errors.hpp"

namespace ultragap::io {
namespace {

using nlohmann::json;

struct Field {
  std::string text;
  std::size_t column;
};

std::vector<Field> split_csv(const std::string& line) {
  std::vector<Field> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::size_t end = comma == std::string::npos ? line.size() : comma;
    std::size_t a = start;
    std::size_t b = end;
    while (a < b && (line[a] == ' ' || line[a] == '\t')) ++a;
    while (b > a && (line[b - 1] == ' ' || line[b - 1] == '\t' || line[b - 1] == '\r')) --b;
    out.push_back({line.substr(a, b - a), a + 1});
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

std::string unquote(std::string s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

// Line and column of a byte offset into `text`.
std::pair<std::size_t, std::size_t> locate(const std::string& text, std::size_t offset) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

json parse_json(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = locate(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError("invalid JSON", line, column);
  }
}

template <class T>
T scalar_from_json(const json& v, const char* what) {
  if (v.is_string()) return Scalar<T>::parse(v.get<std::string>());
  if (v.is_number_integer()) return Scalar<T>::parse(v.dump());
  if (v.is_number_float()) {
    // Shortest round-trip text, so 0.1 reads as 1/10 in rational mode.
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v.get<double>());
    return Scalar<T>::parse(std::string_view(buf, res.ptr - buf));
  }
  throw ParseError(std::string(what) + " must be a number or a numeric string", 0, 0);
}

template <class T>
json scalar_to_json(const T& v) {
  if constexpr (Scalar<T>::exact) {
    if (v.get_den() == 1 && v.get_num().fits_slong_p()) return json(v.get_num().get_si());
    return json(to_string(v));
  } else {
    return json(v);
  }
}

const json& member(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError(std::string("missing key \"") + key + "\"", 0, 0);
  return obj.at(key);
}

}  // namespace

template <class T>
CsvMatrix<T> read_matrix_csv(std::istream& in) {
  CsvMatrix<T> out;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split_csv(line);
    if (header) {
      for (const auto& f : fields) {
        if (f.text.empty()) throw ParseError("empty label", line_no, f.column);
        out.labels.push_back(unquote(f.text));
      }
      width = fields.size();
      header = false;
      continue;
    }
    if (fields.size() != width) {
      const std::size_t col = fields.size() > width ? fields[width].column : line.size() + 1;
      throw ParseError("row has " + std::to_string(fields.size()) + " entries, expected " + std::to_string(width),
                       line_no, col);
    }
    std::vector<T> row;
    row.reserve(width);
    for (const auto& f : fields) {
      try {
        row.push_back(Scalar<T>::parse(f.text));
      } catch (const DomainError& e) {
        throw ParseError(e.what(), line_no, f.column);
      }
    }
    out.rows.push_back(std::move(row));
  }
  if (header) throw ParseError("empty input", 0, 0);
  return out;
}

template <class T>
void write_matrix_csv(std::ostream& out, const FiniteMetric<T>& m) {
  for (std::size_t i = 0; i < m.size(); ++i) out << (i ? "," : "") << m.labels()[i];
  out << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) out << (j ? "," : "") << Scalar<T>::str(m(i, j));
    out << '\n';
  }
}

template <class T>
Dendrogram<T> read_dendrogram_json(std::istream& in) {
  const json doc = parse_json(in);
  try {
    std::vector<std::string> labels;
    for (const auto& l : member(doc, "labels")) labels.push_back(l.get<std::string>());
    std::vector<T> heights;
    std::vector<Partition> partitions;
    for (const auto& level : member(doc, "levels")) {
      heights.push_back(scalar_from_json<T>(member(level, "height"), "height"));
      Partition part;
      for (const auto& block : member(level, "blocks")) {
        Block b;
        for (const auto& idx : block) {
          const auto k = idx.get<long long>();
          if (k < 0 || static_cast<std::size_t>(k) >= labels.size()) {
            throw StructuralError("block index " + std::to_string(k) + " out of range");
          }
          b.push_back(static_cast<std::size_t>(k));
        }
        part.push_back(std::move(b));
      }
      partitions.push_back(std::move(part));
    }
    return Dendrogram<T>::make(std::move(labels), std::move(heights), std::move(partitions));
  } catch (const json::exception& e) {
    throw ParseError(std::string("unexpected JSON shape: ") + e.what(), 0, 0);
  } catch (const DomainError& e) {
    throw ParseError(e.what(), 0, 0);
  }
}

template <class T>
void write_dendrogram_json(std::ostream& out, const Dendrogram<T>& d) {
  json doc;
  doc["labels"] = d.labels();
  doc["levels"] = json::array();
  for (std::size_t k = 1; k < d.heights().size(); ++k) {
    doc["levels"].push_back({{"height", scalar_to_json(d.heights()[k])}, {"blocks", d.partitions()[k]}});
  }
  out << doc.dump(2) << '\n';
}

template <class T>
Simplex<T> read_simplex_json(std::istream& in) {
  const json doc = parse_json(in);
  std::vector<T> omega;
  try {
    for (const auto& v : member(doc, "omega")) omega.push_back(scalar_from_json<T>(v, "omega entry"));
  } catch (const json::exception& e) {
    throw ParseError(std::string("unexpected JSON shape: ") + e.what(), 0, 0);
  } catch (const SimplexRejected&) {
    throw;
  } catch (const DomainError& e) {
    throw ParseError(e.what(), 0, 0);
  }
  return Simplex<T>::from_weights(std::move(omega));
}

template <class T>
void write_simplex_json(std::ostream& out, const Simplex<T>& w) {
  json omega = json::array();
  for (const T& v : w.omega()) {
    if constexpr (Scalar<T>::exact) {
      omega.push_back(scalar_to_json(v));
    } else {
      omega.push_back(round_decimal(v));
    }
  }
  out << json{{"omega", omega}}.dump() << '\n';
}

void write_gap_json(std::ostream& out, const GapResult& r) {
  json witness = json::array();
  for (double v : r.witness.omega()) witness.push_back(round_decimal(v));
  const json doc = {{"p", r.p},
                    {"value", round_decimal(r.value)},
                    {"witness", witness},
                    {"partitions_explored", r.partitions_explored},
                    {"scale_applied", round_decimal(r.scale_applied)}};
  out << doc.dump() << '\n';
}

void write_curve_csv(std::ostream& out, const GapCurve& curve) {
  out << "p,gamma,gamma_over_alpha1_p,residual_to_infinity\n";
  const bool has_limit = curve.gamma_infinity.has_value();
  const double limit = has_limit ? to_double(*curve.gamma_infinity) : 0.0;
  for (const auto& pt : curve.points) {
    out << format_decimal(pt.p) << ',' << format_decimal(pt.value) << ',' << format_decimal(pt.normalized()) << ',';
    if (has_limit) out << format_decimal(limit - pt.normalized());
    out << '\n';
  }
  if (has_limit) out << "inf,," << format_decimal(limit) << ",0\n";
}

template <class T>
void write_coefficients_csv(std::ostream& out, const LevelCoefficients<T>& c) {
  out << "k,alpha_k,c_k\n";
  for (std::size_t k = 1; k <= c.c.size(); ++k) {
    out << k << ',' << Scalar<T>::str(c.heights[k - 1]) << ',' << Scalar<T>::str(c.c[k - 1]) << '\n';
  }
}

#define ULTRAGAP_INSTANTIATE(T)                                                   \
  template CsvMatrix<T> read_matrix_csv<T>(std::istream&);                        \
  template void write_matrix_csv<T>(std::ostream&, const FiniteMetric<T>&);       \
  template Dendrogram<T> read_dendrogram_json<T>(std::istream&);                  \
  template void write_dendrogram_json<T>(std::ostream&, const Dendrogram<T>&);    \
  template Simplex<T> read_simplex_json<T>(std::istream&);                        \
  template void write_simplex_json<T>(std::ostream&, const Simplex<T>&);          \
  template void write_coefficients_csv<T>(std::ostream&, const LevelCoefficients<T>&);

ULTRAGAP_INSTANTIATE(double)
ULTRAGAP_INSTANTIATE(Rational)
#undef ULTRAGAP_INSTANTIATE

}  // namespace ultragap::io
