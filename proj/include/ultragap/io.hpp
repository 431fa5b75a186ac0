#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ultragap/dendrogram.hpp"
#include "ultragap/metric.hpp"
#include "ultragap/simplex.hpp"
#include "ultragap/solver.hpp"

namespace ultragap::io {

template <class T>
struct CsvMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<T>> rows;
};

/// First row labels, then one row per point. Entries are decimals or
/// fractions "a/b". Throws ParseError with line and column on malformed or
/// ragged input; squareness is left to validate().
template <class T>
CsvMatrix<T> read_matrix_csv(std::istream& in);

template <class T>
void write_matrix_csv(std::ostream& out, const FiniteMetric<T>& m);

/// {"labels": [...], "levels": [{"height": h, "blocks": [[i, ...], ...]}, ...]}.
/// Heights may be JSON numbers or strings such as "3/2". The height-0 level
/// is optional. Throws ParseError or StructuralError.
template <class T>
Dendrogram<T> read_dendrogram_json(std::istream& in);

/// Writes every non-zero level; rational heights with a denominator are
/// written as strings.
template <class T>
void write_dendrogram_json(std::ostream& out, const Dendrogram<T>& d);

/// {"omega": [...]}; throws ParseError or SimplexRejected.
template <class T>
Simplex<T> read_simplex_json(std::istream& in);

template <class T>
void write_simplex_json(std::ostream& out, const Simplex<T>& w);

/// {"p", "value", "witness", "partitions_explored", "scale_applied"} with
/// decimals at 12 significant digits.
void write_gap_json(std::ostream& out, const GapResult& r);

/// Columns p, gamma, gamma_over_alpha1_p, residual_to_infinity, followed by
/// an "inf" row carrying gamma_infinity when it is known.
void write_curve_csv(std::ostream& out, const GapCurve& curve);

/// Columns k, alpha_k, c_k.
template <class T>
void write_coefficients_csv(std::ostream& out, const LevelCoefficients<T>& c);

}  // namespace ultragap::io
