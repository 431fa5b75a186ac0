#include "ultragap/metric.hpp"

#include <algorithm>
#include <cmath>

#include "ultragap/errors.hpp"

namespace ultragap {

const char* to_string(MetricKind kind) {
  return kind == MetricKind::Ultrametric ? "ultrametric" : "general-metric";
}

const char* to_string(StructuralIssue issue) {
  switch (issue) {
    case StructuralIssue::NotSquare: return "not-square";
    case StructuralIssue::LabelCount: return "label-count";
    case StructuralIssue::NonFinite: return "non-finite";
    case StructuralIssue::Negative: return "negative";
    case StructuralIssue::NonzeroDiagonal: return "nonzero-diagonal";
    case StructuralIssue::Asymmetric: return "asymmetric";
    case StructuralIssue::ZeroOffDiagonal: return "zero-off-diagonal";
  }
  return "unknown";
}

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back("z" + std::to_string(i + 1));
  return labels;
}

namespace {

bool is_finite(double v) { return std::isfinite(v); }
bool is_finite(const Rational&) { return true; }

bool is_negative(double v) { return v < 0.0; }
bool is_negative(const Rational& v) { return sgn(v) < 0; }

bool is_zero(double v) { return v == 0.0; }
bool is_zero(const Rational& v) { return sgn(v) == 0; }

}  // namespace

template <class T>
Validation<T> validate(std::vector<T> matrix, std::size_t n, std::vector<std::string> labels) {
  using S = Scalar<T>;
  ViolationReport<T> report;
  if (n == 0 || matrix.size() != n * n) {
    report.structural.push_back({StructuralIssue::NotSquare, n, matrix.size()});
    return report;
  }
  if (labels.empty()) labels = default_labels(n);
  if (labels.size() != n) {
    report.structural.push_back({StructuralIssue::LabelCount, labels.size(), n});
    return report;
  }
  auto at = [&](std::size_t i, std::size_t j) -> const T& { return matrix[i * n + j]; };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const T& v = at(i, j);
      if (!is_finite(v)) {
        report.structural.push_back({StructuralIssue::NonFinite, i, j});
      } else if (is_negative(v)) {
        report.structural.push_back({StructuralIssue::Negative, i, j});
      } else if (i == j && !is_zero(v)) {
        report.structural.push_back({StructuralIssue::NonzeroDiagonal, i, j});
      } else if (i != j && is_zero(v)) {
        report.structural.push_back({StructuralIssue::ZeroOffDiagonal, i, j});
      }
      if (i < j && is_finite(v) && is_finite(at(j, i)) && !(v == at(j, i))) {
        report.structural.push_back({StructuralIssue::Asymmetric, i, j});
      }
    }
  }
  if (!report.structural.empty()) return report;

  bool strong = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        T sum = at(i, k) + at(k, j);
        if (!S::leq(at(i, j), sum)) report.triangle.push_back({i, j, k, at(i, j), sum});
        if (strong && !S::leq(at(i, j), std::max(at(i, k), at(j, k)))) strong = false;
      }
    }
  }
  if (!report.triangle.empty()) return report;
  return detail::MetricAccess::make<T>(std::move(labels), std::move(matrix),
                                       strong ? MetricKind::Ultrametric : MetricKind::General);
}

template <class T>
Validation<T> validate(const std::vector<std::vector<T>>& rows, std::vector<std::string> labels) {
  const std::size_t n = rows.size();
  std::vector<T> flat;
  flat.reserve(n * n);
  for (const auto& row : rows) {
    if (row.size() != n) {
      ViolationReport<T> report;
      report.structural.push_back({StructuralIssue::NotSquare, n, row.size()});
      return report;
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return validate<T>(std::move(flat), n, std::move(labels));
}

template <class T>
std::vector<TripleViolation<T>> strong_triangle_violations(const FiniteMetric<T>& m) {
  std::vector<TripleViolation<T>> out;
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        T bound = std::max(m(i, k), m(j, k));
        if (!Scalar<T>::leq(m(i, j), bound)) out.push_back({i, j, k, m(i, j), bound});
      }
    }
  }
  return out;
}

template <class T>
T min_nonzero_distance(const FiniteMetric<T>& m) {
  const std::size_t n = m.size();
  if (n < 2) throw DomainError("a one-point space has no non-zero distance");
  T best = m(0, 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) best = std::min(best, m(i, j));
  }
  return best;
}

template <class T>
T max_distance(const FiniteMetric<T>& m) {
  return *std::max_element(m.data().begin(), m.data().end());
}

template <class T>
FiniteMetric<T> power(const FiniteMetric<T>& m, double p) {
  if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("power exponent must be finite and >= 0");
  std::vector<T> out;
  out.reserve(m.data().size());
  for (const T& v : m.data()) out.push_back(Scalar<T>::pow(v, p));
  return detail::MetricAccess::make<T>(m.labels(), std::move(out), m.kind());
}

template <class T>
FiniteMetric<T> scale(const FiniteMetric<T>& m, const T& factor) {
  if (!(factor > 0)) throw DomainError("scale factor must be positive");
  std::vector<T> out;
  out.reserve(m.data().size());
  for (const T& v : m.data()) out.push_back(T(v * factor));
  return detail::MetricAccess::make<T>(m.labels(), std::move(out), m.kind());
}

template <class T>
Normalized<T> normalize(const FiniteMetric<T>& m) {
  T alpha = min_nonzero_distance(m);
  std::vector<T> out;
  out.reserve(m.data().size());
  for (const T& v : m.data()) out.push_back(T(v / alpha));
  return {detail::MetricAccess::make<T>(m.labels(), std::move(out), m.kind()), alpha};
}

FiniteMetric<double> to_float(const FiniteMetric<Rational>& m) {
  std::vector<double> out;
  out.reserve(m.data().size());
  for (const Rational& v : m.data()) out.push_back(v.get_d());
  return detail::MetricAccess::make<double>(m.labels(), std::move(out), m.kind());
}

FiniteMetric<double> discrete_metric(std::size_t n, double height) {
  if (n == 0) throw DomainError("discrete metric needs at least one point");
  if (!(height > 0)) throw DomainError("discrete metric height must be positive");
  std::vector<double> d(n * n, height);
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0.0;
  return detail::MetricAccess::make<double>(default_labels(n), std::move(d), MetricKind::Ultrametric);
}

#define ULTRAGAP_INSTANTIATE(T)                                                                    \
  template Validation<T> validate<T>(std::vector<T>, std::size_t, std::vector<std::string>);       \
  template Validation<T> validate<T>(const std::vector<std::vector<T>>&, std::vector<std::string>); \
  template std::vector<TripleViolation<T>> strong_triangle_violations<T>(const FiniteMetric<T>&);  \
  template T min_nonzero_distance<T>(const FiniteMetric<T>&);                                      \
  template T max_distance<T>(const FiniteMetric<T>&);                                              \
  template FiniteMetric<T> power<T>(const FiniteMetric<T>&, double);                               \
  template FiniteMetric<T> scale<T>(const FiniteMetric<T>&, const T&);                             \
  template Normalized<T> normalize<T>(const FiniteMetric<T>&);

ULTRAGAP_INSTANTIATE(double)
ULTRAGAP_INSTANTIATE(Rational)
#undef ULTRAGAP_INSTANTIATE

}  // namespace ultragap
