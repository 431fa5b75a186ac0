#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "ultragap/rational.hpp"

namespace ultragap {

enum class MetricKind { General, Ultrametric };

const char* to_string(MetricKind kind);

template <class T>
class FiniteMetric;

namespace detail {
struct MetricAccess;
}

/// Labeled symmetric distance matrix that passed validation.
///
/// Instances are immutable. The only ways to obtain one are validate() and the
/// transformations below, so every FiniteMetric satisfies: zero diagonal,
/// symmetry, strictly positive off-diagonal entries, and (for kind
/// Ultrametric) the strong triangle inequality.
template <class T>
class FiniteMetric {
 public:
  using value_type = T;

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const T& operator()(std::size_t i, std::size_t j) const { return dist_[i * size() + j]; }
  const std::vector<T>& data() const noexcept { return dist_; }
  MetricKind kind() const noexcept { return kind_; }
  bool is_ultrametric() const noexcept { return kind_ == MetricKind::Ultrametric; }

  friend bool operator==(const FiniteMetric& a, const FiniteMetric& b) {
    return a.kind_ == b.kind_ && a.labels_ == b.labels_ && a.dist_ == b.dist_;
  }

 private:
  friend struct detail::MetricAccess;
  FiniteMetric(std::vector<std::string> labels, std::vector<T> dist, MetricKind kind)
      : labels_(std::move(labels)), dist_(std::move(dist)), kind_(kind) {}

  std::vector<std::string> labels_;
  std::vector<T> dist_;
  MetricKind kind_;
};

namespace detail {
struct MetricAccess {
  template <class T>
  static FiniteMetric<T> make(std::vector<std::string> labels, std::vector<T> dist, MetricKind kind) {
    return FiniteMetric<T>(std::move(labels), std::move(dist), kind);
  }
};
}  // namespace detail

enum class StructuralIssue { NotSquare, LabelCount, NonFinite, Negative, NonzeroDiagonal, Asymmetric, ZeroOffDiagonal };

const char* to_string(StructuralIssue issue);

struct StructuralViolation {
  StructuralIssue issue;
  std::size_t i;
  std::size_t j;
};

/// d(i,j) compared against the bound formed through k. For the ordinary
/// triangle inequality bound = d(i,k) + d(k,j); for the strong one
/// bound = max(d(i,k), d(j,k)).
template <class T>
struct TripleViolation {
  std::size_t i;
  std::size_t j;
  std::size_t k;
  T distance;
  T bound;
};

template <class T>
struct ViolationReport {
  std::vector<StructuralViolation> structural;
  std::vector<TripleViolation<T>> triangle;

  bool empty() const { return structural.empty() && triangle.empty(); }
};

template <class T>
using Validation = std::variant<FiniteMetric<T>, ViolationReport<T>>;

/// Checks the metric axioms on a row-major n*n matrix. Returns a FiniteMetric
/// (kind Ultrametric when every triple satisfies the strong triangle
/// inequality) or a report listing every structural problem, or failing that
/// every triangle-inequality violation. Empty labels default to z1..zn.
template <class T>
Validation<T> validate(std::vector<T> matrix, std::size_t n, std::vector<std::string> labels = {});

/// Convenience overload for nested rows; ragged input is reported as NotSquare.
template <class T>
Validation<T> validate(const std::vector<std::vector<T>>& rows, std::vector<std::string> labels = {});

/// Every triple (i<j, k) with d(i,j) > max(d(i,k), d(j,k)).
template <class T>
std::vector<TripleViolation<T>> strong_triangle_violations(const FiniteMetric<T>& m);

/// Minimum off-diagonal distance. Throws DomainError when n = 1.
template <class T>
T min_nonzero_distance(const FiniteMetric<T>& m);

/// Largest entry of the matrix.
template <class T>
T max_distance(const FiniteMetric<T>& m);

/// Entrywise d^p with 0^0 = 0. Kind is kept for ultrametrics; otherwise the
/// result is labelled General even when d^p is no longer a metric.
/// Exact powers (Rational) need an integer exponent.
template <class T>
FiniteMetric<T> power(const FiniteMetric<T>& m, double p);

/// Entrywise c * d for c > 0.
template <class T>
FiniteMetric<T> scale(const FiniteMetric<T>& m, const T& factor);

template <class T>
struct Normalized {
  FiniteMetric<T> metric;
  T scale;
};

/// d / alpha_1 together with alpha_1. Gap results for d are those of the
/// normalized metric times scale^p.
template <class T>
Normalized<T> normalize(const FiniteMetric<T>& m);

FiniteMetric<double> to_float(const FiniteMetric<Rational>& m);

/// Discrete metric scaled by `height` on n points labelled z1..zn.
FiniteMetric<double> discrete_metric(std::size_t n, double height = 1.0);

std::vector<std::string> default_labels(std::size_t n);

}  // namespace ultragap
