#include "ultragap/simplex.hpp"

#include <cmath>

namespace ultragap {
namespace {

int sign_of(double v) { return (v > 0) - (v < 0); }
int sign_of(const Rational& v) { return sgn(v); }

template <class T>
T absolute(const T& v) {
  return sign_of(v) < 0 ? T(-v) : v;
}

template <class T>
double as_double(const T& v) {
  return Scalar<T>::to_double(v);
}

}  // namespace

SimplexRejected::SimplexRejected(double sum_residual, double abs_residual)
    : DomainError("not a normalized simplex: sum(omega) = " + format_decimal(sum_residual) +
                  ", sum(|omega|) - 2 = " + format_decimal(abs_residual)),
      sum_residual_(sum_residual),
      abs_residual_(abs_residual) {}

template <class T>
Simplex<T> Simplex<T>::from_weights(std::vector<T> omega) {
  T sum(0);
  T abs_sum(0);
  for (const T& v : omega) {
    sum += v;
    abs_sum += absolute(v);
  }
  const T abs_residual = abs_sum - T(2);
  bool ok;
  if constexpr (Scalar<T>::exact) {
    ok = sign_of(sum) == 0 && sign_of(abs_residual) == 0;
  } else {
    ok = std::isfinite(sum) && std::abs(sum) <= 1e-12 && std::abs(abs_residual) <= 1e-12;
  }
  if (!ok) throw SimplexRejected(as_double(sum), as_double(abs_residual));
  return Simplex(std::move(omega));
}

template <class T>
std::vector<TeamMember<T>> Simplex<T>::m_team() const {
  std::vector<TeamMember<T>> team;
  for (std::size_t k = 0; k < omega_.size(); ++k) {
    if (sign_of(omega_[k]) > 0) team.push_back({k, omega_[k]});
  }
  return team;
}

template <class T>
std::vector<TeamMember<T>> Simplex<T>::n_team() const {
  std::vector<TeamMember<T>> team;
  for (std::size_t k = 0; k < omega_.size(); ++k) {
    if (sign_of(omega_[k]) < 0) team.push_back({k, T(-omega_[k])});
  }
  return team;
}

Simplex<double> simplex_from_direction(std::span<const double> direction) {
  double pos = 0.0;
  double neg = 0.0;
  for (double v : direction) (v > 0 ? pos : neg) += std::abs(v);
  if (!(pos > 0) || !(neg > 0)) throw DomainError("direction needs both positive and negative entries");
  std::vector<double> omega(direction.begin(), direction.end());
  for (double& v : omega) v = v > 0 ? v / pos : v / neg;
  return Simplex<double>::from_weights(std::move(omega));
}

template <class T>
T gamma_def(const FiniteMetric<T>& m, double p, const Simplex<T>& w) {
  if (m.size() != w.size()) throw DomainError("simplex and metric sizes differ");
  auto dp = [&](std::size_t a, std::size_t b) { return Scalar<T>::pow(m(a, b), p); };
  const auto xs = w.m_team();
  const auto ys = w.n_team();
  T cross(0);
  for (const auto& x : xs) {
    for (const auto& y : ys) cross += x.weight * y.weight * dp(x.point, y.point);
  }
  T within(0);
  for (std::size_t a = 0; a < xs.size(); ++a) {
    for (std::size_t b = a + 1; b < xs.size(); ++b) within += xs[a].weight * xs[b].weight * dp(xs[a].point, xs[b].point);
  }
  for (std::size_t a = 0; a < ys.size(); ++a) {
    for (std::size_t b = a + 1; b < ys.size(); ++b) within += ys[a].weight * ys[b].weight * dp(ys[a].point, ys[b].point);
  }
  return T(cross - within);
}

template <class T>
T gamma_quadratic(const FiniteMetric<T>& m, double p, const Simplex<T>& w) {
  const std::size_t n = m.size();
  if (n != w.size()) throw DomainError("simplex and metric sizes differ");
  T form(0);
  for (std::size_t i = 0; i < n; ++i) {
    if (sign_of(w[i]) == 0) continue;
    T row(0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) row += Scalar<T>::pow(m(i, j), p) * w[j];
    }
    form += w[i] * row;
  }
  return T(-form / 2);
}

template <class T>
BlockSums<T> block_sums(const DendroTree<T>& t, const Simplex<T>& w) {
  if (t.points() != w.size()) throw DomainError("simplex and tree sizes differ");
  const auto& nodes = t.nodes();
  BlockSums<T> sums{std::vector<T>(nodes.size(), T(0)), std::vector<T>(nodes.size(), T(0))};
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    if (nodes[id].level == 0) {
      const T& v = w[nodes[id].members.front()];
      if (sign_of(v) > 0) sums.m[id] = v;
      if (sign_of(v) < 0) sums.n[id] = -v;
      continue;
    }
    for (std::size_t child : nodes[id].children) {
      sums.m[id] += sums.m[child];
      sums.n[id] += sums.n[child];
    }
  }
  return sums;
}

template <class T>
T LevelCoefficients<T>::tail_sum(std::size_t k) const {
  T sum(0);
  for (std::size_t i = k; i <= c.size(); ++i) sum += c[i - 1];
  return sum;
}

template <class T>
double LevelCoefficients<T>::evaluate(double p) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    sum += as_double(c[k]) * Scalar<double>::pow(as_double(heights[k]), p);
  }
  return sum;
}

template <class T>
LevelCoefficients<T> level_coefficients(const DendroTree<T>& t, const Simplex<T>& w) {
  const BlockSums<T> sums = block_sums(t, w);
  LevelCoefficients<T> out;
  out.c.assign(t.levels(), T(0));
  out.heights.assign(t.heights().begin() + 1, t.heights().end());
  for (std::size_t id = 0; id < t.nodes().size(); ++id) {
    const TreeNode& v = t.node(id);
    if (v.level == 0) continue;
    T twice(0);
    for (std::size_t u : v.children) {
      const T diff = sums.imbalance(u);
      twice += diff * diff;
    }
    const T own = sums.imbalance(id);
    twice -= own * own;
    out.c[v.level - 1] += twice / 2;
  }
  return out;
}

const char* to_string(FlatnessCertificate::Reason reason) {
  switch (reason) {
    case FlatnessCertificate::Reason::None: return "flat";
    case FlatnessCertificate::Reason::UnbalancedCoterie: return "unbalanced-coterie";
    case FlatnessCertificate::Reason::WeightOutsideCoterie: return "weight-outside-coterie";
  }
  return "unknown";
}

template <class T>
FlatnessCertificate is_flat(const DendroTree<T>& t, const Simplex<T>& w) {
  const BlockSums<T> sums = block_sums(t, w);
  FlatnessCertificate cert;
  for (std::size_t point = 0; point < t.points(); ++point) {
    if (sign_of(w[point]) == 0) continue;
    const auto parent = t.node(t.leaf(point)).parent;
    if (parent && t.node(*parent).level == 1) continue;
    cert.flat = false;
    cert.reason = FlatnessCertificate::Reason::WeightOutsideCoterie;
    cert.node = t.leaf(point);
    cert.residual = std::abs(as_double(w[point]));
    return cert;
  }
  for (std::size_t id : t.coteries()) {
    const T diff = sums.imbalance(id);
    if (Scalar<T>::is_zero_balance(diff)) continue;
    cert.flat = false;
    cert.reason = FlatnessCertificate::Reason::UnbalancedCoterie;
    cert.node = id;
    cert.residual = std::abs(as_double(diff));
    return cert;
  }
  return cert;
}

double lemma0_check(std::span<const double> a, std::span<const double> b) {
  const std::size_t k = a.size();
  if (k != b.size() || k < 2) throw DomainError("lemma0_check needs two vectors of equal length > 1");
  double lhs = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i != j) lhs += a[i] * b[j];
      if (i < j) lhs -= a[i] * a[j] + b[i] * b[j];
    }
  }
  double rhs = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double rest = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (j != i) rest += b[j] - a[j];
    }
    rhs += (a[i] - b[i]) / 2 * rest;
  }
  return std::abs(lhs - rhs);
}

template class Simplex<double>;
template class Simplex<Rational>;
template struct LevelCoefficients<double>;
template struct LevelCoefficients<Rational>;

#define ULTRAGAP_INSTANTIATE(T)                                                             \
  template T gamma_def<T>(const FiniteMetric<T>&, double, const Simplex<T>&);               \
  template T gamma_quadratic<T>(const FiniteMetric<T>&, double, const Simplex<T>&);         \
  template BlockSums<T> block_sums<T>(const DendroTree<T>&, const Simplex<T>&);             \
  template LevelCoefficients<T> level_coefficients<T>(const DendroTree<T>&, const Simplex<T>&); \
  template FlatnessCertificate is_flat<T>(const DendroTree<T>&, const Simplex<T>&);

ULTRAGAP_INSTANTIATE(double)
ULTRAGAP_INSTANTIATE(Rational)
#undef ULTRAGAP_INSTANTIATE

}  // namespace ultragap
