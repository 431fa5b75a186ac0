#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ultragap/dendrogram.hpp"
#include "ultragap/errors.hpp"
#include "ultragap/metric.hpp"

namespace ultragap {

template <class T>
struct TeamMember {
  std::size_t point;
  T weight;
};

/// Weight vector omega with sum(omega) = 0 and sum(|omega|) = 2.
///
/// Positive entries form the M-team, negative entries the N-team (with
/// weight -omega), zeros belong to neither. Teams are listed in increasing
/// point order.
template <class T>
class Simplex {
 public:
  /// Validates the two constraints (to 1e-12 in float mode, exactly in
  /// rational mode). Throws SimplexRejected otherwise.
  static Simplex from_weights(std::vector<T> omega);

  std::size_t size() const noexcept { return omega_.size(); }
  const std::vector<T>& omega() const noexcept { return omega_; }
  const T& operator[](std::size_t k) const { return omega_[k]; }
  std::vector<TeamMember<T>> m_team() const;
  std::vector<TeamMember<T>> n_team() const;

 private:
  explicit Simplex(std::vector<T> omega) : omega_(std::move(omega)) {}
  std::vector<T> omega_;
};

class SimplexRejected : public DomainError {
 public:
  SimplexRejected(double sum_residual, double abs_residual);
  /// sum(omega)
  double sum_residual() const noexcept { return sum_residual_; }
  /// sum(|omega|) - 2
  double abs_residual() const noexcept { return abs_residual_; }

 private:
  double sum_residual_;
  double abs_residual_;
};

template <class T>
Simplex<T> simplex_from_weights(std::vector<T> omega) {
  return Simplex<T>::from_weights(std::move(omega));
}

/// Rescales an arbitrary non-zero mean-zero vector onto the simplex set by
/// normalizing the positive and negative parts separately to total weight 1.
Simplex<double> simplex_from_direction(std::span<const double> direction);

/// Simplex gap from the team decomposition:
/// sum m_j n_i d^p - sum_{j1<j2} m m d^p - sum_{i1<i2} n n d^p.
/// Float result; rational inputs are evaluated exactly when p is an integer.
template <class T>
T gamma_def(const FiniteMetric<T>& m, double p, const Simplex<T>& w);

/// The same gap as the quadratic form -1/2 omega^T D_p omega.
template <class T>
T gamma_quadratic(const FiniteMetric<T>& m, double p, const Simplex<T>& w);

/// Per-node block sums M(v), N(v) indexed by tree node id.
template <class T>
struct BlockSums {
  std::vector<T> m;
  std::vector<T> n;

  T imbalance(std::size_t node) const { return T(m[node] - n[node]); }
};

template <class T>
BlockSums<T> block_sums(const DendroTree<T>& t, const Simplex<T>& w);

/// Coefficients c_1..c_l with gamma_p(omega) = sum_k c_k a_k^p for p > 0.
template <class T>
struct LevelCoefficients {
  /// c[k-1] is c_k.
  std::vector<T> c;
  /// heights[k-1] is a_k.
  std::vector<T> heights;

  std::size_t levels() const noexcept { return c.size(); }
  /// sum_{i >= k} c_i, for k in [1, l].
  T tail_sum(std::size_t k) const;
  T total() const { return tail_sum(1); }
  /// sum_k c_k a_k^p in double precision; p = 0 gives sum_k c_k.
  double evaluate(double p) const;
};

/// c_k = sum over level-k nodes v of c_k(v), where
/// 2 c_k(v) = sum_{u in Adj(v)} (M(u) - N(u))^2 - (M(v) - N(v))^2.
template <class T>
LevelCoefficients<T> level_coefficients(const DendroTree<T>& t, const Simplex<T>& w);

struct FlatnessCertificate {
  enum class Reason { None, UnbalancedCoterie, WeightOutsideCoterie };

  bool flat = true;
  Reason reason = Reason::None;
  /// Offending tree node (the coterie or the weighted leaf).
  std::size_t node = 0;
  /// |M - N| for an unbalanced coterie, or the leaf weight.
  double residual = 0.0;
};

const char* to_string(FlatnessCertificate::Reason reason);

/// A simplex is flat iff every coterie is simplicially balanced and every
/// weighted point lies in a coterie.
template <class T>
FlatnessCertificate is_flat(const DendroTree<T>& t, const Simplex<T>& w);

/// |LHS - RHS| of the block-sum identity
///   sum_{i != j} a_i b_j - sum_{i<j} (a_i a_j + b_i b_j)
///     = sum_i (a_i - b_i)/2 * sum_{j != i} (b_j - a_j).
/// Requires equal lengths greater than 1.
double lemma0_check(std::span<const double> a, std::span<const double> b);

}  // namespace ultragap
