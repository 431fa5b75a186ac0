#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ultragap/dendrogram.hpp"
#include "ultragap/metric.hpp"
#include "ultragap/rational.hpp"
#include "ultragap/simplex.hpp"

namespace ultragap {

/// theta(n) = (1/floor(n/2) + 1/ceil(n/2)) / 2, the gap of the discrete
/// metric on n points. Throws DomainError for n < 2.
Rational theta(std::size_t n);

/// {sum_k theta(|B_k|)^-1}^-1 over the coteries B_k.
template <class T>
Rational gamma_infinity(const DendroTree<T>& t);

/// Coterie sizes only; the same formula as above.
Rational gamma_infinity(std::span<const std::size_t> coterie_sizes);

/// A flat simplex attaining gamma_infinity on the normalized space: each
/// coterie carries the balanced floor/ceil split of the discrete optimum,
/// scaled by w_k proportional to theta(|B_k|)^-1.
template <class T>
Simplex<Rational> flat_witness(const DendroTree<T>& t);

struct SolverOptions {
  /// Largest n handled by sign-partition enumeration.
  std::size_t max_points = 16;
  double p_max = 30.0;
  /// Bound on max(d) / min(d) in float mode.
  double max_distance_ratio = 1e4;
  /// Worker threads; 0 reads ULTRAGAP_THREADS and falls back to the hardware count.
  unsigned threads = 0;
};

struct GapResult {
  double p = 0.0;
  /// Gamma_X(p) of the input metric.
  double value = 0.0;
  /// Rounded to double. When D_p is too stiff for double precision the value
  /// is computed at extended precision and may not be reproduced by
  /// evaluating this witness in double.
  Simplex<double> witness;
  std::size_t partitions_explored = 0;
  /// alpha_1^p; value / scale_applied is the gap of the normalized metric.
  double scale_applied = 1.0;

  double normalized() const { return value / scale_applied; }
};

/// Gamma_X(p) by exact enumeration of sign partitions. For every subset S
/// containing the first point (complement symmetry), the convex program
/// min -1/2 omega^T D_p omega over the orthant of S is solved by active set;
/// the minimum over all S wins, ties going to the lexicographically smallest
/// S. Works on the normalized metric and rescales by alpha_1^p.
///
/// Throws CapacityError (n > max_points), DomainError (p out of range,
/// n < 2, distance ratio too large) and NegativeTypeFailure when D_p is not
/// of negative type.
GapResult gap(const FiniteMetric<double>& m, double p, const SolverOptions& options = {});

struct OracleOptions {
  /// Sign patterns polished after sampling, best sampled value first.
  std::size_t max_polished = 256;
  std::size_t polish_iterations = 20000;
};

struct OracleResult {
  /// Smallest simplex gap found; an upper bound on Gamma_X(p).
  double value = 0.0;
  Simplex<double> best;
  std::size_t trials = 0;
  std::size_t polished = 0;
};

/// Randomized upper bound on Gamma_X(p), independent of gap(): random sign
/// patterns with team weights uniform on each weight simplex, followed by
/// accelerated projected-gradient polishing of the best patterns.
OracleResult gap_oracle(const FiniteMetric<double>& m, double p, std::size_t trials, std::uint64_t seed,
                        const OracleOptions& options = {});

struct GapCurve {
  std::vector<GapResult> points;
  /// Present for ultrametric input.
  std::optional<Rational> gamma_infinity;
  /// gamma_infinity minus the normalized gap at the last grid point.
  std::optional<double> final_residual;
  /// Normalized gaps never decrease by more than 1e-10.
  bool monotone = true;
  /// Normalized gaps lie in [theta(n) - 1e-12, 1 + 1e-12].
  bool bounded = true;
};

/// Gaps on an increasing grid within [0, p_max]. Non-ultrametric input
/// propagates NegativeTypeFailure from the first failing grid point.
GapCurve gap_curve(const FiniteMetric<double>& m, std::span<const double> grid, const SolverOptions& options = {});

enum class Constancy { ScaledDiscrete, ConstantEvenCoteries, NonConstant };

const char* to_string(Constancy c);

struct ConstancyClass {
  Constancy verdict = Constancy::NonConstant;
  Rational gamma_zero;
  Rational gamma_infinity;
  CoterieProfile profile;
  /// Number of non-zero heights l.
  std::size_t levels = 0;
};

/// Decides whether Gamma_X(p) / alpha^p is constant on [0, inf): the scaled
/// discrete metric (l = 1), or coteries covering X with all sizes even.
template <class T>
ConstancyClass classify(const FiniteMetric<T>& m);

struct EnhancedVerdict {
  bool holds = false;
  /// G * alpha^p.
  double threshold = 0.0;
  /// Gamma_X(p); absent when the metric lacks p-negative type.
  std::optional<double> gap;
  double alpha = 0.0;
  std::size_t samples = 0;
  /// Largest left-hand side over the sampled zeta (0 when no samples).
  double max_sampled_lhs = 0.0;
  /// False if a sample contradicts the verdict.
  bool samples_consistent = true;
  /// zeta with positive left-hand side, when the inequality fails.
  std::optional<std::vector<double>> violating_zeta;
};

/// Decides (G alpha^p / 2)(sum|zeta|)^2 + sum d^p zeta_j zeta_i <= 0 for every
/// mean-zero zeta. The inequality holds exactly when G alpha^p <= Gamma_X(p),
/// so the verdict comes from gap(); sampled zeta serve as confirming witnesses.
EnhancedVerdict verify_enhanced(const FiniteMetric<double>& m, double G, double p, std::size_t samples,
                                std::uint64_t seed, const SolverOptions& options = {});

/// Worker count after applying ULTRAGAP_THREADS.
unsigned resolve_threads(unsigned requested);

}  // namespace ultragap
