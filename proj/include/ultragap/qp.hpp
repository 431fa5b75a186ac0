#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ultragap::qp {

struct OrthantOptions {
  /// Bound multipliers above -tolerance * max(1, max|D|) count as optimal.
  double multiplier_tolerance = 1e-10;
  /// Iteration cap is cap_factor * n.
  std::size_t cap_factor = 10;
  /// Mantissa bits for the solve; 0 picks working_precision().
  unsigned precision_bits = 0;
};

struct OrthantSolution {
  /// Minimum of -1/2 omega^T D omega on the orthant face.
  double value = 0.0;
  std::vector<double> omega;
  std::size_t iterations = 0;
  /// 53 for a double-precision solve, more for the extended path.
  unsigned precision_bits = 53;
};

/// 53 when the off-diagonal spread max(D)/min(D) is at most 2^24, otherwise
/// 64 + 2 ceil(log2 spread) bits so that heavily weighted block imbalances
/// still resolve below the lightest entries.
unsigned working_precision(std::span<const double> distances, std::size_t n);

/// Primal active-set solve of
///   minimize -1/2 omega^T D omega
///   subject to omega_i >= 0 (i in S), omega_i <= 0 (i not in S),
///              sum_{S} omega = 1, sum_{not S} omega = -1,
/// where bit i of `in_s` marks membership of S and D is row-major n*n.
/// Starts from the uniform interior point; each iteration solves the
/// two-equality KKT system on the free variables and either blocks on the
/// first bound hit or releases the most negative bound multiplier.
/// Stiff matrices are solved in GMP floating point at the working precision;
/// the value is then exact to double precision while omega is rounded.
/// Throws SolverError when the iteration cap is reached.
OrthantSolution solve_orthant(std::span<const double> distances, std::size_t n, std::uint64_t in_s,
                              const OrthantOptions& options = {});

/// Smallest eigenpair of -1/2 D restricted to the mean-zero subspace. Returns
/// a mean-zero direction omega with -omega^T D omega < 0 when the smallest
/// eigenvalue is below -tolerance * max(1, max|D|), i.e. when D fails to be of
/// negative type.
std::optional<std::vector<double>> negative_type_direction(std::span<const double> distances, std::size_t n,
                                                           double tolerance = 1e-12);

}  // namespace ultragap::qp
