#include "ultragap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <random>
#include <thread>

#include "ultragap/errors.hpp"
#include "ultragap/qp.hpp"

namespace ultragap {
namespace {

std::vector<std::size_t> members_of(std::uint64_t mask, std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if ((mask >> i) & 1) out.push_back(i);
  }
  return out;
}

bool lex_less(std::uint64_t a, std::uint64_t b, std::size_t n) {
  const auto sa = members_of(a, n);
  const auto sb = members_of(b, n);
  return std::lexicographical_compare(sa.begin(), sa.end(), sb.begin(), sb.end());
}

void check_p(double p, const SolverOptions& options) {
  if (!std::isfinite(p) || p < 0.0 || p > options.p_max) {
    throw DomainError("p = " + format_decimal(p) + " is outside [0, " + format_decimal(options.p_max) +
                      "]; use the closed form for the limit p -> infinity");
  }
}

// gamma_p of omega on an ultrametric via its level coefficients. Block sums
// keep the balanced, large-height terms free of cancellation.
double tree_gamma(const DendroTree<double>& tree, const Simplex<double>& w, double p) {
  return level_coefficients(tree, w).evaluate(p);
}

}  // namespace

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ULTRAGAP_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) hw = std::min(hw, static_cast<unsigned>(cap));
  }
  return hw;
}

Rational theta(std::size_t n) {
  if (n < 2) throw DomainError("theta(n) needs n >= 2");
  const auto lo = static_cast<unsigned long>(n / 2);
  const auto hi = static_cast<unsigned long>((n + 1) / 2);
  Rational t = (Rational(1, lo) + Rational(1, hi)) / 2;
  t.canonicalize();
  return t;
}

Rational gamma_infinity(std::span<const std::size_t> coterie_sizes) {
  if (coterie_sizes.empty()) throw DomainError("an ultrametric space with n >= 2 has at least one coterie");
  Rational sum(0);
  for (std::size_t size : coterie_sizes) sum += 1 / theta(size);
  Rational out = 1 / sum;
  out.canonicalize();
  return out;
}

template <class T>
Rational gamma_infinity(const DendroTree<T>& t) {
  const auto profile = coterie_profile(t);
  return gamma_infinity(std::span<const std::size_t>(profile.sizes));
}

template <class T>
Simplex<Rational> flat_witness(const DendroTree<T>& t) {
  const auto coteries = t.coteries();
  Rational total(0);
  for (std::size_t id : coteries) total += 1 / theta(t.node(id).members.size());
  std::vector<Rational> omega(t.points(), Rational(0));
  for (std::size_t id : coteries) {
    const auto& members = t.node(id).members;
    const std::size_t size = members.size();
    const Rational weight = (1 / theta(size)) / total;
    const std::size_t lo = size / 2;
    const std::size_t hi = size - lo;
    for (std::size_t r = 0; r < size; ++r) {
      omega[members[r]] = r < lo ? Rational(weight / lo) : Rational(-weight / hi);
      omega[members[r]].canonicalize();
    }
  }
  return Simplex<Rational>::from_weights(std::move(omega));
}

GapResult gap(const FiniteMetric<double>& m, double p, const SolverOptions& options) {
  const std::size_t n = m.size();
  if (n < 2) throw DomainError("the gap needs at least two points");
  if (n > options.max_points) {
    throw CapacityError("n = " + std::to_string(n) + " exceeds the enumeration cap of " +
                        std::to_string(options.max_points) + " points; use the randomized oracle for an upper bound");
  }
  check_p(p, options);
  const Normalized<double> norm = normalize(m);
  if (max_distance(norm.metric) > options.max_distance_ratio) {
    throw DomainError("distance ratio exceeds " + format_decimal(options.max_distance_ratio) +
                      "; D_p would be too ill-conditioned in double precision");
  }
  const FiniteMetric<double> dp = power(norm.metric, p);
  const double scale_applied = Scalar<double>::pow(norm.scale, p);

  // Ultrametrics have strict p-negative type for every p.
  if (auto dir = m.is_ultrametric() ? std::nullopt : qp::negative_type_direction(dp.data(), n)) {
    const Simplex<double> w = simplex_from_direction(*dir);
    throw NegativeTypeFailure(p, w.omega(), gamma_quadratic(m, p, w));
  }

  const std::size_t count = (std::size_t{1} << (n - 1)) - 1;
  std::vector<qp::OrthantSolution> solutions(count);
  std::vector<std::exception_ptr> errors(count);
  const unsigned workers = std::min<std::size_t>(resolve_threads(options.threads), count);
  auto work = [&](unsigned worker) {
    for (std::size_t idx = worker; idx < count; idx += workers) {
      try {
        solutions[idx] = qp::solve_orthant(dp.data(), n, 1 | (std::uint64_t{idx} << 1));
      } catch (...) {
        errors[idx] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  // Sequential reduce. Values within 1e-12 (relative) of each other are ties
  // and go to the lexicographically smallest S, so rounding noise between
  // equivalent orthants does not pick the witness.
  std::size_t best = 0;
  for (std::size_t idx = 1; idx < count; ++idx) {
    const double v = solutions[idx].value;
    const double b = solutions[best].value;
    const double tie = 1e-12 * std::max(1.0, std::abs(b));
    if (v < b - tie ||
        (v <= b + tie && lex_less(1 | (std::uint64_t{idx} << 1), 1 | (std::uint64_t{best} << 1), n))) {
      best = idx;
    }
  }
  Simplex<double> witness = Simplex<double>::from_weights(solutions[best].omega);
  double value = solutions[best].value;
  // The extended solve already carries the value to full double precision;
  // re-evaluating the rounded omega would not.
  if (m.is_ultrametric() && solutions[best].precision_bits <= 53) {
    value = tree_gamma(build_tree(build_dendrogram(norm.metric)), witness, p);
  }
  return GapResult{p, value * scale_applied, std::move(witness), count, scale_applied};
}

GapCurve gap_curve(const FiniteMetric<double>& m, std::span<const double> grid, const SolverOptions& options) {
  if (grid.empty()) throw DomainError("empty p grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    check_p(grid[i], options);
    if (i > 0 && !(grid[i - 1] < grid[i])) throw DomainError("p grid must be strictly increasing");
  }
  GapCurve curve;
  for (double p : grid) curve.points.push_back(gap(m, p, options));

  const double lower = m.is_ultrametric() ? to_double(theta(m.size())) : 0.0;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const double g = curve.points[i].normalized();
    if (i > 0 && g < curve.points[i - 1].normalized() - 1e-10) curve.monotone = false;
    if (m.is_ultrametric() && (g < lower - 1e-12 || g > 1.0 + 1e-12)) curve.bounded = false;
  }
  if (m.is_ultrametric()) {
    curve.gamma_infinity = gamma_infinity(build_tree(build_dendrogram(m)));
    curve.final_residual = to_double(*curve.gamma_infinity) - curve.points.back().normalized();
  }
  return curve;
}

const char* to_string(Constancy c) {
  switch (c) {
    case Constancy::ScaledDiscrete: return "ScaledDiscrete";
    case Constancy::ConstantEvenCoteries: return "ConstantEvenCoteries";
    case Constancy::NonConstant: return "NonConstant";
  }
  return "unknown";
}

template <class T>
ConstancyClass classify(const FiniteMetric<T>& m) {
  if (!m.is_ultrametric()) throw DomainError("classification needs an ultrametric");
  if (m.size() < 2) throw DomainError("classification needs at least two points");
  const DendroTree<T> tree = build_tree(build_dendrogram(m));
  ConstancyClass out;
  out.profile = coterie_profile(tree);
  out.levels = tree.levels();
  out.gamma_zero = theta(m.size());
  out.gamma_infinity = gamma_infinity(std::span<const std::size_t>(out.profile.sizes));
  const bool all_even = std::all_of(out.profile.sizes.begin(), out.profile.sizes.end(),
                                    [](std::size_t s) { return s % 2 == 0; });
  if (out.levels == 1) {
    out.verdict = Constancy::ScaledDiscrete;
  } else if (out.profile.covered == m.size() && all_even) {
    out.verdict = Constancy::ConstantEvenCoteries;
  } else {
    out.verdict = Constancy::NonConstant;
  }
  return out;
}

EnhancedVerdict verify_enhanced(const FiniteMetric<double>& m, double G, double p, std::size_t samples,
                                std::uint64_t seed, const SolverOptions& options) {
  if (!(G > 0) || !std::isfinite(G)) throw DomainError("G must be a positive real");
  check_p(p, options);
  EnhancedVerdict out;
  out.alpha = min_nonzero_distance(m);
  out.threshold = G * Scalar<double>::pow(out.alpha, p);
  out.samples = samples;
  try {
    const GapResult r = gap(m, p, options);
    out.gap = r.value;
    out.holds = out.threshold <= r.value + 1e-9 * std::max(1.0, r.value);
    if (!out.holds) out.violating_zeta = r.witness.omega();
  } catch (const NegativeTypeFailure& failure) {
    out.holds = false;
    out.violating_zeta = failure.omega();
  }

  const std::size_t n = m.size();
  const FiniteMetric<double> dp = power(m, p);
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> weight(1.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> zeta(n);
  bool first = true;
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<bool> positive(n);
    std::size_t npos = 0;
    do {
      npos = 0;
      for (std::size_t i = 0; i < n; ++i) npos += (positive[i] = coin(rng));
    } while (npos == 0 || npos == n);
    double pos = 0.0;
    double neg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      zeta[i] = weight(rng);
      (positive[i] ? pos : neg) += zeta[i];
    }
    for (std::size_t i = 0; i < n; ++i) zeta[i] = positive[i] ? zeta[i] / pos : -zeta[i] / neg;
    // (sum |zeta|)^2 = 4 after normalization.
    double form = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) form += dp(i, j) * zeta[i] * zeta[j];
    }
    const double lhs = 2.0 * out.threshold + form;
    if (first || lhs > out.max_sampled_lhs) out.max_sampled_lhs = lhs;
    first = false;
  }
  const double tol = 1e-9 * std::max(1.0, max_distance(dp));
  if (out.holds && samples > 0 && out.max_sampled_lhs > tol) out.samples_consistent = false;
  return out;
}

template Rational gamma_infinity<double>(const DendroTree<double>&);
template Rational gamma_infinity<Rational>(const DendroTree<Rational>&);
template Simplex<Rational> flat_witness<double>(const DendroTree<double>&);
template Simplex<Rational> flat_witness<Rational>(const DendroTree<Rational>&);
template ConstancyClass classify<double>(const FiniteMetric<double>&);
template ConstancyClass classify<Rational>(const FiniteMetric<Rational>&);

}  // namespace ultragap
