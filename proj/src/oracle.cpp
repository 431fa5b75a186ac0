#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "ultragap/errors.hpp"
#include "ultragap/solver.hpp"

namespace ultragap {
namespace {

struct Sample {
  double value;
  std::vector<double> x;  // |omega|
};

// Euclidean projection of v[idx] onto the probability simplex.
void project_simplex(std::vector<double>& v, const std::vector<std::size_t>& idx) {
  std::vector<double> u;
  u.reserve(idx.size());
  for (std::size_t i : idx) u.push_back(v[i]);
  std::sort(u.begin(), u.end(), std::greater<>());
  double running = 0.0;
  double tau = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    running += u[k];
    const double t = (running - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0) tau = t;
  }
  for (std::size_t i : idx) v[i] = std::max(0.0, v[i] - tau);
}

class Objective {
 public:
  Objective(const FiniteMetric<double>& dp, std::uint64_t pattern) : n_(dp.size()), h_(n_ * n_), lipschitz_(0.0) {
    for (std::size_t i = 0; i < n_; ++i) {
      (((pattern >> i) & 1) ? pos_ : neg_).push_back(i);
      double row = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        const bool same = ((pattern >> i) & 1) == ((pattern >> j) & 1);
        h_[i * n_ + j] = same ? -dp(i, j) : dp(i, j);
        row += std::abs(h_[i * n_ + j]);
      }
      lipschitz_ = std::max(lipschitz_, row);
    }
  }

  double value(const std::vector<double>& x) const {
    double f = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) f += x[i] * h_[i * n_ + j] * x[j];
    }
    return 0.5 * f;
  }

  std::vector<double> gradient(const std::vector<double>& x) const {
    std::vector<double> g(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) g[i] += h_[i * n_ + j] * x[j];
    }
    return g;
  }

  void project(std::vector<double>& x) const {
    project_simplex(x, pos_);
    project_simplex(x, neg_);
  }

  double lipschitz() const { return std::max(lipschitz_, 1e-300); }

 private:
  std::size_t n_;
  std::vector<double> h_;
  std::vector<std::size_t> pos_;
  std::vector<std::size_t> neg_;
  double lipschitz_;
};

// FISTA with function-value restart.
Sample polish(const Objective& f, Sample start, std::size_t iterations) {
  const double step = 1.0 / f.lipschitz();
  std::vector<double> x = start.x;
  std::vector<double> y = x;
  double fx = f.value(x);
  double t = 1.0;
  for (std::size_t it = 0; it < iterations; ++it) {
    std::vector<double> g = f.gradient(y);
    std::vector<double> next(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) next[i] = y[i] - step * g[i];
    f.project(next);
    const double fnext = f.value(next);
    double moved = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) moved = std::max(moved, std::abs(next[i] - x[i]));
    if (fnext > fx) {
      t = 1.0;
      y = x;
      continue;
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = next[i] + (t - 1.0) / tn * (next[i] - x[i]);
    t = tn;
    x = std::move(next);
    fx = fnext;
    if (moved < 1e-15) break;
  }
  if (fx < start.value) return Sample{fx, std::move(x)};
  return start;
}

}  // namespace

OracleResult gap_oracle(const FiniteMetric<double>& m, double p, std::size_t trials, std::uint64_t seed,
                        const OracleOptions& options) {
  const std::size_t n = m.size();
  if (n < 2) throw DomainError("the gap needs at least two points");
  if (n > 63) throw CapacityError("the oracle handles at most 63 points");
  if (trials == 0) throw DomainError("the oracle needs at least one trial");
  if (!std::isfinite(p) || p < 0.0) throw DomainError("p must be a finite non-negative real");

  const Normalized<double> norm = normalize(m);
  const FiniteMetric<double> dp = power(norm.metric, p);

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::exponential_distribution<double> weight(1.0);

  // Best sample per sign pattern, keyed with point 0 on the positive side.
  std::map<std::uint64_t, Sample> best;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::uint64_t pattern = 0;
    do {
      pattern = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (coin(rng)) pattern |= std::uint64_t{1} << i;
      }
    } while (pattern == 0 || pattern == (std::uint64_t{1} << n) - 1);
    if (!(pattern & 1)) pattern = ~pattern & ((std::uint64_t{1} << n) - 1);

    std::vector<double> x(n);
    double pos = 0.0;
    double neg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = weight(rng);
      (((pattern >> i) & 1) ? pos : neg) += x[i];
    }
    for (std::size_t i = 0; i < n; ++i) x[i] /= ((pattern >> i) & 1) ? pos : neg;

    const double v = Objective(dp, pattern).value(x);
    auto it = best.find(pattern);
    if (it == best.end()) {
      best.emplace(pattern, Sample{v, std::move(x)});
    } else if (v < it->second.value) {
      it->second = Sample{v, std::move(x)};
    }
  }

  std::vector<std::pair<std::uint64_t, Sample>> ranked(best.begin(), best.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second.value < b.second.value; });
  const std::size_t polished = std::min(options.max_polished, ranked.size());
  for (std::size_t r = 0; r < polished; ++r) {
    ranked[r].second = polish(Objective(dp, ranked[r].first), std::move(ranked[r].second), options.polish_iterations);
  }

  std::size_t winner = 0;
  for (std::size_t r = 1; r < ranked.size(); ++r) {
    if (ranked[r].second.value < ranked[winner].second.value) winner = r;
  }
  const auto& [pattern, sample] = ranked[winner];
  std::vector<double> omega(n);
  double pos = 0.0;
  double neg = 0.0;
  for (std::size_t i = 0; i < n; ++i) (((pattern >> i) & 1) ? pos : neg) += sample.x[i];
  for (std::size_t i = 0; i < n; ++i) omega[i] = ((pattern >> i) & 1) ? sample.x[i] / pos : -sample.x[i] / neg;
  Simplex<double> w = Simplex<double>::from_weights(std::move(omega));
  return OracleResult{gamma_quadratic(m, p, w), std::move(w), trials, polished};
}

}  // namespace ultragap
