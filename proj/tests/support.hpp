#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ultragap/metric.hpp"
#include "ultragap/rational.hpp"
#include "ultragap/simplex.hpp"

namespace testsupport {

using ultragap::Rational;

inline std::string data_path(const std::string& name) { return std::string(ULTRAGAP_DATA_DIR) + "/" + name; }

// Random ultrametric built from merge records: clusters are merged in groups
// of two or more at strictly increasing heights, and two points are at the
// height of the merge that first joins them.
inline std::vector<std::vector<Rational>> random_ultrametric_rows(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < n; ++i) clusters.push_back({i});
  std::vector<std::vector<Rational>> d(n, std::vector<Rational>(n, Rational(0)));
  Rational height(0);
  std::uniform_int_distribution<int> step_num(1, 7);
  std::uniform_int_distribution<int> step_den(1, 4);
  while (clusters.size() > 1) {
    height += Rational(step_num(rng), step_den(rng));
    height.canonicalize();
    std::shuffle(clusters.begin(), clusters.end(), rng);
    std::uniform_int_distribution<std::size_t> group(2, std::min<std::size_t>(clusters.size(), 4));
    const std::size_t k = group(rng);
    std::vector<std::size_t> merged;
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t a : clusters[c]) {
        for (std::size_t b : merged) d[a][b] = d[b][a] = height;
      }
      merged.insert(merged.end(), clusters[c].begin(), clusters[c].end());
    }
    clusters.erase(clusters.begin(), clusters.begin() + static_cast<long>(k));
    std::sort(merged.begin(), merged.end());
    clusters.push_back(merged);
  }
  return d;
}

inline std::vector<std::vector<double>> to_double_rows(const std::vector<std::vector<Rational>>& rows) {
  std::vector<std::vector<double>> out;
  for (const auto& r : rows) {
    std::vector<double> row;
    for (const auto& v : r) row.push_back(v.get_d());
    out.push_back(row);
  }
  return out;
}

template <class T>
ultragap::FiniteMetric<T> must_validate(const std::vector<std::vector<T>>& rows) {
  auto v = ultragap::validate<T>(rows);
  return std::get<ultragap::FiniteMetric<T>>(std::move(v));
}

// Random exact simplex: each point joins M, N or (sometimes) neither, with
// small integer weights normalized per team.
inline std::vector<Rational> random_rational_omega(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> side(0, 4);
  std::uniform_int_distribution<int> weight(1, 9);
  while (true) {
    std::vector<int> s(n);
    std::vector<Rational> w(n);
    Rational pos(0), neg(0);
    for (std::size_t i = 0; i < n; ++i) {
      const int r = side(rng);
      s[i] = r < 2 ? 1 : r < 4 ? -1 : 0;
      if (s[i] != 0) {
        w[i] = weight(rng);
        (s[i] > 0 ? pos : neg) += w[i];
      }
    }
    if (pos == 0 || neg == 0) continue;
    std::vector<Rational> omega(n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) {
      if (s[i] > 0) omega[i] = w[i] / pos;
      if (s[i] < 0) omega[i] = -w[i] / neg;
      omega[i].canonicalize();
    }
    return omega;
  }
}

inline std::vector<double> random_double_omega(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> side(0, 4);
  std::exponential_distribution<double> weight(1.0);
  while (true) {
    std::vector<double> omega(n, 0.0);
    double pos = 0.0, neg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int r = side(rng);
      if (r == 4) continue;
      omega[i] = weight(rng);
      (r < 2 ? pos : neg) += omega[i];
      if (r >= 2) omega[i] = -omega[i];
    }
    if (pos == 0 || neg == 0) continue;
    for (double& v : omega) v = v > 0 ? v / pos : v / neg;
    return omega;
  }
}

// c_k straight from the pairwise expansion: gamma_p = -sum_{i<j} w_i w_j d_ij^p,
// grouped by the distinct heights of d.
template <class T>
std::vector<T> pairwise_level_coefficients(const ultragap::FiniteMetric<T>& m, const std::vector<T>& omega,
                                           const std::vector<T>& heights) {
  std::vector<T> c(heights.size(), T(0));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      const auto k = static_cast<std::size_t>(std::find(heights.begin(), heights.end(), m(i, j)) - heights.begin());
      c[k] -= omega[i] * omega[j];
    }
  }
  return c;
}

inline Rational theta_direct(std::size_t n) {
  Rational lo(1, static_cast<unsigned long>(n / 2));
  Rational hi(1, static_cast<unsigned long>(n - n / 2));
  Rational t = (lo + hi) / 2;
  t.canonicalize();
  return t;
}

}  // namespace testsupport
