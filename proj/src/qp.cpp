#include "ultragap/qp.hpp"

#include <Eigen/Dense>
#include <gmpxx.h>

#include <algorithm>
#include <bit>
#include <cmath>

#include "ultragap/errors.hpp"

namespace ultragap::qp {
namespace {

// Dense KKT solves. Double precision goes through Eigen; the extended path
// uses Gaussian elimination with complete pivoting at the working precision.
std::vector<double> solve_kkt(const std::vector<double>& a, const std::vector<double>& rhs, std::size_t m) {
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> kkt(a.data(), m, m);
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), m);
  Eigen::VectorXd sol;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (lu.isInvertible()) {
    sol = lu.solve(b);
    sol += lu.solve(b - kkt * sol);
  } else {
    // Singular only when D is of negative type without being strictly so.
    sol = Eigen::MatrixXd(kkt).completeOrthogonalDecomposition().solve(b);
  }
  return std::vector<double>(sol.data(), sol.data() + m);
}

std::vector<mpf_class> solve_kkt(std::vector<mpf_class> a, std::vector<mpf_class> b, std::size_t m) {
  const mp_bitcnt_t bits = a.front().get_prec();
  mpf_class biggest(0, bits);
  for (const auto& v : a) {
    if (abs(v) > biggest) biggest = abs(v);
  }
  // Pivots below this are treated as zero; the corresponding unknown is 0.
  mpf_class tiny(biggest, bits);
  mpf_div_2exp(tiny.get_mpf_t(), tiny.get_mpf_t(), bits - 16);

  std::vector<std::size_t> col(m);
  for (std::size_t i = 0; i < m; ++i) col[i] = i;
  std::size_t rank = 0;
  mpf_class factor(0, bits);
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t pr = k, pc = k;
    mpf_class best(0, bits);
    for (std::size_t r = k; r < m; ++r) {
      for (std::size_t c = k; c < m; ++c) {
        if (abs(a[r * m + c]) > best) {
          best = abs(a[r * m + c]);
          pr = r;
          pc = c;
        }
      }
    }
    if (best <= tiny) break;
    ++rank;
    if (pr != k) {
      for (std::size_t c = 0; c < m; ++c) swap(a[pr * m + c], a[k * m + c]);
      swap(b[pr], b[k]);
    }
    if (pc != k) {
      for (std::size_t r = 0; r < m; ++r) swap(a[r * m + pc], a[r * m + k]);
      std::swap(col[pc], col[k]);
    }
    for (std::size_t r = k + 1; r < m; ++r) {
      factor = a[r * m + k] / a[k * m + k];
      if (sgn(factor) == 0) continue;
      for (std::size_t c = k; c < m; ++c) a[r * m + c] -= factor * a[k * m + c];
      b[r] -= factor * b[k];
    }
  }
  std::vector<mpf_class> y(m, mpf_class(0, bits));
  for (std::size_t k = rank; k-- > 0;) {
    mpf_class acc(b[k], bits);
    for (std::size_t c = k + 1; c < rank; ++c) acc -= a[k * m + c] * y[c];
    y[k] = acc / a[k * m + k];
  }
  std::vector<mpf_class> x(m, mpf_class(0, bits));
  for (std::size_t k = 0; k < m; ++k) x[col[k]] = y[k];
  return x;
}

double to_double(double v) { return v; }
double to_double(const mpf_class& v) { return v.get_d(); }

template <class Real>
struct Workspace {
  Real zero;
  Real make(double v) const {
    Real r(zero);
    r = v;
    return r;
  }
};

// Active set on min 1/2 x^T H x, x >= 0, sum_{team 0} x = 1, sum_{team 1} x = 1.
template <class Real>
OrthantSolution active_set(const std::vector<Real>& h, std::size_t n, std::uint64_t in_s, const Real& zero,
                           const Real& mu_tol, const Real& step_floor, std::size_t cap) {
  const Workspace<Real> ws{zero};
  auto team = [&](std::size_t i) -> int { return (in_s >> i) & 1 ? 0 : 1; };
  const auto s_size = static_cast<std::size_t>(std::popcount(in_s));

  std::vector<Real> x(n, zero);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = ws.make(1.0);
    x[i] /= ws.make(static_cast<double>(team(i) == 0 ? s_size : n - s_size));
  }
  std::vector<bool> free(n, true);
  auto gradient = [&](const std::vector<Real>& v) {
    std::vector<Real> g(n, zero);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) g[i] += h[i * n + j] * v[j];
    }
    return g;
  };

  std::size_t iter = 0;
  bool optimal = false;
  while (iter < cap) {
    ++iter;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) {
      if (free[i]) idx.push_back(i);
    }
    const std::size_t nf = idx.size();
    const std::size_t m = nf + 2;
    std::vector<Real> kkt(m * m, zero);
    std::vector<Real> rhs(m, zero);
    const std::vector<Real> g = gradient(x);
    for (std::size_t a = 0; a < nf; ++a) {
      for (std::size_t b = 0; b < nf; ++b) kkt[a * m + b] = h[idx[a] * n + idx[b]];
      kkt[a * m + nf + team(idx[a])] = ws.make(1.0);
      kkt[(nf + team(idx[a])) * m + a] = ws.make(1.0);
      rhs[a] = -g[idx[a]];
    }
    const std::vector<Real> sol = solve_kkt(kkt, rhs, m);
    for (const auto& v : sol) {
      if (!std::isfinite(to_double(v))) throw SolverError("non-finite KKT solution on orthant " + std::to_string(in_s));
    }

    // A direction below working precision is noise at an optimum of the face;
    // applying it would only perturb an exact x.
    bool negligible = true;
    using std::abs;
    for (std::size_t a = 0; a < nf && negligible; ++a) negligible = abs(sol[a]) <= step_floor;

    // Ratio test: the first free variable to reach its bound blocks the step.
    Real step = ws.make(1.0);
    std::optional<std::size_t> blocking;
    for (std::size_t a = 0; a < nf && !negligible; ++a) {
      if (sol[a] < 0) {
        Real ratio = x[idx[a]] / -sol[a];
        if (ratio < step) {
          step = ratio;
          blocking = idx[a];
        }
      }
    }
    for (std::size_t a = 0; a < nf && !negligible; ++a) {
      x[idx[a]] += step * sol[a];
      if (x[idx[a]] < 0) x[idx[a]] = zero;
    }
    if (blocking) {
      x[*blocking] = zero;
      free[*blocking] = false;
      continue;
    }

    // Full step: x minimizes over the current face and the last two entries
    // of sol hold the equality multipliers there.
    const std::vector<Real> grad = gradient(x);
    std::optional<std::size_t> release;
    Real worst = -mu_tol;
    for (std::size_t i = 0; i < n; ++i) {
      if (free[i]) continue;
      Real mu = grad[i] + sol[nf + team(i)];
      if (mu < worst) {
        worst = mu;
        release = i;
      }
    }
    if (!release) {
      optimal = true;
      break;
    }
    free[*release] = true;
  }
  if (!optimal) throw SolverError("active-set iteration cap reached on orthant " + std::to_string(in_s));

  // Restore the two sum constraints exactly before evaluating.
  Real sums[2] = {zero, zero};
  for (std::size_t i = 0; i < n; ++i) sums[team(i)] += x[i];
  for (std::size_t i = 0; i < n; ++i) x[i] /= sums[team(i)];
  const std::vector<Real> hx = gradient(x);
  Real value = zero;
  for (std::size_t i = 0; i < n; ++i) value += x[i] * hx[i];
  value /= 2;

  OrthantSolution out;
  out.value = to_double(value);
  out.iterations = iter;
  out.omega.resize(n);
  double rounded[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) rounded[team(i)] += to_double(x[i]);
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = to_double(x[i]) / rounded[team(i)];
    out.omega[i] = team(i) == 0 ? xi : -xi;
  }
  return out;
}

}  // namespace

unsigned working_precision(std::span<const double> distances, std::size_t n) {
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = distances[i * n + j];
      if (i == j || !(v > 0)) continue;
      lo = lo == 0.0 ? v : std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (lo == 0.0 || hi / lo <= 0x1p24) return 53;
  const auto spread_bits = static_cast<unsigned>(std::ceil(std::log2(hi / lo)));
  return 64 + 2 * spread_bits;
}

OrthantSolution solve_orthant(std::span<const double> distances, std::size_t n, std::uint64_t in_s,
                              const OrthantOptions& options) {
  if (n < 2 || n > 64 || distances.size() != n * n) throw DomainError("orthant problem needs 2 <= n <= 64");
  const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  in_s &= all;
  const auto s_size = static_cast<std::size_t>(std::popcount(in_s));
  if (s_size == 0 || s_size == n) throw DomainError("both teams must be non-empty");
  const std::size_t cap = options.cap_factor * n;

  // Substituting omega = sigma * x with x >= 0 gives min 1/2 x^T H x,
  // H = -diag(sigma) D diag(sigma).
  auto entry = [&](std::size_t i, std::size_t j) {
    const bool same = ((in_s >> i) & 1) == ((in_s >> j) & 1);
    return same ? -distances[i * n + j] : distances[i * n + j];
  };
  double scale = 1.0;
  for (double v : distances) scale = std::max(scale, std::abs(v));

  const unsigned bits = options.precision_bits ? options.precision_bits : working_precision(distances, n);
  if (bits <= 53) {
    std::vector<double> h(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) h[i * n + j] = entry(i, j);
    }
    return active_set<double>(h, n, in_s, 0.0, options.multiplier_tolerance * scale, 1e-14, cap);
  }

  const mpf_class zero(0, bits);
  std::vector<mpf_class> h(n * n, zero);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) h[i * n + j] = entry(i, j);
  }
  // Multipliers are judged against the working precision, not a fixed 1e-10.
  mpf_class mu_tol(scale, bits);
  mpf_div_2exp(mu_tol.get_mpf_t(), mu_tol.get_mpf_t(), bits - 24);
  mpf_class step_floor(1, bits);
  mpf_div_2exp(step_floor.get_mpf_t(), step_floor.get_mpf_t(), bits - 24);
  OrthantSolution out = active_set<mpf_class>(h, n, in_s, zero, mu_tol, step_floor, cap);
  out.precision_bits = bits;
  return out;
}

std::optional<std::vector<double>> negative_type_direction(std::span<const double> distances, std::size_t n,
                                                           double tolerance) {
  if (n < 2 || distances.size() != n * n) throw DomainError("negative type check needs n >= 2");
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> d(distances.data(), n, n);

  // Helmert basis of the mean-zero subspace.
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(n, n - 1);
  for (std::size_t k = 1; k < n; ++k) {
    const double norm = std::sqrt(static_cast<double>(k * (k + 1)));
    for (std::size_t i = 0; i < k; ++i) basis(i, k - 1) = 1.0 / norm;
    basis(k, k - 1) = -static_cast<double>(k) / norm;
  }
  const Eigen::MatrixXd reduced = -0.5 * basis.transpose() * d * basis;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced);
  const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  if (eig.eigenvalues()(0) >= -tolerance * scale) return std::nullopt;
  const Eigen::VectorXd dir = basis * eig.eigenvectors().col(0);
  return std::vector<double>(dir.data(), dir.data() + n);
}

}  // namespace ultragap::qp
