#include "neontrap/tridiagonal.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>

#include "neontrap/errors.hpp"

namespace neontrap {

namespace {

constexpr int kMaxBisection = 400;
constexpr int kMaxInverseIterations = 8;
constexpr double kResidualTol = 1e-11;  // relative to the matrix 1-norm

double one_norm(const SymTridiagonal& t) {
  const std::size_t n = t.size();
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double col = std::abs(t.diag[i]);
    if (i > 0) col += std::abs(t.offdiag[i - 1]);
    if (i + 1 < n) col += std::abs(t.offdiag[i]);
    norm = std::max(norm, col);
  }
  return norm;
}

double pivot_floor(const SymTridiagonal& t) {
  double emax = 1.0;
  for (double e : t.offdiag) emax = std::max(emax, e * e);
  return DBL_MIN * emax;
}

std::size_t sturm_count_impl(const SymTridiagonal& t, double x, double pivmin) {
  std::size_t count = 0;
  double q = t.diag[0] - x;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double e = t.offdiag[i - 1];
    q = t.diag[i] - x - e * e / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

// Pivoted LU of (T - shift I), laid out like LAPACK's gttrf.
struct TridiagonalLU {
  std::vector<double> dl, d, du, du2;
  std::vector<bool> swapped;

  TridiagonalLU(const SymTridiagonal& t, double shift, double tiny) {
    const std::size_t n = t.size();
    d.resize(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = t.diag[i] - shift;
    dl = t.offdiag;
    du = t.offdiag;
    du2.assign(n > 1 ? n - 1 : 0, 0.0);
    swapped.assign(n > 1 ? n - 1 : 0, false);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] != 0.0) {
          const double fact = dl[i] / d[i];
          dl[i] = fact;
          d[i + 1] -= fact * du[i];
        }
      } else {
        const double fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        const double temp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = temp - fact * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        swapped[i] = true;
      }
    }
    for (double& pivot : d) {
      if (std::abs(pivot) < tiny) pivot = std::copysign(tiny, pivot == 0.0 ? 1.0 : pivot);
    }
  }

  void solve(std::vector<double>& b) const {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!swapped[i]) {
        b[i + 1] -= dl[i] * b[i];
      } else {
        const double temp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = temp - dl[i] * b[i];
      }
    }
    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (std::size_t i = n - 2; i-- > 0;) {
      b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
  }
};

void normalize(std::vector<double>& v) {
  const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
  for (double& x : v) x /= norm;
}

double residual_norm(const SymTridiagonal& t, const std::vector<double>& v, double lambda) {
  const std::size_t n = t.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = (t.diag[i] - lambda) * v[i];
    if (i > 0) r += t.offdiag[i - 1] * v[i - 1];
    if (i + 1 < n) r += t.offdiag[i] * v[i + 1];
    sum += r * r;
  }
  return std::sqrt(sum);
}

}  // namespace

std::size_t sturm_count(const SymTridiagonal& t, double x) {
  if (t.size() == 0) return 0;
  return sturm_count_impl(t, x, pivot_floor(t));
}

EigenPairs lowest_eigenpairs(const SymTridiagonal& t, std::size_t n_states) {
  const std::size_t n = t.size();
  if (n == 0 || t.offdiag.size() + 1 != n) {
    throw NumericalError("lowest_eigenpairs: malformed tridiagonal matrix");
  }
  n_states = std::min(n_states, n);

  // Gershgorin interval
  double lo = t.diag[0], hi = t.diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    double radius = 0.0;
    if (i > 0) radius += std::abs(t.offdiag[i - 1]);
    if (i + 1 < n) radius += std::abs(t.offdiag[i]);
    lo = std::min(lo, t.diag[i] - radius);
    hi = std::max(hi, t.diag[i] + radius);
  }
  const double norm = std::max(one_norm(t), DBL_MIN);
  const double pivmin = pivot_floor(t);
  lo -= 2.0 * DBL_EPSILON * norm + pivmin;
  hi += 2.0 * DBL_EPSILON * norm + pivmin;

  EigenPairs out;
  out.values.reserve(n_states);
  out.vectors.reserve(n_states);
  out.converged.reserve(n_states);

  for (std::size_t k = 0; k < n_states; ++k) {
    // Invariant: count(left) <= k < count(right).
    double left = k == 0 ? lo : out.values.back() - 4.0 * DBL_EPSILON * norm;
    left = std::max(left, lo);
    if (sturm_count_impl(t, left, pivmin) > k) left = lo;
    double right = hi;
    bool bisected = false;
    for (int it = 0; it < kMaxBisection; ++it) {
      const double mid = 0.5 * (left + right);
      const double tol = 2.0 * DBL_EPSILON * std::max(std::abs(left), std::abs(right)) + pivmin;
      if (right - left <= tol || mid <= left || mid >= right) {
        bisected = true;
        break;
      }
      if (sturm_count_impl(t, mid, pivmin) <= k) {
        left = mid;
      } else {
        right = mid;
      }
    }
    const double lambda = 0.5 * (left + right);

    TridiagonalLU lu(t, lambda, DBL_EPSILON * norm);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = 1.0 + 0.25 * std::sin(0.7 * static_cast<double>(i) + static_cast<double>(k));
    }
    normalize(v);
    bool vector_ok = false;
    for (int it = 0; it < kMaxInverseIterations; ++it) {
      lu.solve(v);
      for (const auto& prev : out.vectors) {
        const double overlap = std::inner_product(v.begin(), v.end(), prev.begin(), 0.0);
        for (std::size_t i = 0; i < n; ++i) v[i] -= overlap * prev[i];
      }
      normalize(v);
      if (residual_norm(t, v, lambda) <= kResidualTol * norm) {
        vector_ok = true;
        if (it >= 1) break;
      }
    }
    out.values.push_back(lambda);
    out.vectors.push_back(std::move(v));
    out.converged.push_back(bisected && vector_ok);
  }
  return out;
}

std::size_t count_nodes(std::span<const double> v, double rel_floor) {
  double vmax = 0.0;
  for (double x : v) vmax = std::max(vmax, std::abs(x));
  const double floor = rel_floor * vmax;
  std::size_t nodes = 0;
  int last_sign = 0;
  for (double x : v) {
    if (std::abs(x) <= floor) continue;
    const int sign = x > 0.0 ? 1 : -1;
    if (last_sign != 0 && sign != last_sign) ++nodes;
    last_sign = sign;
  }
  return nodes;
}

}  // namespace neontrap
