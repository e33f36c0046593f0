#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace neontrap {

// Real symmetric tridiagonal matrix: diagonal d[0..n), off-diagonal e[0..n-1).
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> offdiag;

  std::size_t size() const { return diag.size(); }
};

struct EigenPairs {
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // unit 2-norm
  std::vector<bool> converged;
};

// Number of eigenvalues strictly below x (Sturm sequence count).
std::size_t sturm_count(const SymTridiagonal& t, double x);

// Lowest n_states eigenpairs: bisection on the Sturm count for the values, inverse
// iteration with a pivoted tridiagonal LU for the vectors.
EigenPairs lowest_eigenpairs(const SymTridiagonal& t, std::size_t n_states);

// Sign changes of v, ignoring entries below rel_floor * max|v|.
std::size_t count_nodes(std::span<const double> v, double rel_floor = 1e-10);

}  // namespace neontrap
