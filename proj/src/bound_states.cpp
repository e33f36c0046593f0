#include "neontrap/bound_states.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "neontrap/errors.hpp"

namespace neontrap {

Grid1D::Grid1D(double lo, double hi, std::size_t n) : z_min(lo), z_max(hi), n_points(n) {
  if (!(hi > lo) || n < 3) {
    throw DomainError("Grid1D needs z_max > z_min and at least 3 points");
  }
}

bool BoundStateSolution::all_converged() const {
  return std::all_of(converged.begin(), converged.end(), [](bool c) { return c; });
}

SymTridiagonal build_hamiltonian(std::span<const double> interior_potential, const Grid1D& grid,
                                 double hbar2_over_2m) {
  const std::size_t m = grid.interior_size();
  if (interior_potential.size() != m) {
    throw std::invalid_argument("build_hamiltonian: potential size does not match grid interior");
  }
  const double h = grid.spacing();
  const double kinetic = hbar2_over_2m / (h * h);
  SymTridiagonal t;
  t.diag.resize(m);
  t.offdiag.assign(m - 1, -kinetic);
  for (std::size_t i = 0; i < m; ++i) {
    const double v = interior_potential[i];
    if (!std::isfinite(v)) {
      throw NumericalError("build_hamiltonian: non-finite potential at z = " +
                           std::to_string(grid.at(i + 1)));
    }
    t.diag[i] = 2.0 * kinetic + v;
  }
  return t;
}

SymTridiagonal build_hamiltonian(const PotentialSampler& potential, const Grid1D& grid,
                                 double hbar2_over_2m) {
  std::vector<double> samples(grid.interior_size());
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = potential(grid.at(i + 1));
  return build_hamiltonian(samples, grid, hbar2_over_2m);
}

BoundStateSolution solve_lowest(const SymTridiagonal& hamiltonian, const Grid1D& grid,
                                std::size_t n_states) {
  if (n_states < 1 || n_states > 10) {
    throw std::invalid_argument("solve_lowest: n_states must be in [1, 10]");
  }
  if (hamiltonian.size() != grid.interior_size()) {
    throw std::invalid_argument("solve_lowest: hamiltonian does not match grid");
  }
  const EigenPairs pairs = lowest_eigenpairs(hamiltonian, n_states);
  const double inv_sqrt_h = 1.0 / std::sqrt(grid.spacing());

  BoundStateSolution out{grid, pairs.values, {}, pairs.converged};
  out.wavefunctions.reserve(pairs.vectors.size());
  for (std::size_t s = 0; s < pairs.vectors.size(); ++s) {
    const auto& v = pairs.vectors[s];
    std::vector<double> psi(grid.n_points, 0.0);
    // Fix the overall sign so the largest lobe is positive.
    const auto peak = std::max_element(v.begin(), v.end(),
                                       [](double a, double b) { return std::abs(a) < std::abs(b); });
    const double sign = *peak < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < v.size(); ++i) psi[i + 1] = sign * v[i] * inv_sqrt_h;
    if (count_nodes(psi) != s) out.converged[s] = false;
    out.wavefunctions.push_back(std::move(psi));
  }
  return out;
}

Grid1D perpendicular_grid(const DielectricStack& stack, const PerpendicularOptions& options) {
  const double z_min = stack.is_bulk() ? options.z_min_floor
                                       : std::max(-stack.thickness(), options.z_min_floor);
  return Grid1D(z_min, options.z_max, options.n_points);
}

BoundStateSolution solve_perpendicular(const DielectricStack& stack, FieldSpec field,
                                       std::size_t n_states, const PerpendicularOptions& options,
                                       const PhysicalConstants& constants) {
  if (stack.thickness() == 0.0) {
    throw DomainError("solve_perpendicular: zero thickness leaves no neon barrier");
  }
  const Grid1D grid = perpendicular_grid(stack, options);
  std::vector<double> interior(grid.interior_size());

  PotentialCache::Samples cached;
  if (options.cache != nullptr) {
    cached = options.cache->samples(stack, grid.z_min, grid.z_max, grid.n_points, constants);
  } else {
    cached = PotentialCache().samples(stack, grid.z_min, grid.z_max, grid.n_points, constants);
  }
  for (std::size_t i = 0; i < interior.size(); ++i) {
    const double z = grid.at(i + 1);
    interior[i] = (*cached)[i + 1] + external_potential(stack, field, z);
  }

  BoundStateSolution solution =
      solve_lowest(build_hamiltonian(interior, grid, constants.hbar2_over_2me), grid, n_states);
  const double tail = tail_probability(solution, options.tail_fraction);
  if (tail > options.tail_threshold) {
    throw UnboundError("ground state leaks into the outer domain (tail probability " +
                       std::to_string(tail) + ") at E_ex = " + std::to_string(field.e_ex) +
                       " V/m, L = " + std::to_string(stack.thickness()) + " nm");
  }
  return solution;
}

double ground_state_energy(const DielectricStack& stack, FieldSpec field,
                           const PerpendicularOptions& options,
                           const PhysicalConstants& constants) {
  const BoundStateSolution s = solve_perpendicular(stack, field, 1, options, constants);
  if (!s.converged.front()) {
    throw NumericalError("ground_state_energy: eigensolver did not converge");
  }
  return s.energies.front();
}

double mean_height(const BoundStateSolution& solution) {
  if (solution.wavefunctions.empty() || !solution.converged.front()) {
    throw NumericalError("mean_height: ground state not converged");
  }
  const auto& psi = solution.wavefunctions.front();
  const double h = solution.grid.spacing();
  double sum = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) sum += solution.grid.at(i) * psi[i] * psi[i];
  return sum * h;
}

double perpendicular_gap(const BoundStateSolution& solution) {
  if (solution.energies.size() < 2) {
    throw std::invalid_argument("perpendicular_gap: solve at least two states");
  }
  if (!solution.converged[0] || !solution.converged[1]) {
    throw NumericalError("perpendicular_gap: states not converged");
  }
  return solution.energies[1] - solution.energies[0];
}

double tail_probability(const BoundStateSolution& solution, double tail_fraction) {
  const auto& psi = solution.wavefunctions.front();
  const double z_cut = solution.grid.z_max - tail_fraction * (solution.grid.z_max - solution.grid.z_min);
  double sum = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (solution.grid.at(i) >= z_cut) sum += psi[i] * psi[i];
  }
  return sum * solution.grid.spacing();
}

HellmannFeynman hellmann_feynman(const std::function<double(double, double)>& family,
                                 const std::function<double(double)>& derivative,
                                 const Grid1D& grid, double lambda, double delta,
                                 double hbar2_over_2m) {
  auto ground = [&](double lam) {
    const auto h = build_hamiltonian([&](double z) { return family(z, lam); }, grid, hbar2_over_2m);
    return solve_lowest(h, grid, 1);
  };
  const BoundStateSolution centre = ground(lambda);
  const double fd = (ground(lambda + delta).energies[0] - ground(lambda - delta).energies[0]) /
                    (2.0 * delta);
  const auto& psi = centre.wavefunctions.front();
  double expectation = 0.0;
  for (std::size_t i = 1; i + 1 < grid.n_points; ++i) {
    expectation += derivative(grid.at(i)) * psi[i] * psi[i];
  }
  expectation *= grid.spacing();
  const double residual =
      expectation != 0.0 ? std::abs(fd - expectation) / std::abs(expectation) : std::abs(fd);
  return {fd, expectation, residual};
}

HellmannFeynman hellmann_feynman_check(const DielectricStack& stack, FieldSpec field, double delta,
                                       const PerpendicularOptions& options,
                                       const PhysicalConstants& constants) {
  const Grid1D grid = perpendicular_grid(stack, options);
  // Both end points must be bound in the same sense the solver demands.
  solve_perpendicular(stack, {field.e_ex - delta}, 1, options, constants);
  solve_perpendicular(stack, {field.e_ex + delta}, 1, options, constants);

  PotentialCache local;
  PotentialCache& cache = options.cache ? *options.cache : local;
  const auto image = cache.samples(stack, grid.z_min, grid.z_max, grid.n_points, constants);
  const double h = grid.spacing();
  auto family = [&](double z, double e_ex) {
    const auto i = static_cast<std::size_t>(std::lround((z - grid.z_min) / h));
    return (*image)[i] + external_potential(stack, {e_ex}, z);
  };
  auto slope = [&](double z) { return external_potential_slope(stack, z); };
  return hellmann_feynman(family, slope, grid, field.e_ex, delta, constants.hbar2_over_2me);
}

}  // namespace neontrap
