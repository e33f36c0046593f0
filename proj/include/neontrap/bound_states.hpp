#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "neontrap/constants.hpp"
#include "neontrap/layered_dielectric.hpp"
#include "neontrap/tridiagonal.hpp"

namespace neontrap {

// Uniform grid with hard walls at both ends.
struct Grid1D {
  double z_min = 0.0;
  double z_max = 1.0;
  std::size_t n_points = 2;

  Grid1D(double lo, double hi, std::size_t n);

  double spacing() const { return (z_max - z_min) / static_cast<double>(n_points - 1); }
  double at(std::size_t i) const { return z_min + spacing() * static_cast<double>(i); }
  std::size_t interior_size() const { return n_points - 2; }
};

struct BoundStateSolution {
  Grid1D grid;
  std::vector<double> energies;                    // meV, ascending
  std::vector<std::vector<double>> wavefunctions;  // full grid, zero at the walls, sum |psi|^2 h = 1
  std::vector<bool> converged;

  bool all_converged() const;
};

using PotentialSampler = std::function<double(double)>;

// -(hbar^2/2m) d^2/dz^2 + V on the interior nodes; Dirichlet rows eliminated.
// Throws NumericalError naming the first z with a non-finite sample.
SymTridiagonal build_hamiltonian(const PotentialSampler& potential, const Grid1D& grid,
                                 double hbar2_over_2m = kDefaultConstants.hbar2_over_2me);
SymTridiagonal build_hamiltonian(std::span<const double> interior_potential, const Grid1D& grid,
                                 double hbar2_over_2m = kDefaultConstants.hbar2_over_2me);

// Lowest n_states (1..10) eigenpairs, normalized on the grid, node count checked.
// A state that fails bisection, inverse iteration or the node test is marked unconverged.
BoundStateSolution solve_lowest(const SymTridiagonal& hamiltonian, const Grid1D& grid,
                                std::size_t n_states);

struct PerpendicularOptions {
  std::size_t n_points = 8192;
  double z_max = 40.0;          // nm
  double z_min_floor = -2.0;    // nm; domain starts at max(-L, floor)
  double tail_fraction = 0.10;  // outer part of the domain checked for leakage
  double tail_threshold = 1e-6;
  PotentialCache* cache = &PotentialCache::global();  // nullptr disables memoization
};

Grid1D perpendicular_grid(const DielectricStack& stack, const PerpendicularOptions& options = {});

// Solves the perpendicular problem for the stack under a uniform field. Throws UnboundError
// when the ground state leaks into the outer tail of the domain.
BoundStateSolution solve_perpendicular(const DielectricStack& stack, FieldSpec field,
                                       std::size_t n_states = 1,
                                       const PerpendicularOptions& options = {},
                                       const PhysicalConstants& constants = kDefaultConstants);

// W^G in meV.
double ground_state_energy(const DielectricStack& stack, FieldSpec field,
                           const PerpendicularOptions& options = {},
                           const PhysicalConstants& constants = kDefaultConstants);

// <z> of the ground state, nm.
double mean_height(const BoundStateSolution& solution);

// E_1 - E_0, meV. Throws std::invalid_argument with fewer than two states.
double perpendicular_gap(const BoundStateSolution& solution);

// Probability of the ground state in the outer tail_fraction of the domain.
double tail_probability(const BoundStateSolution& solution, double tail_fraction);

struct HellmannFeynman {
  double finite_difference;  // dW/dlambda by central difference
  double expectation;        // <psi0| dV/dlambda |psi0>
  double residual;           // |fd - expectation| / |expectation|, or |fd| when expectation = 0
};

// Family V(z; lambda) with derivative dV/dlambda, checked at lambda with step delta.
HellmannFeynman hellmann_feynman(const std::function<double(double, double)>& family,
                                 const std::function<double(double)>& derivative,
                                 const Grid1D& grid, double lambda, double delta,
                                 double hbar2_over_2m = kDefaultConstants.hbar2_over_2me);

// The same identity for the field coupling of the neon stack.
HellmannFeynman hellmann_feynman_check(const DielectricStack& stack, FieldSpec field, double delta,
                                       const PerpendicularOptions& options = {},
                                       const PhysicalConstants& constants = kDefaultConstants);

}  // namespace neontrap
