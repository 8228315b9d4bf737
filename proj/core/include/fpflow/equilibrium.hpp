#pragma once

// Equilibrium density f_eq = exp(-(phi - C1) / D), with C1 fixed so that
// f_eq has unit mass on the grid it is sampled on.

#include <stdexcept>

#include "fpflow/grid.hpp"
#include "fpflow/params.hpp"

namespace fpflow {

struct EquilibriumState {
  ScalarField density;
  double constant;     // C1
  double free_energy;  // F[f_eq]
};

class NormalizationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// C1 with integrate(exp(-(phi - C1)/D)) = 1 on `grid` to ~1e-13.  The mass
/// is strictly increasing in C1, so the root is unique when it exists.
double solve_normalization(const ParameterSet& params, const TensorGrid& grid);

EquilibriumState equilibrium_state(const ParameterSet& params, const TensorGrid& grid);

/// max_c |D log f_eq + phi - C1| over the cells.
double equilibrium_residual(const EquilibriumState& eq, const ParameterSet& params);

}  // namespace fpflow
