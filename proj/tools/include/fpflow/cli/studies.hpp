#pragma once

// Small numerical studies shared by `fpflow verify` and the acceptance suite.

#include "fpflow/diagnostics.hpp"
#include "fpflow/grid.hpp"

namespace fpflow::cli {

struct IdentityPoint {
  int n_cells;
  int n_steps;
  IdentityReport report;
  double dissipation;
  /// |lhs - rhs| / max(|lhs|, |rhs|, D_dis)
  double relative;
};

/// 1D periodic run from the Gaussian IC to t = 0.2 with n_steps = N^2 / 50,
/// compared at the middle step.  Homogeneous: D = 1, pi = 1; InhomogeneousD:
/// single-mode D, pi = 1; VariableMobility: single-mode D, preset pi.
IdentityPoint identity_point(Regime regime, int n_cells, bool invert_drift = false);

/// L1 distance at t = 0.1 between the implicit solver with step dt and the
/// explicit reference integrator with step dt_ref (D = 1, pi = 1, standard
/// potential, 1D periodic, 32 cells, Gaussian IC).
double oracle_l1_gap(double dt, double dt_ref = 1e-6, bool invert_drift = false);

/// max over cells and axes of |f(x) - f(reflected x)|.
double reflection_asymmetry(const ScalarField& f);

}  // namespace fpflow::cli
