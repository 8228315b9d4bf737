#pragma once

// Reference solutions for small linear instances (constant D, unit mobility)
// and refined quadrature of the functionals.  Used by tests and the
// acceptance suite only.

#include <Eigen/Dense>
#include <functional>

#include "fpflow/grid.hpp"
#include "fpflow/params.hpp"

namespace fpflow {

struct DenseOperator {
  TensorGrid grid;
  /// f' = L f for the semi-discrete linear scheme.
  Eigen::MatrixXd matrix;
};

inline constexpr std::size_t kMaxDenseCells = 4096;

/// Probes the solver's flux divergence column by column.  Requires constant
/// D, unit mobility and at most kMaxDenseCells cells.
DenseOperator build_linear_operator(const ParameterSet& params, const TensorGrid& grid);

/// Classical RK4 for f' = L f up to time t.  dt_ref <= 0 selects
/// min(h^2 / (4 max D), 2 / ||L||_inf).
ScalarField reference_evolve(const DenseOperator& op, const ScalarField& f0, double t,
                             double dt_ref = 0.0);

enum class Functional { Mass, FreeEnergy, Dissipation };

/// Evaluates the functional of the analytic density on a grid `refine` times
/// finer than `base` (dissipation at t = 0).
double refined_functional(const ParameterSet& params, Functional functional,
                          const std::function<double(const Point&)>& f_analytic,
                          const TensorGrid& base, int refine);

}  // namespace fpflow
