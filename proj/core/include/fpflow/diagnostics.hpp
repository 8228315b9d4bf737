#pragma once

// Scalar functionals and identity/inequality evaluators on cell-average
// densities: free energy, velocity and dissipation, relative entropy, the
// Csiszar-Kullback-Pinsker check, maximum-principle envelopes, the
// second-derivative energy laws, the Gronwall envelope and decay-rate fits.

#include <string_view>
#include <utility>

#include "fpflow/equilibrium.hpp"
#include "fpflow/grid.hpp"
#include "fpflow/params.hpp"
#include "fpflow/solver.hpp"

namespace fpflow {

/// h^dim sum [D f (log f - 1) + f phi].
double free_energy(const ScalarField& f, const ParameterSet& params);

/// Face-normal u = -(1/pi_f) (mu_R - mu_L)/h with mu = D log f + phi per cell.
FaceField velocity(const ScalarField& f, const ParameterSet& params, double t);

/// Quadrature of pi |u|^2 f, |u|^2 per cell = sum_d mean of the squared
/// velocities on the two faces bounding the cell in d.
double dissipation(const ScalarField& f, const ParameterSet& params, double t);

/// h^dim sum D (f log f - f log f_eq).
double relative_entropy(const ScalarField& f, const EquilibriumState& eq,
                        const ParameterSet& params);

double l1_distance(const ScalarField& a, const ScalarField& b);

struct CkpResult {
  double l1;
  double bound;
  bool holds;
};

/// ||f - f_eq||_1^2 <= 2 h^dim sum f log(f / f_eq), with 1e-12 slack.
CkpResult ckp_check(const ScalarField& f, const EquilibriumState& eq);

struct Envelope {
  ScalarField lower;
  ScalarField upper;
};

/// exp(min/max_y h0(y) / D(x)) f_eq(x) with h0 = D log(f0 / f_eq).
Envelope max_principle_envelope(const ScalarField& f0, const EquilibriumState& eq,
                                const ParameterSet& params);

/// Largest amount by which f leaves [lower - slack, upper + slack]; <= 0 inside.
double envelope_violation(const ScalarField& f, const Envelope& env, double slack);

/// -(||D|| ||log f - 1|| + ||phi||) using f_min/f_max to bound log f.
double free_energy_lower_bound(const ParameterSet& params, const TensorGrid& grid,
                               double f_min, double f_max);

/// (F - F_eq) / (D_dis / (2 max D)); reported, not asserted.
double log_sobolev_ratio(const ScalarField& f, const EquilibriumState& eq,
                         const ParameterSet& params, double t);

enum class Regime { Homogeneous, InhomogeneousD, VariableMobility };

std::string_view to_string(Regime regime);

/// F at t - dt, t, t + dt.
struct FdContext {
  double F_prev;
  double F_mid;
  double F_next;
  double dt;
};

struct IdentityReport {
  double lhs;
  double rhs;
  double residual;
  Regime regime;
};

/// Compares the second difference of F against the discrete right-hand side
/// of the applicable second-derivative energy law evaluated on f at time t.
IdentityReport second_derivative_identity(const ScalarField& f, const ParameterSet& params,
                                          double t, Regime regime, const FdContext& fd);

/// Right-hand side alone.
double second_derivative_rhs(const ScalarField& f, const ParameterSet& params, double t,
                             Regime regime);

/// (g0^{1-p} - d/c)^{-1/(p-1)} e^{-ct}; requires c, d > 0, p > 1 and
/// 0 < g0 < (c/d)^{1/(p-1)}.
double gronwall_envelope(double c, double d, double p, double g0, double t);

enum class DecayQuantity { FRel, DDis };

struct FitOptions {
  double transient_fraction = 0.1;
  double relative_floor = 1e-12;
  /// Rows the trace must hold before windowing.
  std::size_t min_rows = 20;
};

struct DecayFit {
  double rate;
  double intercept;
  double r_squared;
  std::pair<double, double> window;
  int n_points;
};

/// Least-squares line through (t, log q) after dropping the leading transient
/// rows and every row below relative_floor * q(first row); rate = -slope.
DecayFit fit_decay_rate(const EnergyTrace& trace, DecayQuantity quantity,
                        const FitOptions& options = {});

}  // namespace fpflow
