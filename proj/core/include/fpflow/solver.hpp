#pragma once

// First-order finite-volume discretization of
//
//   f_t + div(f u) = 0,   u = -(1/pi) grad(D log f + phi),
//
// with backward Euler in time.  The face flux is an exponentially fitted
// upwind (Scharfetter-Gummel type) flux
//
//   J = D_f / (pi_f h) [ B(s) f_L - B(-s) f_R ],   B(s) = s / (e^s - 1),
//   s = (dphi + dD * (log f_L + log f_R) / 2) / D_f,
//
// where D_f, pi_f are arithmetic means of the two cell values and d(.) is the
// right-minus-left difference.  J vanishes exactly when D log f + phi is equal
// in both cells, so the sampled equilibrium is a discrete steady state, and
// for constant D the flux is linear in f.  NoFlux walls carry zero flux;
// Periodic faces wrap.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpflow/grid.hpp"
#include "fpflow/params.hpp"

namespace fpflow {

struct SolverConfig {
  double t_final = 1.0;
  int n_steps = 50;
  double newton_tol = 1e-10;
  int newton_max_iters = 50;
  double positivity_floor = 1e-280;
  int record_every = 1;
  // Mutation-testing hook: flips the sign of the drift in the face flux.
  bool invert_drift = false;

  double dt() const { return t_final / n_steps; }
  void validate() const;
};

struct TraceRow {
  double t;
  double mass;
  double F;
  double F_rel;
  double D_dis;
  double f_min;
  double f_max;
};

struct EnergyTrace {
  std::vector<TraceRow> rows;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int step) : std::runtime_error(what), step_(step) {}
  /// 1-based index of the failing time step, or -1 outside run().
  int step() const noexcept { return step_; }

 private:
  int step_;
};

class NonConvergence : public SolverError {
 public:
  NonConvergence(double residual, int iterations, int step = -1);
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class PositivityLoss : public SolverError {
 public:
  explicit PositivityLoss(int step = -1);
};

struct StepStats {
  int newton_iterations = 0;
  double residual = 0.0;
  int halvings = 0;
};

/// Bernoulli function s / (e^s - 1) and its derivative, stable for all s.
double bernoulli(double s);
double bernoulli_derivative(double s);

/// Face flux J (positive along +e_d) at time t.  Requires f > 0.
FaceField assemble_flux(const ScalarField& f, const ParameterSet& params, double t);

/// One implicit step: solves f_new + dt div J(f_new, t_new) = f_old by
/// damped Newton with the exact Jacobian of the discrete flux.
ScalarField backward_euler_step(const ScalarField& f_old, const ParameterSet& params,
                                double t_new, double dt, const SolverConfig& config,
                                StepStats* stats = nullptr);

/// Called for every recorded trace row with the state it was computed from.
using SnapshotObserver = std::function<void(const TraceRow&, const ScalarField&)>;

struct RunResult {
  ScalarField final_state;
  EnergyTrace trace;
  int total_newton_iterations = 0;
};

/// Advances n_steps from f0; the first trace row is t = 0.
RunResult run(const ScalarField& f0, const ParameterSet& params, const SolverConfig& config,
              const SnapshotObserver& observer = {});

}  // namespace fpflow
