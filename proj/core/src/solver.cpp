#include "fpflow/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "fpflow/diagnostics.hpp"
#include "fpflow/equilibrium.hpp"

namespace fpflow {

void SolverConfig::validate() const {
  if (!(t_final > 0.0)) throw std::invalid_argument("t_final must be > 0");
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (!(newton_tol > 0.0 && newton_tol < 1.0)) {
    throw std::invalid_argument("newton_tol must lie in (0, 1)");
  }
  if (newton_max_iters < 1) throw std::invalid_argument("newton_max_iters must be >= 1");
  if (!(positivity_floor > 0.0)) throw std::invalid_argument("positivity_floor must be > 0");
  if (record_every < 1) throw std::invalid_argument("record_every must be >= 1");
}

namespace {

std::string nonconvergence_message(double residual, int iterations, int step) {
  std::ostringstream os;
  os << "Newton iteration did not converge after " << iterations
     << " iterations (relative residual " << residual << ")";
  if (step >= 0) os << " at step " << step;
  return os.str();
}

std::string positivity_message(int step) {
  std::string msg = "Newton damping could not keep the iterate positive";
  if (step >= 0) msg += " at step " + std::to_string(step);
  return msg;
}

}  // namespace

NonConvergence::NonConvergence(double residual, int iterations, int step)
    : SolverError(nonconvergence_message(residual, iterations, step), step),
      residual_(residual) {}

PositivityLoss::PositivityLoss(int step) : SolverError(positivity_message(step), step) {}

double bernoulli(double s) {
  if (std::abs(s) < 1e-6) return 1.0 - s / 2.0 + s * s / 12.0;
  if (s > 0.0) {
    const double e = std::exp(-s);
    return s * e / -std::expm1(-s);
  }
  return s / std::expm1(s);
}

double bernoulli_derivative(double s) {
  if (std::abs(s) < 1e-4) return -0.5 + s / 6.0 - s * s * s / 180.0;
  if (s > 0.0) {
    const double e = std::exp(-s);
    const double den = -std::expm1(-s);
    return e * (1.0 - e - s) / (den * den);
  }
  const double em1 = std::expm1(s);
  return (em1 - s * std::exp(s)) / (em1 * em1);
}

namespace {

void require_positive(const ScalarField& f) {
  for (double v : f.values()) {
    if (!(v > 0.0)) throw std::invalid_argument("density must be strictly positive");
  }
}

// Sparse LU up to 2D.  In 3D the LU fill-in of the periodic 7-point pattern
// dominates the run time, so BiCGSTAB with an incomplete-LU preconditioner
// is used there with a tight inner tolerance; only the outer Newton residual
// is part of the contract.
class LinearSolver {
 public:
  using Matrix = Eigen::SparseMatrix<double>;

  explicit LinearSolver(bool direct) : direct_(direct) {
    iterative_.setTolerance(1e-15);
    iterative_.setMaxIterations(2000);
    iterative_.preconditioner().setDroptol(1e-4);
  }

  bool factor(const Matrix& A) {
    if (direct_) {
      if (!analyzed_) {
        lu_.analyzePattern(A);
        analyzed_ = true;
      }
      lu_.factorize(A);
      return lu_.info() == Eigen::Success;
    }
    iterative_.compute(A);
    return iterative_.info() == Eigen::Success;
  }

  bool solve(const Eigen::VectorXd& b, Eigen::VectorXd& x) {
    if (direct_) {
      x = lu_.solve(b);
      return lu_.info() == Eigen::Success;
    }
    x = iterative_.solve(b);
    return iterative_.info() == Eigen::Success;
  }

 private:
  bool direct_;
  bool analyzed_ = false;
  Eigen::SparseLU<Matrix, Eigen::COLAMDOrdering<int>> lu_;
  Eigen::BiCGSTAB<Matrix, Eigen::IncompleteLUT<double>> iterative_;
};

// Face geometry and static coefficients of one parameter set on one grid.
class StepEngine {
 public:
  static constexpr double kMinDamping = 0x1p-20;

  struct Face {
    std::size_t L, R;
    int d;
    double D_bar, d_D, d_phi;
    double k;  // D_bar / (pi_bar h)
  };

  StepEngine(const TensorGrid& grid, const ParameterSet& params, bool invert_drift)
      : grid_(grid),
        params_(params),
        drift_sign_(invert_drift ? -1.0 : 1.0),
        linear_(grid.dim() <= 2) {
    const ScalarField D = sample_diffusion(params.diffusion, grid);
    const ScalarField phi = sample_potential(params.potential, grid);
    for (int d = 0; d < grid.dim(); ++d) {
      for (std::size_t c = 0; c < grid.size(); ++c) {
        const auto r = grid.upper_neighbor(c, d);
        if (!r) continue;
        faces_.push_back(Face{c, *r, d, 0.5 * (D[c] + D[*r]), D[*r] - D[c], phi[*r] - phi[c], 0.0});
      }
    }
  }

  void set_time(double t) {
    if (t == time_ && time_set_) return;
    const ScalarField pi = sample_mobility(params_.mobility, grid_, t);
    const double h = grid_.spacing();
    for (auto& fc : faces_) fc.k = fc.D_bar / (0.5 * (pi[fc.L] + pi[fc.R]) * h);
    time_ = t;
    time_set_ = true;
  }

  double drift(const Face& fc, double log_l, double log_r) const {
    return drift_sign_ * (fc.d_phi + fc.d_D * 0.5 * (log_l + log_r)) / fc.D_bar;
  }

  double face_flux(const Face& fc, std::span<const double> f, std::span<const double> logf) const {
    const double s = drift(fc, logf[fc.L], logf[fc.R]);
    return fc.k * (bernoulli(s) * f[fc.L] - bernoulli(-s) * f[fc.R]);
  }

  FaceField flux(const ScalarField& f) const {
    std::vector<double> logf(f.size());
    for (std::size_t c = 0; c < f.size(); ++c) logf[c] = std::log(f[c]);
    FaceField J(grid_);
    for (const auto& fc : faces_) J(fc.d, fc.L) = face_flux(fc, f.values(), logf);
    return J;
  }

  // R = f - f_old + dt div J(f); returns max |R|.
  double residual(std::span<const double> f, std::span<const double> f_old, double dt,
                  Eigen::VectorXd& R) {
    const std::size_t n = f.size();
    logf_.resize(n);
    for (std::size_t c = 0; c < n; ++c) logf_[c] = std::log(f[c]);
    R.resize(static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < n; ++c) R[c] = f[c] - f_old[c];
    const double scale = dt / grid_.spacing();
    for (const auto& fc : faces_) {
      const double J = scale * face_flux(fc, f, logf_);
      R[fc.L] += J;
      R[fc.R] -= J;
    }
    return R.lpNorm<Eigen::Infinity>();
  }

  // Exact Jacobian of the residual, or with frozen_drift the matrix of the
  // linear problem obtained by holding s at its value for f.  The latter is a
  // column diagonally dominant Z-matrix, so its solve maps positive data to
  // positive iterates.
  void jacobian(std::span<const double> f, double dt, bool frozen_drift) {
    const std::size_t n = f.size();
    logf_.resize(n);
    for (std::size_t c = 0; c < n; ++c) logf_[c] = std::log(f[c]);
    triplets_.clear();
    triplets_.reserve(n + 4 * faces_.size());
    for (std::size_t c = 0; c < n; ++c) triplets_.emplace_back(c, c, 1.0);
    const double scale = dt / grid_.spacing();
    for (const auto& fc : faces_) {
      const double fl = f[fc.L], fr = f[fc.R];
      const double s = drift(fc, logf_[fc.L], logf_[fc.R]);
      const double bp = bernoulli(s), bm = bernoulli(-s);
      // d/ds [B(s) f_L - B(-s) f_R]
      const double dflux_ds = bernoulli_derivative(s) * fl + bernoulli_derivative(-s) * fr;
      const double ds = frozen_drift ? 0.0 : drift_sign_ * fc.d_D * 0.5 / fc.D_bar;
      const double a = scale * fc.k * (bp + dflux_ds * ds / fl);
      const double b = scale * fc.k * (-bm + dflux_ds * ds / fr);
      const auto L = static_cast<int>(fc.L), R = static_cast<int>(fc.R);
      triplets_.emplace_back(L, L, a);
      triplets_.emplace_back(L, R, b);
      triplets_.emplace_back(R, L, -a);
      triplets_.emplace_back(R, R, -b);
    }
    const auto ni = static_cast<Eigen::Index>(n);
    A_.resize(ni, ni);
    A_.setFromTriplets(triplets_.begin(), triplets_.end());
    A_.makeCompressed();
    factor_ok_ = linear_.factor(A_);
  }

  ScalarField step(const ScalarField& f_old, double t_new, double dt, const SolverConfig& cfg,
                   StepStats* stats) {
    set_time(t_new);
    const std::size_t n = f_old.size();
    std::vector<double> f(f_old.values().begin(), f_old.values().end());
    std::vector<double> trial(n);
    const double scale = std::max(f_old.max(), std::numeric_limits<double>::min());
    Eigen::VectorXd R, R_trial, delta, rhs(static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < n; ++c) rhs[static_cast<Eigen::Index>(c)] = f_old[c];
    int halvings = 0;
    double rel = residual(f, f_old.values(), dt, R) / scale;
    for (int it = 0;; ++it) {
      if (rel <= cfg.newton_tol) {
        if (stats) *stats = StepStats{it, rel, halvings};
        return ScalarField(f_old.grid(), std::move(f));
      }
      if (it == cfg.newton_max_iters) throw NonConvergence(rel, it);
      jacobian(f, dt, false);
      // A failed Newton solve (the iterative solver can stall on the exact
      // Jacobian far from the solution) falls through to the fixed-point step.
      const bool have_direction = factor_ok_ && linear_.solve(-R, delta);
      double lambda = 1.0;
      bool positive = false;
      while (have_direction && lambda >= kMinDamping) {
        positive = true;
        for (std::size_t c = 0; c < n; ++c) {
          trial[c] = f[c] + lambda * delta[static_cast<Eigen::Index>(c)];
          if (!(trial[c] > 0.0)) {
            positive = false;
            break;
          }
        }
        if (positive) break;
        lambda *= 0.5;
        ++halvings;
      }
      if (positive) {
        const double rel_trial = residual(trial, f_old.values(), dt, R_trial) / scale;
        if (lambda == 1.0 || rel_trial < 0.5 * rel) {
          f.swap(trial);
          R.swap(R_trial);
          rel = rel_trial;
          continue;
        }
      }
      // Far from the solution (typically exponentially small tails and a
      // large dt) the linearization of s in log f is poor; fall back to one
      // fixed-point step with s frozen, which stays positive by construction.
      jacobian(f, dt, true);
      if (!factor_ok_ || !linear_.solve(rhs, delta)) throw NonConvergence(rel, it);
      for (std::size_t c = 0; c < n; ++c) {
        trial[c] = delta[static_cast<Eigen::Index>(c)];
        if (!(trial[c] > 0.0)) throw PositivityLoss();
      }
      f.swap(trial);
      rel = residual(f, f_old.values(), dt, R) / scale;
    }
  }

 private:
  TensorGrid grid_;
  const ParameterSet& params_;
  double drift_sign_;
  std::vector<Face> faces_;
  double time_ = 0.0;
  bool time_set_ = false;
  std::vector<double> logf_;
  std::vector<Eigen::Triplet<double>> triplets_;
  Eigen::SparseMatrix<double> A_;
  LinearSolver linear_;
  bool factor_ok_ = false;
};

TraceRow make_row(double t, const ScalarField& f, const ParameterSet& params, double F_eq) {
  const double F = free_energy(f, params);
  return TraceRow{t, integrate(f), F, F - F_eq, dissipation(f, params, t), f.min(), f.max()};
}

}  // namespace

FaceField assemble_flux(const ScalarField& f, const ParameterSet& params, double t) {
  require_positive(f);
  StepEngine engine(f.grid(), params, false);
  engine.set_time(t);
  return engine.flux(f);
}

ScalarField backward_euler_step(const ScalarField& f_old, const ParameterSet& params,
                                double t_new, double dt, const SolverConfig& config,
                                StepStats* stats) {
  config.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be > 0");
  require_positive(f_old);
  StepEngine engine(f_old.grid(), params, config.invert_drift);
  return engine.step(f_old, t_new, dt, config, stats);
}

RunResult run(const ScalarField& f0, const ParameterSet& params, const SolverConfig& config,
              const SnapshotObserver& observer) {
  config.validate();
  const TensorGrid& grid = f0.grid();
  if (f0.max() <= 0.0) throw std::invalid_argument("initial condition is not a density");
  ScalarField f = f0;
  for (double& v : f.values()) v = std::max(v, config.positivity_floor);
  const double mass0 = integrate(f);
  if (std::abs(mass0 - 1.0) > 1e-9) {
    throw std::invalid_argument("initial condition must have unit mass");
  }

  const double F_eq = equilibrium_state(params, grid).free_energy;
  StepEngine engine(grid, params, config.invert_drift);
  const double dt = config.dt();

  RunResult result{f, {}, 0};
  auto record = [&](double t) {
    result.trace.rows.push_back(make_row(t, f, params, F_eq));
    if (observer) observer(result.trace.rows.back(), f);
  };
  record(0.0);
  for (int k = 1; k <= config.n_steps; ++k) {
    const double t = k * dt;
    StepStats stats;
    try {
      f = engine.step(f, t, dt, config, &stats);
    } catch (const NonConvergence& e) {
      throw NonConvergence(e.residual(), config.newton_max_iters, k);
    } catch (const PositivityLoss&) {
      throw PositivityLoss(k);
    }
    result.total_newton_iterations += stats.newton_iterations;
    if (k % config.record_every == 0 || k == config.n_steps) record(t);
  }
  result.final_state = std::move(f);
  return result;
}

}  // namespace fpflow
