#include "fpflow/cli/studies.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "fpflow/oracle.hpp"
#include "fpflow/solver.hpp"

namespace fpflow::cli {

IdentityPoint identity_point(Regime regime, int n_cells, bool invert_drift) {
  const bool homogeneous = regime == Regime::Homogeneous;
  const bool mobility = regime == Regime::VariableMobility;
  const ParameterSet params =
      make_parameter_set("phi:standard", homogeneous ? "D:homogeneous" : "D:single",
                         mobility ? "pi:standard" : "pi:unit", PresetContext{1, n_cells});
  const TensorGrid grid(1, n_cells, Boundary::Periodic);

  SolverConfig cfg;
  cfg.t_final = 0.2;
  cfg.n_steps = std::max(4, n_cells * n_cells / 50);
  cfg.invert_drift = invert_drift;
  const int mid = cfg.n_steps / 2;

  std::vector<double> F;
  F.reserve(static_cast<std::size_t>(cfg.n_steps) + 1);
  std::optional<ScalarField> f_mid;
  run(preset_gaussian_ic(1).build(grid), params, cfg,
      [&](const TraceRow& row, const ScalarField& f) {
        if (static_cast<int>(F.size()) == mid) f_mid = f;
        F.push_back(row.F);
      });

  const double dt = cfg.dt();
  const double t = mid * dt;
  const FdContext fd{F[mid - 1], F[mid], F[mid + 1], dt};
  const IdentityReport rep = second_derivative_identity(*f_mid, params, t, regime, fd);
  const double dis = dissipation(*f_mid, params, t);
  const double scale = std::max({std::abs(rep.lhs), std::abs(rep.rhs), dis});
  return IdentityPoint{n_cells, cfg.n_steps, rep, dis, rep.residual / scale};
}

double oracle_l1_gap(double dt, double dt_ref, bool invert_drift) {
  constexpr double kT = 0.1;
  const int n_steps = static_cast<int>(std::lround(kT / dt));
  if (n_steps < 1 || std::abs(n_steps * dt - kT) > 1e-12) {
    throw std::invalid_argument("dt must divide 0.1");
  }
  const TensorGrid grid(1, 32, Boundary::Periodic);
  const ParameterSet params =
      make_parameter_set("phi:standard", "D:homogeneous", "pi:unit", PresetContext{1, 32});
  const ScalarField f0 = preset_gaussian_ic(1).build(grid);

  SolverConfig cfg;
  cfg.t_final = kT;
  cfg.n_steps = n_steps;
  cfg.record_every = n_steps;
  cfg.invert_drift = invert_drift;
  const ScalarField f_solver = run(f0, params, cfg).final_state;
  const ScalarField f_ref = reference_evolve(build_linear_operator(params, grid), f0, kT, dt_ref);
  return l1_distance(f_solver, f_ref);
}

double reflection_asymmetry(const ScalarField& f) {
  const TensorGrid& g = f.grid();
  const int n = g.cells_per_dim();
  double worst = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const auto idx = g.multi_index(c);
    for (int d = 0; d < g.dim(); ++d) {
      auto mirror = idx;
      mirror[d] = n - 1 - idx[d];
      worst = std::max(worst, std::abs(f[c] - f[g.linear_index(mirror)]));
    }
  }
  return worst;
}

}  // namespace fpflow::cli
