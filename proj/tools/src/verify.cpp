#include "fpflow/cli/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "fpflow/cli/experiment.hpp"
#include "fpflow/cli/runner.hpp"
#include "fpflow/cli/studies.hpp"
#include "fpflow/equilibrium.hpp"

namespace fpflow::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct RunStats {
  std::string name;
  std::string error;
  double mass_error = 0.0;
  double f_min = kInf;
  double energy_rise = -kInf;  // max F(t_{k+1}) - F(t_k)
  int ckp_failures = 0;
  double envelope = -kInf;  // max envelope_violation with slack 5h
  double asymmetry = 0.0;
};

RunStats check_run(const ExperimentSpec& spec, bool invert) {
  RunStats st;
  st.name = spec.name;
  try {
    const TensorGrid grid = make_grid(spec);
    const ParameterSet params = make_parameters(spec);
    const EquilibriumState eq = equilibrium_state(params, grid);
    SolverConfig cfg = make_solver_config(spec);
    cfg.invert_drift = invert;
    const double slack = 5.0 * grid.spacing();
    std::optional<Envelope> env;
    double F_prev = std::numeric_limits<double>::quiet_NaN();
    run(make_initial_condition(spec.ic, params, grid), params, cfg,
        [&](const TraceRow& row, const ScalarField& f) {
          st.mass_error = std::max(st.mass_error, std::abs(row.mass - 1.0));
          st.f_min = std::min(st.f_min, row.f_min);
          if (!std::isnan(F_prev)) st.energy_rise = std::max(st.energy_rise, row.F - F_prev);
          F_prev = row.F;
          if (!ckp_check(f, eq).holds) ++st.ckp_failures;
          if (!env) env = max_principle_envelope(f, eq, params);
          st.envelope = std::max(st.envelope, envelope_violation(f, *env, slack));
          st.asymmetry = std::max(st.asymmetry, reflection_asymmetry(f));
        });
  } catch (const std::exception& e) {
    st.error = e.what();
  }
  return st;
}

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

std::vector<ExperimentSpec> run_specs(VerifyLevel level) {
  std::vector<std::string> presets{"fig-fe-1d"};
  if (level == VerifyLevel::Full) {
    presets.emplace_back("fig-fe-2d-c");
    presets.emplace_back("fig-fe-3d");
  }
  std::vector<ExperimentSpec> specs;
  for (const auto& p : presets) {
    for (auto& s : expand_preset(p)) specs.push_back(std::move(s));
  }
  return specs;
}

PropertyResult equilibrium_stationarity(bool invert) {
  double worst_rel = 0.0, worst_dis = 0.0;
  for (const char* D : {"D:homogeneous", "D:single", "D:multi"}) {
    for (Boundary b : {Boundary::Periodic, Boundary::NoFlux}) {
      ExperimentSpec s;
      s.diffusion = D;
      s.boundary = b;
      s.ic = "ic:equilibrium";
      s.t_final = 1.0;
      s.n_steps = 50;
      const RunOutcome out = execute_one(s, invert);
      if (!out.ok()) return {"equilibrium-stationarity", false, out.error};
      for (const auto& r : out.result->trace.rows) {
        worst_rel = std::max(worst_rel, std::abs(r.F_rel));
        worst_dis = std::max(worst_dis, r.D_dis);
      }
    }
  }
  const bool pass = worst_rel <= 1e-10 && worst_dis <= 1e-10;
  return {"equilibrium-stationarity", pass,
          "max |F_rel| = " + sci(worst_rel) + ", max D_dis = " + sci(worst_dis)};
}

PropertyResult oracle_equivalence(bool invert) {
  const double g1 = oracle_l1_gap(1e-3, 1e-6, invert);
  const double g2 = oracle_l1_gap(5e-4, 1e-6, invert);
  const double ratio = g1 / g2;
  const bool pass = g1 <= 5e-3 && ratio >= 1.6 && ratio <= 2.4;
  return {"oracle-equivalence", pass,
          "L1 gap " + sci(g1) + " at dt=1e-3, " + sci(g2) + " at dt=5e-4 (ratio " + sci(ratio) +
              ")"};
}

PropertyResult identity_refinement(bool invert) {
  std::ostringstream detail;
  bool pass = true;
  for (Regime regime : {Regime::Homogeneous, Regime::InhomogeneousD, Regime::VariableMobility}) {
    double prev = kInf;
    detail << to_string(regime) << ':';
    for (int n : {100, 200, 400}) {
      const double rel = identity_point(regime, n, invert).relative;
      pass = pass && rel < prev;
      prev = rel;
      detail << ' ' << sci(rel);
    }
    detail << "; ";
  }
  std::string d = detail.str();
  d.resize(d.size() - 2);
  return {"identity-refinement", pass, d};
}

}  // namespace

std::vector<PropertyResult> verify(VerifyLevel level, bool inject_sign_error, unsigned threads) {
  const auto specs = run_specs(level);
  std::vector<RunStats> stats(specs.size());
  parallel_for(specs.size(), threads,
               [&](std::size_t i) { stats[i] = check_run(specs[i], inject_sign_error); });

  std::vector<std::string> failed_runs;
  RunStats agg;
  for (const auto& s : stats) {
    if (!s.error.empty()) {
      failed_runs.push_back(s.name + ": " + s.error);
      continue;
    }
    agg.mass_error = std::max(agg.mass_error, s.mass_error);
    agg.f_min = std::min(agg.f_min, s.f_min);
    agg.energy_rise = std::max(agg.energy_rise, s.energy_rise);
    agg.ckp_failures += s.ckp_failures;
    agg.envelope = std::max(agg.envelope, s.envelope);
    agg.asymmetry = std::max(agg.asymmetry, s.asymmetry);
  }
  const std::string scope = " over " + std::to_string(specs.size()) + " runs";
  const bool runs_ok = failed_runs.empty();
  auto run_property = [&](std::string name, bool pass, std::string detail) {
    if (!runs_ok) {
      pass = false;
      detail = std::to_string(failed_runs.size()) + " run(s) failed: " + failed_runs.front();
    }
    return PropertyResult{std::move(name), pass, std::move(detail) + scope};
  };

  const SolverConfig defaults;
  std::vector<PropertyResult> results;
  results.push_back(run_property("mass-conservation", agg.mass_error <= 1e-11,
                                 "max |mass - 1| = " + sci(agg.mass_error)));
  results.push_back(run_property("positivity", agg.f_min > 0.0, "min f = " + sci(agg.f_min)));
  results.push_back(run_property("discrete-energy-decay",
                                 agg.energy_rise <= 10.0 * defaults.newton_tol,
                                 "max F increase per step = " + sci(agg.energy_rise)));
  results.push_back(run_property("ckp", agg.ckp_failures == 0,
                                 std::to_string(agg.ckp_failures) + " violating snapshots"));
  results.push_back(run_property("max-principle-envelope", agg.envelope <= 0.0,
                                 "max violation beyond 5h slack = " + sci(agg.envelope)));
  results.push_back(run_property("symmetry", agg.asymmetry <= 1e-10,
                                 "max |f(x) - f(-x)| = " + sci(agg.asymmetry)));
  results.push_back(equilibrium_stationarity(inject_sign_error));
  results.push_back(oracle_equivalence(inject_sign_error));
  if (level == VerifyLevel::Full) results.push_back(identity_refinement(inject_sign_error));
  return results;
}

}  // namespace fpflow::cli
