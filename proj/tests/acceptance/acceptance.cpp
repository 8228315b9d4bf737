// Acceptance suite: one PASS/FAIL line per criterion.  Exit status is 0 only
// when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpflow/cli/experiment.hpp"
#include "fpflow/cli/runner.hpp"
#include "fpflow/cli/studies.hpp"
#include "fpflow/diagnostics.hpp"
#include "fpflow/equilibrium.hpp"

using namespace fpflow;
using namespace fpflow::cli;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct RunRecord {
  ExperimentSpec spec;
  std::string error;
  double seconds = 0.0;
  double mass_error = 0.0;
  double energy_rise = -kInf;
  double envelope_5h = -kInf;      // violation beyond 5h slack
  double envelope_tight = -kInf;   // violation beyond 1e-10 slack
  int ckp_failures = 0;
  int snapshots = 0;
  std::optional<DecayFit> fit;
  std::string fit_error;
};

RunRecord observe(const ExperimentSpec& spec) {
  RunRecord rec;
  rec.spec = spec;
  const auto start = std::chrono::steady_clock::now();
  try {
    const TensorGrid grid = make_grid(spec);
    const ParameterSet params = make_parameters(spec);
    const EquilibriumState eq = equilibrium_state(params, grid);
    const ScalarField f0 = make_initial_condition(spec.ic, params, grid);
    const Envelope env = max_principle_envelope(f0, eq, params);
    const double slack = 5.0 * grid.spacing();
    double F_prev = std::numeric_limits<double>::quiet_NaN();
    const RunResult r = run(f0, params, make_solver_config(spec),
                            [&](const TraceRow& row, const ScalarField& f) {
                              ++rec.snapshots;
                              rec.mass_error = std::max(rec.mass_error, std::abs(row.mass - 1.0));
                              if (!std::isnan(F_prev)) {
                                rec.energy_rise = std::max(rec.energy_rise, row.F - F_prev);
                              }
                              F_prev = row.F;
                              rec.envelope_5h = std::max(rec.envelope_5h, envelope_violation(f, env, slack));
                              rec.envelope_tight =
                                  std::max(rec.envelope_tight, envelope_violation(f, env, 1e-10));
                              if (!ckp_check(f, eq).holds) ++rec.ckp_failures;
                            });
    try {
      rec.fit = fit_decay_rate(r.trace, DecayQuantity::FRel, make_fit_options(spec));
    } catch (const std::exception& e) {
      rec.fit_error = e.what();
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<ExperimentSpec> specs_of(std::initializer_list<const char*> presets) {
  std::vector<ExperimentSpec> out;
  for (const char* p : presets) {
    for (auto& s : expand_preset(p)) out.push_back(std::move(s));
  }
  return out;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string fixed(double v, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

int failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("%s %d %s: %s\n", pass ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
}

// Panel key such as "fig-fe-1d-DM" from "fig-fe-1d-DM-periodic".
std::string panel_of(const ExperimentSpec& s) {
  return s.name.substr(0, s.name.rfind('-'));
}

}  // namespace

int main() {
  // The desk-scale preset runs: 1D N=200, 2D N=40, 3D N=20, both boundaries.
  std::vector<RunRecord> runs;
  for (const auto& s : specs_of({"fig-fe-1d", "fig-fe-2d-c", "fig-fe-3d"})) runs.push_back(observe(s));

  std::vector<std::string> broken;
  for (const auto& r : runs) {
    if (!r.error.empty()) broken.push_back(r.spec.name + ": " + r.error);
  }
  const std::string broken_note =
      broken.empty() ? "" : "; " + std::to_string(broken.size()) + " run(s) failed, first " + broken.front();

  // 1. mass and runtime
  {
    double mass = 0.0;
    std::map<int, double> slowest;
    for (const auto& r : runs) {
      mass = std::max(mass, r.mass_error);
      slowest[r.spec.dim] = std::max(slowest[r.spec.dim], r.seconds);
    }
    const bool fast = slowest[1] < 5.0 && slowest[2] < 60.0 && slowest[3] < 600.0;
    report(1, "mass conservation", broken.empty() && mass <= 1e-11 && fast,
           "max |mass - 1| = " + sci(mass) + " over " + std::to_string(runs.size()) +
               " runs; slowest run 1D " + fixed(slowest[1], 2) + " s, 2D " + fixed(slowest[2], 2) +
               " s, 3D " + fixed(slowest[3], 2) + " s" + broken_note);
  }

  // 2. discrete energy decay
  {
    double rise = -kInf;
    for (const auto& r : runs) rise = std::max(rise, r.energy_rise);
    const double limit = 10.0 * SolverConfig{}.newton_tol;
    report(2, "discrete energy decay", broken.empty() && rise <= limit,
           "max F(t_k+1) - F(t_k) = " + sci(rise) + " (limit " + sci(limit) + ")" + broken_note);
  }

  // 3. exponential decay in the six 1D panels
  std::map<std::string, double> rate_1d;
  {
    bool pass = true;
    std::string detail;
    for (const auto& r : runs) {
      if (r.spec.dim != 1) continue;
      if (!r.fit) {
        pass = false;
        detail += r.spec.name + " fit failed (" + r.fit_error + r.error + "); ";
        continue;
      }
      rate_1d[r.spec.name] = r.fit->rate;
      pass = pass && r.fit->r_squared > 0.99;
      detail += r.spec.name + " r2=" + fixed(r.fit->r_squared, 4) + "; ";
    }
    detail.resize(detail.size() - 2);
    report(3, "exponential decay", pass && rate_1d.size() == 6, detail);
  }

  // 4. rate ordering D_M > D=1 > D_1, 5% separation, per boundary
  {
    bool pass = rate_1d.size() == 6;
    std::string detail;
    for (const char* bc : {"periodic", "noflux"}) {
      const auto get = [&](const char* panel) {
        const auto it = rate_1d.find(std::string("fig-fe-1d-") + panel + "-" + bc);
        return it == rate_1d.end() ? std::nan("") : it->second;
      };
      const double m = get("DM"), one = get("Dhomo"), single = get("D1");
      pass = pass && m > 1.05 * one && one > 1.05 * single;
      detail += std::string(bc) + ": D_M " + fixed(m) + " > D=1 " + fixed(one) + " > D_1 " +
                fixed(single) + "; ";
    }
    detail.resize(detail.size() - 2);
    report(4, "rate ordering", pass, detail);
  }

  // 5. periodic/no-flux rate gap at N=80 versus N=40 in 2D
  {
    std::vector<RunRecord> fine;
    for (const auto& s : specs_of({"fig-fe-2d"})) fine.push_back(observe(s));
    auto gaps = [](const std::vector<RunRecord>& rs, int n) {
      std::map<std::string, std::pair<double, double>> by_panel;  // periodic, noflux
      for (const auto& r : rs) {
        if (r.spec.dim != 2 || r.spec.n_cells != n) continue;
        const double rate = r.fit ? r.fit->rate : std::nan("");
        auto& slot = by_panel[panel_of(r.spec).substr(panel_of(r.spec).rfind('-') + 1)];
        (r.spec.boundary == Boundary::Periodic ? slot.first : slot.second) = rate;
      }
      std::map<std::string, double> out;
      for (const auto& [panel, pr] : by_panel) out[panel] = std::abs(pr.first - pr.second);
      return out;
    };
    const auto coarse = gaps(runs, 40);
    const auto refined = gaps(fine, 80);
    bool pass = coarse.size() == 3 && refined.size() == 3;
    std::string detail;
    for (const auto& [panel, g40] : coarse) {
      const auto it = refined.find(panel);
      const double g80 = it == refined.end() ? std::nan("") : it->second;
      pass = pass && g80 <= 0.6 * g40;
      detail += panel + ": " + sci(g40) + " -> " + sci(g80) + "; ";
    }
    detail.resize(detail.size() - 2);
    report(5, "boundary discrepancy shrinks", pass, detail);
  }

  // 6. equilibrium stationarity for each preset configuration
  {
    double rel = 0.0, dis = 0.0;
    std::string err;
    for (const auto& r : runs) {
      ExperimentSpec s = r.spec;
      s.ic = "ic:equilibrium";
      s.n_steps = 50;
      const RunOutcome out = execute_one(s);
      if (!out.ok()) {
        err = "; " + s.name + ": " + out.error;
        continue;
      }
      for (const auto& row : out.result->trace.rows) {
        rel = std::max(rel, std::abs(row.F_rel));
        dis = std::max(dis, row.D_dis);
      }
    }
    report(6, "equilibrium stationarity", err.empty() && rel <= 1e-10 && dis <= 1e-10,
           "max |F_rel| = " + sci(rel) + ", max D_dis = " + sci(dis) + " over " +
               std::to_string(runs.size()) + " runs of 50 steps" + err);
  }

  // 7. oracle equivalence
  {
    const double g1 = oracle_l1_gap(1e-3);
    const double g2 = oracle_l1_gap(5e-4);
    const double ratio = g1 / g2;
    report(7, "oracle equivalence", g1 <= 5e-3 && ratio >= 1.6 && ratio <= 2.4,
           "L1 gap " + sci(g1) + " at dt=1e-3, " + sci(g2) + " at dt=5e-4, ratio " + fixed(ratio));
  }

  // 8. maximum principle
  {
    double loose = -kInf, tight = -kInf;
    for (const auto& r : runs) {
      loose = std::max(loose, r.envelope_5h);
      if (r.spec.diffusion == "D:homogeneous") tight = std::max(tight, r.envelope_tight);
    }
    report(8, "maximum principle", broken.empty() && loose <= 0.0 && tight <= 0.0,
           "max violation beyond 5h = " + sci(loose) + ", constant-D runs beyond 1e-10 = " +
               sci(tight) + broken_note);
  }

  // 9. CKP
  {
    int bad = 0, total = 0;
    for (const auto& r : runs) {
      bad += r.ckp_failures;
      total += r.snapshots;
    }
    report(9, "CKP inequality", broken.empty() && bad == 0,
           std::to_string(bad) + " of " + std::to_string(total) + " snapshots violate" + broken_note);
  }

  // 10. second-derivative identity under refinement
  {
    bool pass = true;
    std::string detail;
    for (Regime regime : {Regime::Homogeneous, Regime::InhomogeneousD, Regime::VariableMobility}) {
      double prev = kInf;
      detail += std::string(to_string(regime)) + ":";
      for (int n : {100, 200, 400}) {
        try {
          const double rel = identity_point(regime, n).relative;
          pass = pass && rel < prev;
          prev = rel;
          detail += " " + sci(rel);
        } catch (const std::exception& e) {
          pass = false;
          detail += std::string(" error (") + e.what() + ")";
        }
      }
      detail += "; ";
    }
    detail.resize(detail.size() - 2);
    report(10, "second-derivative identity refinement", pass, detail);
  }

  // 11. dissipation decay for the strictly convex potential (lambda = 1)
  {
    const auto specs = specs_of({"check-quad-1d"});
    const RunOutcome out = execute_one(specs.front());
    bool pass = false;
    std::string detail;
    if (!out.ok()) {
      detail = out.error;
    } else {
      try {
        const auto fit =
            fit_decay_rate(out.result->trace, DecayQuantity::DDis, make_fit_options(specs.front()));
        const double lambda = 1.0;
        pass = fit.r_squared > 0.99 && fit.rate >= 2.0 * lambda * (1.0 - 0.3);
        detail = "D_dis rate " + fixed(fit.rate) + " (floor " + fixed(1.4, 1) + "), r2=" +
                 fixed(fit.r_squared, 4);
      } catch (const std::exception& e) {
        detail = e.what();
      }
    }
    report(11, "dissipation decay, convex potential", pass, detail);
  }

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
