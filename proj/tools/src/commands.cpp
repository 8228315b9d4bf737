#include "fpflow/cli/commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>

#include "fpflow/cli/output.hpp"
#include "fpflow/cli/runner.hpp"
#include "fpflow/cli/verify.hpp"
#include "fpflow/equilibrium.hpp"

namespace fpflow::cli {

namespace {

std::string fit_summary(const RunOutcome& o) {
  if (!o.fit) return "fit unavailable (" + o.fit_error + ")";
  const auto& f = *o.fit;
  return "rate=" + format_double(f.rate) + " r2=" + format_double(f.r_squared) + " window=[" +
         format_double(f.window.first) + ", " + format_double(f.window.second) +
         "] points=" + std::to_string(f.n_points);
}

// Writes outputs for successful runs; returns false if any run failed.
bool report_runs(const std::vector<RunOutcome>& outcomes, std::ostream& out, std::ostream& err) {
  bool ok = true;
  for (const auto& o : outcomes) {
    if (!o.ok()) {
      err << "error: " << o.spec.name << ": " << o.error << '\n';
      ok = false;
      continue;
    }
    try {
      write_run_outputs(o);
    } catch (const std::exception& e) {
      err << "error: " << o.spec.name << ": " << e.what() << '\n';
      ok = false;
      continue;
    }
    out << o.spec.name << ": " << fit_summary(o) << '\n';
  }
  return ok;
}

}  // namespace

int cmd_run(const std::vector<ExperimentSpec>& specs, std::ostream& out, std::ostream& err) {
  const auto outcomes = execute(specs, thread_limit());
  return report_runs(outcomes, out, err) ? kExitOk : kExitFailure;
}

int cmd_compare(const std::vector<ExperimentSpec>& specs, std::ostream& out, std::ostream& err) {
  if (specs.size() < 2) {
    err << "error: compare needs at least two experiments, got " << specs.size() << '\n';
    return kExitUsage;
  }
  for (const auto& s : specs) {
    if (s.dim != specs.front().dim || s.n_cells != specs.front().n_cells) {
      err << "error: compare needs experiments on the same grid; " << s.name << " is "
          << s.dim << "D with " << s.n_cells << " cells, " << specs.front().name << " is "
          << specs.front().dim << "D with " << specs.front().n_cells << " cells\n";
      return kExitUsage;
    }
  }
  const auto outcomes = execute(specs, thread_limit());
  if (!report_runs(outcomes, out, err)) return kExitFailure;

  std::vector<CompareRow> rows;
  std::vector<PlotSeries> series;
  for (const auto& o : outcomes) {
    const double nan = std::nan("");
    rows.push_back({o.spec.name, o.fit ? o.fit->rate : nan, o.fit ? o.fit->r_squared : nan});
    series.push_back(free_energy_series(o.result->trace, o.spec.name));
  }
  const auto dir = specs.front().output_dir;
  try {
    std::filesystem::create_directories(dir);
    write_file(dir / "compare.csv", compare_csv(rows));
    write_file(dir / "compare.svg",
               semilog_svg(series, "free energy decay", "t", "F - F_eq"));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  out << "wrote " << (dir / "compare.csv").string() << '\n';
  return kExitOk;
}

int cmd_equilibrium(const std::vector<ExperimentSpec>& specs, std::ostream& out,
                    std::ostream& err) {
  for (const auto& s : specs) {
    try {
      const ParameterSet params = make_parameters(s);
      const EquilibriumState eq = equilibrium_state(params, make_grid(s));
      std::filesystem::create_directories(s.output_dir);
      write_file(s.output_dir / (s.name + "_eq.csv"), equilibrium_csv(eq));
      out << s.name << ": C1=" << format_double(eq.constant)
          << " F_eq=" << format_double(eq.free_energy)
          << " residual=" << format_double(equilibrium_residual(eq, params)) << '\n';
    } catch (const std::exception& e) {
      err << "error: " << s.name << ": " << e.what() << '\n';
      return kExitFailure;
    }
  }
  return kExitOk;
}

namespace {

// Long options shared by run, compare and equilibrium.  Only the options
// given on the command line override preset or config values.
struct Overrides {
  std::string name;
  int dim = 0, n_cells = 0, n_steps = 0, record_every = 0;
  double t_final = 0.0, fit_transient_frac = 0.0, fit_floor = 0.0;
  std::string boundary, potential, diffusion, mobility, ic, out, config;
  std::vector<std::string> targets;
  std::vector<CLI::Option*> given;

  void attach(CLI::App& app) {
    app.add_option("targets", targets, "Preset names or JSON config files");
    auto add = [&](const char* flag, auto& var, const char* help) {
      given.push_back(app.add_option(flag, var, help));
    };
    add("--config", config, "JSON config file (keys = long option names)");
    add("--name", name, "Experiment name (single experiment only)");
    add("--dim", dim, "Spatial dimension 1..3");
    add("--n-cells", n_cells, "Cells per dimension");
    add("--n-steps", n_steps, "Number of time steps");
    add("--t-final", t_final, "Final time");
    add("--boundary", boundary, "periodic | noflux");
    add("--potential", potential, "Potential preset (phi:...)");
    add("--diffusion", diffusion, "Diffusion preset (D:...)");
    add("--mobility", mobility, "Mobility preset (pi:...)");
    add("--ic", ic, "Initial condition (ic:gaussian[:var], ic:uniform, ic:equilibrium)");
    add("--out", out, "Output directory");
    add("--record-every", record_every, "Record a trace row every k steps");
    add("--fit-transient-frac", fit_transient_frac, "Leading fraction of rows dropped by the fit");
    add("--fit-floor", fit_floor, "Relative round-off floor of the fit");
  }

  bool has(std::string_view flag) const {
    for (auto* o : given) {
      if (o->get_name() == flag) return o->count() > 0;
    }
    return false;
  }

  std::vector<ExperimentSpec> expand_target(const std::string& target) const {
    const bool is_file = target.ends_with(".json") || std::filesystem::is_regular_file(target);
    if (!is_file) return expand_preset(target);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(target));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidSpec(target + ": " + e.what());
    }
    if (j.is_object() && j.contains("preset")) {
      std::vector<ExperimentSpec> specs;
      for (auto& s : expand_preset(j["preset"].get<std::string>())) {
        const std::string preset_name = s.name;
        s = apply_json(j, s);
        if (j.contains("name")) s.name = j["name"].get<std::string>() + "-" + preset_name;
        specs.push_back(std::move(s));
      }
      return specs;
    }
    return {apply_json(j, ExperimentSpec{})};
  }

  std::vector<ExperimentSpec> specs() const {
    std::vector<std::string> all = targets;
    if (has("--config")) all.insert(all.begin(), config);
    std::vector<ExperimentSpec> result;
    if (all.empty()) result.emplace_back();
    for (const auto& t : all) {
      auto specs = expand_target(t);
      // --boundary picks one member of a periodic/no-flux pair.
      const bool paired = specs.size() > 1;
      for (auto& s : specs) {
        if (has("--boundary") && paired && s.boundary != parse_boundary(boundary)) continue;
        result.push_back(std::move(s));
      }
    }
    if (has("--name")) {
      if (result.size() != 1) throw InvalidSpec("--name needs exactly one experiment");
      result.front().name = name;
    }
    for (auto& s : result) {
      if (has("--dim")) s.dim = dim;
      if (has("--n-cells")) s.n_cells = n_cells;
      if (has("--n-steps")) s.n_steps = n_steps;
      if (has("--t-final")) s.t_final = t_final;
      if (has("--boundary")) s.boundary = parse_boundary(boundary);
      if (has("--potential")) s.potential = potential;
      if (has("--diffusion")) s.diffusion = diffusion;
      if (has("--mobility")) s.mobility = mobility;
      if (has("--ic")) s.ic = ic;
      if (has("--out")) s.output_dir = out;
      if (has("--record-every")) s.record_every = record_every;
      if (has("--fit-transient-frac")) s.fit_transient_frac = fit_transient_frac;
      if (has("--fit-floor")) s.fit_floor = fit_floor;
      validate(s);
    }
    return result;
  }
};

}  // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-volume Fokker-Planck experiments"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run experiments; writes <name>_trace.csv and <name>_fe.svg");
  auto* compare_cmd = app.add_subcommand("compare", "Run and compare decay rates (compare.csv, compare.svg)");
  auto* eq_cmd = app.add_subcommand("equilibrium", "Write the discrete equilibrium <name>_eq.csv");
  auto* verify_cmd = app.add_subcommand("verify", "Run the property suites");
  auto* list_cmd = app.add_subcommand("presets", "List experiment presets");

  Overrides run_o, compare_o, eq_o;
  run_o.attach(*run_cmd);
  compare_o.attach(*compare_cmd);
  eq_o.attach(*eq_cmd);

  std::string level = "fast";
  bool inject = false;
  verify_cmd->add_option("level", level, "fast | full")->check(CLI::IsMember({"fast", "full"}));
  verify_cmd->add_flag("--inject-sign-error", inject, "Flip the drift sign (mutation check)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // CLI11 prints help/usage to the streams it is given.
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*list_cmd) {
      for (const auto& n : preset_names()) out << n << '\n';
      return kExitOk;
    }
    if (*verify_cmd) {
      const auto results = verify(level == "full" ? VerifyLevel::Full : VerifyLevel::Fast,
                                  inject, thread_limit());
      std::vector<std::string> failed;
      for (const auto& r : results) {
        out << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        if (!r.pass) failed.push_back(r.name);
      }
      if (failed.empty()) return kExitOk;
      err << "verify failed:";
      for (const auto& n : failed) err << ' ' << n;
      err << '\n';
      return kExitFailure;
    }
    if (*run_cmd) return cmd_run(run_o.specs(), out, err);
    if (*compare_cmd) return cmd_compare(compare_o.specs(), out, err);
    if (*eq_cmd) return cmd_equilibrium(eq_o.specs(), out, err);
  } catch (const UnknownPreset& e) {
    err << "error: unknown preset '" << e.name() << "'\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace fpflow::cli
