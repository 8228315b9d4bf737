#include "fpflow/cli/experiment.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "fpflow/equilibrium.hpp"

namespace fpflow::cli {

namespace {

PresetContext context(const ExperimentSpec& spec) { return PresetContext{spec.dim, spec.n_cells}; }

double parse_variance(std::string_view text, std::string_view whole) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !(v > 0.0) || !std::isfinite(v)) {
    throw UnknownPreset(std::string(whole));
  }
  return v;
}

struct FigureFamily {
  std::string_view prefix;
  int dim;
  int n_cells;
  int n_steps;
  double t_final;
  std::string_view multimode;
};

// Time horizons are not part of the figure captions; they are long enough
// for F_rel to reach the round-off floor.
constexpr std::array<FigureFamily, 5> kFamilies{{
    {"fig-fe-1d", 1, 200, 50, 4.0, "D:multi"},
    {"fig-fe-2d-c", 2, 40, 10, 1.0, "D:multi"},
    {"fig-fe-2d", 2, 80, 20, 1.0, "D:multi"},
    {"fig-fe-3d-c", 3, 10, 5, 1.0, "D:multi-c"},
    {"fig-fe-3d", 3, 20, 10, 1.0, "D:multi"},
}};

constexpr std::array<std::string_view, 3> kPanels{"Dhomo", "D1", "DM"};

std::string_view panel_diffusion(std::string_view panel, const FigureFamily& fam) {
  if (panel == "Dhomo") return "D:homogeneous";
  if (panel == "D1") return "D:single";
  return fam.multimode;
}

void add_pair(std::vector<ExperimentSpec>& out, ExperimentSpec base) {
  for (Boundary b : {Boundary::Periodic, Boundary::NoFlux}) {
    ExperimentSpec s = base;
    s.boundary = b;
    s.name = base.name + "-" + std::string(to_string(b));
    out.push_back(std::move(s));
  }
}

}  // namespace

void validate(const ExperimentSpec& spec) {
  if (spec.name.empty()) throw InvalidSpec("experiment name must not be empty");
  if (spec.name.find_first_of("/\\") != std::string::npos) {
    throw InvalidSpec("experiment name must not contain path separators: " + spec.name);
  }
  if (spec.dim < 1 || spec.dim > 3) throw InvalidSpec("dim must be 1, 2 or 3");
  if (spec.n_cells < 2) throw InvalidSpec("n-cells must be >= 2");
  if (spec.n_steps < 1) throw InvalidSpec("n-steps must be >= 1");
  if (!(spec.t_final > 0.0) || !std::isfinite(spec.t_final)) {
    throw InvalidSpec("t-final must be a positive number");
  }
  if (spec.record_every < 1) throw InvalidSpec("record-every must be >= 1");
  if (!(spec.fit_transient_frac >= 0.0 && spec.fit_transient_frac < 1.0)) {
    throw InvalidSpec("fit-transient-frac must lie in [0, 1)");
  }
  if (!(spec.fit_floor >= 0.0 && spec.fit_floor < 1.0)) {
    throw InvalidSpec("fit-floor must lie in [0, 1)");
  }
  const ParameterSet params = make_parameters(spec);
  // Checks the IC name without building it on the full grid.
  make_initial_condition(spec.ic, params, TensorGrid(spec.dim, 2, spec.boundary));
}

TensorGrid make_grid(const ExperimentSpec& spec) {
  return TensorGrid(spec.dim, spec.n_cells, spec.boundary);
}

ParameterSet make_parameters(const ExperimentSpec& spec) {
  return make_parameter_set(spec.potential, spec.diffusion, spec.mobility, context(spec));
}

SolverConfig make_solver_config(const ExperimentSpec& spec) {
  SolverConfig cfg;
  cfg.t_final = spec.t_final;
  cfg.n_steps = spec.n_steps;
  cfg.record_every = spec.record_every;
  return cfg;
}

std::size_t expected_rows(const ExperimentSpec& spec) {
  const auto n = static_cast<std::size_t>(spec.n_steps);
  const auto every = static_cast<std::size_t>(spec.record_every);
  return 1 + n / every + (n % every != 0 ? 1 : 0);
}

FitOptions make_fit_options(const ExperimentSpec& spec) {
  FitOptions opt;
  opt.transient_fraction = spec.fit_transient_frac;
  opt.relative_floor = spec.fit_floor;
  if (expected_rows(spec) < opt.min_rows) opt.min_rows = 6;
  return opt;
}

ScalarField make_initial_condition(std::string_view ic, const ParameterSet& params,
                                   const TensorGrid& grid) {
  if (ic == "ic:uniform") return ScalarField(grid, std::pow(0.5, grid.dim()));
  if (ic == "ic:equilibrium") return equilibrium_state(params, grid).density;
  if (ic == "ic:gaussian") return preset_gaussian_ic(grid.dim()).build(grid);
  constexpr std::string_view kGauss = "ic:gaussian:";
  if (ic.starts_with(kGauss)) {
    const double var = parse_variance(ic.substr(kGauss.size()), ic);
    return preset_gaussian_ic(grid.dim(), var).build(grid);
  }
  throw UnknownPreset(std::string(ic));
}

std::vector<ExperimentSpec> expand_preset(std::string_view name) {
  std::vector<ExperimentSpec> out;
  for (const auto& fam : kFamilies) {
    for (std::string_view panel : kPanels) {
      const std::string full = std::string(fam.prefix) + "-" + std::string(panel);
      if (name != fam.prefix && name != full) continue;
      ExperimentSpec s;
      s.name = full;
      s.dim = fam.dim;
      s.n_cells = fam.n_cells;
      s.n_steps = fam.n_steps;
      s.t_final = fam.t_final;
      s.diffusion = std::string(panel_diffusion(panel, fam));
      add_pair(out, s);
    }
    if (!out.empty()) return out;
  }
  if (name == "check-quad-1d") {
    // Strictly convex potential, constant D, unit mobility, no-flux walls.
    ExperimentSpec s;
    s.name = std::string(name);
    s.potential = "phi:quad";
    s.mobility = "pi:unit";
    s.boundary = Boundary::NoFlux;
    s.n_steps = 100;
    s.t_final = 4.0;
    out.push_back(s);
    return out;
  }
  throw UnknownPreset(std::string(name));
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& fam : kFamilies) {
    names.emplace_back(fam.prefix);
    for (std::string_view panel : kPanels) {
      names.push_back(std::string(fam.prefix) + "-" + std::string(panel));
    }
  }
  names.emplace_back("check-quad-1d");
  return names;
}

nlohmann::json to_json(const ExperimentSpec& spec) {
  return nlohmann::json{
      {"name", spec.name},
      {"dim", spec.dim},
      {"n-cells", spec.n_cells},
      {"n-steps", spec.n_steps},
      {"t-final", spec.t_final},
      {"boundary", std::string(to_string(spec.boundary))},
      {"potential", spec.potential},
      {"diffusion", spec.diffusion},
      {"mobility", spec.mobility},
      {"ic", spec.ic},
      {"out", spec.output_dir.string()},
      {"record-every", spec.record_every},
      {"fit-transient-frac", spec.fit_transient_frac},
      {"fit-floor", spec.fit_floor},
  };
}

ExperimentSpec apply_json(const nlohmann::json& j, ExperimentSpec base) {
  if (!j.is_object()) throw InvalidSpec("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "preset") continue;  // expanded by the caller
      if (key == "name") base.name = value.get<std::string>();
      else if (key == "dim") base.dim = value.get<int>();
      else if (key == "n-cells") base.n_cells = value.get<int>();
      else if (key == "n-steps") base.n_steps = value.get<int>();
      else if (key == "t-final") base.t_final = value.get<double>();
      else if (key == "boundary") base.boundary = parse_boundary(value.get<std::string>());
      else if (key == "potential") base.potential = value.get<std::string>();
      else if (key == "diffusion") base.diffusion = value.get<std::string>();
      else if (key == "mobility") base.mobility = value.get<std::string>();
      else if (key == "ic") base.ic = value.get<std::string>();
      else if (key == "out") base.output_dir = value.get<std::string>();
      else if (key == "record-every") base.record_every = value.get<int>();
      else if (key == "fit-transient-frac") base.fit_transient_frac = value.get<double>();
      else if (key == "fit-floor") base.fit_floor = value.get<double>();
      else throw InvalidSpec("unknown config key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw InvalidSpec("config key '" + key + "': " + e.what());
    } catch (const InvalidSpec&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw InvalidSpec("config key '" + key + "': " + e.what());
    }
  }
  return base;
}

}  // namespace fpflow::cli
