#pragma once

// Experiment descriptions for the command-line driver: one ExperimentSpec per
// simulation, the figure preset registry, and the JSON config mapping.

#include <filesystem>
#include <json.hpp>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fpflow/diagnostics.hpp"
#include "fpflow/grid.hpp"
#include "fpflow/params.hpp"
#include "fpflow/solver.hpp"

namespace fpflow::cli {

struct ExperimentSpec {
  std::string name = "custom";
  int dim = 1;
  int n_cells = 200;
  int n_steps = 50;
  double t_final = 4.0;
  Boundary boundary = Boundary::Periodic;
  std::string potential = "phi:standard";
  std::string diffusion = "D:homogeneous";
  std::string mobility = "pi:standard";
  std::string ic = "ic:gaussian";
  std::filesystem::path output_dir = ".";
  int record_every = 1;
  double fit_transient_frac = 0.1;
  double fit_floor = 1e-12;
};

/// Bad field values (not unknown preset names, which raise UnknownPreset).
class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Resolves every preset name and checks sizes; throws UnknownPreset or
/// InvalidSpec.
void validate(const ExperimentSpec& spec);

TensorGrid make_grid(const ExperimentSpec& spec);
ParameterSet make_parameters(const ExperimentSpec& spec);
SolverConfig make_solver_config(const ExperimentSpec& spec);

/// Trace rows written by a run with this spec.
std::size_t expected_rows(const ExperimentSpec& spec);

/// Decay-fit options for the spec.  Traces shorter than the default 20 rows
/// (the coarse figure captions) are fitted with a 6-row minimum.
FitOptions make_fit_options(const ExperimentSpec& spec);

/// ic:gaussian[:<variance>], ic:uniform, ic:equilibrium.
ScalarField make_initial_condition(std::string_view ic, const ParameterSet& params,
                                   const TensorGrid& grid);

/// Figure presets (fig-fe-1d-D1, fig-fe-2d-c, ...) and test presets.  Each
/// expands to a periodic and a no-flux member unless the preset fixes the
/// boundary; throws UnknownPreset.
std::vector<ExperimentSpec> expand_preset(std::string_view name);
std::vector<std::string> preset_names();

/// Keys match the long option names: name, dim, n-cells, n-steps, t-final,
/// boundary, potential, diffusion, mobility, ic, out, record-every,
/// fit-transient-frac, fit-floor.
nlohmann::json to_json(const ExperimentSpec& spec);
/// Applies the keys present in `j` on top of `base`; unknown keys are an error.
ExperimentSpec apply_json(const nlohmann::json& j, ExperimentSpec base);

}  // namespace fpflow::cli
