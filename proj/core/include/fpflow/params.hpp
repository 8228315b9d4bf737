#pragma once

// Coefficient fields of the generalized Fokker-Planck equation
//
//   f_t = div( (f / pi) grad(D log f + phi) )
//
// Each field is a pure function of position (and time, for the mobility)
// carrying its analytic derivatives, so the solver and the diagnostics never
// finite-difference the coefficients themselves.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fpflow/grid.hpp"

namespace fpflow {

using Hessian = std::array<std::array<double, 3>, 3>;

struct PotentialField {
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;
  std::function<Hessian(const Point&)> hessian;
  /// lambda with Hess(phi) >= lambda I, when known.
  std::optional<double> convexity_bound;
  bool constant = false;
};

struct DiffusionField {
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;
  /// C3: D(x) >= lower_bound > 0 everywhere.
  double lower_bound = 0.0;
  bool constant = false;
};

struct MobilityField {
  std::function<double(const Point&, double)> value;
  std::function<Point(const Point&, double)> gradient;
  std::function<double(const Point&, double)> time_derivative;
  /// C2: pi(x,t) >= lower_bound > 0 everywhere.
  double lower_bound = 0.0;
  /// pi == 1 identically.
  bool unit = false;
};

struct ParameterSet {
  PotentialField potential;
  DiffusionField diffusion;
  MobilityField mobility;
  std::string name;
};

/// Raised when a preset name does not resolve in the registry.
class UnknownPreset : public std::invalid_argument {
 public:
  explicit UnknownPreset(const std::string& name)
      : std::invalid_argument("unknown preset '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

// ---- potentials -------------------------------------------------------------

/// phi(x) = 1 + 1/4 sin^2(k pi x / 2).  Not convex for k >= 1.
PotentialField preset_potential_1d(int k_p);
/// Tensor product of the 1D profile, one wavenumber per axis (2D: {1,2}, 3D: {1,2,3}).
PotentialField preset_potential_tensor(const std::vector<int>& k_per_axis);
PotentialField constant_potential(double value);
/// phi(x) = x_0.
PotentialField linear_potential();
/// phi(x) = 1 + |x|^2 / 2, strictly convex with lambda = 1.
PotentialField quadratic_potential();

// ---- mobility ---------------------------------------------------------------

/// pi = 1/gamma, gamma = prod_j (1 + cos^2((j+1) pi x_j)) * (1 + 1/2 sin 10t).
MobilityField preset_mobility(int dim);
MobilityField unit_mobility();
MobilityField constant_mobility(double value);

// ---- diffusion --------------------------------------------------------------

DiffusionField constant_diffusion(double value);
/// 1D: 1 - 1/2 sin^2(2 pi x); 2D/3D: separable products with frequencies {1,3} / {1,3,4}.
DiffusionField preset_diffusion_single_mode(int dim);

enum class ModeRule { All, Increasing, NonIncreasing };

std::string_view to_string(ModeRule rule);

/// D = 1 + sum over selected mode tuples of A (prod_j cos(m_j pi x_j / 2) + 1).
/// Increasing selects m1 < m2 (2D); NonIncreasing selects m1 >= m2 >= m3 (3D).
DiffusionField preset_diffusion_multimode(int dim, const std::vector<int>& mode_caps,
                                          double amplitude, ModeRule rule);

/// Mode tuples the multimode preset sums over.
std::vector<std::array<int, 3>> active_modes(int dim, const std::vector<int>& mode_caps,
                                             ModeRule rule);

// ---- initial conditions -----------------------------------------------------

/// Cell-midpoint discretization of the tensor-product Gaussian, renormalized
/// to unit mass on the grid.
class GaussianInitialCondition {
 public:
  GaussianInitialCondition(int dim, double variance = 0.01);

  int dim() const noexcept { return dim_; }
  double variance() const noexcept { return variance_; }
  double density(const Point& x) const;
  ScalarField build(const TensorGrid& grid) const;

 private:
  int dim_;
  double variance_;
};

GaussianInitialCondition preset_gaussian_ic(int dim, double variance = 0.01);

// ---- registry ---------------------------------------------------------------

/// Context needed by presets whose defaults depend on the grid (D:multi).
struct PresetContext {
  int dim = 1;
  int n_cells = 200;
};

/// Names: phi:zero, phi:const:<c>, phi:linear, phi:quad, phi:standard,
///        phi1d:k<k>, phi2d:k<a>,<b>, phi3d:k<a>,<b>,<c>
PotentialField resolve_potential(std::string_view name, const PresetContext& ctx);
/// Names: D:homogeneous, D:const:<c>, D:single, D:multi, D:multi-c,
///        D:multi:<M1>[,<M2>[,<M3>]]:<A>
DiffusionField resolve_diffusion(std::string_view name, const PresetContext& ctx);
/// Names: pi:standard, pi:unit, pi:const:<c>
MobilityField resolve_mobility(std::string_view name, const PresetContext& ctx);

ParameterSet make_parameter_set(std::string_view potential, std::string_view diffusion,
                                std::string_view mobility, const PresetContext& ctx);

/// Cell-midpoint samples of the static coefficients.
ScalarField sample_potential(const PotentialField& phi, const TensorGrid& grid);
ScalarField sample_diffusion(const DiffusionField& D, const TensorGrid& grid);
ScalarField sample_mobility(const MobilityField& pi, const TensorGrid& grid, double t);

}  // namespace fpflow
