#include "fpflow/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fpflow/diagnostics.hpp"

namespace fpflow {

namespace {

constexpr double kBracket = 1.0e3;

// log of integrate(exp(-(phi - c)/D)), evaluated with a log-sum-exp shift so
// the bracket ends never overflow.
double log_mass(const std::vector<double>& phi, const std::vector<double>& D, double c,
                double log_volume) {
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < phi.size(); ++i) top = std::max(top, -(phi[i] - c) / D[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) sum += std::exp(-(phi[i] - c) / D[i] - top);
  return top + std::log(sum) + log_volume;
}

}  // namespace

double solve_normalization(const ParameterSet& params, const TensorGrid& grid) {
  std::vector<double> phi(grid.size()), D(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const Point x = grid.center(c);
    phi[c] = params.potential.value(x);
    D[c] = params.diffusion.value(x);
    if (!(D[c] > 0.0)) throw std::invalid_argument("diffusion must be positive on the grid");
  }
  const double log_volume = std::log(grid.cell_volume());
  auto g = [&](double c) { return log_mass(phi, D, c, log_volume); };

  double lo = -kBracket, hi = kBracket;
  if (!(g(lo) < 0.0) || !(g(hi) > 0.0)) {
    throw NormalizationFailure("equilibrium normalization is not bracketed by [-1e3, 1e3]");
  }
  while (hi - lo > 1e-15 * std::max(1.0, std::abs(lo) + std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  double c = 0.5 * (lo + hi);

  // Newton polish on log mass: d/dc log m = <1/D> under the equilibrium weights.
  for (int it = 0; it < 3; ++it) {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < phi.size(); ++i) top = std::max(top, -(phi[i] - c) / D[i]);
    double w = 0.0, wd = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
      const double e = std::exp(-(phi[i] - c) / D[i] - top);
      w += e;
      wd += e / D[i];
    }
    const double step = g(c) / (wd / w);
    if (!std::isfinite(step)) break;
    c -= step;
  }
  return c;
}

EquilibriumState equilibrium_state(const ParameterSet& params, const TensorGrid& grid) {
  const double c1 = solve_normalization(params, grid);
  ScalarField density = ScalarField::sample(grid, [&](const Point& x) {
    return std::exp(-(params.potential.value(x) - c1) / params.diffusion.value(x));
  });
  const double F = free_energy(density, params);
  return EquilibriumState{std::move(density), c1, F};
}

double equilibrium_residual(const EquilibriumState& eq, const ParameterSet& params) {
  const TensorGrid& g = eq.density.grid();
  double worst = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const Point x = g.center(c);
    const double r = params.diffusion.value(x) * std::log(eq.density[c]) +
                     params.potential.value(x) - eq.constant;
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace fpflow
