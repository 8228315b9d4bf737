#include "fpflow/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fpflow/diagnostics.hpp"
#include "fpflow/solver.hpp"

namespace fpflow {

DenseOperator build_linear_operator(const ParameterSet& params, const TensorGrid& grid) {
  if (!params.diffusion.constant) throw std::invalid_argument("linear operator needs constant D");
  if (!params.mobility.unit) throw std::invalid_argument("linear operator needs unit mobility");
  if (grid.size() > kMaxDenseCells) {
    throw std::invalid_argument("dense operator is limited to 4096 cells");
  }
  const auto n = static_cast<Eigen::Index>(grid.size());
  // The flux is linear in f, so L e_j = -(div J(1 + e_j) - div J(1)).
  const ScalarField ones(grid, 1.0);
  const ScalarField base = divergence(assemble_flux(ones, params, 0.0));
  DenseOperator op{grid, Eigen::MatrixXd::Zero(n, n)};
  ScalarField probe = ones;
  for (Eigen::Index j = 0; j < n; ++j) {
    probe[static_cast<std::size_t>(j)] = 2.0;
    const ScalarField div = divergence(assemble_flux(probe, params, 0.0));
    for (Eigen::Index i = 0; i < n; ++i) {
      op.matrix(i, j) = -(div[static_cast<std::size_t>(i)] - base[static_cast<std::size_t>(i)]);
    }
    probe[static_cast<std::size_t>(j)] = 1.0;
  }
  return op;
}

ScalarField reference_evolve(const DenseOperator& op, const ScalarField& f0, double t,
                             double dt_ref) {
  if (t < 0.0) throw std::invalid_argument("reference_evolve needs t >= 0");
  if (!(f0.grid() == op.grid)) throw std::invalid_argument("field and operator grids differ");
  const auto n = op.matrix.rows();
  Eigen::VectorXd f(n);
  for (Eigen::Index i = 0; i < n; ++i) f[i] = f0[static_cast<std::size_t>(i)];
  if (t == 0.0) return f0;

  if (dt_ref <= 0.0) {
    const double h = op.grid.spacing();
    const double d_max = op.matrix.diagonal().cwiseAbs().maxCoeff() * h * h / (2.0 * op.grid.dim());
    const double norm = op.matrix.cwiseAbs().rowwise().sum().maxCoeff();
    dt_ref = std::min(h * h / (4.0 * std::max(d_max, 1e-300)), 2.0 / std::max(norm, 1e-300));
  }
  const auto steps = static_cast<long>(std::ceil(t / dt_ref - 1e-9));
  const double dt = t / static_cast<double>(steps);
  Eigen::VectorXd k1(n), k2(n), k3(n), k4(n);
  for (long s = 0; s < steps; ++s) {
    k1.noalias() = op.matrix * f;
    k2.noalias() = op.matrix * (f + 0.5 * dt * k1);
    k3.noalias() = op.matrix * (f + 0.5 * dt * k2);
    k4.noalias() = op.matrix * (f + dt * k3);
    f += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  std::vector<double> out(f.data(), f.data() + n);
  return ScalarField(op.grid, std::move(out));
}

double refined_functional(const ParameterSet& params, Functional functional,
                          const std::function<double(const Point&)>& f_analytic,
                          const TensorGrid& base, int refine) {
  if (refine < 1) throw std::invalid_argument("refine factor must be >= 1");
  const TensorGrid fine(base.dim(), base.cells_per_dim() * refine, base.boundary());
  const ScalarField f = ScalarField::sample(fine, f_analytic);
  switch (functional) {
    case Functional::Mass: return integrate(f);
    case Functional::FreeEnergy: return free_energy(f, params);
    case Functional::Dissipation: return dissipation(f, params, 0.0);
  }
  return 0.0;
}

}  // namespace fpflow
