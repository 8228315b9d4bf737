#include "fpflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fpflow {

namespace {

void require_positive(const ScalarField& f) {
  for (double v : f.values()) {
    if (!(v > 0.0)) throw std::invalid_argument("density must be strictly positive");
  }
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("fields live on different grids");
}

// Cell-centered derivative of a cell field along d: centered in the interior,
// one-sided next to a NoFlux wall.
double cell_derivative(const std::vector<double>& g, const TensorGrid& grid, std::size_t c, int d) {
  const auto up = grid.upper_neighbor(c, d);
  const auto lo = grid.lower_neighbor(c, d);
  const double h = grid.spacing();
  if (up && lo) return (g[*up] - g[*lo]) / (2.0 * h);
  if (up) return (g[*up] - g[c]) / h;
  if (lo) return (g[c] - g[*lo]) / h;
  return 0.0;
}

}  // namespace

double free_energy(const ScalarField& f, const ParameterSet& params) {
  require_positive(f);
  const TensorGrid& g = f.grid();
  double sum = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const Point x = g.center(c);
    const double v = f[c];
    sum += params.diffusion.value(x) * v * (std::log(v) - 1.0) + v * params.potential.value(x);
  }
  return sum * g.cell_volume();
}

FaceField velocity(const ScalarField& f, const ParameterSet& params, double t) {
  require_positive(f);
  const TensorGrid& g = f.grid();
  std::vector<double> mu(g.size()), pi(g.size());
  for (std::size_t c = 0; c < g.size(); ++c) {
    const Point x = g.center(c);
    mu[c] = params.diffusion.value(x) * std::log(f[c]) + params.potential.value(x);
    pi[c] = params.mobility.value(x, t);
  }
  FaceField u(g);
  const double h = g.spacing();
  for (int d = 0; d < g.dim(); ++d) {
    for (std::size_t c = 0; c < g.size(); ++c) {
      if (auto r = g.upper_neighbor(c, d)) {
        u(d, c) = -(mu[*r] - mu[c]) / (h * 0.5 * (pi[c] + pi[*r]));
      }
    }
  }
  return u;
}

double dissipation(const ScalarField& f, const ParameterSet& params, double t) {
  const FaceField u = velocity(f, params, t);
  const TensorGrid& g = f.grid();
  double sum = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    double u2 = 0.0;
    for (int d = 0; d < g.dim(); ++d) {
      const double up = u(d, c);
      const auto lo = g.lower_neighbor(c, d);
      const double down = lo ? u(d, *lo) : 0.0;
      u2 += 0.5 * (up * up + down * down);
    }
    sum += params.mobility.value(g.center(c), t) * u2 * f[c];
  }
  return sum * g.cell_volume();
}

double relative_entropy(const ScalarField& f, const EquilibriumState& eq,
                        const ParameterSet& params) {
  require_positive(f);
  require_same_grid(f, eq.density);
  const TensorGrid& g = f.grid();
  double sum = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    sum += params.diffusion.value(g.center(c)) * f[c] * (std::log(f[c]) - std::log(eq.density[c]));
  }
  return sum * g.cell_volume();
}

double l1_distance(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  double sum = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) sum += std::abs(a[c] - b[c]);
  return sum * a.grid().cell_volume();
}

CkpResult ckp_check(const ScalarField& f, const EquilibriumState& eq) {
  require_positive(f);
  require_same_grid(f, eq.density);
  double kl = 0.0;
  for (std::size_t c = 0; c < f.size(); ++c) {
    kl += f[c] * (std::log(f[c]) - std::log(eq.density[c]));
  }
  const double bound = 2.0 * kl * f.grid().cell_volume();
  const double l1 = l1_distance(f, eq.density);
  return CkpResult{l1, bound, l1 * l1 <= bound + 1e-12};
}

Envelope max_principle_envelope(const ScalarField& f0, const EquilibriumState& eq,
                                const ParameterSet& params) {
  require_positive(f0);
  require_same_grid(f0, eq.density);
  const TensorGrid& g = f0.grid();
  const ScalarField D = sample_diffusion(params.diffusion, g);
  double h_min = std::numeric_limits<double>::infinity();
  double h_max = -h_min;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const double h0 = D[c] * std::log(f0[c] / eq.density[c]);
    h_min = std::min(h_min, h0);
    h_max = std::max(h_max, h0);
  }
  ScalarField lower(g), upper(g);
  for (std::size_t c = 0; c < g.size(); ++c) {
    lower[c] = std::exp(h_min / D[c]) * eq.density[c];
    upper[c] = std::exp(h_max / D[c]) * eq.density[c];
  }
  return Envelope{std::move(lower), std::move(upper)};
}

double envelope_violation(const ScalarField& f, const Envelope& env, double slack) {
  require_same_grid(f, env.lower);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < f.size(); ++c) {
    worst = std::max(worst, (env.lower[c] - slack) - f[c]);
    worst = std::max(worst, f[c] - (env.upper[c] + slack));
  }
  return worst;
}

double free_energy_lower_bound(const ParameterSet& params, const TensorGrid& grid, double f_min,
                               double f_max) {
  const ScalarField D = sample_diffusion(params.diffusion, grid);
  const ScalarField phi = sample_potential(params.potential, grid);
  double d_sup = 0.0, phi_sup = 0.0;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    d_sup = std::max(d_sup, std::abs(D[c]));
    phi_sup = std::max(phi_sup, std::abs(phi[c]));
  }
  const double log_sup = std::max(std::abs(std::log(f_min) - 1.0), std::abs(std::log(f_max) - 1.0));
  return -(d_sup * log_sup + phi_sup);
}

double log_sobolev_ratio(const ScalarField& f, const EquilibriumState& eq,
                         const ParameterSet& params, double t) {
  const double d_max = sample_diffusion(params.diffusion, f.grid()).max();
  return (free_energy(f, params) - eq.free_energy) / (dissipation(f, params, t) / (2.0 * d_max));
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::Homogeneous: return "homogeneous";
    case Regime::InhomogeneousD: return "inhomogeneous-D";
    case Regime::VariableMobility: return "variable-mobility";
  }
  return "?";
}

double second_derivative_rhs(const ScalarField& f, const ParameterSet& params, double t,
                             Regime regime) {
  if (regime == Regime::Homogeneous && !(params.diffusion.constant && params.mobility.unit)) {
    throw std::invalid_argument("homogeneous regime needs constant D and unit mobility");
  }
  if (regime == Regime::InhomogeneousD && !params.mobility.unit) {
    throw std::invalid_argument("inhomogeneous-D regime needs unit mobility");
  }
  const TensorGrid& g = f.grid();
  const int n = g.dim();
  const std::size_t size = g.size();
  const FaceField uf = velocity(f, params, t);

  // Cell-centered velocity components and |u|^2.
  std::array<std::vector<double>, 3> u;
  for (int k = 0; k < n; ++k) {
    u[k].resize(size);
    for (std::size_t c = 0; c < size; ++c) {
      const auto lo = g.lower_neighbor(c, k);
      u[k][c] = 0.5 * (uf(k, c) + (lo ? uf(k, *lo) : 0.0));
    }
  }
  std::vector<double> u2(size, 0.0);
  for (int k = 0; k < n; ++k) {
    for (std::size_t c = 0; c < size; ++c) u2[c] += u[k][c] * u[k][c];
  }

  const double h = g.spacing();
  auto dot = [n](const Point& a, const Point& b) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += a[k] * b[k];
    return s;
  };

  double sum = 0.0;
  for (std::size_t c = 0; c < size; ++c) {
    const Point x = g.center(c);
    const double fc = f[c];
    const double lf = std::log(fc);
    const double D = params.diffusion.value(x);
    const Point gD = params.diffusion.gradient(x);
    const Point gphi = params.potential.gradient(x);
    const Hessian H = params.potential.hessian(x);
    const double pi = params.mobility.value(x, t);
    const Point gpi = params.mobility.gradient(x, t);
    const double pi_t = params.mobility.time_derivative(x, t);

    Point uc{0.0, 0.0, 0.0};
    for (int k = 0; k < n; ++k) uc[k] = u[k][c];

    // grad_u[k][l] = d u^k / d x_l
    Hessian grad_u{};
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < n; ++l) {
        if (k == l) {
          const auto lo = g.lower_neighbor(c, k);
          grad_u[k][l] = (uf(k, c) - (lo ? uf(k, *lo) : 0.0)) / h;
        } else {
          grad_u[k][l] = cell_derivative(u[k], g, c, l);
        }
      }
    }
    double div_u = 0.0, grad_u_sq = 0.0;
    for (int k = 0; k < n; ++k) {
      div_u += grad_u[k][k];
      for (int l = 0; l < n; ++l) grad_u_sq += grad_u[k][l] * grad_u[k][l];
    }
    Point grad_u2{0.0, 0.0, 0.0};
    for (int l = 0; l < n; ++l) grad_u2[l] = cell_derivative(u2, g, c, l);

    double hess_uu = 0.0;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) hess_uu += H[a][b] * uc[a] * uc[b];
    }
    const double q = u2[c];
    const double u_dD = dot(uc, gD);
    const double u_dphi = dot(uc, gphi);

    double term = 2.0 * hess_uu + 2.0 * D * grad_u_sq;
    if (regime != Regime::Homogeneous) {
      const double cubic_coef = regime == Regime::VariableMobility ? pi / D : 1.0 / D;
      term += -(lf - 1.0) * dot(grad_u2, gD);
      term += -2.0 * (1.0 + lf) * u_dD * div_u;
      term += 2.0 * cubic_coef * q * lf * u_dD;
      term += 2.0 / D * lf * lf * u_dD * u_dD;
      term += 2.0 / D * lf * u_dD * u_dphi;
    }
    if (regime == Regime::VariableMobility) {
      const double u_dpi = dot(uc, gpi);
      Point conv{0.0, 0.0, 0.0};  // (grad u) u
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) conv[k] += grad_u[k][l] * uc[l];
      }
      term += pi_t * q;
      term += q * u_dpi;
      term += -2.0 * (lf - 1.0) / pi * q * dot(gpi, gD);
      term += 2.0 * (lf - 1.0) / pi * u_dpi * u_dD;
      term += D / pi * dot(grad_u2, gpi);
      term += -2.0 * D / pi * dot(conv, gpi);
    }
    sum += term * fc;
  }
  return sum * g.cell_volume();
}

IdentityReport second_derivative_identity(const ScalarField& f, const ParameterSet& params,
                                          double t, Regime regime, const FdContext& fd) {
  if (!(fd.dt > 0.0)) throw std::invalid_argument("finite-difference step must be > 0");
  const double lhs = (fd.F_next - 2.0 * fd.F_mid + fd.F_prev) / (fd.dt * fd.dt);
  const double rhs = second_derivative_rhs(f, params, t, regime);
  return IdentityReport{lhs, rhs, std::abs(lhs - rhs), regime};
}

double gronwall_envelope(double c, double d, double p, double g0, double t) {
  if (!(c > 0.0 && d > 0.0)) throw std::invalid_argument("gronwall: c and d must be > 0");
  if (!(p > 1.0)) throw std::invalid_argument("gronwall: p must be > 1");
  const double limit = std::pow(c / d, 1.0 / (p - 1.0));
  if (!(g0 > 0.0 && g0 < limit)) {
    throw std::invalid_argument("gronwall: g0 must lie in (0, (c/d)^(1/(p-1)))");
  }
  return std::pow(std::pow(g0, 1.0 - p) - d / c, -1.0 / (p - 1.0)) * std::exp(-c * t);
}

DecayFit fit_decay_rate(const EnergyTrace& trace, DecayQuantity quantity,
                        const FitOptions& options) {
  const auto& rows = trace.rows;
  if (rows.size() < options.min_rows) {
    throw std::invalid_argument("decay fit needs at least " + std::to_string(options.min_rows) +
                                " trace rows, got " +
                                std::to_string(rows.size()));
  }
  auto value = [quantity](const TraceRow& r) {
    return quantity == DecayQuantity::FRel ? r.F_rel : r.D_dis;
  };
  const double q0 = value(rows.front());
  if (!(q0 > 0.0)) throw std::invalid_argument("decay fit needs a positive initial quantity");
  const auto skip = static_cast<std::size_t>(options.transient_fraction * rows.size());
  const double floor = options.relative_floor * q0;

  std::vector<double> ts, ys;
  for (std::size_t i = skip; i < rows.size(); ++i) {
    const double q = value(rows[i]);
    if (q > floor && q > 0.0) {
      ts.push_back(rows[i].t);
      ys.push_back(std::log(q));
    }
  }
  const auto m = ts.size();
  if (m < 5) {
    throw std::invalid_argument("decay fit window keeps " + std::to_string(m) +
                                " rows; at least 5 are required");
  }
  double t_mean = 0.0, y_mean = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    t_mean += ts[i];
    y_mean += ys[i];
  }
  t_mean /= static_cast<double>(m);
  y_mean /= static_cast<double>(m);
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    stt += (ts[i] - t_mean) * (ts[i] - t_mean);
    sty += (ts[i] - t_mean) * (ys[i] - y_mean);
    syy += (ys[i] - y_mean) * (ys[i] - y_mean);
  }
  const double slope = sty / stt;
  const double intercept = y_mean - slope * t_mean;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = ys[i] - (intercept + slope * ts[i]);
    ss_res += r * r;
  }
  const double r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return DecayFit{-slope, intercept, r2, {ts.front(), ts.back()}, static_cast<int>(m)};
}

}  // namespace fpflow
