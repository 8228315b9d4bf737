#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>
#include <random>

#include "fpflow/diagnostics.hpp"
#include "fpflow/equilibrium.hpp"

using namespace fpflow;

namespace {

ParameterSet params(const char* phi, const char* D, const char* pi, int dim = 1, int n = 200) {
  return make_parameter_set(phi, D, pi, PresetContext{dim, n});
}

EnergyTrace synthetic_trace(double rate, int rows, double noise = 0.0, double scale = 1.0) {
  std::mt19937 rng(7);
  std::normal_distribution<double> gauss(0.0, noise > 0 ? noise : 1.0);
  EnergyTrace tr;
  for (int i = 0; i < rows; ++i) {
    const double t = 0.1 * i;
    const double eps = noise > 0 ? gauss(rng) : 0.0;
    const double q = scale * std::exp(-rate * t + eps);
    tr.rows.push_back(TraceRow{t, 1.0, 0.0, q, 2.0 * q, 0.1, 1.0});
  }
  return tr;
}

}  // namespace

TEST_CASE("free energy of the uniform density") {
  const auto g = build_grid(1, 40, Boundary::Periodic);
  const auto p = params("phi:zero", "D:homogeneous", "pi:unit", 1, 40);
  CHECK(free_energy(ScalarField(g, 0.5), p) ==
        doctest::Approx(-1.0 - std::log(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(free_energy(ScalarField(g, 0.0), p), std::invalid_argument);
}

TEST_CASE("free energy with a constant potential adds the potential times the mass") {
  const auto g = build_grid(2, 12, Boundary::NoFlux);
  const auto a = params("phi:zero", "D:homogeneous", "pi:unit", 2, 12);
  const auto b = params("phi:const:3", "D:homogeneous", "pi:unit", 2, 12);
  const auto f = preset_gaussian_ic(2, 0.1).build(g);
  CHECK(free_energy(f, b) - free_energy(f, a) == doctest::Approx(3.0 * integrate(f)).epsilon(1e-12));
}

TEST_CASE("velocity and dissipation vanish at equilibrium") {
  for (int dim = 1; dim <= 3; ++dim) {
    const int n = dim == 3 ? 8 : 20;
    const auto g = build_grid(dim, n, Boundary::Periodic);
    const auto p = params("phi:standard", "D:multi", "pi:standard", dim, n);
    const auto eq = equilibrium_state(p, g);
    CHECK(velocity(eq.density, p, 0.4).max_abs() <= 1e-12);
    CHECK(dissipation(eq.density, p, 0.4) <= 1e-22);
    CHECK(relative_entropy(eq.density, eq, p) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  }
}

TEST_CASE("velocity of a linear potential on a uniform density") {
  const auto g = build_grid(1, 8, Boundary::NoFlux);
  const auto p = params("phi:linear", "D:homogeneous", "pi:unit", 1, 8);
  const auto u = velocity(ScalarField(g, 0.5), p, 0.0);
  for (std::size_t c = 0; c + 1 < g.size(); ++c) CHECK(u(0, c) == doctest::Approx(-1.0));
  CHECK(u(0, 7) == 0.0);
  // interior cells see |u|^2 = 1, the two wall cells 1/2
  CHECK(dissipation(ScalarField(g, 0.5), p, 0.0) == doctest::Approx(0.5 * (6 + 1) / 4.0));
}

TEST_CASE("relative entropy is nonnegative for unit mass and D constant") {
  const auto g = build_grid(1, 100, Boundary::Periodic);
  const auto p = params("phi:standard", "D:const:0.5", "pi:unit", 1, 100);
  const auto eq = equilibrium_state(p, g);
  const auto f = preset_gaussian_ic(1, 0.05).build(g);
  CHECK(relative_entropy(f, eq, p) > 0.0);
  // F - F_eq equals the relative entropy when D is constant and both have unit mass
  CHECK(free_energy(f, p) - eq.free_energy ==
        doctest::Approx(relative_entropy(f, eq, p)).epsilon(1e-9));
}

TEST_CASE("CKP bound") {
  const auto g = build_grid(1, 100, Boundary::Periodic);
  const auto p = params("phi:standard", "D:homogeneous", "pi:unit", 1, 100);
  const auto eq = equilibrium_state(p, g);
  const auto at_eq = ckp_check(eq.density, eq);
  CHECK(at_eq.l1 == 0.0);
  CHECK(at_eq.holds);
  const auto r = ckp_check(preset_gaussian_ic(1).build(g), eq);
  CHECK(r.holds);
  CHECK(r.l1 * r.l1 <= r.bound);
  CHECK(r.l1 > 0.1);
}

TEST_CASE("max-principle envelope") {
  const auto g = build_grid(1, 60, Boundary::Periodic);
  const auto p = params("phi:standard", "D:single", "pi:unit", 1, 60);
  const auto eq = equilibrium_state(p, g);
  const auto env0 = max_principle_envelope(eq.density, eq, p);
  // f0 = f_eq gives h0 = 0 and a tight envelope
  for (std::size_t c = 0; c < g.size(); ++c) {
    CHECK(env0.lower[c] == doctest::Approx(eq.density[c]).epsilon(1e-14));
    CHECK(env0.upper[c] == doctest::Approx(eq.density[c]).epsilon(1e-14));
  }
  const auto f0 = preset_gaussian_ic(1, 0.1).build(g);
  const auto env = max_principle_envelope(f0, eq, p);
  CHECK(envelope_violation(f0, env, 0.0) <= 1e-14);
  ScalarField out = f0;
  out[5] = env.upper[5] + 0.25;
  CHECK(envelope_violation(out, env, 0.0) == doctest::Approx(0.25));
  CHECK(envelope_violation(out, env, 0.5) < 0.0);
}

TEST_CASE("free energy lower bound and log-Sobolev ratio") {
  const auto g = build_grid(1, 100, Boundary::Periodic);
  const auto p = params("phi:standard", "D:single", "pi:standard", 1, 100);
  const auto f = preset_gaussian_ic(1, 0.05).build(g);
  CHECK(free_energy(f, p) >= free_energy_lower_bound(p, g, f.min(), f.max()));
  const auto eq = equilibrium_state(p, g);
  const double ratio = log_sobolev_ratio(f, eq, p, 0.0);
  CHECK(std::isfinite(ratio));
  CHECK(ratio > 0.0);
}

TEST_CASE("second-derivative law: equilibrium and mismatch") {
  const auto g = build_grid(1, 80, Boundary::Periodic);
  const auto p = params("phi:standard", "D:single", "pi:unit", 1, 80);
  const auto eq = equilibrium_state(p, g);
  const auto rep = second_derivative_identity(eq.density, p, 0.0, Regime::InhomogeneousD,
                                              FdContext{1.0, 1.0, 1.0, 0.1});
  CHECK(std::abs(rep.rhs) <= 1e-18);
  CHECK(rep.residual <= 1e-18);
  CHECK(rep.regime == Regime::InhomogeneousD);

  const auto bad = second_derivative_identity(eq.density, p, 0.0, Regime::InhomogeneousD,
                                              FdContext{1.0, 0.0, 1.0, 0.5});
  CHECK(bad.lhs == doctest::Approx(8.0));
  CHECK(bad.residual == doctest::Approx(8.0));
  CHECK_THROWS_AS(second_derivative_identity(eq.density, p, 0.0, Regime::InhomogeneousD,
                                             FdContext{0, 0, 0, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("second-derivative law: regime preconditions") {
  const auto g = build_grid(1, 20, Boundary::Periodic);
  const auto f = preset_gaussian_ic(1, 0.1).build(g);
  CHECK_THROWS_AS(second_derivative_rhs(f, params("phi:standard", "D:single", "pi:unit", 1, 20), 0.0,
                                        Regime::Homogeneous),
                  std::invalid_argument);
  CHECK_THROWS_AS(second_derivative_rhs(f, params("phi:standard", "D:single", "pi:standard", 1, 20),
                                        0.0, Regime::InhomogeneousD),
                  std::invalid_argument);
  CHECK(to_string(Regime::VariableMobility) == "variable-mobility");
}

TEST_CASE("second-derivative rhs dominates the convex-potential dissipation") {
  // phi = x^2 has Hessian 2, so the homogeneous right-hand side is at least
  // 4 D_dis up to the cell-averaging error of the discrete velocity.
  const auto g = build_grid(1, 200, Boundary::NoFlux);
  auto p = params("phi:zero", "D:homogeneous", "pi:unit");
  p.potential.value = [](const Point& x) { return x[0] * x[0]; };
  p.potential.gradient = [](const Point& x) { return Point{2 * x[0], 0, 0}; };
  p.potential.hessian = [](const Point&) {
    Hessian H{};
    H[0][0] = 2.0;
    return H;
  };
  const auto f = preset_gaussian_ic(1, 0.05).build(g);
  const double rhs = second_derivative_rhs(f, p, 0.0, Regime::Homogeneous);
  CHECK(rhs >= 4.0 * dissipation(f, p, 0.0) * (1.0 - 1e-2));
}

TEST_CASE("Gronwall envelope") {
  CHECK(gronwall_envelope(1.0, 1.0, 2.0, 0.5, 0.0) == doctest::Approx(1.0));
  CHECK(gronwall_envelope(1.0, 1.0, 2.0, 0.5, 1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(gronwall_envelope(2.0, 1.0, 3.0, 1.0, 0.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(gronwall_envelope(0.0, 1.0, 2.0, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gronwall_envelope(1.0, 1.0, 1.0, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gronwall_envelope(1.0, 1.0, 2.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gronwall_envelope(1.0, 1.0, 2.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("decay fit on synthetic traces") {
  const auto exact = fit_decay_rate(synthetic_trace(3.0, 40), DecayQuantity::FRel);
  CHECK(exact.rate == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(exact.r_squared == doctest::Approx(1.0));
  CHECK(exact.n_points == 36);
  CHECK(exact.window.first == doctest::Approx(0.4));
  CHECK(exact.window.second == doctest::Approx(3.9));
  CHECK(fit_decay_rate(synthetic_trace(3.0, 40), DecayQuantity::DDis).rate ==
        doctest::Approx(3.0).epsilon(1e-12));

  const auto noisy = fit_decay_rate(synthetic_trace(3.0, 200, 0.05), DecayQuantity::FRel);
  CHECK(noisy.rate == doctest::Approx(3.0).epsilon(0.02));
  CHECK(noisy.r_squared > 0.99);
  CHECK(noisy.r_squared < 1.0);

  // rate does not depend on the overall scale
  const auto scaled = fit_decay_rate(synthetic_trace(3.0, 40, 0.0, 1e6), DecayQuantity::FRel);
  CHECK(scaled.rate == doctest::Approx(exact.rate).epsilon(1e-12));
}

TEST_CASE("decay fit drops rows under the floor") {
  auto tr = synthetic_trace(30.0, 40);  // falls below 1e-12 q0 near t = 0.92
  const auto fit = fit_decay_rate(tr, DecayQuantity::FRel);
  CHECK(fit.window.second < 1.0);
  CHECK(fit.rate == doctest::Approx(30.0).epsilon(1e-10));
}

TEST_CASE("decay fit errors") {
  CHECK_THROWS_AS(fit_decay_rate(synthetic_trace(1.0, 10), DecayQuantity::FRel),
                  std::invalid_argument);
  FitOptions short_ok;
  short_ok.min_rows = 6;
  CHECK_NOTHROW(fit_decay_rate(synthetic_trace(1.0, 10), DecayQuantity::FRel, short_ok));
  auto zero = synthetic_trace(1.0, 30);
  zero.rows[0].F_rel = 0.0;
  CHECK_THROWS_AS(fit_decay_rate(zero, DecayQuantity::FRel), std::invalid_argument);
  // collapses after five rows: window keeps too few points
  CHECK_THROWS_AS(fit_decay_rate(synthetic_trace(300.0, 30), DecayQuantity::FRel),
                  std::invalid_argument);
}
