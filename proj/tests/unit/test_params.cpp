#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>
#include <random>

#include "fpflow/params.hpp"

using namespace fpflow;
using std::numbers::pi;

namespace {

std::vector<Point> random_points(int dim, int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Point> pts(count);
  for (auto& p : pts) {
    p = {0, 0, 0};
    for (int j = 0; j < dim; ++j) p[j] = u(rng);
  }
  return pts;
}

// Centered difference of a scalar evaluator along axis j.
template <class Fn>
double central(Fn&& fn, Point x, int j, double eps) {
  Point a = x, b = x;
  a[j] += eps;
  b[j] -= eps;
  return (fn(a) - fn(b)) / (2 * eps);
}

}  // namespace

TEST_CASE("1D potential preset values") {
  const auto phi = preset_potential_1d(2);
  CHECK(phi.value({0, 0, 0}) == doctest::Approx(1.0));
  CHECK(phi.value({0.5, 0, 0}) == doctest::Approx(1.25));
  // not convex: phi''(0) = pi^2/2, phi''(0.5) = -pi^2/2
  CHECK(phi.hessian({0, 0, 0})[0][0] == doctest::Approx(pi * pi / 2));
  CHECK(phi.hessian({0.5, 0, 0})[0][0] == doctest::Approx(-pi * pi / 2));
  CHECK_THROWS_AS(preset_potential_1d(0), std::invalid_argument);
}

TEST_CASE("mobility preset values") {
  const auto m = preset_mobility(1);
  CHECK(m.value({0, 0, 0}, 0.0) == doctest::Approx(0.5));
  CHECK(m.value({0.5, 0, 0}, 0.0) == doctest::Approx(1.0));
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-1, 1), ut(0, 10);
  for (int k = 0; k < 1000; ++k) {
    const double v = m.value({u(rng), 0, 0}, ut(rng));
    CHECK(v >= 1.0 / 3.0 - 1e-15);
    CHECK(v <= 2.0 + 1e-15);
    CHECK(v >= m.lower_bound);
  }
  CHECK_THROWS_AS(preset_mobility(4), std::invalid_argument);
}

TEST_CASE("single-mode diffusion values") {
  const auto D = preset_diffusion_single_mode(1);
  CHECK(D.value({0, 0, 0}) == doctest::Approx(1.0));
  CHECK(D.value({0.25, 0, 0}) == doctest::Approx(0.5));
  CHECK(D.lower_bound == 0.5);
  double lo = 10;
  for (int i = 0; i <= 4000; ++i) lo = std::min(lo, D.value({-1 + i * 5e-4, 0, 0}));
  CHECK(lo == doctest::Approx(0.5));
  CHECK_THROWS_AS(preset_diffusion_single_mode(0), std::invalid_argument);
}

TEST_CASE("multimode diffusion") {
  const auto D = preset_diffusion_multimode(1, {100}, 0.01, ModeRule::All);
  CHECK(D.value({0, 0, 0}) == doctest::Approx(3.0));
  for (const auto& p : random_points(1, 1000, 5)) CHECK(D.value(p) >= 1.0);

  CHECK(active_modes(2, {20, 10}, ModeRule::Increasing).size() == 45);
  for (const auto& m : active_modes(3, {10, 8, 4}, ModeRule::NonIncreasing)) {
    CHECK(m[0] >= m[1]);
    CHECK(m[1] >= m[2]);
  }
  CHECK_THROWS_AS(preset_diffusion_multimode(1, {10}, -0.1, ModeRule::All),
                  std::invalid_argument);
}

TEST_CASE("Gaussian initial condition") {
  const auto g = build_grid(1, 200, Boundary::Periodic);
  const auto ic = preset_gaussian_ic(1);
  const auto f = ic.build(g);
  CHECK(integrate(f) == doctest::Approx(1.0).epsilon(1e-14));
  const double peak = 1.0 / std::sqrt(2 * pi * 0.01);
  CHECK(f[100] == doctest::Approx(peak).epsilon(0.01));
  CHECK(ic.density({1.0, 0, 0}) == doctest::Approx(std::exp(-50.0) * peak).epsilon(1e-12));
  CHECK(ic.density({1.0, 0, 0}) == doctest::Approx(7.7e-22).epsilon(0.01));
  CHECK(f[0] > 0.0);
  CHECK(f[199] > 0.0);
  CHECK_THROWS_AS(preset_gaussian_ic(1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(preset_gaussian_ic(1, -1.0), std::invalid_argument);
}

TEST_CASE("preset gradients match centered differences") {
  for (int dim = 1; dim <= 3; ++dim) {
    const PresetContext ctx{dim, 20};
    const auto pts = random_points(dim, 100, 10 + dim);
    for (const char* name : {"phi:standard", "phi:quad", "phi:linear"}) {
      const auto phi = resolve_potential(name, ctx);
      for (const auto& x : pts) {
        const Point g = phi.gradient(x);
        for (int j = 0; j < dim; ++j) {
          CHECK(g[j] == doctest::Approx(central(phi.value, x, j, 1e-5)).epsilon(1e-6).scale(1));
        }
      }
    }
    for (const char* name : {"D:single", "D:multi", "D:homogeneous"}) {
      const auto D = resolve_diffusion(name, ctx);
      for (const auto& x : pts) {
        const Point g = D.gradient(x);
        for (int j = 0; j < dim; ++j) {
          CHECK(g[j] == doctest::Approx(central(D.value, x, j, 1e-5)).epsilon(1e-6).scale(1));
        }
      }
    }
    const auto m = resolve_mobility("pi:standard", ctx);
    for (const auto& x : pts) {
      const double t = 0.3;
      const Point g = m.gradient(x, t);
      auto at_t = [&](const Point& y) { return m.value(y, t); };
      for (int j = 0; j < dim; ++j) {
        CHECK(g[j] == doctest::Approx(central(at_t, x, j, 1e-5)).epsilon(1e-6).scale(1));
      }
      const double dt = (m.value(x, t + 1e-6) - m.value(x, t - 1e-6)) / 2e-6;
      CHECK(m.time_derivative(x, t) == doctest::Approx(dt).epsilon(1e-5).scale(1));
    }
  }
}

TEST_CASE("potential hessian matches differences of the gradient") {
  const auto phi = resolve_potential("phi:standard", {3, 20});
  for (const auto& x : random_points(3, 50, 4)) {
    const auto H = phi.hessian(x);
    for (int i = 0; i < 3; ++i) {
      auto gi = [&](const Point& y) { return phi.gradient(y)[i]; };
      for (int j = 0; j < 3; ++j) {
        CHECK(H[i][j] == doctest::Approx(central(gi, x, j, 1e-5)).epsilon(1e-6).scale(1));
      }
    }
  }
}

TEST_CASE("periodicity, evenness and positivity of presets") {
  for (int dim = 1; dim <= 3; ++dim) {
    const PresetContext ctx{dim, 20};
    const auto phi = resolve_potential("phi:standard", ctx);
    const auto D1 = resolve_diffusion("D:single", ctx);
    const auto DM = resolve_diffusion("D:multi", ctx);
    const auto m = resolve_mobility("pi:standard", ctx);
    for (const auto& x : random_points(dim, 200, 20 + dim)) {
      for (int j = 0; j < dim; ++j) {
        Point shifted = x, mirrored = x;
        shifted[j] += 2.0;
        mirrored[j] = -x[j];
        CHECK(phi.value(shifted) == doctest::Approx(phi.value(x)).epsilon(1e-12));
        CHECK(D1.value(shifted) == doctest::Approx(D1.value(x)).epsilon(1e-12));
        CHECK(m.value(shifted, 0.7) == doctest::Approx(m.value(x, 0.7)).epsilon(1e-12));
        CHECK(phi.value(mirrored) == doctest::Approx(phi.value(x)).epsilon(1e-14));
        CHECK(D1.value(mirrored) == doctest::Approx(D1.value(x)).epsilon(1e-14));
        CHECK(DM.value(mirrored) == doctest::Approx(DM.value(x)).epsilon(1e-14));
      }
      CHECK(D1.value(x) >= D1.lower_bound - 1e-15);
      CHECK(DM.value(x) >= DM.lower_bound - 1e-15);
      CHECK(m.value(x, 1.3) >= m.lower_bound - 1e-15);
    }
    // Multimode sums contain odd m, period 4: only continuity across the wrap.
    Point lo{0, 0, 0}, hi{0, 0, 0};
    lo[0] = -1.0;
    hi[0] = 1.0;
    CHECK(DM.value(lo) == doctest::Approx(DM.value(hi)).epsilon(1e-14));
  }
}

TEST_CASE("preset registry") {
  const PresetContext ctx{1, 200};
  CHECK(resolve_potential("phi1d:k2", ctx).value({0.5, 0, 0}) == doctest::Approx(1.25));
  CHECK(resolve_potential("phi:const:5", ctx).value({0.3, 0, 0}) == 5.0);
  CHECK(resolve_potential("phi:zero", ctx).constant);
  CHECK(resolve_diffusion("D:homogeneous", ctx).constant);
  CHECK(resolve_diffusion("D:const:2", ctx).value({0.1, 0, 0}) == 2.0);
  CHECK(resolve_diffusion("D:multi", ctx).value({0, 0, 0}) == doctest::Approx(3.0));
  CHECK(resolve_diffusion("D:multi:4:0.5", ctx).value({0, 0, 0}) == doctest::Approx(5.0));
  CHECK(resolve_mobility("pi:unit", ctx).unit);
  CHECK(resolve_mobility("pi:const:3", ctx).value({0, 0, 0}, 1.0) == 3.0);

  CHECK_THROWS_AS(resolve_potential("phi:nope", ctx), UnknownPreset);
  CHECK_THROWS_AS(resolve_diffusion("D:", ctx), UnknownPreset);
  CHECK_THROWS_AS(resolve_mobility("pi:fast", ctx), UnknownPreset);
  CHECK_THROWS_AS(resolve_potential("phi2d:k1", {2, 20}), UnknownPreset);
  try {
    make_parameter_set("phi:standard", "D:bogus", "pi:unit", ctx);
    FAIL("expected UnknownPreset");
  } catch (const UnknownPreset& e) {
    CHECK(e.name() == "D:bogus");
  }
}

TEST_CASE("sampling uses cell midpoints") {
  const auto g = build_grid(2, 4, Boundary::NoFlux);
  const auto p = make_parameter_set("phi:standard", "D:single", "pi:standard", {2, 4});
  const auto phi = sample_potential(p.potential, g);
  const auto m = sample_mobility(p.mobility, g, 0.25);
  for (std::size_t c = 0; c < g.size(); ++c) {
    CHECK(phi[c] == p.potential.value(g.center(c)));
    CHECK(m[c] == p.mobility.value(g.center(c), 0.25));
  }
}
