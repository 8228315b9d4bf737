#include "fpflow/params.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace fpflow {

namespace {

constexpr double kPi = std::numbers::pi;

void check_dim(int dim) {
  if (dim < 1 || dim > 3) {
    throw std::invalid_argument("dimension must be 1, 2 or 3, got " + std::to_string(dim));
  }
}

// One-dimensional profile together with its first two derivatives.
struct Profile {
  double v, d1, d2;
};

// 1 + 1/4 sin^2(a x), a = k pi / 2
Profile potential_profile(int k, double x) {
  const double a = k * kPi / 2.0;
  const double s = std::sin(a * x);
  return {1.0 + 0.25 * s * s, 0.25 * a * std::sin(2.0 * a * x), 0.5 * a * a * std::cos(2.0 * a * x)};
}

// 1 + cos^2(w pi x)
Profile mobility_profile(int w, double x) {
  const double a = w * kPi;
  const double c = std::cos(a * x);
  return {1.0 + c * c, -a * std::sin(2.0 * a * x), 0.0};
}

// 1 - 1/2 sin^2(w pi x)
Profile diffusion_profile(int w, double x) {
  const double a = w * kPi;
  const double s = std::sin(a * x);
  return {1.0 - 0.5 * s * s, -0.5 * a * std::sin(2.0 * a * x), 0.0};
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s, std::string_view whole) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UnknownPreset(std::string(whole));
  }
}

std::vector<int> parse_ints(const std::string& s, std::string_view whole) {
  std::vector<int> out;
  for (const auto& part : split(s, ',')) {
    const double v = parse_double(part, whole);
    if (v != std::floor(v)) throw UnknownPreset(std::string(whole));
    out.push_back(static_cast<int>(v));
  }
  return out;
}

}  // namespace

// ---- potentials -------------------------------------------------------------

PotentialField preset_potential_tensor(const std::vector<int>& k_per_axis) {
  if (k_per_axis.empty() || k_per_axis.size() > 3) {
    throw std::invalid_argument("tensor potential needs 1 to 3 wavenumbers");
  }
  for (int k : k_per_axis) {
    if (k < 1) throw std::invalid_argument("potential wavenumber k_p must be >= 1");
  }
  const std::vector<int> ks = k_per_axis;
  const int n = static_cast<int>(ks.size());
  auto profiles = [ks, n](const Point& x) {
    std::array<Profile, 3> p{};
    for (int j = 0; j < n; ++j) p[j] = potential_profile(ks[j], x[j]);
    return p;
  };

  PotentialField phi;
  phi.value = [profiles, n](const Point& x) {
    const auto p = profiles(x);
    double v = 1.0;
    for (int j = 0; j < n; ++j) v *= p[j].v;
    return v;
  };
  phi.gradient = [profiles, n](const Point& x) {
    const auto p = profiles(x);
    Point g{0.0, 0.0, 0.0};
    for (int j = 0; j < n; ++j) {
      double v = p[j].d1;
      for (int i = 0; i < n; ++i) {
        if (i != j) v *= p[i].v;
      }
      g[j] = v;
    }
    return g;
  };
  phi.hessian = [profiles, n](const Point& x) {
    const auto p = profiles(x);
    Hessian H{};
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        double v = 1.0;
        for (int i = 0; i < n; ++i) {
          if (a == b && i == a) {
            v *= p[i].d2;
          } else if (i == a || i == b) {
            v *= p[i].d1;
          } else {
            v *= p[i].v;
          }
        }
        H[a][b] = v;
      }
    }
    return H;
  };
  return phi;
}

PotentialField preset_potential_1d(int k_p) {
  if (k_p < 1) throw std::invalid_argument("potential wavenumber k_p must be >= 1");
  return preset_potential_tensor({k_p});
}

PotentialField constant_potential(double value) {
  PotentialField phi;
  phi.value = [value](const Point&) { return value; };
  phi.gradient = [](const Point&) { return Point{0.0, 0.0, 0.0}; };
  phi.hessian = [](const Point&) { return Hessian{}; };
  phi.constant = true;
  phi.convexity_bound = 0.0;
  return phi;
}

PotentialField linear_potential() {
  PotentialField phi;
  phi.value = [](const Point& x) { return x[0]; };
  phi.gradient = [](const Point&) { return Point{1.0, 0.0, 0.0}; };
  phi.hessian = [](const Point&) { return Hessian{}; };
  phi.convexity_bound = 0.0;
  return phi;
}

PotentialField quadratic_potential() {
  PotentialField phi;
  phi.value = [](const Point& x) {
    return 1.0 + 0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  };
  phi.gradient = [](const Point& x) { return x; };
  phi.hessian = [](const Point&) {
    Hessian H{};
    for (int j = 0; j < 3; ++j) H[j][j] = 1.0;
    return H;
  };
  phi.convexity_bound = 1.0;
  return phi;
}

// ---- mobility ---------------------------------------------------------------

MobilityField preset_mobility(int dim) {
  check_dim(dim);
  // gamma(x,t) = g(x) tau(t); pi = 1 / gamma
  auto spatial = [dim](const Point& x, Point& grad) {
    std::array<Profile, 3> p{};
    for (int j = 0; j < dim; ++j) p[j] = mobility_profile(j + 1, x[j]);
    double g = 1.0;
    for (int j = 0; j < dim; ++j) g *= p[j].v;
    grad = {0.0, 0.0, 0.0};
    for (int j = 0; j < dim; ++j) {
      double v = p[j].d1;
      for (int i = 0; i < dim; ++i) {
        if (i != j) v *= p[i].v;
      }
      grad[j] = v;
    }
    return g;
  };
  auto tau = [](double t) { return 1.0 + 0.5 * std::sin(10.0 * t); };

  MobilityField pi;
  pi.value = [spatial, tau](const Point& x, double t) {
    Point dg;
    return 1.0 / (spatial(x, dg) * tau(t));
  };
  pi.gradient = [spatial, tau](const Point& x, double t) {
    Point dg;
    const double g = spatial(x, dg);
    const double scale = -1.0 / (g * g * tau(t));
    return Point{dg[0] * scale, dg[1] * scale, dg[2] * scale};
  };
  pi.time_derivative = [spatial, tau](const Point& x, double t) {
    Point dg;
    const double g = spatial(x, dg);
    const double s = tau(t);
    return -5.0 * std::cos(10.0 * t) / (g * s * s);
  };
  pi.lower_bound = 1.0 / (std::pow(2.0, dim) * 1.5);
  return pi;
}

MobilityField constant_mobility(double value) {
  if (!(value > 0.0)) throw std::invalid_argument("mobility must be positive");
  MobilityField pi;
  pi.value = [value](const Point&, double) { return value; };
  pi.gradient = [](const Point&, double) { return Point{0.0, 0.0, 0.0}; };
  pi.time_derivative = [](const Point&, double) { return 0.0; };
  pi.lower_bound = value;
  pi.unit = value == 1.0;
  return pi;
}

MobilityField unit_mobility() { return constant_mobility(1.0); }

// ---- diffusion --------------------------------------------------------------

DiffusionField constant_diffusion(double value) {
  if (!(value > 0.0)) throw std::invalid_argument("diffusion must be positive");
  DiffusionField D;
  D.value = [value](const Point&) { return value; };
  D.gradient = [](const Point&) { return Point{0.0, 0.0, 0.0}; };
  D.lower_bound = value;
  D.constant = true;
  return D;
}

DiffusionField preset_diffusion_single_mode(int dim) {
  check_dim(dim);
  static constexpr std::array<std::array<int, 3>, 3> kFreq{{{2, 0, 0}, {1, 3, 0}, {1, 3, 4}}};
  const auto freq = kFreq[dim - 1];
  auto eval = [dim, freq](const Point& x, Point* grad) {
    std::array<Profile, 3> p{};
    for (int j = 0; j < dim; ++j) p[j] = diffusion_profile(freq[j], x[j]);
    double v = 1.0;
    for (int j = 0; j < dim; ++j) v *= p[j].v;
    if (grad) {
      *grad = {0.0, 0.0, 0.0};
      for (int j = 0; j < dim; ++j) {
        double g = p[j].d1;
        for (int i = 0; i < dim; ++i) {
          if (i != j) g *= p[i].v;
        }
        (*grad)[j] = g;
      }
    }
    return v;
  };
  DiffusionField D;
  D.value = [eval](const Point& x) { return eval(x, nullptr); };
  D.gradient = [eval](const Point& x) {
    Point g;
    eval(x, &g);
    return g;
  };
  D.lower_bound = std::pow(0.5, dim);
  return D;
}

std::string_view to_string(ModeRule rule) {
  switch (rule) {
    case ModeRule::All: return "all";
    case ModeRule::Increasing: return "increasing";
    case ModeRule::NonIncreasing: return "non-increasing";
  }
  return "?";
}

std::vector<std::array<int, 3>> active_modes(int dim, const std::vector<int>& mode_caps,
                                             ModeRule rule) {
  check_dim(dim);
  if (static_cast<int>(mode_caps.size()) != dim) {
    throw std::invalid_argument("multimode diffusion needs one mode cap per dimension");
  }
  for (int m : mode_caps) {
    if (m < 1) throw std::invalid_argument("mode caps must be >= 1");
  }
  std::vector<std::array<int, 3>> modes;
  const int c0 = mode_caps[0];
  const int c1 = dim > 1 ? mode_caps[1] : 1;
  const int c2 = dim > 2 ? mode_caps[2] : 1;
  for (int m0 = 1; m0 <= c0; ++m0) {
    for (int m1 = 1; m1 <= c1; ++m1) {
      for (int m2 = 1; m2 <= c2; ++m2) {
        const std::array<int, 3> m{m0, dim > 1 ? m1 : 0, dim > 2 ? m2 : 0};
        bool keep = true;
        for (int j = 0; j + 1 < dim; ++j) {
          if (rule == ModeRule::Increasing && !(m[j] < m[j + 1])) keep = false;
          if (rule == ModeRule::NonIncreasing && !(m[j] >= m[j + 1])) keep = false;
        }
        if (keep) modes.push_back(m);
      }
    }
  }
  return modes;
}

DiffusionField preset_diffusion_multimode(int dim, const std::vector<int>& mode_caps,
                                          double amplitude, ModeRule rule) {
  if (amplitude < 0.0) throw std::invalid_argument("mode amplitude must be >= 0");
  const auto modes = active_modes(dim, mode_caps, rule);
  int max_cap = 0;
  for (int m : mode_caps) max_cap = std::max(max_cap, m);

  // cos/sin of (m pi x_j / 2) for m = 0..max_cap, per axis
  auto eval = [dim, modes, amplitude, max_cap](const Point& x, Point* grad) {
    std::array<std::vector<double>, 3> cs, sn;
    for (int j = 0; j < dim; ++j) {
      cs[j].resize(max_cap + 1);
      sn[j].resize(max_cap + 1);
      for (int m = 0; m <= max_cap; ++m) {
        const double a = m * kPi / 2.0 * x[j];
        cs[j][m] = std::cos(a);
        sn[j][m] = std::sin(a);
      }
    }
    double v = 1.0;
    Point g{0.0, 0.0, 0.0};
    for (const auto& m : modes) {
      double prod = 1.0;
      for (int j = 0; j < dim; ++j) prod *= cs[j][m[j]];
      v += amplitude * (prod + 1.0);
      if (grad) {
        for (int j = 0; j < dim; ++j) {
          double d = -m[j] * kPi / 2.0 * sn[j][m[j]];
          for (int i = 0; i < dim; ++i) {
            if (i != j) d *= cs[i][m[i]];
          }
          g[j] += amplitude * d;
        }
      }
    }
    if (grad) *grad = g;
    return v;
  };
  DiffusionField D;
  D.value = [eval](const Point& x) { return eval(x, nullptr); };
  D.gradient = [eval](const Point& x) {
    Point g;
    eval(x, &g);
    return g;
  };
  D.lower_bound = 1.0;
  D.constant = modes.empty() || amplitude == 0.0;
  return D;
}

// ---- initial conditions -----------------------------------------------------

GaussianInitialCondition::GaussianInitialCondition(int dim, double variance)
    : dim_(dim), variance_(variance) {
  check_dim(dim);
  if (!(variance > 0.0)) throw std::invalid_argument("Gaussian variance must be > 0");
}

double GaussianInitialCondition::density(const Point& x) const {
  const double norm = 1.0 / std::sqrt(2.0 * kPi * variance_);
  double v = 1.0;
  for (int j = 0; j < dim_; ++j) v *= norm * std::exp(-x[j] * x[j] / (2.0 * variance_));
  return v;
}

ScalarField GaussianInitialCondition::build(const TensorGrid& grid) const {
  if (grid.dim() != dim_) throw std::invalid_argument("Gaussian IC dimension does not match grid");
  ScalarField f = ScalarField::sample(grid, [this](const Point& x) { return density(x); });
  const double mass = integrate(f);
  for (double& v : f.values()) v /= mass;
  return f;
}

GaussianInitialCondition preset_gaussian_ic(int dim, double variance) {
  return GaussianInitialCondition(dim, variance);
}

// ---- registry ---------------------------------------------------------------

PotentialField resolve_potential(std::string_view name, const PresetContext& ctx) {
  const auto parts = split(name, ':');
  const std::string& head = parts[0];
  if (head == "phi" && parts.size() == 2) {
    if (parts[1] == "zero") return constant_potential(0.0);
    if (parts[1] == "linear") return linear_potential();
    if (parts[1] == "quad") return quadratic_potential();
    if (parts[1] == "standard") {
      static const std::array<std::vector<int>, 3> kStd{{{2}, {1, 2}, {1, 2, 3}}};
      check_dim(ctx.dim);
      return preset_potential_tensor(kStd[ctx.dim - 1]);
    }
  }
  if (head == "phi" && parts.size() == 3 && parts[1] == "const") {
    return constant_potential(parse_double(parts[2], name));
  }
  if (parts.size() == 2 && head.size() == 5 && head.starts_with("phi") && head[4] == 'd' &&
      parts[1].starts_with("k")) {
    const int d = head[3] - '0';
    const auto ks = parse_ints(parts[1].substr(1), name);
    if (static_cast<int>(ks.size()) != d) throw UnknownPreset(std::string(name));
    return preset_potential_tensor(ks);
  }
  throw UnknownPreset(std::string(name));
}

DiffusionField resolve_diffusion(std::string_view name, const PresetContext& ctx) {
  const auto parts = split(name, ':');
  if (parts[0] != "D" || parts.size() < 2) throw UnknownPreset(std::string(name));
  const std::string& kind = parts[1];
  const ModeRule rule = ctx.dim == 1   ? ModeRule::All
                        : ctx.dim == 2 ? ModeRule::Increasing
                                       : ModeRule::NonIncreasing;
  if (parts.size() == 2) {
    if (kind == "homogeneous") return constant_diffusion(1.0);
    if (kind == "single") return preset_diffusion_single_mode(ctx.dim);
    if (kind == "multi") {
      const int n = ctx.n_cells;
      std::vector<int> caps;
      if (ctx.dim == 1) caps = {n / 2};
      if (ctx.dim == 2) caps = {n / 2, n / 4};
      if (ctx.dim == 3) caps = {n / 2, n / 2 - 2, 4};
      for (int& c : caps) c = std::max(c, 1);
      return preset_diffusion_multimode(ctx.dim, caps, 0.01, rule);
    }
    if (kind == "multi-c" && ctx.dim == 3) {
      return preset_diffusion_multimode(3, {5, 3, 4}, 0.04, ModeRule::NonIncreasing);
    }
  }
  if (parts.size() == 3 && kind == "const") return constant_diffusion(parse_double(parts[2], name));
  if (parts.size() == 4 && kind == "multi") {
    return preset_diffusion_multimode(ctx.dim, parse_ints(parts[2], name),
                                      parse_double(parts[3], name), rule);
  }
  throw UnknownPreset(std::string(name));
}

MobilityField resolve_mobility(std::string_view name, const PresetContext& ctx) {
  const auto parts = split(name, ':');
  if (parts[0] == "pi" && parts.size() == 2) {
    if (parts[1] == "standard") return preset_mobility(ctx.dim);
    if (parts[1] == "unit") return unit_mobility();
  }
  if (parts[0] == "pi" && parts.size() == 3 && parts[1] == "const") {
    return constant_mobility(parse_double(parts[2], name));
  }
  throw UnknownPreset(std::string(name));
}

ParameterSet make_parameter_set(std::string_view potential, std::string_view diffusion,
                                std::string_view mobility, const PresetContext& ctx) {
  ParameterSet p;
  p.potential = resolve_potential(potential, ctx);
  p.diffusion = resolve_diffusion(diffusion, ctx);
  p.mobility = resolve_mobility(mobility, ctx);
  std::ostringstream label;
  label << potential << ' ' << diffusion << ' ' << mobility;
  p.name = label.str();
  return p;
}

ScalarField sample_potential(const PotentialField& phi, const TensorGrid& grid) {
  return ScalarField::sample(grid, phi.value);
}

ScalarField sample_diffusion(const DiffusionField& D, const TensorGrid& grid) {
  return ScalarField::sample(grid, D.value);
}

ScalarField sample_mobility(const MobilityField& pi, const TensorGrid& grid, double t) {
  return ScalarField::sample(grid, [&](const Point& x) { return pi.value(x, t); });
}

}  // namespace fpflow
