#include "fpflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fpflow {

std::string_view to_string(Boundary b) {
  return b == Boundary::Periodic ? "periodic" : "noflux";
}

Boundary parse_boundary(std::string_view text) {
  if (text == "periodic") return Boundary::Periodic;
  if (text == "noflux" || text == "no-flux") return Boundary::NoFlux;
  throw std::invalid_argument("unknown boundary '" + std::string(text) +
                              "' (expected periodic|noflux)");
}

TensorGrid::TensorGrid(int dim, int cells_per_dim, Boundary boundary)
    : dim_(dim), n_(cells_per_dim), h_(0.0), boundary_(boundary), size_(1), volume_(1.0) {
  if (dim < 1 || dim > 3) {
    throw std::invalid_argument("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
  }
  if (cells_per_dim < 2) {
    throw std::invalid_argument("grid needs at least 2 cells per dimension, got " +
                                std::to_string(cells_per_dim));
  }
  h_ = (kUpper - kLower) / n_;
  for (int d = 0; d < 3; ++d) {
    strides_[d] = d < dim_ ? size_ : 0;
    if (d < dim_) {
      size_ *= static_cast<std::size_t>(n_);
      volume_ *= h_;
    }
  }
}

std::array<int, 3> TensorGrid::multi_index(std::size_t cell) const noexcept {
  std::array<int, 3> idx{0, 0, 0};
  for (int d = 0; d < dim_; ++d) {
    idx[d] = static_cast<int>(cell % static_cast<std::size_t>(n_));
    cell /= static_cast<std::size_t>(n_);
  }
  return idx;
}

std::size_t TensorGrid::linear_index(const std::array<int, 3>& idx) const noexcept {
  std::size_t c = 0;
  for (int d = 0; d < dim_; ++d) c += static_cast<std::size_t>(idx[d]) * strides_[d];
  return c;
}

Point TensorGrid::center(std::size_t cell) const noexcept {
  const auto idx = multi_index(cell);
  Point x{0.0, 0.0, 0.0};
  for (int d = 0; d < dim_; ++d) x[d] = kLower + (idx[d] + 0.5) * h_;
  return x;
}

Point TensorGrid::face_center(std::size_t cell, int d) const noexcept {
  Point x = center(cell);
  x[d] += 0.5 * h_;
  return x;
}

bool TensorGrid::on_upper_boundary(std::size_t cell, int d) const noexcept {
  return (cell / strides_[d]) % static_cast<std::size_t>(n_) == static_cast<std::size_t>(n_ - 1);
}

std::optional<std::size_t> TensorGrid::upper_neighbor(std::size_t cell, int d) const noexcept {
  if (!on_upper_boundary(cell, d)) return cell + strides_[d];
  if (boundary_ == Boundary::NoFlux) return std::nullopt;
  return cell - static_cast<std::size_t>(n_ - 1) * strides_[d];
}

std::optional<std::size_t> TensorGrid::lower_neighbor(std::size_t cell, int d) const noexcept {
  const bool first = (cell / strides_[d]) % static_cast<std::size_t>(n_) == 0;
  if (!first) return cell - strides_[d];
  if (boundary_ == Boundary::NoFlux) return std::nullopt;
  return cell + static_cast<std::size_t>(n_ - 1) * strides_[d];
}

TensorGrid build_grid(int dim, int n_cells, Boundary boundary) {
  return TensorGrid(dim, n_cells, boundary);
}

ScalarField::ScalarField(const TensorGrid& grid, double fill)
    : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(const TensorGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("field has " + std::to_string(values_.size()) +
                                " values for a grid of " + std::to_string(grid_.size()) +
                                " cells");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("field contains a non-finite value");
  }
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

FaceField::FaceField(const TensorGrid& grid) : grid_(grid) {
  for (int d = 0; d < grid.dim(); ++d) faces_[d].assign(grid.size(), 0.0);
}

double FaceField::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& dim : faces_) {
    for (double v : dim) m = std::max(m, std::abs(v));
  }
  return m;
}

double integrate(const ScalarField& field) {
  double sum = 0.0;
  for (double v : field.values()) sum += v;
  return sum * field.grid().cell_volume();
}

FaceField face_gradient(const ScalarField& field) {
  const TensorGrid& g = field.grid();
  FaceField grad(g);
  const double inv_h = 1.0 / g.spacing();
  for (int d = 0; d < g.dim(); ++d) {
    for (std::size_t c = 0; c < g.size(); ++c) {
      if (auto r = g.upper_neighbor(c, d)) grad(d, c) = (field[*r] - field[c]) * inv_h;
    }
  }
  return grad;
}

ScalarField divergence(const FaceField& flux) {
  const TensorGrid& g = flux.grid();
  ScalarField div(g);
  const double inv_h = 1.0 / g.spacing();
  for (int d = 0; d < g.dim(); ++d) {
    for (std::size_t c = 0; c < g.size(); ++c) {
      const double up = flux(d, c);
      div[c] += up * inv_h;
      if (auto r = g.upper_neighbor(c, d)) div[*r] -= up * inv_h;
    }
  }
  return div;
}

}  // namespace fpflow
