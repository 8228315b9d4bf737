#pragma once

// Uniform cell-centered tensor grids on [-1,1]^n and the fields that live on
// them.  Cells are stored with the x index fastest.  Each cell owns the face
// on its upper side in every dimension, so a FaceField holds exactly one
// value per (cell, dimension) pair.  For the last cell along a line that face
// is the periodic wrap face (Periodic) or the wall (NoFlux).

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace fpflow {

using Point = std::array<double, 3>;

enum class Boundary { Periodic, NoFlux };

std::string_view to_string(Boundary b);
Boundary parse_boundary(std::string_view text);

class TensorGrid {
 public:
  static constexpr double kLower = -1.0;
  static constexpr double kUpper = 1.0;

  TensorGrid(int dim, int cells_per_dim, Boundary boundary);

  int dim() const noexcept { return dim_; }
  int cells_per_dim() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  Boundary boundary() const noexcept { return boundary_; }

  std::size_t size() const noexcept { return size_; }
  double cell_volume() const noexcept { return volume_; }
  std::size_t stride(int d) const noexcept { return strides_[d]; }

  std::array<int, 3> multi_index(std::size_t cell) const noexcept;
  std::size_t linear_index(const std::array<int, 3>& idx) const noexcept;

  /// Cell center; unused trailing coordinates are 0.
  Point center(std::size_t cell) const noexcept;
  /// Center of the upper face of `cell` in dimension d.
  Point face_center(std::size_t cell, int d) const noexcept;

  /// Neighbor across the upper face, or nullopt at a NoFlux wall.
  std::optional<std::size_t> upper_neighbor(std::size_t cell, int d) const noexcept;
  std::optional<std::size_t> lower_neighbor(std::size_t cell, int d) const noexcept;

  /// True when the upper face of `cell` in d lies on the domain boundary.
  bool on_upper_boundary(std::size_t cell, int d) const noexcept;

  friend bool operator==(const TensorGrid&, const TensorGrid&) = default;

 private:
  int dim_;
  int n_;
  double h_;
  Boundary boundary_;
  std::size_t size_;
  double volume_;
  std::array<std::size_t, 3> strides_{};
};

TensorGrid build_grid(int dim, int n_cells, Boundary boundary);

class ScalarField {
 public:
  explicit ScalarField(const TensorGrid& grid, double fill = 0.0);
  ScalarField(const TensorGrid& grid, std::vector<double> values);

  template <class Fn>
  static ScalarField sample(const TensorGrid& grid, Fn&& fn) {
    std::vector<double> v(grid.size());
    for (std::size_t c = 0; c < v.size(); ++c) v[c] = fn(grid.center(c));
    return ScalarField(grid, std::move(v));
  }

  const TensorGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t c) const noexcept { return values_[c]; }
  double& operator[](std::size_t c) noexcept { return values_[c]; }

  double min() const;
  double max() const;

 private:
  TensorGrid grid_;
  std::vector<double> values_;
};

class FaceField {
 public:
  explicit FaceField(const TensorGrid& grid);

  const TensorGrid& grid() const noexcept { return grid_; }
  /// Value on the upper face of `cell` in dimension d.
  double operator()(int d, std::size_t cell) const noexcept { return faces_[d][cell]; }
  double& operator()(int d, std::size_t cell) noexcept { return faces_[d][cell]; }
  std::span<const double> dimension(int d) const noexcept { return faces_[d]; }

  double max_abs() const noexcept;

 private:
  TensorGrid grid_;
  std::array<std::vector<double>, 3> faces_;
};

/// h^dim times the sum of cell values.
double integrate(const ScalarField& field);

/// Two-point difference (right - left)/h per face; zero on NoFlux walls.
FaceField face_gradient(const ScalarField& field);

/// Discrete divergence of a face flux: sum_d (F_up - F_low)/h per cell.
ScalarField divergence(const FaceField& flux);

}  // namespace fpflow
