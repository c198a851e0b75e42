#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace edlab {

using Point = std::array<double, 2>;
using Vec2 = std::array<double, 2>;

// Physical constants of a run. eta is the fluctuation scale; the
// Schroedinger limit identifies it with hbar.
struct UnitsConfig {
  double hbar = 1.0;
  double mass = 1.0;
  double eta = 1.0;

  // Coefficient of the Fisher-information term, hbar^2 / 8.
  double xi() const { return hbar * hbar / 8.0; }
  void validate() const;
  bool operator==(const UnitsConfig&) const = default;
};

struct Extent {
  double min = 0.0;
  double max = 0.0;
  bool operator==(const Extent&) const = default;
};

// Uniform node-centred grid in one or two dimensions. Nodes include both
// end points. Flat storage is x-major: index = i * ny + j.
struct GridSpec {
  int dim = 1;
  std::array<Extent, 2> extents{};
  std::array<std::size_t, 2> points{0, 1};

  static GridSpec line(double min, double max, std::size_t n);
  static GridSpec plane(Extent x, Extent y, std::size_t nx, std::size_t ny);
  static GridSpec square(double min, double max, std::size_t n);

  // Throws DomainError unless points >= 16 per axis and extents are ordered.
  void validate() const;

  std::size_t size() const { return points[0] * (dim == 2 ? points[1] : 1); }
  std::size_t count(int axis) const { return axis == 0 || dim == 2 ? points[axis] : 1; }
  double spacing(int axis) const;
  double coord(int axis, std::size_t i) const;
  std::size_t index(std::size_t i, std::size_t j = 0) const { return dim == 2 ? i * points[1] + j : i; }
  Point node(std::size_t flat) const;
  std::vector<double> axis_coords(int axis) const;

  bool operator==(const GridSpec&) const = default;
};

}  // namespace edlab
