#include "edlab/grid.hpp"

#include <cmath>
#include <string>

#include "edlab/errors.hpp"

namespace edlab {

void UnitsConfig::validate() const {
  if (!(hbar > 0.0) || !(mass > 0.0) || !(eta > 0.0) || !std::isfinite(hbar) ||
      !std::isfinite(mass) || !std::isfinite(eta)) {
    throw DomainError("units: hbar, mass and eta must be finite and strictly positive");
  }
}

GridSpec GridSpec::line(double min, double max, std::size_t n) {
  GridSpec g;
  g.dim = 1;
  g.extents[0] = {min, max};
  g.extents[1] = {0.0, 0.0};
  g.points = {n, 1};
  g.validate();
  return g;
}

GridSpec GridSpec::plane(Extent x, Extent y, std::size_t nx, std::size_t ny) {
  GridSpec g;
  g.dim = 2;
  g.extents = {x, y};
  g.points = {nx, ny};
  g.validate();
  return g;
}

GridSpec GridSpec::square(double min, double max, std::size_t n) {
  return plane({min, max}, {min, max}, n, n);
}

void GridSpec::validate() const {
  if (dim != 1 && dim != 2) throw DomainError("grid: dim must be 1 or 2");
  for (int a = 0; a < dim; ++a) {
    if (points[a] < 16) {
      throw DomainError("grid: axis " + std::to_string(a) + " needs at least 16 points");
    }
    if (!(extents[a].max > extents[a].min) || !std::isfinite(extents[a].min) ||
        !std::isfinite(extents[a].max)) {
      throw DomainError("grid: axis " + std::to_string(a) + " has a degenerate extent");
    }
  }
}

double GridSpec::spacing(int axis) const {
  return (extents[axis].max - extents[axis].min) / static_cast<double>(points[axis] - 1);
}

double GridSpec::coord(int axis, std::size_t i) const {
  // Last node pinned to max so the end point is exact.
  if (i + 1 == points[axis]) return extents[axis].max;
  return extents[axis].min + static_cast<double>(i) * spacing(axis);
}

Point GridSpec::node(std::size_t flat) const {
  if (dim == 1) return {coord(0, flat), 0.0};
  return {coord(0, flat / points[1]), coord(1, flat % points[1])};
}

std::vector<double> GridSpec::axis_coords(int axis) const {
  std::vector<double> out(points[axis]);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = coord(axis, i);
  return out;
}

}  // namespace edlab
