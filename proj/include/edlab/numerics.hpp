#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "edlab/grid.hpp"

namespace edlab {

using Mask = std::vector<std::uint8_t>;
using cplx = std::complex<double>;

// Pairwise (cascade) summation; fixed order, so results are deterministic.
double pairwise_sum(std::span<const double> values);

// Trapezoidal quadrature over every node of the grid.
double integrate(const GridSpec& grid, std::span<const double> f);
cplx integrate(const GridSpec& grid, std::span<const cplx> f);

// Trapezoid weights (tensor product in 2D).
std::vector<double> quadrature_weights(const GridSpec& grid);

// Maps an angle into (-pi, pi].
double wrap_angle(double a);

// First derivative along `axis`: 4th-order central in the interior,
// 2nd-order central on the second node, 2nd-order one-sided at the ends.
std::vector<double> derivative(const GridSpec& grid, std::span<const double> f, int axis);
std::vector<cplx> derivative(const GridSpec& grid, std::span<const cplx> f, int axis);

// As derivative(), but a node is reported only when every stencil node is
// valid; `out` receives the validity of each result.
std::vector<double> derivative_masked(const GridSpec& grid, std::span<const double> f,
                                      const Mask& valid, int axis, Mask& out);

// Derivative of an angle field. Every stencil difference is wrapped into
// (-pi, pi] relative to the centre node, which makes the result insensitive
// to branch cuts as long as the phase changes by less than pi/2 per cell.
std::vector<double> phase_derivative(const GridSpec& grid, std::span<const double> phase,
                                     const Mask& valid, int axis, Mask& out);

// Divergence of a 1D or 2D vector field (unmasked).
std::vector<double> divergence(const GridSpec& grid, const std::array<std::vector<double>, 2>& field);

}  // namespace edlab
