#include "edlab/numerics.hpp"

#include <cmath>
#include <numbers>

#include "edlab/errors.hpp"

namespace edlab {
namespace {

constexpr std::size_t kPairwiseBlock = 8;

double pairwise_impl(const double* v, std::size_t n) {
  if (n <= kPairwiseBlock) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_impl(v, half) + pairwise_impl(v + half, n - half);
}

struct Line {
  std::size_t start;
  std::size_t stride;
  std::size_t n;
};

template <typename F>
void for_each_line(const GridSpec& grid, int axis, F&& fn) {
  if (grid.dim == 1) {
    if (axis != 0) throw ShapeError("derivative: axis 1 requested on a 1D grid");
    fn(Line{0, 1, grid.points[0]});
    return;
  }
  const std::size_t nx = grid.points[0];
  const std::size_t ny = grid.points[1];
  if (axis == 0) {
    for (std::size_t j = 0; j < ny; ++j) fn(Line{j, ny, nx});
  } else {
    for (std::size_t i = 0; i < nx; ++i) fn(Line{i * ny, 1, ny});
  }
}

// Offsets and weights of the stencil used at position k of a line of n nodes.
// Weights multiply f(k + offset) and the sum is divided by h.
struct Stencil {
  int offsets[4];
  double weights[4];
  int size;
};

Stencil stencil_at(std::size_t k, std::size_t n) {
  if (k == 0) return {{0, 1, 2, 0}, {-1.5, 2.0, -0.5, 0.0}, 3};
  if (k + 1 == n) return {{0, -1, -2, 0}, {1.5, -2.0, 0.5, 0.0}, 3};
  if (k == 1 || k + 2 == n) return {{-1, 1, 0, 0}, {-0.5, 0.5, 0.0, 0.0}, 2};
  return {{-2, -1, 1, 2}, {1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0}, 4};
}

template <typename T>
std::vector<T> derivative_impl(const GridSpec& grid, std::span<const T> f, int axis) {
  if (f.size() != grid.size()) throw ShapeError("derivative: field size does not match grid");
  std::vector<T> out(f.size());
  const double h = grid.spacing(axis);
  for_each_line(grid, axis, [&](Line line) {
    for (std::size_t k = 0; k < line.n; ++k) {
      const Stencil s = stencil_at(k, line.n);
      T acc{};
      for (int m = 0; m < s.size; ++m) {
        const std::size_t idx = line.start + (k + s.offsets[m]) * line.stride;
        acc += s.weights[m] * f[idx];
      }
      out[line.start + k * line.stride] = acc / h;
    }
  });
  return out;
}

template <typename Diff>
std::vector<double> masked_impl(const GridSpec& grid, std::span<const double> f, const Mask& valid,
                                int axis, Mask& out_valid, Diff diff) {
  if (f.size() != grid.size() || valid.size() != grid.size()) {
    throw ShapeError("derivative: field or mask size does not match grid");
  }
  std::vector<double> out(f.size(), 0.0);
  out_valid.assign(f.size(), 0);
  const double h = grid.spacing(axis);
  for_each_line(grid, axis, [&](Line line) {
    for (std::size_t k = 0; k < line.n; ++k) {
      const std::size_t centre = line.start + k * line.stride;
      if (!valid[centre]) continue;
      const Stencil s = stencil_at(k, line.n);
      double acc = 0.0;
      bool ok = true;
      for (int m = 0; m < s.size; ++m) {
        const std::size_t idx = line.start + (k + s.offsets[m]) * line.stride;
        if (!valid[idx]) {
          ok = false;
          break;
        }
        // Weights of every stencil sum to zero, so differences suffice.
        acc += s.weights[m] * diff(f[idx], f[centre]);
      }
      if (!ok) continue;
      out[centre] = acc / h;
      out_valid[centre] = 1;
    }
  });
  return out;
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  return pairwise_impl(values.data(), values.size());
}

std::vector<double> quadrature_weights(const GridSpec& grid) {
  std::vector<double> w(grid.size());
  auto axis_weight = [&](int axis, std::size_t i) {
    const double h = grid.spacing(axis);
    return (i == 0 || i + 1 == grid.points[axis]) ? 0.5 * h : h;
  };
  if (grid.dim == 1) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = axis_weight(0, i);
  } else {
    for (std::size_t i = 0; i < grid.points[0]; ++i) {
      const double wx = axis_weight(0, i);
      for (std::size_t j = 0; j < grid.points[1]; ++j) w[grid.index(i, j)] = wx * axis_weight(1, j);
    }
  }
  return w;
}

double integrate(const GridSpec& grid, std::span<const double> f) {
  if (f.size() != grid.size()) throw ShapeError("integrate: field size does not match grid");
  const auto w = quadrature_weights(grid);
  std::vector<double> terms(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) terms[i] = w[i] * f[i];
  return pairwise_sum(terms);
}

cplx integrate(const GridSpec& grid, std::span<const cplx> f) {
  if (f.size() != grid.size()) throw ShapeError("integrate: field size does not match grid");
  const auto w = quadrature_weights(grid);
  std::vector<double> re(f.size());
  std::vector<double> im(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    re[i] = w[i] * f[i].real();
    im[i] = w[i] * f[i].imag();
  }
  return {pairwise_sum(re), pairwise_sum(im)};
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(a, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

std::vector<double> derivative(const GridSpec& grid, std::span<const double> f, int axis) {
  return derivative_impl<double>(grid, f, axis);
}

std::vector<cplx> derivative(const GridSpec& grid, std::span<const cplx> f, int axis) {
  return derivative_impl<cplx>(grid, f, axis);
}

std::vector<double> derivative_masked(const GridSpec& grid, std::span<const double> f,
                                      const Mask& valid, int axis, Mask& out) {
  return masked_impl(grid, f, valid, axis, out, [](double a, double c) { return a - c; });
}

std::vector<double> phase_derivative(const GridSpec& grid, std::span<const double> phase,
                                     const Mask& valid, int axis, Mask& out) {
  return masked_impl(grid, phase, valid, axis, out,
                     [](double a, double c) { return wrap_angle(a - c); });
}

std::vector<double> divergence(const GridSpec& grid,
                               const std::array<std::vector<double>, 2>& field) {
  auto div = derivative(grid, field[0], 0);
  if (grid.dim == 2) {
    const auto dy = derivative(grid, field[1], 1);
    for (std::size_t i = 0; i < div.size(); ++i) div[i] += dy[i];
  }
  return div;
}

}  // namespace edlab
