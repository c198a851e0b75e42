#pragma once

#include <array>
#include <memory>
#include <vector>

#include "edlab/grid.hpp"
#include "edlab/kernel.hpp"

namespace edlab {

// Closed-form evaluation of a state at one point and time. On exact nodes
// R is -infinity and `defined` is false; velocities are then zero.
struct LocalFlow {
  double R = 0.0;
  double phase = 0.0;  // dimensionless; v = (hbar/m) grad phase
  Vec2 u{0.0, 0.0};
  Vec2 v{0.0, 0.0};
  Vec2 b{0.0, 0.0};
  bool defined = true;

  double density() const;
};

enum class StateKind { FreeGaussian, HOEigen1D, HOProduct2D, Superposition2, HOSuperposition1D };

enum class SuperpositionForm { General, EqualReal, EqualImag };

class StateImpl;

// Immutable, shareable closed-form state. Copies share the implementation.
class AnalyticState {
 public:
  explicit AnalyticState(std::shared_ptr<const StateImpl> impl);

  StateKind kind() const;
  int dim() const;
  const UnitsConfig& units() const;

  LocalFlow evaluate(const Point& x, double t) const;
  cplx amplitude(const Point& x, double t) const;
  // grad psi; finite at exact nodes, where evaluate() is undefined.
  std::array<cplx, 2> amplitude_gradient(const Point& x, double t) const;
  double density(const Point& x, double t) const;
  Vec2 drift(const Point& x, double t) const { return evaluate(x, t).b; }

  // Box outside which the density is negligible (below ~1e-30 of its peak).
  std::array<Extent, 2> support(double t) const;

  const StateImpl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const StateImpl> impl_;
};

class StateImpl {
 public:
  virtual ~StateImpl() = default;
  virtual StateKind kind() const = 0;
  virtual int dim() const = 0;
  virtual const UnitsConfig& units() const = 0;
  virtual LocalFlow evaluate(const Point& x, double t) const = 0;
  virtual cplx amplitude(const Point& x, double t) const;
  // Default: psi (grad R + i grad phase), zero where evaluate() is undefined.
  virtual std::array<cplx, 2> amplitude_gradient(const Point& x, double t) const;
  virtual std::array<Extent, 2> support(double t) const = 0;
};

// T = 2 m sigma0^2 / hbar.
double characteristic_time(double sigma0, const UnitsConfig& units);

// 1D Gaussian packet of initial width sigma0 centred at `center`, optionally
// boosted by wave number k0.
AnalyticState free_gaussian(double sigma0, const UnitsConfig& units, double center = 0.0,
                            double k0 = 0.0);

// 1D oscillator eigenstate; n > 60 throws DomainError.
AnalyticState ho_eigenstate(int n, double omega, const UnitsConfig& units);

// psi_n(x) psi_m(y).
AnalyticState ho_product_2d(int n, int m, double omega, const UnitsConfig& units);

// N (w1 psi1 + w2 psi2), with N fixed by the numerically computed overlap.
AnalyticState superpose2_general(const AnalyticState& s1, const AnalyticState& s2, cplx w1, cplx w2);
// (psi1 + psi2)/sqrt 2 up to overlap normalization.
AnalyticState superpose2_equal_real(const AnalyticState& s1, const AnalyticState& s2);
// (psi1 + i psi2)/sqrt 2 up to overlap normalization.
AnalyticState superpose2_equal_imag(const AnalyticState& s1, const AnalyticState& s2);

// (psi_0 + psi_1)/sqrt 2 of the 1D oscillator, in closed form.
AnalyticState ho_superposition_1d(double omega, const UnitsConfig& units);

// Parameters of a superposition; throws DomainError for other kinds.
struct SuperpositionInfo {
  SuperpositionForm form;
  cplx w1, w2;
  double norm_factor;  // N^2
  cplx overlap;        // <psi1|psi2>
};
SuperpositionInfo superposition_info(const AnalyticState& s);

// Grid sampling of the closed forms.
WaveField sample_wavefield(const AnalyticState& s, const GridSpec& grid, double t);
VelocityFields analytic_fields(const AnalyticState& s, const GridSpec& grid, double t);

// Physical Hermite polynomial H_n(x) as mantissa * exp(log_scale), with the
// predecessor H_{n-1} sharing the scale.
struct HermiteValue {
  double hn = 1.0;
  double hn_minus_1 = 0.0;
  double log_scale = 0.0;
};
HermiteValue hermite(int n, double x);

}  // namespace edlab
