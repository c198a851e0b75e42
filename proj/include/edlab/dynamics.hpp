#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "edlab/grid.hpp"
#include "edlab/kernel.hpp"

namespace edlab {

struct PotentialSpec {
  enum class Kind { Free, Harmonic, Tabulated };
  Kind kind = Kind::Free;
  double omega = 0.0;
  std::vector<double> table;  // one value per node of the evolution grid

  static PotentialSpec free() { return {}; }
  static PotentialSpec harmonic(double omega);
  static PotentialSpec tabulated(std::vector<double> values);

  void validate(const GridSpec& grid) const;
  // V at every node; m omega^2 |x|^2 / 2 for Harmonic.
  std::vector<double> sample(const GridSpec& grid, const UnitsConfig& units) const;
};

struct SchrodingerOptions {
  std::size_t record_stride = 1;     // keep every n-th step; the last step is always kept
  double norm_tolerance = 1e-10;     // per-step bound on |norm change|
};

// Crank-Nicolson with a compact fourth-order (Numerov) Laplacian and zero
// Dirichlet values just outside the grid. 2D uses Strang splitting
// x(dt/2) y(dt) x(dt/2); each sweep is unitary. Frames start with psi0.
// Throws StabilityError with the step index if the norm moves by more than
// the tolerance in one step.
std::vector<WaveField> schrodinger_evolve(const WaveField& psi0, const PotentialSpec& potential,
                                          const UnitsConfig& units, double dt, std::size_t steps,
                                          const SchrodingerOptions& options = {});

// Reusable stepper for callers that need every step without storing them.
class SchrodingerStepper {
 public:
  SchrodingerStepper(const GridSpec& grid, const PotentialSpec& potential, const UnitsConfig& units,
                     double dt);
  ~SchrodingerStepper();

  void step(std::vector<cplx>& psi) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

using DriftFunction = std::function<double(double x, double t)>;

struct FokkerPlanckOptions {
  std::size_t record_stride = 1;
  bool absorbing = false;  // default boundaries reflect (zero flux)
};

struct DensitySequence {
  std::vector<double> times;
  std::vector<std::vector<double>> rho;
  std::vector<double> mass;  // sum of rho h over nodes, per frame
};

// Explicit conservative finite-volume update of
//   d rho/dt = -d(b rho)/dx + (eta/2m) d2 rho/dx2
// on a 1D grid with fluxes at cell faces. Throws ConfigurationError before
// stepping if D dt/dx^2 > 0.5, max|b| dt/dx > 0.9, or the central-advection
// bound (b dt/dx)^2 <= 2 D dt/dx^2 fails anywhere.
DensitySequence fokker_planck_evolve(const GridSpec& grid, const std::vector<double>& rho0,
                                     const DriftFunction& drift, const UnitsConfig& units, double dt,
                                     std::size_t steps, const FokkerPlanckOptions& options = {},
                                     double t0 = 0.0);

}  // namespace edlab
