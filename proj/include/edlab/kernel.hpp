#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "edlab/grid.hpp"
#include "edlab/numerics.hpp"

namespace edlab {

// Sampled wave function psi = exp(R + i phase) on a grid at one time.
struct WaveField {
  GridSpec grid;
  std::vector<cplx> amplitude;
  double time = 0.0;
};

double norm(const WaveField& psi);
// Rescales to unit norm; throws DegenerateFieldError on a zero field.
void normalize(WaveField& psi);

// Relative amplitude below which the phase is not reported.
inline constexpr double kAmplitudeFloor = 1e-8;

struct Decomposition {
  std::vector<double> R;      // log |psi|
  std::vector<double> phase;  // dimensionless, continuous branch
  Mask valid;                 // |psi| >= floor * max |psi|
  std::size_t masked = 0;
};

// Phase is unwrapped from the domain centre outward: along x through the
// centre row, then along y from that row in every column.
Decomposition decompose(const WaveField& psi);

using VectorField = std::array<std::vector<double>, 2>;

// Component 1 of every vector is all zeros on a 1D grid.
struct VelocityFields {
  GridSpec grid;
  std::vector<double> rho;
  VectorField u, b, v;
  VectorField flux_u, flux_b, flux_v;
  Mask valid;
};

// u = -(eta/m) grad R, v = (hbar/m) grad phase, b = v - u. Nodes whose
// stencil touches a masked node are invalid and carry zero velocity.
VelocityFields velocities_from_wavefield(const WaveField& psi, const UnitsConfig& units);

double alpha_from_timestep(const UnitsConfig& units, double dt);

struct GaussianStep {
  Vec2 mean{0.0, 0.0};
  double covariance_scale = 0.0;  // 1/alpha, isotropic
};

GaussianStep transition_step(const Point& x, const Vec2& drift_gradient, double alpha);

struct MomentumReport {
  VectorField p_d, p_o, p_c;
  Vec2 mean_pd{}, mean_po{}, mean_pc{}, mean_pq{};
  Vec2 pq_imag{};  // imaginary part of <psi| -i hbar grad |psi>
};

// Throws DomainError unless the field is normalized within 1e-6.
MomentumReport momenta(const WaveField& psi, const UnitsConfig& units);

struct EnergyReport {
  double total = 0.0;
  double kinetic = 0.0;
  double fisher = 0.0;
  double potential = 0.0;
  std::size_t regularized_nodes = 0;  // below the amplitude floor
};

// Kinetic, Fisher (xi = hbar^2/8) and potential terms of the energy
// functional. The Fisher integrand uses 4 rho (grad R)^2. Below the
// amplitude floor the phase is undefined and the whole gradient energy
// hbar^2 |grad psi|^2 / 2m, the limit at a node, is booked as Fisher.
EnergyReport hamiltonian_functional(const WaveField& psi, const std::vector<double>& potential,
                                    const UnitsConfig& units);

struct ResidualNorms {
  double max = 0.0;
  double l2 = 0.0;
};

// Norms of (rho_after - rho_before)/dt + div(flux).
ResidualNorms continuity_residual(const GridSpec& grid, const std::vector<double>& rho_before,
                                  const std::vector<double>& rho_after, double dt,
                                  const VectorField& flux);

}  // namespace edlab
