#pragma once

#include <string>
#include <utility>
#include <vector>

#include "edlab/grid.hpp"
#include "edlab/kernel.hpp"
#include "edlab/states.hpp"

namespace edlab {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Snapshot {
  double time = 0.0;   // physical time
  double label = 0.0;  // the same time in the set's time unit
  VelocityFields fields;
  std::vector<double> minima, maxima;  // 1D extrema positions, when the scenario locates them
};

struct SnapshotSet {
  std::string scenario;
  std::string time_unit;  // "T", "period" or "cycle"
  std::vector<Snapshot> snapshots;
  std::vector<std::pair<std::string, double>> report;  // ordered scalar results
  std::vector<CheckResult> checks;

  bool all_passed() const;
  double value(const std::string& key) const;  // throws DomainError when absent
  const CheckResult& check(const std::string& name) const;
};

// Defaults: 1024 nodes over [-40, 40] and 256^2 over [-6, 6]^2, in units of
// sigma0 and sqrt(hbar/(m omega)) respectively.
GridSpec default_grid_1d(double scale = 1.0);
GridSpec default_grid_2d(double scale = 1.0);

// Two Gaussian slits of width sigma0 at x = -l (weight w1) and x = +l (w2).
struct SlitConfig {
  double l = 5.0;
  double sigma0 = 1.0;
  cplx w1{1.0 / 1.4142135623730951, 0.0};
  cplx w2{1.0 / 1.4142135623730951, 0.0};

  // Throws DomainError unless l, sigma0 > 0 and |w1|^2 + |w2|^2 = 1 (1e-9).
  void validate() const;
  bool equal_real() const;
};

AnalyticState double_slit_state(const SlitConfig& slits, const UnitsConfig& units);

// Closed-form density of (psi1 + psi2)/sqrt 2 for unit-norm packets at -l
// and +l, without the overlap correction N^2:
//   exp(-(x^2+l^2) T^2 / (2 sigma0^2 (t^2+T^2))) [cosh(c) + cos(c t/T)] / sqrt(2 pi sigma_t^2),
// c = x l T^2 / (sigma0^2 (t^2+T^2)).
double double_slit_density(double x, double t, double l, double sigma0, const UnitsConfig& units);

// Minimum positions x_n = (2n+1) pi sigma0^2 t / (T l) for large t.
double double_slit_minimum(int n, double t, double l, double sigma0, const UnitsConfig& units);

// Strict 3-point local extrema refined by the parabola through the node and
// its neighbours. Empty when none exist.
std::vector<double> locate_minima(const GridSpec& grid, const std::vector<double>& rho);
std::vector<double> locate_maxima(const GridSpec& grid, const std::vector<double>& rho);

struct AngularMomentum {
  std::vector<double> lc;  // m (x v_y - y v_x) at every node
  double mean = 0.0;       // rho-weighted quadrature
};
AngularMomentum angular_momentum(const GridSpec& grid, const std::vector<double>& rho, const VectorField& v,
                                 const UnitsConfig& units);

// Times are multiples of T = 2 m sigma0^2 / hbar.
SnapshotSet run_free_packet(double sigma0, const UnitsConfig& units, const std::vector<double>& times,
                            const GridSpec& grid);

SnapshotSet run_double_slit(const SlitConfig& slits, const UnitsConfig& units, const std::vector<double>& times,
                            const GridSpec& grid);
// Compares extrema with the equal-weight run at the same times.
SnapshotSet run_double_slit_unequal(const SlitConfig& slits, const UnitsConfig& units,
                                    const std::vector<double>& times, const GridSpec& grid);
// w1 = sqrt(alpha2), w2 = sqrt(1 - alpha2); reports the cross coefficient 2 alpha beta.
SnapshotSet run_double_slit_extreme(double alpha2, const SlitConfig& geometry, const UnitsConfig& units,
                                    const std::vector<double>& times, const GridSpec& grid);

// Times are fractions of the period 2 pi / omega.
SnapshotSet run_ho_1d(double omega, const UnitsConfig& units, const std::vector<double>& fractions,
                      const GridSpec& grid);
SnapshotSet run_ho_2d_rotating(double omega, const UnitsConfig& units, const std::vector<double>& fractions,
                               const GridSpec& grid);
// Times are fractions of the breathing cycle pi / omega.
SnapshotSet run_ho_2d_breathing(double omega, const UnitsConfig& units, const std::vector<double>& fractions,
                                const GridSpec& grid);

AnalyticState rotating_state(double omega, const UnitsConfig& units);
AnalyticState breathing_state(double omega, const UnitsConfig& units);

}  // namespace edlab
