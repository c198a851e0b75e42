#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "edlab/grid.hpp"
#include "edlab/kernel.hpp"
#include "edlab/states.hpp"

namespace edlab {

// Where the sampler reads b(x, t): a closed-form state, or a time-ordered
// sequence of wave fields (b from velocities_from_wavefield, interpolated
// linearly in time and (bi)linearly in space; masked nodes contribute 0).
class DriftSource {
 public:
  static DriftSource analytic(const AnalyticState& state);
  static DriftSource frames(const std::vector<WaveField>& frames, const UnitsConfig& units);

  int dim() const;
  const UnitsConfig& units() const;
  Vec2 drift(const Point& x, double t) const;
  // rho(., t) at the nodes of `grid`. A frame source requires `grid` to be
  // the frame grid and `t` to be one of the frame times.
  std::vector<double> density(const GridSpec& grid, double t) const;
  // Natural sampling box: the frame grid, or the analytic support covering
  // both `t` and `t_end`.
  GridSpec default_grid(double t, std::size_t points_per_axis, double t_end = 0.0) const;

  struct Impl;

 private:
  explicit DriftSource(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

struct SampleOptions {
  std::size_t particles = 50000;
  double dt = 1e-3;
  std::size_t steps = 1000;
  std::uint64_t seed = 1;
  std::optional<GridSpec> start_grid;      // also the reflecting box; default_grid(t0, 8192 or 256, t_end) if unset
  double t0 = 0.0;
  std::vector<std::size_t> record_steps;   // strictly increasing, <= steps; empty means {0, steps}
  bool absorbing = false;                  // leaving particles are dropped instead of reflected
  std::size_t threads = 1;
  std::optional<Point> start_point;        // delta start instead of drawing from rho(., t0)
};

inline constexpr std::size_t kSamplerChunk = 4096;
inline constexpr std::uint64_t kChunkSeedStride = 0x9E3779B97F4A7C15ULL;

struct TrajectoryEnsemble {
  int dim = 1;
  std::size_t particles = 0;
  double dt = 0.0;
  double t0 = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> chunk_seeds;
  std::vector<std::size_t> record_steps;
  std::vector<double> times;
  // [record][particle][axis]; absorbed particles hold NaN from then on.
  std::vector<double> positions;
  std::size_t reflections = 0;
  std::size_t absorbed = 0;
  GridSpec box;

  double position(std::size_t record, std::size_t particle, int axis) const {
    return positions[(record * particles + particle) * static_cast<std::size_t>(dim) + static_cast<std::size_t>(axis)];
  }
  // Live positions of one axis at one record.
  std::vector<double> coordinates(std::size_t record, int axis) const;
};

// Euler-Maruyama: dx = b(x, t) dt + sqrt(eta dt / m) xi per step. Particles
// are split into chunks of kSamplerChunk; chunk k uses seed ^ (k * stride)
// and chunks are concatenated in order, so results do not depend on the
// thread count.
TrajectoryEnsemble sample_trajectories(const DriftSource& source, const SampleOptions& options);

// Inverse-CDF draws from a nonnegative density on a grid. 1D treats rho as
// piecewise linear between nodes; 2D picks a cell by its mass and places
// the point uniformly inside it.
std::vector<Point> draw_from_density(const GridSpec& grid, const std::vector<double>& rho, std::size_t count,
                                     std::uint64_t seed);

struct DriftEstimate {
  GridSpec bins;
  VectorField forward, backward;
  VectorField forward_se, backward_se;  // standard errors of the bin means
  std::vector<std::size_t> counts;
  Mask valid;                           // counts >= min_count
};

// Bin-averaged (x_{k+1} - x_k)/dt and (x_k - x_{k-1})/dt conditioned on x_k,
// with bins centred on the nodes of `bins`. Records k-1, k, k+1 must be
// consecutive steps. Throws DomainError on an empty ensemble.
DriftEstimate estimate_drifts(const TrajectoryEnsemble& ensemble, const GridSpec& bins, std::size_t record,
                              std::size_t min_count = 30);

// Normalized histogram of live positions at one record, one value per node
// of `bins` (nearest-node binning).
std::vector<double> histogram(const TrajectoryEnsemble& ensemble, const GridSpec& bins, std::size_t record);

}  // namespace edlab
