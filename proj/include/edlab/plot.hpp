#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "edlab/scenarios.hpp"

namespace edlab {

struct PlotStyle {
  int width = 800;
  int height = 480;
  std::string title;
  std::size_t arrows_per_axis = 16;  // 2D current-flux arrows
  std::size_t heatmap_cells = 96;    // 2D density cells per axis
};

// Colours: rho black, rho u red, rho b green, rho v blue.
inline constexpr const char* kRhoColor = "#000000";
inline constexpr const char* kOsmoticColor = "#d62728";
inline constexpr const char* kDriftColor = "#2ca02c";
inline constexpr const char* kCurrentColor = "#1f77b4";

// Current flux rho v on a decimated lattice of nodes, in data coordinates.
// Nodes where |rho v| is below 1e-3 of its maximum are skipped.
struct Arrow {
  Point at{};
  Vec2 flux{};
};
std::vector<Arrow> plot_arrows(const VelocityFields& fields, std::size_t per_axis);

// Self-contained SVG. 1D: rho and the three fluxes as polylines over shared
// axes. 2D: rho heatmap with current-flux arrows. Empty or non-finite data
// yields empty axes carrying a warning text instead of throwing.
std::string render_plot(const Snapshot& snapshot, const PlotStyle& style = {});

}  // namespace edlab
