#include "edlab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string_view>

namespace edlab {
namespace {

constexpr double kLeft = 70.0, kRight = 150.0, kTop = 40.0, kBottom = 50.0;

std::string f2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(x) < 1e-12 ? 0.0 : x);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double nice_step(double range) {
  const double raw = range / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
}

// Maps data coordinates onto the plot rectangle.
struct Frame {
  double x0, x1, y0, y1;
  double left, top, w, h;
  double px(double x) const { return left + (x - x0) / (x1 - x0) * w; }
  double py(double y) const { return top + (1.0 - (y - y0) / (y1 - y0)) * h; }
};

void axes(std::string& svg, const Frame& f, const std::string& xlabel, const std::string& ylabel) {
  svg += "<rect x=\"" + f2(f.left) + "\" y=\"" + f2(f.top) + "\" width=\"" + f2(f.w) + "\" height=\"" + f2(f.h) +
         "\" fill=\"none\" stroke=\"#444444\"/>\n";
  const auto ticks = [&](double lo, double hi, bool horizontal) {
    const double step = nice_step(hi - lo);
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) {
      if (horizontal) {
        const double x = f.px(t);
        svg += "<line x1=\"" + f2(x) + "\" y1=\"" + f2(f.top + f.h) + "\" x2=\"" + f2(x) + "\" y2=\"" +
               f2(f.top + f.h + 5) + "\" stroke=\"#444444\"/>\n";
        svg += "<text x=\"" + f2(x) + "\" y=\"" + f2(f.top + f.h + 18) + "\" text-anchor=\"middle\">" + label(t) +
               "</text>\n";
      } else {
        const double y = f.py(t);
        svg += "<line x1=\"" + f2(f.left - 5) + "\" y1=\"" + f2(y) + "\" x2=\"" + f2(f.left) + "\" y2=\"" + f2(y) +
               "\" stroke=\"#444444\"/>\n";
        svg += "<text x=\"" + f2(f.left - 8) + "\" y=\"" + f2(y + 4) + "\" text-anchor=\"end\">" + label(t) +
               "</text>\n";
      }
    }
  };
  ticks(f.x0, f.x1, true);
  ticks(f.y0, f.y1, false);
  svg += "<text x=\"" + f2(f.left + f.w / 2) + "\" y=\"" + f2(f.top + f.h + 38) + "\" text-anchor=\"middle\">" +
         xlabel + "</text>\n";
  svg += "<text x=\"18\" y=\"" + f2(f.top + f.h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         f2(f.top + f.h / 2) + ")\">" + ylabel + "</text>\n";
}

bool finite_all(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Empty string when the data can be drawn, otherwise the reason.
std::string degenerate_reason(const VelocityFields& f) {
  if (f.grid.size() < 2 || f.rho.size() != f.grid.size()) return "empty field";
  if (!finite_all(f.rho)) return "non-finite density";
  const int axes = f.grid.dim == 2 ? 2 : 1;
  for (const VectorField* v : {&f.flux_u, &f.flux_b, &f.flux_v}) {
    for (int a = 0; a < axes; ++a) {
      if ((*v)[a].size() != f.grid.size()) return "empty field";
      if (!finite_all((*v)[a])) return "non-finite flux";
    }
  }
  if (*std::max_element(f.rho.begin(), f.rho.end()) <= 0.0) return "density vanishes everywhere";
  return {};
}

std::string open_svg(const PlotStyle& s) {
  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(s.width) + "\" height=\"" +
         std::to_string(s.height) + "\" viewBox=\"0 0 " + std::to_string(s.width) + " " + std::to_string(s.height) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  if (!s.title.empty()) {
    svg += "<text x=\"" + f2(s.width / 2.0) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
           escape(s.title) + "</text>\n";
  }
  return svg;
}

Frame plot_frame(const PlotStyle& s, double x0, double x1, double y0, double y1) {
  return {x0, x1, y0, y1, kLeft, kTop, s.width - kLeft - kRight, s.height - kTop - kBottom};
}

void warn(std::string& svg, const Frame& f, const std::string& reason) {
  svg += "<text class=\"warning\" x=\"" + f2(f.left + f.w / 2) + "\" y=\"" + f2(f.top + f.h / 2) +
         "\" text-anchor=\"middle\" fill=\"#b00000\">warning: degenerate data (" + escape(reason) + ")</text>\n";
}

void legend(std::string& svg, const Frame& f, const std::vector<std::pair<const char*, const char*>>& entries) {
  double y = f.top + 12;
  for (const auto& [color, name] : entries) {
    const double x = f.left + f.w + 15;
    svg += "<line x1=\"" + f2(x) + "\" y1=\"" + f2(y) + "\" x2=\"" + f2(x + 25) + "\" y2=\"" + f2(y) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + f2(x + 32) + "\" y=\"" + f2(y + 4) + "\">" + name + "</text>\n";
    y += 20;
  }
}

std::string render_1d(const VelocityFields& fl, const PlotStyle& s) {
  std::string svg = open_svg(s);
  const auto xs = fl.grid.axis_coords(0);
  const std::string reason = degenerate_reason(fl);
  if (!reason.empty()) {
    const Frame f = plot_frame(s, 0.0, 1.0, 0.0, 1.0);
    axes(svg, f, "x", "");
    warn(svg, f, reason);
    return svg + "</svg>\n";
  }
  struct Curve {
    const std::vector<double>* y;
    const char* color;
    const char* name;
    const char* cls;
  };
  const std::vector<Curve> curves{{&fl.rho, kRhoColor, "rho", "rho"},
                                  {&fl.flux_u[0], kOsmoticColor, "rho u", "flux-u"},
                                  {&fl.flux_b[0], kDriftColor, "rho b", "flux-b"},
                                  {&fl.flux_v[0], kCurrentColor, "rho v", "flux-v"}};
  double lo = 0.0, hi = 0.0;
  for (const auto& c : curves) {
    lo = std::min(lo, *std::min_element(c.y->begin(), c.y->end()));
    hi = std::max(hi, *std::max_element(c.y->begin(), c.y->end()));
  }
  const double pad = 0.05 * (hi - lo);
  const Frame f = plot_frame(s, xs.front(), xs.back(), lo - pad, hi + pad);
  axes(svg, f, "x", "density and fluxes");
  svg += "<line x1=\"" + f2(f.left) + "\" y1=\"" + f2(f.py(0.0)) + "\" x2=\"" + f2(f.left + f.w) + "\" y2=\"" +
         f2(f.py(0.0)) + "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
  // Fluxes first so the density stays on top.
  for (std::size_t k = curves.size(); k-- > 0;) {
    const Curve& c = curves[k];
    svg += std::string("<polyline class=\"") + c.cls + "\" fill=\"none\" stroke=\"" + c.color +
           "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) svg += ' ';
      svg += f2(f.px(xs[i])) + "," + f2(f.py((*c.y)[i]));
    }
    svg += "\"/>\n";
  }
  legend(svg, f, {{kRhoColor, "rho"}, {kOsmoticColor, "rho u"}, {kDriftColor, "rho b"}, {kCurrentColor, "rho v"}});
  return svg + "</svg>\n";
}

std::string render_2d(const VelocityFields& fl, const PlotStyle& s) {
  std::string svg = open_svg(s);
  const GridSpec& g = fl.grid;
  const std::string reason = degenerate_reason(fl);
  if (!reason.empty()) {
    const Frame f = plot_frame(s, 0.0, 1.0, 0.0, 1.0);
    axes(svg, f, "x", "y");
    warn(svg, f, reason);
    return svg + "</svg>\n";
  }
  // Square data aspect inside the available rectangle.
  const double ex = g.extents[0].max - g.extents[0].min, ey = g.extents[1].max - g.extents[1].min;
  const double avail_w = s.width - kLeft - kRight, avail_h = s.height - kTop - kBottom;
  const double scale = std::min(avail_w / ex, avail_h / ey);
  const Frame f{g.extents[0].min, g.extents[0].max, g.extents[1].min, g.extents[1].max,
                kLeft,            kTop,             ex * scale,       ey * scale};

  const double rmax = *std::max_element(fl.rho.begin(), fl.rho.end());
  const std::size_t cells = std::max<std::size_t>(2, std::min({s.heatmap_cells, g.points[0], g.points[1]}));
  const double cw = f.w / static_cast<double>(cells), ch = f.h / static_cast<double>(cells);
  svg += "<g class=\"heatmap\" shape-rendering=\"crispEdges\">\n";
  for (std::size_t a = 0; a < cells; ++a) {
    const std::size_t i = ((2 * a + 1) * g.points[0]) / (2 * cells);
    for (std::size_t b = 0; b < cells; ++b) {
      const std::size_t j = ((2 * b + 1) * g.points[1]) / (2 * cells);
      const double level = std::clamp(fl.rho[g.index(i, j)] / rmax, 0.0, 1.0);
      const int grey = static_cast<int>(std::lround(255.0 * (1.0 - level)));
      char color[8];
      std::snprintf(color, sizeof color, "#%02x%02x%02x", grey, grey, grey);
      svg += "<rect x=\"" + f2(f.left + a * cw) + "\" y=\"" + f2(f.top + f.h - (b + 1) * ch) + "\" width=\"" +
             f2(cw + 0.05) + "\" height=\"" + f2(ch + 0.05) + "\" fill=\"" + color + "\"/>\n";
    }
  }
  svg += "</g>\n";
  axes(svg, f, "x", "y");

  const auto arrows = plot_arrows(fl, s.arrows_per_axis);
  double fmax = 0.0;
  for (const auto& a : arrows) fmax = std::max(fmax, std::hypot(a.flux[0], a.flux[1]));
  const double spacing = f.w / static_cast<double>(std::max<std::size_t>(s.arrows_per_axis, 1));
  svg += std::string("<g class=\"arrows\" stroke=\"") + kCurrentColor + "\" fill=\"" + kCurrentColor + "\">\n";
  for (const auto& a : arrows) {
    const double len = 0.85 * spacing * std::hypot(a.flux[0], a.flux[1]) / fmax;
    const double ux = a.flux[0] / std::hypot(a.flux[0], a.flux[1]);
    const double uy = -a.flux[1] / std::hypot(a.flux[0], a.flux[1]);  // screen y points down
    const double x0 = f.px(a.at[0]), y0 = f.py(a.at[1]);
    const double x1 = x0 + len * ux, y1 = y0 + len * uy;
    const double head = std::min(5.0, 0.4 * len);
    svg += "<line x1=\"" + f2(x0) + "\" y1=\"" + f2(y0) + "\" x2=\"" + f2(x1) + "\" y2=\"" + f2(y1) +
           "\" stroke-width=\"1.2\"/>\n";
    svg += "<polygon points=\"" + f2(x1) + "," + f2(y1) + " " + f2(x1 - head * ux - 0.5 * head * uy) + "," +
           f2(y1 - head * uy + 0.5 * head * ux) + " " + f2(x1 - head * ux + 0.5 * head * uy) + "," +
           f2(y1 - head * uy - 0.5 * head * ux) + "\"/>\n";
  }
  svg += "</g>\n";
  legend(svg, f, {{kRhoColor, "rho (shade)"}, {kCurrentColor, "rho v"}});
  return svg + "</svg>\n";
}

}  // namespace

std::vector<Arrow> plot_arrows(const VelocityFields& f, std::size_t per_axis) {
  std::vector<Arrow> out;
  const GridSpec& g = f.grid;
  if (g.dim != 2 || per_axis == 0 || f.flux_v[0].size() != g.size()) return out;
  const auto pick = [&](std::size_t k, std::size_t n) { return ((2 * k + 1) * n) / (2 * per_axis); };
  double fmax = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) fmax = std::max(fmax, std::hypot(f.flux_v[0][i], f.flux_v[1][i]));
  if (!(fmax > 0.0) || !std::isfinite(fmax)) return out;
  for (std::size_t a = 0; a < per_axis; ++a) {
    for (std::size_t b = 0; b < per_axis; ++b) {
      const std::size_t idx = g.index(pick(a, g.points[0]), pick(b, g.points[1]));
      const Vec2 flux{f.flux_v[0][idx], f.flux_v[1][idx]};
      if (std::hypot(flux[0], flux[1]) < 1e-3 * fmax) continue;
      out.push_back({g.node(idx), flux});
    }
  }
  return out;
}

std::string render_plot(const Snapshot& snapshot, const PlotStyle& style) {
  return snapshot.fields.grid.dim == 2 ? render_2d(snapshot.fields, style) : render_1d(snapshot.fields, style);
}

}  // namespace edlab
