#pragma once

#include <cstddef>
#include <vector>

namespace poredyn {

/// Cell-centered finite-volume grid on [0, x_max]. Edges are strictly
/// increasing with edges[0] = 0; at least 16 cells.
class RadialGrid {
public:
  static RadialGrid uniform(double x_max, std::size_t n_cells);

  /// Geometric cell widths w_{i+1} = growth * w_i, growth >= 1.
  static RadialGrid geometric(double x_max, std::size_t n_cells, double growth);

  /// Geometric grid with growth e^{8/n}, capped so the last cell is at most
  /// last_cell_frac of x_max. The default fraction matches the documented
  /// truncation policy; the 8/n exponent balances near-origin against tail
  /// quadrature error for power-law profiles.
  static RadialGrid stretched(double x_max, std::size_t n_cells,
                              double last_cell_frac = 0.02);

  /// Geometric grid whose first cell has width first_width (growth solved by
  /// bisection). Falls back to uniform when first_width >= x_max / n_cells.
  static RadialGrid with_first_width(double x_max, std::size_t n_cells,
                                     double first_width);

  /// Splits every cell in two (for refinement studies).
  RadialGrid refined() const;

  std::size_t size() const { return centers_.size(); }
  double x_max() const { return edges_.back(); }
  const std::vector<double>& edges() const { return edges_; }
  const std::vector<double>& centers() const { return centers_; }
  const std::vector<double>& widths() const { return widths_; }
  double center(std::size_t i) const { return centers_[i]; }
  double width(std::size_t i) const { return widths_[i]; }
  double edge(std::size_t i) const { return edges_[i]; }

  /// Builds directly from an edge vector (validated).
  explicit RadialGrid(std::vector<double> edges);

private:
  std::vector<double> edges_, centers_, widths_;
};

/// Default truncation radius 200 * t_end * max(1, 1/gamma). For slowly decaying
/// tails the raw neglected moment is not negligible; callers are expected to
/// add the analytic tail correction, which the moment routines support.
double default_x_max(double t_end, double gamma);

}  // namespace poredyn
