#include "poredyn/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace poredyn {

namespace {

std::vector<double> geometric_edges(double x_max, std::size_t n, double growth) {
  std::vector<double> e(n + 1);
  e[0] = 0.0;
  if (growth == 1.0) {
    for (std::size_t i = 1; i <= n; ++i)
      e[i] = x_max * static_cast<double>(i) / static_cast<double>(n);
    return e;
  }
  // w0 * (growth^n - 1)/(growth - 1) = x_max
  const double w0 = x_max * (growth - 1.0) / (std::pow(growth, static_cast<double>(n)) - 1.0);
  double w = w0;
  for (std::size_t i = 1; i <= n; ++i) {
    e[i] = e[i - 1] + w;
    w *= growth;
  }
  e[n] = x_max;  // absorb accumulated roundoff
  return e;
}

double last_cell_fraction(std::size_t n, double growth) {
  if (growth == 1.0) return 1.0 / static_cast<double>(n);
  const double nn = static_cast<double>(n);
  return std::pow(growth, nn - 1.0) * (growth - 1.0) / (std::pow(growth, nn) - 1.0);
}

}  // namespace

RadialGrid::RadialGrid(std::vector<double> edges) : edges_(std::move(edges)) {
  if (edges_.size() < 17)
    throw std::invalid_argument("RadialGrid: need at least 16 cells");
  if (edges_.front() != 0.0)
    throw std::invalid_argument("RadialGrid: first edge must be 0");
  for (std::size_t i = 1; i < edges_.size(); ++i)
    if (!(edges_[i] > edges_[i - 1]))
      throw std::invalid_argument("RadialGrid: edges must be strictly increasing");
  const std::size_t n = edges_.size() - 1;
  centers_.resize(n);
  widths_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    centers_[i] = 0.5 * (edges_[i] + edges_[i + 1]);
    widths_[i] = edges_[i + 1] - edges_[i];
  }
}

RadialGrid RadialGrid::uniform(double x_max, std::size_t n_cells) {
  if (!(x_max > 0.0)) throw std::invalid_argument("RadialGrid: x_max must be > 0");
  return RadialGrid(geometric_edges(x_max, n_cells, 1.0));
}

RadialGrid RadialGrid::geometric(double x_max, std::size_t n_cells, double growth) {
  if (!(x_max > 0.0)) throw std::invalid_argument("RadialGrid: x_max must be > 0");
  if (!(growth >= 1.0)) throw std::invalid_argument("RadialGrid: growth must be >= 1");
  return RadialGrid(geometric_edges(x_max, n_cells, growth));
}

RadialGrid RadialGrid::stretched(double x_max, std::size_t n_cells,
                                 double last_cell_frac) {
  if (!(x_max > 0.0)) throw std::invalid_argument("RadialGrid: x_max must be > 0");
  if (!(last_cell_frac > 0.0 && last_cell_frac < 1.0))
    throw std::invalid_argument("RadialGrid: last_cell_frac must be in (0,1)");
  double growth = std::exp(8.0 / static_cast<double>(n_cells));
  if (last_cell_fraction(n_cells, growth) > last_cell_frac) {
    double lo = 1.0, hi = growth;  // fraction is increasing in growth
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (last_cell_fraction(n_cells, mid) > last_cell_frac) hi = mid;
      else lo = mid;
    }
    growth = lo;
  }
  return RadialGrid(geometric_edges(x_max, n_cells, std::max(growth, 1.0)));
}

RadialGrid RadialGrid::with_first_width(double x_max, std::size_t n_cells,
                                        double first_width) {
  if (!(x_max > 0.0)) throw std::invalid_argument("RadialGrid: x_max must be > 0");
  if (!(first_width > 0.0))
    throw std::invalid_argument("RadialGrid: first_width must be > 0");
  const double nn = static_cast<double>(n_cells);
  if (first_width * nn >= x_max)
    return RadialGrid(geometric_edges(x_max, n_cells, 1.0));
  // implied first width x_max (g-1)/(g^n - 1) decreases in g; bisect
  auto implied = [&](double g) {
    return x_max * (g - 1.0) / (std::pow(g, nn) - 1.0);
  };
  double lo = 1.0 + 1e-12, hi = 2.0;
  while (implied(hi) > first_width) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (implied(mid) > first_width) lo = mid;
    else hi = mid;
  }
  return RadialGrid(geometric_edges(x_max, n_cells, 0.5 * (lo + hi)));
}

RadialGrid RadialGrid::refined() const {
  std::vector<double> e;
  e.reserve(2 * edges_.size() - 1);
  for (std::size_t i = 0; i + 1 < edges_.size(); ++i) {
    e.push_back(edges_[i]);
    e.push_back(0.5 * (edges_[i] + edges_[i + 1]));
  }
  e.push_back(edges_.back());
  return RadialGrid(std::move(e));
}

double default_x_max(double t_end, double gamma) {
  const double stretch = gamma > 0.0 ? std::max(1.0, 1.0 / gamma) : 1.0;
  return 200.0 * t_end * stretch;
}

}  // namespace poredyn
