#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "poredyn/grid.hpp"
#include "poredyn/profile.hpp"

namespace poredyn {

/// Which variable pair a field lives in: (x, t) or the self-similar (y, tau).
enum class Variables { physical, selfsim };

/// Cell-averaged density on a radial grid. `time` is t for physical fields and
/// tau = ln t for self-similar ones. Perturbation fields set `is_signed`;
/// densities are expected nonnegative. `boundary_value` optionally carries the
/// Dirichlet value at the origin (not part of the cell data).
struct DensityField {
  RadialGrid grid;
  std::vector<double> values;
  Variables variables = Variables::physical;
  double time = 0.0;
  bool is_signed = false;
  std::optional<double> boundary_value;
};

/// Samples a function at cell centers.
DensityField sample_field(const RadialGrid& grid,
                          const std::function<double(double)>& f,
                          Variables variables, double time,
                          bool is_signed = false);

/// Midpoint-rule first moment  int x f dx  (or int y F dy).
double first_moment(const DensityField& field);

/// First moment plus the analytic self-similar tail beyond x_max. The field is
/// assumed close to F_s (physical: f ~ t^{-3/2} F_s(x/t)) outside the grid.
double first_moment(const DensityField& field, const SelfSimilarProfile& tail);

/// The tail correction term alone (reported alongside runs).
double tail_moment_correction(const DensityField& field,
                              const SelfSimilarProfile& tail);

/// Midpoint-rule total mass  int f dx.
double total_mass(const DensityField& field);

/// Change of variables f(x,t) = t^{-3/2} F(x/t, ln t). Rejects t <= 0;
/// intended for t >= 1. The moment identity
///   first_moment(physical) = sqrt(t) * first_moment(selfsim)
/// holds exactly for the discrete transform.
DensityField to_selfsim(const DensityField& field, double t);
DensityField from_selfsim(const DensityField& field, double t);

/// CSV serialization: header "# variables=<physical|selfsim> time=<t>",
/// then "x,value" rows at 15 significant digits.
void write_field_csv(const DensityField& field, const std::string& path);
DensityField read_field_csv(const std::string& path);

/// Formats a double with 15 significant digits (shared by all writers).
std::string format_g15(double v);

}  // namespace poredyn
