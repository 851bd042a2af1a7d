#include "poredyn/field.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace poredyn {

DensityField sample_field(const RadialGrid& grid,
                          const std::function<double(double)>& f,
                          Variables variables, double time, bool is_signed) {
  DensityField out{grid, {}, variables, time, is_signed, std::nullopt};
  out.values.reserve(grid.size());
  for (double c : grid.centers()) out.values.push_back(f(c));
  return out;
}

namespace {

void check_sizes(const DensityField& field) {
  if (field.values.size() != field.grid.size())
    throw std::invalid_argument("DensityField: values/grid size mismatch");
}

}  // namespace

double first_moment(const DensityField& field) {
  check_sizes(field);
  double s = 0.0;
  for (std::size_t i = 0; i < field.values.size(); ++i)
    s += field.grid.center(i) * field.values[i] * field.grid.width(i);
  return s;
}

double tail_moment_correction(const DensityField& field,
                              const SelfSimilarProfile& tail) {
  const double X = field.grid.x_max();
  if (field.variables == Variables::selfsim) return tail.tail_first_moment(X);
  const double t = field.time;
  if (!(t > 0.0))
    throw std::invalid_argument("tail correction: physical field needs time > 0");
  return std::sqrt(t) * tail.tail_first_moment(X / t);
}

double first_moment(const DensityField& field, const SelfSimilarProfile& tail) {
  return first_moment(field) + tail_moment_correction(field, tail);
}

double total_mass(const DensityField& field) {
  check_sizes(field);
  double s = 0.0;
  for (std::size_t i = 0; i < field.values.size(); ++i)
    s += field.values[i] * field.grid.width(i);
  return s;
}

DensityField to_selfsim(const DensityField& field, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("to_selfsim: t must be > 0");
  if (field.variables != Variables::physical)
    throw std::invalid_argument("to_selfsim: field is not in physical variables");
  check_sizes(field);
  std::vector<double> edges = field.grid.edges();
  for (double& e : edges) e /= t;
  edges.front() = 0.0;
  DensityField out{RadialGrid(std::move(edges)), field.values, Variables::selfsim,
                   std::log(t), field.is_signed, field.boundary_value};
  const double scale = std::pow(t, 1.5);
  for (double& v : out.values) v *= scale;
  if (out.boundary_value) *out.boundary_value *= scale;
  return out;
}

DensityField from_selfsim(const DensityField& field, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("from_selfsim: t must be > 0");
  if (field.variables != Variables::selfsim)
    throw std::invalid_argument("from_selfsim: field is not in selfsim variables");
  check_sizes(field);
  std::vector<double> edges = field.grid.edges();
  for (double& e : edges) e *= t;
  edges.front() = 0.0;
  DensityField out{RadialGrid(std::move(edges)), field.values, Variables::physical,
                   t, field.is_signed, field.boundary_value};
  const double scale = std::pow(t, -1.5);
  for (double& v : out.values) v *= scale;
  if (out.boundary_value) *out.boundary_value *= scale;
  return out;
}

std::string format_g15(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

void write_field_csv(const DensityField& field, const std::string& path) {
  check_sizes(field);
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_field_csv: cannot open " + path);
  os << "# variables="
     << (field.variables == Variables::physical ? "physical" : "selfsim")
     << " time=" << format_g15(field.time) << "\n";
  for (std::size_t i = 0; i < field.values.size(); ++i)
    os << format_g15(field.grid.center(i)) << "," << format_g15(field.values[i])
       << "\n";
}

DensityField read_field_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_field_csv: cannot open " + path);
  std::string header;
  std::getline(is, header);
  Variables vars;
  double time = 0.0;
  {
    std::istringstream hs(header);
    std::string hash, kv;
    hs >> hash;
    if (hash != "#") throw std::runtime_error("read_field_csv: bad header");
    bool have_vars = false, have_time = false;
    while (hs >> kv) {
      if (kv.rfind("variables=", 0) == 0) {
        const std::string v = kv.substr(10);
        if (v == "physical") vars = Variables::physical;
        else if (v == "selfsim") vars = Variables::selfsim;
        else throw std::runtime_error("read_field_csv: unknown variables tag");
        have_vars = true;
      } else if (kv.rfind("time=", 0) == 0) {
        time = std::stod(kv.substr(5));
        have_time = true;
      }
    }
    if (!have_vars || !have_time)
      throw std::runtime_error("read_field_csv: incomplete header");
  }
  std::vector<double> centers, values;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("read_field_csv: malformed row");
    centers.push_back(std::stod(line.substr(0, comma)));
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  // reconstruct edges from centers: e_{i+1} = 2 c_i - e_i with e_0 = 0
  std::vector<double> edges(centers.size() + 1);
  edges[0] = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i)
    edges[i + 1] = 2.0 * centers[i] - edges[i];
  DensityField out{RadialGrid(std::move(edges)), std::move(values), vars, time,
                   false, std::nullopt};
  return out;
}

}  // namespace poredyn
