#include "poredyn/profile.hpp"

#include <cmath>
#include <stdexcept>

namespace poredyn {

void ModelParams::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("ModelParams: beta must be > 0");
  if (!(mu > 0.0)) throw std::invalid_argument("ModelParams: mu must be > 0");
  if (!(gamma < 0.5))
    throw std::invalid_argument("ModelParams: gamma must be < 1/2");
  if (gamma == -0.5)
    throw std::invalid_argument("ModelParams: gamma = -1/2 is degenerate");
}

SelfSimilarProfile derive_profile(const ModelParams& params) {
  params.validate();
  SelfSimilarProfile p;
  p.gamma = params.gamma;
  p.Ns = std::sqrt(params.beta / (1.0 - params.gamma));
  p.cs = 0.25 * (1.0 - 2.0 * params.gamma) * p.Ns;
  if (params.gamma != 0.0) p.theta = 1.0 + 0.5 / params.gamma;
  return p;
}

double SelfSimilarProfile::support_end() const {
  return gamma < 0.0 ? -1.0 / gamma : std::numeric_limits<double>::infinity();
}

double SelfSimilarProfile::value(double y) const {
  if (gamma == 0.0) return cs * std::exp(-0.5 * y);
  const double u = 1.0 + gamma * y;
  if (u <= 0.0) return 0.0;
  return cs * std::pow(u, -theta);
}

double SelfSimilarProfile::derivative(double y) const {
  if (gamma == 0.0) return -0.5 * cs * std::exp(-0.5 * y);
  const double u = 1.0 + gamma * y;
  if (u <= 0.0) return 0.0;
  return -cs * theta * gamma * std::pow(u, -theta - 1.0);
}

double SelfSimilarProfile::tail_mass(double r) const {
  if (gamma == 0.0) return 2.0 * cs * std::exp(-0.5 * r);
  const double u = 1.0 + gamma * r;
  if (u <= 0.0) return 0.0;
  return cs * std::pow(u, 1.0 - theta) / (gamma * (theta - 1.0));
}

double SelfSimilarProfile::tail_first_moment(double r) const {
  if (gamma == 0.0) return cs * (2.0 * r + 4.0) * std::exp(-0.5 * r);
  const double u = 1.0 + gamma * r;
  if (u <= 0.0) return 0.0;
  return cs / (gamma * gamma) *
         (std::pow(u, 2.0 - theta) / (theta - 2.0) -
          std::pow(u, 1.0 - theta) / (theta - 1.0));
}

double SelfSimilarProfile::nu(double r) const {
  return tail_first_moment(r) - r * tail_mass(r);
}

double fs_residual(const SelfSimilarProfile& profile, double y) {
  if (!(y >= 0.0) || y >= profile.support_end())
    throw std::invalid_argument("fs_residual: y outside the profile support");
  return (1.0 + profile.gamma * y) * profile.derivative(y) +
         (profile.gamma + 0.5) * profile.value(y);
}

}  // namespace poredyn
