#include "dtea/spring_hub.hpp"

#include <cmath>
#include <sstream>

namespace dtea {

namespace {

constexpr double kMmToM = 1.0e-3;
constexpr double kNPerMmToNPerM = 1.0e3;

double geometric_stiffness(const HubGeometry& g, double installed) {
  // N/mm -> N/m and mm^2 -> m^2; the ratio l0/lp is unitless.
  const double k = g.spring_rate * kNPerMmToNPerM;
  const double r1r2 = g.inner_radius * g.outer_radius * kMmToM * kMmToM;
  return g.spring_count * k * r1r2 * (1.0 - g.free_length / installed);
}

}  // namespace

HubModel::HubModel(const HubGeometry& geometry, HubMode mode, double linear_stiffness)
    : geometry_(geometry), mode_(mode), linear_stiffness_(linear_stiffness) {}

HubModel HubModel::nonlinear(const HubGeometry& geometry) {
  HubModel model(geometry, HubMode::nonlinear, 0.0);
  model.linear_stiffness_ = geometric_stiffness(geometry, model.installed_length());
  return model;
}

HubModel HubModel::linearized(const HubGeometry& geometry) {
  HubModel model(geometry, HubMode::linearized, 0.0);
  model.linear_stiffness_ = model.linearized_stiffness();
  return model;
}

HubModel HubModel::linearized(const HubGeometry& geometry, double stiffness) {
  return HubModel(geometry, HubMode::linearized, stiffness);
}

double HubModel::spring_length(double beta) const {
  const double r1 = geometry_.inner_radius;
  const double r2 = geometry_.outer_radius;
  return std::sqrt(r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * std::cos(beta));
}

double HubModel::installed_length() const {
  const double base = geometry_.preload_reference == PreloadReference::free_length
                          ? geometry_.free_length
                          : geometry_.outer_radius - geometry_.inner_radius;
  return base + geometry_.preload_extension;
}

double HubModel::preload_offset() const {
  return installed_length() - (geometry_.outer_radius - geometry_.inner_radius);
}

double HubModel::effective_length(double beta) const {
  return spring_length(beta) + preload_offset();
}

double HubModel::torque(double beta) const {
  if (mode_ == HubMode::linearized) return linear_stiffness_ * beta;
  const auto& g = geometry_;
  const double k = g.spring_rate * kNPerMmToNPerM;
  const double r1r2 = g.inner_radius * g.outer_radius * kMmToM * kMmToM;
  return g.spring_count * k * r1r2 * (1.0 - g.free_length / effective_length(beta)) *
         std::sin(beta);
}

double HubModel::linearized_stiffness() const {
  const double installed = installed_length();
  if (!(installed > geometry_.free_length)) {
    std::ostringstream os;
    os << "hub springs are slack at equilibrium: installed length " << installed
       << " mm <= free length " << geometry_.free_length << " mm";
    throw ConfigError(os.str());
  }
  return geometric_stiffness(geometry_, installed);
}

double HubModel::preload_force() const {
  return geometry_.spring_rate * geometry_.preload_extension;
}

}  // namespace dtea
