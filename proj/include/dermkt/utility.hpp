#pragma once

// Consumption utilities and generation costs.
//
// Every function family here is templated on the scalar type so the same
// formulas serve double evaluation and the long double cross-checks in the
// tests. UtilitySpec / CostSpec are the closed variant sets used by the
// scenario model; the free functions u_* and c_* dispatch on them.

#include <cmath>
#include <variant>

#include "dermkt/errors.hpp"

namespace dermkt {

/// Isoelastic (CRRA) utility u(z) = (z^(1-eta) - 1) / (1 - eta), ln z at eta = 1.
template <typename Scalar>
struct Isoelastic {
  Scalar eta{1};
};

/// c(y) = alpha y^2 + beta y.
template <typename Scalar>
struct Quadratic {
  Scalar alpha{1};
  Scalar beta{0};
};

template <typename Scalar>
Scalar value(const Isoelastic<Scalar>& u, Scalar z) {
  if (!(z > 0)) throw DomainError("utility evaluated at non-positive consumption");
  if (u.eta == Scalar(1)) return std::log(z);
  return (std::pow(z, Scalar(1) - u.eta) - Scalar(1)) / (Scalar(1) - u.eta);
}

template <typename Scalar>
Scalar marginal(const Isoelastic<Scalar>& u, Scalar z) {
  if (!(z > 0)) throw DomainError("marginal utility evaluated at non-positive consumption");
  return std::pow(z, -u.eta);
}

/// Second derivative, -eta z^(-eta-1).
template <typename Scalar>
Scalar curvature(const Isoelastic<Scalar>& u, Scalar z) {
  if (!(z > 0)) throw DomainError("utility curvature evaluated at non-positive consumption");
  return -u.eta * std::pow(z, -u.eta - Scalar(1));
}

/// Consumption at which marginal utility equals m.
template <typename Scalar>
Scalar inverse_marginal(const Isoelastic<Scalar>& u, Scalar m) {
  if (!(m > 0)) throw DomainError("inverse marginal utility needs a positive price");
  return std::pow(m, Scalar(-1) / u.eta);
}

template <typename Scalar>
Scalar value(const Quadratic<Scalar>& c, Scalar y) {
  return (c.alpha * y + c.beta) * y;
}

template <typename Scalar>
Scalar marginal(const Quadratic<Scalar>& c, Scalar y) {
  return Scalar(2) * c.alpha * y + c.beta;
}

template <typename Scalar>
Scalar curvature(const Quadratic<Scalar>& c, Scalar) {
  return Scalar(2) * c.alpha;
}

/// Unclipped solution of c'(y) = m; callers clip to the generator bounds.
template <typename Scalar>
Scalar inverse_marginal(const Quadratic<Scalar>& c, Scalar m) {
  return (m - c.beta) / (Scalar(2) * c.alpha);
}

using UtilitySpec = std::variant<Isoelastic<double>>;

struct CostSpec {
  std::variant<Quadratic<double>> curve;
  double y_min = 0.0;
  double y_max = 0.0;
};

inline double u_value(const UtilitySpec& spec, double z) {
  return std::visit([z](const auto& u) { return value(u, z); }, spec);
}

inline double u_marginal(const UtilitySpec& spec, double z) {
  return std::visit([z](const auto& u) { return marginal(u, z); }, spec);
}

inline double u_curvature(const UtilitySpec& spec, double z) {
  return std::visit([z](const auto& u) { return curvature(u, z); }, spec);
}

inline double u_inverse_marginal(const UtilitySpec& spec, double m) {
  return std::visit([m](const auto& u) { return inverse_marginal(u, m); }, spec);
}

inline double c_value(const CostSpec& spec, double y) {
  return std::visit([y](const auto& c) { return value(c, y); }, spec.curve);
}

inline double c_marginal(const CostSpec& spec, double y) {
  return std::visit([y](const auto& c) { return marginal(c, y); }, spec.curve);
}

inline double c_curvature(const CostSpec& spec, double y) {
  return std::visit([y](const auto& c) { return curvature(c, y); }, spec.curve);
}

inline double c_inverse_marginal(const CostSpec& spec, double m) {
  return std::visit([m](const auto& c) { return inverse_marginal(c, m); }, spec.curve);
}

/// Convenience constructors.
inline UtilitySpec isoelastic(double eta) { return Isoelastic<double>{eta}; }

inline CostSpec quadratic_cost(double alpha, double beta, double y_min, double y_max) {
  return CostSpec{Quadratic<double>{alpha, beta}, y_min, y_max};
}

}  // namespace dermkt
