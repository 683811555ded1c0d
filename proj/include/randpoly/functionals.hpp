#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>

#include "randpoly/quadrature.hpp"
#include "randpoly/sampling.hpp"
#include "randpoly/weight.hpp"

namespace randpoly {

template <int D>
using SupportOracle = std::function<double(const Vec<D>&)>;

template <int D>
using RadialOracle = std::function<double(const Vec<D>&)>;

template <int D>
SupportOracle<D> support_oracle(const Body<D>& K) {
  return [K](const Vec<D>& u) { return support_unit(K, u); };
}

template <int D>
RadialOracle<D> radial_oracle(const Body<D>& K) {
  if (!origin_interior(K)) throw Error(ErrorKind::OriginOutside, "radial oracle needs o in int K");
  return [K](const Vec<D>& u) { return radial_unit(K, u); };
}

/// The volume constant of the circumscribed limit:
/// (d kappa_d)^{2/(d+1)} Γ(2/(d+1)) / ((d+1)^{(d-1)/(d+1)} kappa_{d-1}^{2/(d+1)}).
inline double c_d_constant(int d) {
  if (d < 2) throw Error(ErrorKind::DomainError, "c_d requires d >= 2");
  const double e = 2.0 / (d + 1);
  return std::pow(d * kappa(d), e) * std::tgamma(e) / (std::pow(d + 1.0, (d - 1.0) / (d + 1.0)) * std::pow(kappa(d - 1), e));
}

/// W(K) = (2/(d kappa_d)) ∫ h_K.
template <int D, class H>
double mean_width(H&& h, const SphereRule<D>& rule) {
  return 2.0 / sphere_area(D) * integrate_sphere<D>(h, rule);
}

/// W_q from support values already evaluated at the rule nodes. Inner
/// integrals are oriented, so negative support values are allowed.
template <int D>
double weighted_mean_width_nodes(std::span<const double> h, const WeightSpec<D>& q, const SphereRule<D>& rule) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    if (!std::isfinite(h[i])) throw Error(ErrorKind::NumericalError, "support value not finite at node " + std::to_string(i));
    sum += rule.weights[i] * q.antiderivative(h[i], rule.nodes[i]);
  }
  return 2.0 / sphere_area(D) * sum;
}

/// W_q(K) = (2/(d kappa_d)) ∫_S ∫_0^{h_K(u)} q(s,u) ds du.
template <int D, class H>
double weighted_mean_width(H&& h, const WeightSpec<D>& q, const SphereRule<D>& rule) {
  return 2.0 / sphere_area(D) *
         integrate_sphere<D>([&](const Vec<D>& u) { return q.antiderivative(h(u), u); }, rule);
}

/// V_lambda(M ∩ outer) = ∫_S ∫_0^{min(rho_M, rho_outer)} t^{d-1} lambda(t,u) dt du.
template <int D, class R>
double clipped_weighted_volume(R&& rho, const Body<D>& outer, const WeightSpec<D>& lambda, const SphereRule<D>& rule) {
  if (!origin_interior(outer)) throw Error(ErrorKind::OriginOutside, "clipping body must contain o");
  return integrate_sphere<D>(
      [&](const Vec<D>& u) {
        const double r = std::min(rho(u), radial_unit(outer, u));
        return lambda.radial_moment(r, u);
      },
      rule);
}

enum class Mode { InscribedMeanWidth, CircumscribedVolume };

inline const char* to_string(Mode m) {
  return m == Mode::InscribedMeanWidth ? "InscribedMeanWidth" : "CircumscribedVolume";
}

/// Limit of n^{2/(d+1)} E(difference) for either model, as a boundary
/// integral over a ball or ellipsoid K.
///  Inscribed:      2 c_d / (d kappa_d)^{(d+3)/(d+1)} ∫ kappa^{(d+2)/(d+1)} q(h_K(σ),σ) rho^{-2/(d+1)}
///  Circumscribed:  c_d ∫ q(h_K(σ),σ)^{-2/(d+1)} lambda(|x|, x/|x|) kappa^{-1/(d+1)}
template <int D>
double limit_rhs(Mode mode, const Body<D>& K, const WeightSpec<D>& q, const DensitySpec<D>* rho,
                 const WeightSpec<D>& lambda, const SphereRule<D>& rule) {
  const double cd = c_d_constant(D);
  const double e = 1.0 / (D + 1);
  if (mode == Mode::InscribedMeanWidth) {
    if (rho == nullptr) throw Error(ErrorKind::ConfigError, "inscribed limit needs a point density");
    const double integral = boundary_integral<D>(
        K,
        [&](const BoundaryPoint<D>& bp) {
          const double qv = q.value(support_unit(K, bp.normal), bp.normal);
          const double rv = rho->formula(bp.x);
          if (!(qv > 0.0) || !(rv > 0.0)) throw Error(ErrorKind::NumericalError, "density or weight vanishes on the boundary");
          return std::pow(bp.kappa, (D + 2) * e) * qv * std::pow(rv, -2.0 * e);
        },
        rule);
    return 2.0 * cd / std::pow(sphere_area(D), (D + 3) * e) * integral;
  }
  const double integral = boundary_integral<D>(
      K,
      [&](const BoundaryPoint<D>& bp) {
        const double qv = q.value(support_unit(K, bp.normal), bp.normal);
        if (!(qv > 0.0)) throw Error(ErrorKind::NumericalError, "hyperplane weight vanishes on the boundary");
        const double r = bp.x.norm();
        return std::pow(qv, -2.0 * e) * lambda.value(r, Vec<D>(bp.x / r)) * std::pow(bp.kappa, -e);
      },
      rule);
  return cd * integral;
}

}  // namespace randpoly
