#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "randpoly/body.hpp"

namespace randpoly {

/// A boundary point with its outer unit normal and Gaussian curvature.
template <int D>
struct BoundaryPoint {
  Vec<D> x;
  Vec<D> normal;
  double kappa;
};

constexpr double kBoundaryTolerance = 1e-10;

/// Gaussian curvature and outer normal at x on the boundary of a ball or an
/// ellipsoid. Polytopes are refused: their curvature is not a function.
template <int D>
BoundaryPoint<D> curvature(const Body<D>& body, const Vec<D>& x) {
  if (const auto* b = body.template as<Ball<D>>()) {
    const Vec<D> r = x - b->center;
    if (std::abs(r.norm() - b->radius) > kBoundaryTolerance) {
      throw Error(ErrorKind::NotOnBoundary, "point is not on the sphere");
    }
    return {x, r.normalized(), std::pow(b->radius, -(D - 1))};
  }
  if (const auto* e = body.template as<Ellipsoid<D>>()) {
    const Vec<D> y = e->frame.transpose() * (x - e->center);
    const Vec<D> a2 = e->semiaxes.cwiseProduct(e->semiaxes);
    if (std::abs(y.cwiseQuotient(e->semiaxes).squaredNorm() - 1.0) > kBoundaryTolerance) {
      throw Error(ErrorKind::NotOnBoundary, "point is not on the ellipsoid");
    }
    const Vec<D> grad = y.cwiseQuotient(a2);
    // kappa = 1 / (prod a_i^2 * (sum y_i^2 / a_i^4)^{(d+1)/2})
    const double kappa = 1.0 / (a2.prod() * std::pow(grad.squaredNorm(), 0.5 * (D + 1)));
    return {x, (e->frame * grad).normalized(), kappa};
  }
  throw Error(ErrorKind::Unsupported, std::string("curvature of ") + body.kind_name());
}

/// Inverse Gauss map: the boundary point with outer normal u, for balls and
/// ellipsoids. For the ellipsoid x(u) = c + F A^2 F^T u / |A F^T u| and
/// kappa = |A F^T u|^{d+1} / prod a_i^2.
template <int D>
BoundaryPoint<D> boundary_point(const Body<D>& body, const Vec<D>& u) {
  if (const auto* b = body.template as<Ball<D>>()) {
    return {b->center + b->radius * u, u, std::pow(b->radius, -(D - 1))};
  }
  if (const auto* e = body.template as<Ellipsoid<D>>()) {
    const Vec<D> local = e->frame.transpose() * u;
    const Vec<D> a2 = e->semiaxes.cwiseProduct(e->semiaxes);
    const double h0 = e->semiaxes.cwiseProduct(local).norm();
    const Vec<D> x = e->center + e->frame * a2.cwiseProduct(local) / h0;
    return {x, u, std::pow(h0, D + 1) / a2.prod()};
  }
  throw Error(ErrorKind::Unsupported, std::string("inverse Gauss map of ") + body.kind_name());
}

struct PrincipalRadii {
  double meridian;  // r_2, the radius in the plane of the axis
  double other;     // r_3 = ... = r_d
};

/// Principal radii of curvature of the polar of B(t e_1, R), seen from the
/// normal direction x with first coordinate x1. Both are >= 1/R.
inline PrincipalRadii lemma_b_principal_radii(double R, double t, double x1) {
  if (!(R > 0.0) || !(t >= 0.0) || !(t < R)) throw Error(ErrorKind::DomainError, "need R > 0 and 0 <= t < R");
  if (!(std::abs(x1) <= 1.0)) throw Error(ErrorKind::DomainError, "x1 must lie in [-1, 1]");
  const double s = t / R;
  const double bracket = 1.0 - s * s + s * s * x1 * x1;
  return {std::pow(bracket, -1.5) / R, std::pow(bracket, -0.5) / R};
}

/// Radius of the largest ball rolling freely inside a ball or ellipsoid: the
/// minimum principal radius of curvature, min a_i^2 / max a_j.
template <int D>
double rolling_radius(const Body<D>& body) {
  if (const auto* b = body.template as<Ball<D>>()) return b->radius;
  if (const auto* e = body.template as<Ellipsoid<D>>()) {
    const double lo = e->semiaxes.minCoeff();
    return lo * lo / e->semiaxes.maxCoeff();
  }
  throw Error(ErrorKind::Unsupported, std::string("rolling radius of ") + body.kind_name());
}

}  // namespace randpoly
