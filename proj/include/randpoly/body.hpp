#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "randpoly/hull2d.hpp"
#include "randpoly/types.hpp"

namespace randpoly {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

template <int D>
class Body;

template <int D>
struct Ball {
  Vec<D> center;
  double radius;
};

/// Ellipsoid center + F diag(a) B^d; the columns of `frame` are the axis directions.
template <int D>
struct Ellipsoid {
  Vec<D> center;
  Mat<D> frame;
  Vec<D> semiaxes;
};

template <int D>
struct PolytopeV {
  std::vector<Vec<D>> vertices;
};

/// Intersection of the lower halfspaces <u_i,x> <= t_i. Zero planes is all of R^d.
template <int D>
struct HalfspaceSet {
  std::vector<Hyperplane<D>> planes;
};

/// inner + r B^d.
template <int D>
struct ParallelBody {
  std::shared_ptr<const Body<D>> inner;
  double r;
};

/// Polar of `inner`, answered through rho_{K*} = 1/h_K and h_{K*} = 1/rho_K.
template <int D>
struct OraclePolar {
  std::shared_ptr<const Body<D>> inner;
};

template <int D>
class Body {
 public:
  using Shape = std::variant<Ball<D>, Ellipsoid<D>, PolytopeV<D>, HalfspaceSet<D>, ParallelBody<D>, OraclePolar<D>>;

  Body(Ball<D> b) : shape_(std::move(b)) {}
  Body(Ellipsoid<D> e) : shape_(std::move(e)) {}
  Body(PolytopeV<D> p) : shape_(std::move(p)) {}
  Body(HalfspaceSet<D> h) : shape_(std::move(h)) {}
  Body(ParallelBody<D> p) : shape_(std::move(p)) {}
  Body(OraclePolar<D> p) : shape_(std::move(p)) {}

  const Shape& shape() const noexcept { return shape_; }

  template <class T>
  const T* as() const noexcept {
    return std::get_if<T>(&shape_);
  }

  const char* kind_name() const {
    return std::visit(overloaded{[](const Ball<D>&) { return "Ball"; },
                                 [](const Ellipsoid<D>&) { return "Ellipsoid"; },
                                 [](const PolytopeV<D>&) { return "PolytopeV"; },
                                 [](const HalfspaceSet<D>&) { return "HalfspaceSet"; },
                                 [](const ParallelBody<D>&) { return "ParallelBody"; },
                                 [](const OraclePolar<D>&) { return "OraclePolar"; }},
                      shape_);
  }

 private:
  Shape shape_;
};

// ---------------------------------------------------------------------------
// Construction with validation
// ---------------------------------------------------------------------------

template <int D>
Body<D> make_ball(const Vec<D>& center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius) || !center.allFinite()) {
    throw Error(ErrorKind::DomainError, "ball needs a finite center and radius > 0");
  }
  return Ball<D>{center, radius};
}

template <int D>
Body<D> make_ellipsoid(const Vec<D>& center, const Mat<D>& frame, const Vec<D>& semiaxes) {
  if (!center.allFinite() || !semiaxes.allFinite() || (semiaxes.array() <= 0.0).any()) {
    throw Error(ErrorKind::DomainError, "ellipsoid semiaxes must be finite and positive");
  }
  if ((frame.transpose() * frame - Mat<D>::Identity()).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error(ErrorKind::DomainError, "ellipsoid frame is not orthonormal");
  }
  return Ellipsoid<D>{center, frame, semiaxes};
}

template <int D>
Body<D> make_ellipsoid(const Vec<D>& center, const Vec<D>& semiaxes) {
  return make_ellipsoid<D>(center, Mat<D>::Identity(), semiaxes);
}

template <int D>
Body<D> make_polytope(std::vector<Vec<D>> vertices) {
  if (vertices.empty()) throw Error(ErrorKind::DomainError, "polytope needs at least one vertex");
  for (const auto& v : vertices) {
    if (!v.allFinite()) throw Error(ErrorKind::DomainError, "non-finite polytope vertex");
  }
  return PolytopeV<D>{std::move(vertices)};
}

template <int D>
Body<D> make_halfspaces(std::vector<Hyperplane<D>> planes) {
  for (const auto& h : planes) {
    if (!std::isfinite(h.t)) throw Error(ErrorKind::DomainError, "non-finite halfspace offset");
  }
  return HalfspaceSet<D>{std::move(planes)};
}

/// K + rB^d. Balls stay balls.
template <int D>
Body<D> parallel_body(const Body<D>& body, double r) {
  if (!(r > 0.0)) throw Error(ErrorKind::DomainError, "parallel body radius must be positive");
  if (const auto* b = body.template as<Ball<D>>()) return Ball<D>{b->center, b->radius + r};
  return ParallelBody<D>{std::make_shared<const Body<D>>(body), r};
}

// ---------------------------------------------------------------------------
// Polygon / polytope helpers
// ---------------------------------------------------------------------------

namespace detail {

constexpr double kRadialEps = 1e-14;

/// Ray exit parameter from {<n_i,x> <= c_i}; +inf when no constraint faces u.
template <int D>
double ray_exit(const std::vector<Hyperplane<D>>& planes, const Vec<D>& u) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& h : planes) {
    const double cosang = h.u.dot(u);
    if (cosang > kRadialEps) best = std::min(best, h.t / cosang);
  }
  return best;
}

/// Outer facet planes of conv(vertices). d=2 via the hull; d=3 by scanning
/// vertex triples, which is only meant for small polytopes.
template <int D>
std::vector<Hyperplane<D>> facets(const PolytopeV<D>& poly) {
  std::vector<Hyperplane<D>> out;
  if constexpr (D == 2) {
    const auto hull = hull2d::convex_hull(poly.vertices);
    if (hull.size() < 3) throw Error(ErrorKind::DomainError, "polygon has empty interior");
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const Vec<2> e = hull[(i + 1) % hull.size()] - hull[i];
      const Vec<2> n(e.y(), -e.x());
      const auto u = Direction<2>::normalized(n);
      out.push_back({u, u.dot(hull[i])});
    }
  } else {
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    double scale = 0.0;
    for (const auto& p : v) scale = std::max(scale, p.norm());
    const double tol = 1e-12 * std::max(1.0, scale);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        for (std::size_t c = b + 1; c < n; ++c) {
          Vec<D> nrm = (v[b] - v[a]).cross(v[c] - v[a]);
          if (nrm.norm() <= tol) continue;
          nrm.normalize();
          double lo = INFINITY, hi = -INFINITY;
          for (const auto& p : v) {
            const double s = nrm.dot(p - v[a]);
            lo = std::min(lo, s);
            hi = std::max(hi, s);
          }
          if (hi > tol && lo < -tol) continue;
          if (hi > tol) nrm = -nrm;
          const Direction<D> u(nrm);
          const double t = u.dot(v[a]);
          const bool dup = std::any_of(out.begin(), out.end(), [&](const Hyperplane<D>& h) {
            return (h.u.vec() - u.vec()).norm() < 1e-9 && std::abs(h.t - t) < 1e-9 * std::max(1.0, scale);
          });
          if (!dup) out.push_back({u, t});
        }
      }
    }
    if (out.size() < 4) throw Error(ErrorKind::DomainError, "polytope has empty interior");
  }
  return out;
}

}  // namespace detail

/// Vertices of a bounded planar halfspace intersection, counterclockwise.
/// Computed as the polar of the hull of the dual points u_i / t_i.
inline PolytopeV<2> enumerate_vertices(const HalfspaceSet<2>& set) {
  std::vector<Vec<2>> dual;
  dual.reserve(set.planes.size());
  for (const auto& h : set.planes) {
    if (!(h.t > 0.0)) throw Error(ErrorKind::OriginOutside, "halfspace offsets must be positive");
    dual.push_back(h.u.vec() / h.t);
  }
  const auto hull = hull2d::convex_hull(dual);
  if (hull.size() < 3) throw Error(ErrorKind::Unbounded, "fewer than 3 effective constraints");
  const Vec<2> origin = Vec<2>::Zero();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    if (hull2d::cross(hull[i], hull[(i + 1) % hull.size()], origin) <= 0.0) {
      throw Error(ErrorKind::Unbounded, "halfspace intersection is unbounded");
    }
  }
  PolytopeV<2> out;
  out.vertices.reserve(hull.size());
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec<2>& a = hull[i];
    const Vec<2>& b = hull[(i + 1) % hull.size()];
    const double det = a.x() * b.y() - a.y() * b.x();
    out.vertices.emplace_back((b.y() - a.y()) / det, (a.x() - b.x()) / det);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Support, radial, membership
// ---------------------------------------------------------------------------

template <int D>
double radial_unit(const Body<D>& body, const Vec<D>& u);

/// h_K(u) for a unit vector u (unchecked fast path).
template <int D>
double support_unit(const Body<D>& body, const Vec<D>& u) {
  return std::visit(
      overloaded{
          [&](const Ball<D>& b) { return b.center.dot(u) + b.radius; },
          [&](const Ellipsoid<D>& e) {
            const Vec<D> local = e.semiaxes.cwiseProduct(e.frame.transpose() * u);
            return e.center.dot(u) + local.norm();
          },
          [&](const PolytopeV<D>& p) {
            double best = -INFINITY;
            for (const auto& v : p.vertices) best = std::max(best, v.dot(u));
            return best;
          },
          [&](const HalfspaceSet<D>& h) -> double {
            if constexpr (D == 2) {
              const auto verts = enumerate_vertices(h);
              double best = -INFINITY;
              for (const auto& v : verts.vertices) best = std::max(best, v.dot(u));
              return best;
            } else {
              throw Error(ErrorKind::Unsupported, "halfspace support needs vertex enumeration (d = 2 only)");
            }
          },
          [&](const ParallelBody<D>& p) { return support_unit(*p.inner, u) + p.r; },
          [&](const OraclePolar<D>& p) { return 1.0 / radial_unit(*p.inner, u); },
      },
      body.shape());
}

template <int D>
double support(const Body<D>& body, const Direction<D>& u) {
  return support_unit(body, u.vec());
}

template <int D>
double distance(const Body<D>& body, const Vec<D>& x);

template <int D>
bool origin_interior(const Body<D>& body) {
  return std::visit(
      overloaded{
          [](const Ball<D>& b) { return b.center.norm() < b.radius; },
          [](const Ellipsoid<D>& e) {
            const Vec<D> q = (e.frame.transpose() * e.center).cwiseQuotient(e.semiaxes);
            return q.norm() < 1.0;
          },
          [](const PolytopeV<D>& p) {
            try {
              const auto fs = detail::facets(p);
              return std::all_of(fs.begin(), fs.end(), [](const Hyperplane<D>& h) { return h.t > 0.0; });
            } catch (const Error&) {
              return false;
            }
          },
          [](const HalfspaceSet<D>& h) {
            return std::all_of(h.planes.begin(), h.planes.end(), [](const Hyperplane<D>& p) { return p.t > 0.0; });
          },
          [](const ParallelBody<D>& p) { return distance(*p.inner, Vec<D>(Vec<D>::Zero())) < p.r; },
          [](const OraclePolar<D>& p) { return origin_interior(*p.inner); },
      },
      body.shape());
}

namespace detail {

/// Positive root of |t p - q|^2 = 1 with |q| < 1.
template <int D>
double unit_ball_exit(const Vec<D>& p, const Vec<D>& q) {
  const double pp = p.squaredNorm();
  const double pq = p.dot(q);
  const double disc = pq * pq - pp * (q.squaredNorm() - 1.0);
  return (pq + std::sqrt(std::max(disc, 0.0))) / pp;
}

}  // namespace detail

/// rho(K,u) for a unit vector u; may be +inf. Assumes o in int K.
template <int D>
double radial_unit(const Body<D>& body, const Vec<D>& u) {
  return std::visit(
      overloaded{
          [&](const Ball<D>& b) { return detail::unit_ball_exit<D>(u / b.radius, b.center / b.radius); },
          [&](const Ellipsoid<D>& e) {
            const Vec<D> p = (e.frame.transpose() * u).cwiseQuotient(e.semiaxes);
            const Vec<D> q = (e.frame.transpose() * e.center).cwiseQuotient(e.semiaxes);
            return detail::unit_ball_exit<D>(p, q);
          },
          [&](const PolytopeV<D>& p) { return detail::ray_exit(detail::facets(p), u); },
          [&](const HalfspaceSet<D>& h) { return detail::ray_exit(h.planes, u); },
          [&](const ParallelBody<D>& p) {
            double lo = 0.0;
            double hi = support_unit(*p.inner, u) + p.r;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
              const double mid = 0.5 * (lo + hi);
              if (distance(*p.inner, Vec<D>(mid * u)) <= p.r) {
                lo = mid;
              } else {
                hi = mid;
              }
            }
            return 0.5 * (lo + hi);
          },
          [&](const OraclePolar<D>& p) { return 1.0 / support_unit(*p.inner, u); },
      },
      body.shape());
}

template <int D>
double radial(const Body<D>& body, const Direction<D>& u) {
  if (!origin_interior(body)) throw Error(ErrorKind::OriginOutside, "radial function needs o in int K");
  return radial_unit(body, u.vec());
}

template <int D>
bool contains(const Body<D>& body, const Vec<D>& x) {
  return std::visit(
      overloaded{
          [&](const Ball<D>& b) { return (x - b.center).squaredNorm() <= b.radius * b.radius; },
          [&](const Ellipsoid<D>& e) {
            return (e.frame.transpose() * (x - e.center)).cwiseQuotient(e.semiaxes).squaredNorm() <= 1.0;
          },
          [&](const PolytopeV<D>& p) {
            const auto fs = detail::facets(p);
            const double tol = 1e-12;
            return std::all_of(fs.begin(), fs.end(), [&](const Hyperplane<D>& h) { return h.u.dot(x) <= h.t + tol; });
          },
          [&](const HalfspaceSet<D>& h) {
            return std::all_of(h.planes.begin(), h.planes.end(), [&](const Hyperplane<D>& p) { return p.below(x); });
          },
          [&](const ParallelBody<D>& p) { return distance(*p.inner, x) <= p.r; },
          [&](const OraclePolar<D>& p) {
            const double len = x.norm();
            if (len == 0.0) return true;
            return len * support_unit(*p.inner, Vec<D>(x / len)) <= 1.0;
          },
      },
      body.shape());
}

/// Euclidean distance from x to the body (0 inside).
template <int D>
double distance(const Body<D>& body, const Vec<D>& x) {
  return std::visit(
      overloaded{
          [&](const Ball<D>& b) { return std::max(0.0, (x - b.center).norm() - b.radius); },
          [&](const Ellipsoid<D>& e) {
            const Vec<D> y = e.frame.transpose() * (x - e.center);
            const Vec<D> a2 = e.semiaxes.cwiseProduct(e.semiaxes);
            if (y.cwiseQuotient(e.semiaxes).squaredNorm() <= 1.0) return 0.0;
            // Closest point p_i = a_i^2 y_i / (a_i^2 + s) where s > 0 solves
            // sum (a_i y_i / (a_i^2 + s))^2 = 1; the left side decreases in s.
            double lo = 0.0;
            double hi = e.semiaxes.maxCoeff() * y.norm();
            for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
              const double s = 0.5 * (lo + hi);
              const double f = (e.semiaxes.cwiseProduct(y).array() / (a2.array() + s)).matrix().squaredNorm();
              if (f > 1.0) {
                lo = s;
              } else {
                hi = s;
              }
            }
            const double s = 0.5 * (lo + hi);
            const Vec<D> p = (a2.array() * y.array() / (a2.array() + s)).matrix();
            return (y - p).norm();
          },
          [&](const PolytopeV<D>& p) -> double {
            if constexpr (D == 2) {
              const auto hull = hull2d::convex_hull(p.vertices);
              return hull2d::distance(hull, x);
            } else {
              throw Error(ErrorKind::Unsupported, "polytope distance is implemented for d = 2 only");
            }
          },
          [&](const HalfspaceSet<D>& h) -> double {
            if constexpr (D == 2) {
              const auto verts = enumerate_vertices(h);
              return hull2d::distance(verts.vertices, x);
            } else {
              throw Error(ErrorKind::Unsupported, "halfspace distance is implemented for d = 2 only");
            }
          },
          [&](const ParallelBody<D>& p) { return std::max(0.0, distance(*p.inner, x) - p.r); },
          [&](const OraclePolar<D>&) -> double {
            throw Error(ErrorKind::Unsupported, "distance to an oracle polar body");
          },
      },
      body.shape());
}

/// Axis-aligned bounding box [lo, hi] from support values along +-e_i.
template <int D>
std::pair<Vec<D>, Vec<D>> bounding_box(const Body<D>& body) {
  Vec<D> lo, hi;
  for (int i = 0; i < D; ++i) {
    const Vec<D> e = Vec<D>::Unit(i);
    hi[i] = support_unit(body, e);
    lo[i] = -support_unit(body, Vec<D>(-e));
  }
  if (!lo.allFinite() || !hi.allFinite()) throw Error(ErrorKind::Unbounded, "body has no bounding box");
  return {lo, hi};
}

// ---------------------------------------------------------------------------
// Polarity
// ---------------------------------------------------------------------------

/// Completes a unit vector to an orthonormal frame whose first column is `axis`.
template <int D>
Mat<D> frame_with_axis(const Vec<D>& axis) {
  Mat<D> f;
  f.col(0) = axis;
  int filled = 1;
  for (int i = 0; i < D && filled < D; ++i) {
    Vec<D> c = Vec<D>::Unit(i);
    for (int j = 0; j < filled; ++j) c -= f.col(j).dot(c) * f.col(j);
    // Second pass keeps the frame orthonormal to rounding level.
    for (int j = 0; j < filled; ++j) c -= f.col(j).dot(c) * f.col(j);
    if (c.norm() > 1e-6) f.col(filled++) = c.normalized();
  }
  return f;
}

/// Polar of an off-center ball B(t,R), ||t|| < R: the ellipsoid of revolution
/// with axis t/||t||, semiaxes R/(R^2-|t|^2) and 1/sqrt(R^2-|t|^2), centered at
/// -t/(R^2-|t|^2). A centered ball maps to the ball of radius 1/R.
template <int D>
Body<D> polar_of_ball(const Ball<D>& b) {
  const double tn = b.center.norm();
  if (!(tn < b.radius)) throw Error(ErrorKind::OriginOutside, "ball does not contain o in its interior");
  if (tn == 0.0) return Ball<D>{Vec<D>::Zero(), 1.0 / b.radius};
  const double gap = b.radius * b.radius - tn * tn;
  Vec<D> axes = Vec<D>::Constant(1.0 / std::sqrt(gap));
  axes[0] = b.radius / gap;
  return Ellipsoid<D>{Vec<D>(-b.center / gap), frame_with_axis<D>(b.center / tn), axes};
}

template <int D>
Body<D> polar(const Body<D>& body) {
  if (!origin_interior(body)) throw Error(ErrorKind::OriginOutside, "polar needs o in int K");
  return std::visit(
      overloaded{
          [](const Ball<D>& b) { return polar_of_ball(b); },
          [&](const Ellipsoid<D>&) { return Body<D>(OraclePolar<D>{std::make_shared<const Body<D>>(body)}); },
          [](const PolytopeV<D>& p) {
            HalfspaceSet<D> out;
            out.planes.reserve(p.vertices.size());
            for (const auto& x : p.vertices) {
              const double len = x.norm();
              out.planes.push_back({Direction<D>(Vec<D>(x / len)), 1.0 / len});
            }
            return Body<D>(std::move(out));
          },
          [](const HalfspaceSet<D>& h) {
            if constexpr (D == 2) enumerate_vertices(h);  // boundedness check
            PolytopeV<D> out;
            out.vertices.reserve(h.planes.size());
            for (const auto& p : h.planes) out.vertices.push_back(p.u.vec() / p.t);
            return Body<D>(std::move(out));
          },
          [&](const ParallelBody<D>&) { return Body<D>(OraclePolar<D>{std::make_shared<const Body<D>>(body)}); },
          [](const OraclePolar<D>& p) { return *p.inner; },
      },
      body.shape());
}

/// c K for c > 0.
template <int D>
Body<D> scaled(const Body<D>& body, double c) {
  if (!(c > 0.0)) throw Error(ErrorKind::DomainError, "scale factor must be positive");
  return std::visit(
      overloaded{
          [&](const Ball<D>& b) { return Body<D>(Ball<D>{c * b.center, c * b.radius}); },
          [&](const Ellipsoid<D>& e) { return Body<D>(Ellipsoid<D>{c * e.center, e.frame, c * e.semiaxes}); },
          [&](const PolytopeV<D>& p) {
            PolytopeV<D> out = p;
            for (auto& v : out.vertices) v *= c;
            return Body<D>(std::move(out));
          },
          [&](const HalfspaceSet<D>& h) {
            HalfspaceSet<D> out = h;
            for (auto& p : out.planes) p.t *= c;
            return Body<D>(std::move(out));
          },
          [&](const ParallelBody<D>& p) {
            return Body<D>(ParallelBody<D>{std::make_shared<const Body<D>>(scaled(*p.inner, c)), c * p.r});
          },
          [&](const OraclePolar<D>& p) {
            return Body<D>(OraclePolar<D>{std::make_shared<const Body<D>>(scaled(*p.inner, 1.0 / c))});
          },
      },
      body.shape());
}

/// Closed-form volume where one exists, NaN otherwise.
template <int D>
double closed_form_volume(const Body<D>& body) {
  return std::visit(
      overloaded{
          [](const Ball<D>& b) { return kappa(D) * std::pow(b.radius, D); },
          [](const Ellipsoid<D>& e) { return kappa(D) * e.semiaxes.prod(); },
          [](const PolytopeV<D>& p) {
            if constexpr (D == 2) {
              return hull2d::polygon_area(hull2d::convex_hull(p.vertices));
            } else {
              return std::numeric_limits<double>::quiet_NaN();
            }
          },
          [](const HalfspaceSet<D>& h) {
            if constexpr (D == 2) {
              return hull2d::polygon_area(enumerate_vertices(h).vertices);
            } else {
              return std::numeric_limits<double>::quiet_NaN();
            }
          },
          [](const ParallelBody<D>&) { return std::numeric_limits<double>::quiet_NaN(); },
          [](const OraclePolar<D>&) { return std::numeric_limits<double>::quiet_NaN(); },
      },
      body.shape());
}

}  // namespace randpoly
