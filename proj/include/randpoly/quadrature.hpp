#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "randpoly/curvature.hpp"

namespace randpoly {

/// Quadrature nodes and positive weights on S^{d-1}. For d = 2 the nodes are
/// the angles 2πk/m in increasing order, which the hull sweeps rely on.
template <int D>
struct SphereRule {
  std::vector<Vec<D>> nodes;
  std::vector<double> weights;
  int order = 0;

  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_m.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int m) {
  std::vector<double> x(m), w(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= m; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = m * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[m - 1 - i] = z;
    w[i] = w[m - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

/// d = 2: m equally spaced angles with weight 2π/m.
/// d = 3: m Gauss-Legendre nodes in cos(theta) times 2m uniform azimuths.
template <int D>
SphereRule<D> sphere_rule(int m) {
  static_assert(D == 2 || D == 3, "sphere rules exist for d = 2, 3");
  if (m < 8) throw Error(ErrorKind::ConfigError, "sphere rule order must be >= 8, got " + std::to_string(m));
  SphereRule<D> rule;
  rule.order = m;
  if constexpr (D == 2) {
    rule.nodes.reserve(m);
    for (int k = 0; k < m; ++k) {
      const double th = 2.0 * M_PI * k / m;
      rule.nodes.emplace_back(std::cos(th), std::sin(th));
    }
    rule.weights.assign(m, 2.0 * M_PI / m);
  } else {
    const auto [z, wz] = gauss_legendre(m);
    const int nphi = 2 * m;
    rule.nodes.reserve(static_cast<std::size_t>(m) * nphi);
    for (int i = 0; i < m; ++i) {
      const double s = std::sqrt(std::max(0.0, 1.0 - z[i] * z[i]));
      for (int k = 0; k < nphi; ++k) {
        const double phi = 2.0 * M_PI * k / nphi;
        rule.nodes.emplace_back(s * std::cos(phi), s * std::sin(phi), z[i]);
        rule.weights.push_back(wz[i] * 2.0 * M_PI / nphi);
      }
    }
  }
  return rule;
}

template <int D, class F>
double integrate_sphere(F&& f, const SphereRule<D>& rule) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = f(rule.nodes[i]);
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::NumericalError, "integrand is not finite at node " + std::to_string(i));
    }
    sum += rule.weights[i] * v;
  }
  return sum;
}

/// ∫_{∂K} g dH^{d-1} computed on the sphere as ∫ g(x(u)) / kappa(x(u)) du,
/// x(u) the inverse Gauss map. Balls and ellipsoids only.
template <int D, class G>
double boundary_integral(const Body<D>& body, G&& g, const SphereRule<D>& rule) {
  return integrate_sphere<D>(
      [&](const Vec<D>& u) {
        const BoundaryPoint<D> bp = boundary_point(body, u);
        if (!(bp.kappa >= 1e-14)) throw Error(ErrorKind::NumericalError, "curvature vanishes at a quadrature node");
        return g(bp) / bp.kappa;
      },
      rule);
}

/// ∫_{∂K} kappa^p dH^{d-1}.
template <int D>
double curvature_integral(const Body<D>& body, double p, const SphereRule<D>& rule) {
  return boundary_integral<D>(body, [p](const BoundaryPoint<D>& bp) { return std::pow(bp.kappa, p); }, rule);
}

}  // namespace randpoly
