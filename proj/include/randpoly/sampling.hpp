#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "randpoly/body.hpp"
#include "randpoly/quadrature.hpp"
#include "randpoly/rng.hpp"
#include "randpoly/weight.hpp"

namespace randpoly {

// ---------------------------------------------------------------------------
// Hyperplane band helpers
// ---------------------------------------------------------------------------

/// mu_q(H_K) = (1/(d kappa_d)) ∫_S ∫_{h_K(u)}^{h_K(u)+1} q(t,u) dt du.
template <int D>
double mu_q_mass(const Body<D>& K, const WeightSpec<D>& q, const SphereRule<D>& rule) {
  return integrate_sphere<D>(
             [&](const Vec<D>& u) {
               const double h = support_unit(K, u);
               return q.integral(h, h + 1.0, u);
             },
             rule) /
         sphere_area(D);
}

namespace detail {

template <int D>
SphereRule<D> scan_directions() {
  return sphere_rule<D>(D == 2 ? 100 : 8);
}

}  // namespace detail

/// Envelope for q on the band h_K(u) <= t <= h_K(u)+1: grid maximum over
/// about 10^4 points, inflated by 5%.
template <int D>
double band_weight_max(const Body<D>& K, const WeightSpec<D>& q) {
  const auto dirs = detail::scan_directions<D>();
  const int nt = D == 2 ? 100 : 80;
  double best = 0.0;
  for (const auto& u : dirs.nodes) {
    const double h = support_unit(K, u);
    for (int i = 0; i <= nt; ++i) best = std::max(best, q.value(h + static_cast<double>(i) / nt, u));
  }
  return 1.05 * best;
}

/// Conditions i)-iii) on the hyperplane weight: unit band mass (1e-3) and
/// positivity on the inner band edge {(h_K(u),u)}.
template <int D>
void validate_hyperplane_weight(const Body<D>& K, const WeightSpec<D>& q, const SphereRule<D>& rule) {
  const double mass = mu_q_mass(K, q, rule);
  if (std::abs(mass - 1.0) > 1e-3) {
    throw Error(ErrorKind::ConfigError, "hyperplane weight has band mass " + std::to_string(mass) + ", expected 1");
  }
  for (const auto& u : detail::scan_directions<D>().nodes) {
    if (!(q.value(support_unit(K, u), u) > 0.0)) {
      throw Error(ErrorKind::ConfigError, "hyperplane weight vanishes on the boundary band edge");
    }
  }
}

// ---------------------------------------------------------------------------
// Point densities
// ---------------------------------------------------------------------------

namespace density {

struct UniformOnBody {};

/// c |x|^beta on the body.
struct RadialPower {
  double beta;
};

/// (d kappa_d)^{-1} q(1/|x|, x/|x|) |x|^{-(d+1)} on K* minus (K_1)*.
template <int D>
struct InducedPolar {
  WeightSpec<D> q;
  std::shared_ptr<const Body<D>> K;
};

}  // namespace density

/// A normalized probability density on a body, plus an envelope M >= sup rho.
template <int D>
class DensitySpec {
 public:
  using Kind = std::variant<density::UniformOnBody, density::RadialPower, density::InducedPolar<D>>;

  const Body<D>& support_body() const { return *support_; }
  const Kind& kind() const { return kind_; }
  double normalization() const { return c_; }
  double envelope() const { return envelope_; }
  bool is_uniform() const { return std::holds_alternative<density::UniformOnBody>(kind_); }

  /// Density at x; zero off the support.
  double operator()(const Vec<D>& x) const {
    if (!contains(*support_, x)) return 0.0;
    return formula(x);
  }

  /// The density expression without the support test, for evaluation on the
  /// support boundary where membership is decided by rounding.
  double formula(const Vec<D>& x) const {
    return std::visit(overloaded{
                          [&](const density::UniformOnBody&) { return c_; },
                          [&](const density::RadialPower& p) { return c_ * std::pow(x.norm(), p.beta); },
                          [&](const density::InducedPolar<D>& p) {
                            const double r = x.norm();
                            if (r == 0.0) return 0.0;
                            const Vec<D> u = x / r;
                            // x in (K_1)* iff |x| h_{K_1}(u) <= 1.
                            if (r * (support_unit(*p.K, u) + 1.0) <= 1.0) return 0.0;
                            return c_ * p.q.value(1.0 / r, u) * std::pow(r, -(D + 1));
                          },
                      },
                      kind_);
  }

  static DensitySpec uniform(const Body<D>& K, const SphereRule<D>& rule);
  static DensitySpec radial_power(const Body<D>& K, double beta, std::optional<double> declared_c,
                                  const SphereRule<D>& rule);
  static DensitySpec induced_polar(const WeightSpec<D>& q, const Body<D>& K, const SphereRule<D>& rule);

 private:
  DensitySpec(std::shared_ptr<const Body<D>> support, Kind kind, double c, double envelope)
      : support_(std::move(support)), kind_(std::move(kind)), c_(c), envelope_(envelope) {}

  std::shared_ptr<const Body<D>> support_;
  Kind kind_;
  double c_;
  double envelope_;
};

/// Volume by closed form where available, otherwise ∫ rho_K^d / d over the sphere.
template <int D>
double body_volume(const Body<D>& K, const SphereRule<D>& rule) {
  const double closed = closed_form_volume(K);
  if (std::isfinite(closed)) return closed;
  if (!origin_interior(K)) throw Error(ErrorKind::Unsupported, "volume of a body not containing o");
  return integrate_sphere<D>([&](const Vec<D>& u) { return std::pow(radial_unit(K, u), D) / D; }, rule);
}

namespace detail {

template <int D>
double farthest_point_bound(const Body<D>& K) {
  const auto [lo, hi] = bounding_box(K);
  return lo.cwiseAbs().cwiseMax(hi.cwiseAbs()).norm();
}

}  // namespace detail

template <int D>
DensitySpec<D> DensitySpec<D>::uniform(const Body<D>& K, const SphereRule<D>& rule) {
  const double vol = body_volume(K, rule);
  if (!(vol > 0.0)) throw Error(ErrorKind::ConfigError, "uniform density on a body of zero volume");
  return DensitySpec(std::make_shared<const Body<D>>(K), density::UniformOnBody{}, 1.0 / vol, 1.0 / vol);
}

/// Rescaled exactly to unit mass; a declared constant must already be within 1%.
template <int D>
DensitySpec<D> DensitySpec<D>::radial_power(const Body<D>& K, double beta, std::optional<double> declared_c,
                                            const SphereRule<D>& rule) {
  if (!(beta >= 0.0)) throw Error(ErrorKind::ConfigError, "radial power density needs exponent >= 0");
  if (!origin_interior(K)) throw Error(ErrorKind::ConfigError, "radial power density needs o in int K");
  const double e = beta + D;
  const double mass = integrate_sphere<D>([&](const Vec<D>& u) { return std::pow(radial_unit(K, u), e) / e; }, rule);
  if (declared_c && std::abs(*declared_c * mass - 1.0) > 0.01) {
    throw Error(ErrorKind::ConfigError, "declared density constant integrates to " + std::to_string(*declared_c * mass));
  }
  const double c = 1.0 / mass;
  const double env = c * std::pow(detail::farthest_point_bound(K), beta);
  return DensitySpec(std::make_shared<const Body<D>>(K), density::RadialPower{beta}, c, env);
}

/// The point density on K* whose hull polars share the law of the random
/// halfspace intersection built from (K, q).
template <int D>
DensitySpec<D> DensitySpec<D>::induced_polar(const WeightSpec<D>& q, const Body<D>& K, const SphereRule<D>& rule) {
  if (!origin_interior(K)) throw Error(ErrorKind::OriginOutside, "induced polar density needs o in int K");
  validate_hyperplane_weight(K, q, rule);
  const double c = 1.0 / sphere_area(D);
  // On the support |x| >= 1 / max h_{K_1}, so |x|^{-(d+1)} <= (R_K + 1)^{d+1}.
  const double outer = detail::farthest_point_bound(K) + 1.0;
  const double env = c * band_weight_max(K, q) * std::pow(outer, D + 1);
  auto Kp = std::make_shared<const Body<D>>(K);
  return DensitySpec(std::make_shared<const Body<D>>(polar(K)), density::InducedPolar<D>{q, Kp}, c, env);
}

template <int D>
DensitySpec<D> induced_polar_density(const WeightSpec<D>& q, const Body<D>& K, const SphereRule<D>& rule) {
  return DensitySpec<D>::induced_polar(q, K, rule);
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

/// Rejection sampler from the bounding box of the density support.
template <int D>
class PointSampler {
 public:
  static constexpr std::uint64_t kCheckAfter = 1'000'000;
  static constexpr double kMinAcceptance = 1e-4;

  explicit PointSampler(DensitySpec<D> rho) : rho_(std::move(rho)) {
    std::tie(lo_, hi_) = bounding_box(rho_.support_body());
    extent_ = hi_ - lo_;
  }

  const DensitySpec<D>& density() const { return rho_; }

  Vec<D> draw(Stream& s) const {
    const double M = rho_.envelope();
    for (;;) {
      ++proposals_;
      Vec<D> x;
      for (int i = 0; i < D; ++i) x[i] = lo_[i] + extent_[i] * s.uniform();
      if (proposals_ >= kCheckAfter && static_cast<double>(accepts_) < kMinAcceptance * proposals_) {
        throw Error(ErrorKind::EnvelopeTooLoose, "point acceptance rate below 1e-4");
      }
      if (rho_.is_uniform()) {
        if (!contains(rho_.support_body(), x)) continue;
      } else {
        const double value = rho_(x);
        if (value > M * (1.0 + 1e-12)) throw Error(ErrorKind::EnvelopeTooLoose, "density exceeds its envelope");
        if (value <= 0.0 || s.uniform() * M >= value) continue;
      }
      ++accepts_;
      return x;
    }
  }

  void draw_into(Stream& s, std::vector<Vec<D>>& out, std::size_t n) const {
    out.clear();
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(draw(s));
  }

 private:
  DensitySpec<D> rho_;
  Vec<D> lo_, hi_, extent_;
  // Rejection statistics; a sampler instance is owned by one worker.
  mutable std::uint64_t proposals_ = 0;
  mutable std::uint64_t accepts_ = 0;
};

/// Hyperplanes with density proportional to q on the band
/// {(t,u) : h_K(u) <= t <= h_K(u) + 1}.
template <int D>
class HyperplaneSampler {
 public:
  HyperplaneSampler(Body<D> K, WeightSpec<D> q, const SphereRule<D>& rule) : K_(std::move(K)), q_(std::move(q)) {
    validate_hyperplane_weight(K_, q_, rule);
    q_max_ = band_weight_max(K_, q_);
  }

  const Body<D>& body() const { return K_; }
  double envelope() const { return q_max_; }

  Hyperplane<D> draw(Stream& s) const {
    for (int attempt = 0; attempt < 100'000'000; ++attempt) {
      const Vec<D> u = random_direction<D>(s);
      const double t = support_unit(K_, u) + s.uniform();
      if (!q_.is_constant()) {
        const double value = q_.value(t, u);
        if (value > q_max_) throw Error(ErrorKind::EnvelopeTooLoose, "hyperplane weight exceeds its envelope");
        if (s.uniform() * q_max_ >= value) continue;
      }
      return {Direction<D>(u), t};
    }
    throw Error(ErrorKind::EnvelopeTooLoose, "hyperplane rejection did not terminate");
  }

 private:
  Body<D> K_;
  WeightSpec<D> q_;
  double q_max_ = 0.0;
};

template <int D>
Vec<D> sample_point(const Body<D>& K, const DensitySpec<D>& rho, const StreamKey& key) {
  (void)K;  // the density carries its support body
  Stream s(key);
  return PointSampler<D>(rho).draw(s);
}

template <int D>
Hyperplane<D> sample_hyperplane(const Body<D>& K, const WeightSpec<D>& q, const StreamKey& key,
                                const SphereRule<D>& rule) {
  Stream s(key);
  return HyperplaneSampler<D>(K, q, rule).draw(s);
}

}  // namespace randpoly
