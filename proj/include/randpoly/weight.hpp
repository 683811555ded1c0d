#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <variant>

#include "randpoly/types.hpp"

namespace randpoly {

namespace weight {

struct Constant {
  double c;
};

/// c |s|^alpha. On s >= 0 this is c s^alpha; the absolute value extends it to s < 0.
struct PowerT {
  double c;
  double alpha;
};

/// c on lo <= s <= hi, zero elsewhere.
struct BandIndicator {
  double lo;
  double hi;
  double c;
};

/// Depends on the direction only: q(s,u) = f(u).
template <int D>
struct RadialOnBody {
  std::function<double(const Vec<D>&)> f;
};

}  // namespace weight

/// Nonnegative weight q(s,u) on R x S^{d-1}, used both for the hyperplane
/// density and for the weights inside W_q and V_lambda. All t-integrals are
/// closed form.
template <int D>
class WeightSpec {
 public:
  using Kind = std::variant<weight::Constant, weight::PowerT, weight::BandIndicator, weight::RadialOnBody<D>>;

  WeightSpec() : kind_(weight::Constant{1.0}) {}
  WeightSpec(Kind kind) : kind_(std::move(kind)) { validate(); }

  static WeightSpec constant(double c) { return WeightSpec(weight::Constant{c}); }
  static WeightSpec power(double c, double alpha) { return WeightSpec(weight::PowerT{c, alpha}); }
  static WeightSpec band(double lo, double hi, double c) { return WeightSpec(weight::BandIndicator{lo, hi, c}); }
  static WeightSpec radial(std::function<double(const Vec<D>&)> f) {
    return WeightSpec(weight::RadialOnBody<D>{std::move(f)});
  }

  const Kind& kind() const noexcept { return kind_; }

  bool is_constant() const { return std::holds_alternative<weight::Constant>(kind_); }

  double value(double s, const Vec<D>& u) const {
    if (const auto* k = std::get_if<weight::Constant>(&kind_)) return k->c;
    if (const auto* k = std::get_if<weight::PowerT>(&kind_)) return k->c * std::pow(std::abs(s), k->alpha);
    if (const auto* k = std::get_if<weight::BandIndicator>(&kind_)) return (s >= k->lo && s <= k->hi) ? k->c : 0.0;
    return std::get<weight::RadialOnBody<D>>(kind_).f(u);
  }

  /// Oriented ∫_0^s q(r,u) dr.
  double antiderivative(double s, const Vec<D>& u) const {
    if (const auto* k = std::get_if<weight::Constant>(&kind_)) return k->c * s;
    if (const auto* k = std::get_if<weight::PowerT>(&kind_)) {
      const double e = k->alpha + 1.0;
      return k->c * std::copysign(std::pow(std::abs(s), e), s) / e;
    }
    if (const auto* k = std::get_if<weight::BandIndicator>(&kind_)) {
      return k->c * (std::clamp(s, k->lo, k->hi) - std::clamp(0.0, k->lo, k->hi));
    }
    return std::get<weight::RadialOnBody<D>>(kind_).f(u) * s;
  }

  /// Oriented ∫_a^b q(r,u) dr.
  double integral(double a, double b, const Vec<D>& u) const { return antiderivative(b, u) - antiderivative(a, u); }

  /// ∫_0^R t^{d-1} q(t,u) dt for R >= 0.
  double radial_moment(double R, const Vec<D>& u) const {
    if (R <= 0.0) return 0.0;
    if (const auto* k = std::get_if<weight::Constant>(&kind_)) return k->c * std::pow(R, D) / D;
    if (const auto* k = std::get_if<weight::PowerT>(&kind_)) {
      const double e = D + k->alpha;
      return k->c * std::pow(R, e) / e;
    }
    if (const auto* k = std::get_if<weight::BandIndicator>(&kind_)) {
      const double lo = std::max(k->lo, 0.0);
      const double hi = std::min(k->hi, R);
      if (hi <= lo) return 0.0;
      return k->c * (std::pow(hi, D) - std::pow(lo, D)) / D;
    }
    return std::get<weight::RadialOnBody<D>>(kind_).f(u) * std::pow(R, D) / D;
  }

  std::string describe() const {
    if (const auto* k = std::get_if<weight::Constant>(&kind_)) return "Constant{" + std::to_string(k->c) + "}";
    if (const auto* k = std::get_if<weight::PowerT>(&kind_)) {
      return "PowerT{" + std::to_string(k->c) + "," + std::to_string(k->alpha) + "}";
    }
    if (const auto* k = std::get_if<weight::BandIndicator>(&kind_)) {
      return "BandIndicator{" + std::to_string(k->lo) + "," + std::to_string(k->hi) + "," + std::to_string(k->c) + "}";
    }
    return "RadialOnBody";
  }

 private:
  void validate() const {
    auto bad = [](const std::string& why) { throw Error(ErrorKind::ConfigError, "weight: " + why); };
    if (const auto* k = std::get_if<weight::Constant>(&kind_)) {
      if (!(k->c >= 0.0) || !std::isfinite(k->c)) bad("constant must be finite and >= 0");
    } else if (const auto* k = std::get_if<weight::PowerT>(&kind_)) {
      if (!(k->c >= 0.0) || !(k->alpha >= 0.0) || !std::isfinite(k->c) || !std::isfinite(k->alpha)) {
        bad("power weight needs c >= 0 and exponent >= 0");
      }
    } else if (const auto* k = std::get_if<weight::BandIndicator>(&kind_)) {
      if (!(k->c >= 0.0) || !(k->lo <= k->hi) || !std::isfinite(k->lo) || !std::isfinite(k->hi)) {
        bad("band needs lo <= hi and c >= 0");
      }
    } else if (!std::get<weight::RadialOnBody<D>>(kind_).f) {
      bad("direction weight needs a callable");
    }
  }

  Kind kind_;
};

}  // namespace randpoly
