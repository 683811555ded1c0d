#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace randpoly {

/// Failure categories shared by every module. The CLI maps them onto exit codes.
enum class ErrorKind {
  Unbounded,
  OriginOutside,
  NotOnBoundary,
  DomainError,
  Unsupported,
  ConfigError,
  NumericalError,
  EnvelopeTooLoose,
  HypothesisError,
  IoError,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Unbounded: return "Unbounded";
    case ErrorKind::OriginOutside: return "OriginOutside";
    case ErrorKind::NotOnBoundary: return "NotOnBoundary";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::NumericalError: return "NumericalError";
    case ErrorKind::EnvelopeTooLoose: return "EnvelopeTooLoose";
    case ErrorKind::HypothesisError: return "HypothesisError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

template <int D>
using Vec = Eigen::Matrix<double, D, 1>;

template <int D>
using Mat = Eigen::Matrix<double, D, D>;

/// Unit vector. Inputs within 1e-9 of unit length are renormalized, anything
/// further off is rejected.
template <int D>
class Direction {
 public:
  static constexpr double kLengthTolerance = 1e-9;

  explicit Direction(const Vec<D>& u) {
    const double len = u.norm();
    if (!std::isfinite(len) || std::abs(len - 1.0) > kLengthTolerance) {
      throw Error(ErrorKind::DomainError, "direction is not unit length (|u| = " + std::to_string(len) + ")");
    }
    u_ = u / len;
  }

  /// Normalizes any nonzero finite vector.
  static Direction normalized(const Vec<D>& v) {
    const double len = v.norm();
    if (!(len > 0.0) || !std::isfinite(len)) {
      throw Error(ErrorKind::DomainError, "cannot normalize a zero or non-finite vector");
    }
    return Direction(v / len);
  }

  const Vec<D>& vec() const noexcept { return u_; }
  double operator[](int i) const { return u_[i]; }
  double dot(const Vec<D>& x) const { return u_.dot(x); }
  Direction operator-() const { return Direction(Vec<D>(-u_)); }

 private:
  Vec<D> u_;
};

/// H(u,t) = {x : <u,x> = t}; the halfspace containing the body is <u,x> <= t.
template <int D>
struct Hyperplane {
  Direction<D> u;
  double t;

  bool below(const Vec<D>& x) const { return u.dot(x) <= t; }
};

/// Volume of the unit ball in R^d.
inline double kappa(int d) {
  if (d < 1) throw Error(ErrorKind::DomainError, "kappa_d requires d >= 1");
  return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

/// Surface area of the unit sphere S^{d-1}, i.e. d * kappa_d.
inline double sphere_area(int d) { return d * kappa(d); }

}  // namespace randpoly
