#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "randpoly/functionals.hpp"
#include "randpoly/hull2d.hpp"
#include "randpoly/parallel.hpp"
#include "randpoly/sampling.hpp"
#include "randpoly/stats.hpp"

namespace randpoly {

template <int D>
struct ExperimentConfig {
  Mode mode = Mode::InscribedMeanWidth;
  Body<D> body = Ball<D>{Vec<D>::Zero(), 1.0};
  WeightSpec<D> q;
  std::optional<DensitySpec<D>> rho;
  WeightSpec<D> lambda;
  std::vector<std::size_t> n_grid;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  int quad_m = 1024;
  std::string out_path;
  unsigned threads = default_threads();

  /// Minimum rule order accepted by run_experiment.
  static constexpr int kMinQuadM = 64;

  void validate() const {
    if (n_grid.empty()) throw Error(ErrorKind::ConfigError, "n_grid is empty");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      if (n_grid[i] < 1) throw Error(ErrorKind::ConfigError, "n_grid entries must be >= 1");
      if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw Error(ErrorKind::ConfigError, "n_grid must be strictly increasing");
    }
    if (trials < 1) throw Error(ErrorKind::ConfigError, "trials must be >= 1");
    if (quad_m < kMinQuadM) throw Error(ErrorKind::ConfigError, "quad_m must be >= 64");
    if (!origin_interior(body)) throw Error(ErrorKind::ConfigError, "body must contain o in its interior");
    if (mode == Mode::InscribedMeanWidth && !rho) throw Error(ErrorKind::ConfigError, "inscribed mode needs a density");
  }
};

struct TrialRecord {
  std::size_t n;
  std::size_t trial;
  double value;
  std::optional<double> aux;
};

struct SummaryRow {
  std::size_t n;
  std::size_t trials;
  double mean;
  double var;
  double ci_half;
  double scaled_mean;
  double scaled_var;
  double seconds;
};

struct TrialFailure {
  std::size_t n;
  StreamKey key;
  std::string message;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  std::vector<SummaryRow> summary;
  std::vector<TrialFailure> failures;
};

inline double mean_exponent(int d) { return 2.0 / (d + 1); }
inline double variance_exponent(int d) { return (d + 3.0) / (d + 1); }

// ---------------------------------------------------------------------------
// Per-trial functional evaluators. One instance per worker (scratch buffers).
// ---------------------------------------------------------------------------

/// Support function of conv(points) at every rule node.
template <int D>
void hull_support_at_nodes(std::span<const Vec<D>> points, const SphereRule<D>& rule, std::vector<double>& out,
                           std::vector<Vec<D>>& scratch) {
  out.resize(rule.size());
  if constexpr (D == 2) {
    scratch = hull2d::convex_hull(points);
    hull2d::support_on_circle(scratch, rule.nodes, out);
  } else {
    (void)scratch;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      double best = -INFINITY;
      for (const auto& p : points) best = std::max(best, rule.nodes[k].dot(p));
      out[k] = best;
    }
  }
}

/// W_q(K) - W_q(conv X).
template <int D>
class InscribedEvaluator {
 public:
  InscribedEvaluator(const Body<D>& K, WeightSpec<D> q, const SphereRule<D>& rule) : q_(std::move(q)), rule_(&rule) {
    std::vector<double> hK(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) hK[i] = support_unit(K, rule.nodes[i]);
    base_ = weighted_mean_width_nodes<D>(hK, q_, rule);
  }

  double base() const { return base_; }

  double operator()(std::span<const Vec<D>> points) {
    hull_support_at_nodes<D>(points, *rule_, h_, scratch_);
    return base_ - weighted_mean_width_nodes<D>(h_, q_, *rule_);
  }

 private:
  WeightSpec<D> q_;
  const SphereRule<D>* rule_;
  double base_ = 0.0;
  std::vector<double> h_;
  std::vector<Vec<D>> scratch_;
};

/// V_lambda(∩ H_i^- ∩ K_1) - V_lambda(K), by radial quadrature. The radial
/// function of the halfspace intersection is 1 / h of the dual points u_i/t_i.
template <int D>
class CircumscribedEvaluator {
 public:
  CircumscribedEvaluator(const Body<D>& K, WeightSpec<D> lambda, const SphereRule<D>& rule)
      : lambda_(std::move(lambda)), rule_(&rule) {
    const Body<D> K1 = parallel_body(K, 1.0);
    outer_.resize(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
      outer_[i] = radial_unit(K1, rule.nodes[i]);
      base_ += rule.weights[i] * lambda_.radial_moment(std::min(radial_unit(K, rule.nodes[i]), outer_[i]), rule.nodes[i]);
    }
  }

  double base() const { return base_; }

  /// V_lambda(∩ H_i^- ∩ K_1).
  double clipped_volume(std::span<const Hyperplane<D>> planes) {
    dual_.clear();
    for (const auto& h : planes) {
      if (!(h.t > 0.0)) throw Error(ErrorKind::NumericalError, "hyperplane passes through the origin");
      dual_.push_back(h.u.vec() / h.t);
    }
    return clipped_volume_dual(dual_);
  }

  /// Same, from the dual points directly.
  double clipped_volume_dual(std::span<const Vec<D>> dual) {
    if (dual.empty()) {
      h_.assign(rule_->size(), -INFINITY);
    } else {
      hull_support_at_nodes<D>(dual, *rule_, h_, scratch_);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < rule_->size(); ++i) {
      const double r = h_[i] > detail::kRadialEps ? std::min(1.0 / h_[i], outer_[i]) : outer_[i];
      sum += rule_->weights[i] * lambda_.radial_moment(r, rule_->nodes[i]);
    }
    return sum;
  }

  double operator()(std::span<const Hyperplane<D>> planes) { return clipped_volume(planes) - base_; }

 private:
  WeightSpec<D> lambda_;
  const SphereRule<D>* rule_;
  std::vector<double> outer_;
  double base_ = 0.0;
  std::vector<Vec<D>> dual_;
  std::vector<double> h_;
  std::vector<Vec<D>> scratch_;
};

// ---------------------------------------------------------------------------
// Monte Carlo driver
// ---------------------------------------------------------------------------

namespace detail {

inline SummaryRow summarize(std::size_t n, int d, std::span<const double> values, double seconds) {
  std::vector<double> ok;
  ok.reserve(values.size());
  for (double v : values) {
    if (std::isfinite(v)) ok.push_back(v);
  }
  const auto m = stats::moments(ok);
  const double nn = static_cast<double>(n);
  return {n, ok.size(), m.mean, m.variance, m.ci_half_width, std::pow(nn, mean_exponent(d)) * m.mean,
          std::pow(nn, variance_exponent(d)) * m.variance, seconds};
}

}  // namespace detail

/// Per-trial values for one n. Trial k of either model draws its n objects
/// from StreamKey(seed, k, role), so a trial's samples are nested across n.
template <int D>
std::vector<double> simulate_values(const ExperimentConfig<D>& cfg, std::size_t n, const SphereRule<D>& rule,
                                    std::vector<TrialFailure>* failures) {
  std::vector<double> values(cfg.trials, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::optional<TrialFailure>> failed(cfg.trials);
  if (cfg.mode == Mode::InscribedMeanWidth) {
    const PointSampler<D> proto(*cfg.rho);
    const InscribedEvaluator<D> eval_proto(cfg.body, cfg.q, rule);
    parallel_for(cfg.trials, cfg.threads, [&] {
      return [&, sampler = proto, eval = eval_proto, pts = std::vector<Vec<D>>()](std::size_t k) mutable {
        const StreamKey key{cfg.seed, k, StreamRole::Point};
        try {
          Stream s(key);
          sampler.draw_into(s, pts, n);
          values[k] = eval(pts);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::NumericalError) throw;
          failed[k] = TrialFailure{n, key, e.what()};
        }
      };
    });
  } else {
    const HyperplaneSampler<D> proto(cfg.body, cfg.q, rule);
    const CircumscribedEvaluator<D> eval_proto(cfg.body, cfg.lambda, rule);
    parallel_for(cfg.trials, cfg.threads, [&] {
      return [&, sampler = proto, eval = eval_proto, planes = std::vector<Hyperplane<D>>()](std::size_t k) mutable {
        const StreamKey key{cfg.seed, k, StreamRole::Plane};
        try {
          Stream s(key);
          planes.clear();
          for (std::size_t i = 0; i < n; ++i) planes.push_back(sampler.draw(s));
          values[k] = eval(planes);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::NumericalError) throw;
          failed[k] = TrialFailure{n, key, e.what()};
        }
      };
    });
  }
  if (failures) {
    for (auto& f : failed) {
      if (f) failures->push_back(std::move(*f));
    }
  }
  return values;
}

template <int D>
ExperimentResult run_experiment(const ExperimentConfig<D>& cfg) {
  cfg.validate();
  const auto rule = sphere_rule<D>(cfg.quad_m);
  ExperimentResult result;
  for (std::size_t n : cfg.n_grid) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto values = simulate_values(cfg, n, rule, &result.failures);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (std::size_t k = 0; k < values.size(); ++k) result.records.push_back({n, k, values[k], std::nullopt});
    result.summary.push_back(detail::summarize(n, D, values, secs));
  }
  return result;
}

enum class SeriesColumn { Mean, Variance };

inline stats::RegressionResult fit_scaling(std::span<const SummaryRow> series, SeriesColumn column) {
  std::vector<double> n, y;
  for (const auto& row : series) {
    n.push_back(static_cast<double>(row.n));
    y.push_back(column == SeriesColumn::Mean ? row.mean : row.var);
  }
  if (n.size() < 3) throw Error(ErrorKind::DomainError, "scaling fit needs >= 3 grid points");
  return stats::fit_log_log(n, y);
}

// ---------------------------------------------------------------------------
// Efron-Stein
// ---------------------------------------------------------------------------

struct EfronSteinRow {
  std::size_t n;
  std::size_t trials;
  double es_bound;   // (n+1) E Δ^2
  double es_ci;
  double direct_var; // Var W_q(K_(n))
  double var_ci;
  double min_delta;
};

/// For each trial draws n+1 points; Δ = W_q(K_(n+1)) - W_q(K_(n)) on the
/// nested pair. Records value = W_q(K) - W_q(K_(n)), aux = the same for n+1.
template <int D>
std::vector<EfronSteinRow> efron_stein_check(const ExperimentConfig<D>& cfg, std::vector<TrialRecord>* records = nullptr) {
  cfg.validate();
  if (cfg.mode != Mode::InscribedMeanWidth) throw Error(ErrorKind::ConfigError, "Efron-Stein check runs in inscribed mode");
  const auto rule = sphere_rule<D>(cfg.quad_m);
  const PointSampler<D> proto(*cfg.rho);
  const InscribedEvaluator<D> eval_proto(cfg.body, cfg.q, rule);
  std::vector<EfronSteinRow> rows;
  for (std::size_t n : cfg.n_grid) {
    std::vector<double> wn(cfg.trials), wn1(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&] {
      return [&, sampler = proto, eval = eval_proto, pts = std::vector<Vec<D>>()](std::size_t k) mutable {
        Stream s(StreamKey{cfg.seed, k, StreamRole::Point});
        sampler.draw_into(s, pts, n + 1);
        wn1[k] = eval(pts);
        wn[k] = eval(std::span<const Vec<D>>(pts.data(), n));
      };
    });
    std::vector<double> sq(cfg.trials);
    double min_delta = INFINITY;
    for (std::size_t k = 0; k < cfg.trials; ++k) {
      const double delta = wn[k] - wn1[k];
      min_delta = std::min(min_delta, delta);
      sq[k] = delta * delta;
      if (records) records->push_back({n, k, wn[k], wn1[k]});
    }
    const auto msq = stats::moments(sq);
    const auto mv = stats::moments(wn);
    const double scale = static_cast<double>(n + 1);
    rows.push_back({n, cfg.trials, scale * msq.mean, scale * msq.ci_half_width, mv.variance,
                    1.959963984540054 * mv.variance_se, min_delta});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Duality
// ---------------------------------------------------------------------------

enum class DualityVariant {
  Standard,        // arm B: induced polar density on K*
  SelfTest,        // both arms are arm A with identical streams
  UniformControl,  // arm B: uniform density on K* (should be rejected)
};

struct DualityResult {
  double statistic;
  double critical;
  bool reject;
  std::vector<double> arm_a;
  std::vector<double> arm_b;
};

/// Arm A: V(K^(n) ∩ K_1) for n random halfspaces from (K, q). Arm B: the same
/// functional of the polar of the hull of n points drawn in K* with the
/// induced density, with the polar formed from the halfspaces
/// (x_i/|x_i|, 1/|x_i|). Two-sample KS at the 1% level.
template <int D>
DualityResult duality_test(const Body<D>& K, const WeightSpec<D>& q, std::size_t n, std::size_t trials,
                           std::uint64_t seed, DualityVariant variant = DualityVariant::Standard, int quad_m = 1024,
                           unsigned threads = default_threads()) {
  if (!K.template as<Ball<D>>()) throw Error(ErrorKind::ConfigError, "duality test needs a ball");
  if (trials < 500) throw Error(ErrorKind::ConfigError, "duality test needs >= 500 trials per arm");
  const auto rule = sphere_rule<D>(quad_m);
  const HyperplaneSampler<D> plane_proto(K, q, rule);
  const CircumscribedEvaluator<D> eval_proto(K, WeightSpec<D>::constant(1.0), rule);

  auto arm_a = [&](std::vector<double>& out) {
    out.assign(trials, 0.0);
    parallel_for(trials, threads, [&] {
      return [&, sampler = plane_proto, eval = eval_proto, planes = std::vector<Hyperplane<D>>()](std::size_t k) mutable {
        Stream s(StreamKey{seed, k, StreamRole::Plane});
        planes.clear();
        for (std::size_t i = 0; i < n; ++i) planes.push_back(sampler.draw(s));
        out[k] = eval.clipped_volume(planes);
      };
    });
  };

  DualityResult res;
  arm_a(res.arm_a);
  if (variant == DualityVariant::SelfTest) {
    arm_a(res.arm_b);
  } else {
    const Body<D> Kstar = polar(K);
    const DensitySpec<D> rho = variant == DualityVariant::Standard ? DensitySpec<D>::induced_polar(q, K, rule)
                                                                   : DensitySpec<D>::uniform(Kstar, rule);
    const PointSampler<D> point_proto(rho);
    res.arm_b.assign(trials, 0.0);
    parallel_for(trials, threads, [&] {
      return [&, sampler = point_proto, eval = eval_proto, pts = std::vector<Vec<D>>(),
              planes = std::vector<Hyperplane<D>>()](std::size_t k) mutable {
        Stream s(StreamKey{seed, k, StreamRole::Point});
        sampler.draw_into(s, pts, n);
        planes.clear();
        for (const auto& x : pts) {
          const double len = x.norm();
          planes.push_back({Direction<D>(Vec<D>(x / len)), 1.0 / len});
        }
        res.arm_b[k] = eval.clipped_volume(planes);
      };
    });
  }
  res.statistic = stats::ks_statistic(res.arm_a, res.arm_b);
  res.critical = stats::ks_critical(0.01, trials, trials);
  res.reject = res.statistic > res.critical;
  return res;
}

// ---------------------------------------------------------------------------
// Probability that the hull misses the origin
// ---------------------------------------------------------------------------

/// True when o is not in conv(points). d=2: some open half-plane through o
/// holds all points iff the largest angular gap exceeds π. d=3: all points
/// lie in a closed hemisphere whose boundary passes through two of them.
template <int D>
bool origin_outside_hull(std::span<const Vec<D>> points, std::vector<double>& scratch) {
  if (points.empty()) return true;
  if constexpr (D == 2) {
    scratch.clear();
    for (const auto& p : points) {
      if (p.squaredNorm() == 0.0) return false;
      scratch.push_back(std::atan2(p.y(), p.x()));
    }
    std::sort(scratch.begin(), scratch.end());
    double gap = scratch.front() + 2.0 * M_PI - scratch.back();
    for (std::size_t i = 1; i < scratch.size(); ++i) gap = std::max(gap, scratch[i] - scratch[i - 1]);
    return gap > M_PI;
  } else {
    (void)scratch;
    const std::size_t n = points.size();
    if (n < 4) return true;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const Vec<D> nrm = points[i].cross(points[j]);
        if (nrm.squaredNorm() == 0.0) continue;
        bool pos = true, neg = true;
        for (std::size_t k = 0; k < n && (pos || neg); ++k) {
          if (k == i || k == j) continue;
          const double s = nrm.dot(points[k]);
          if (s < 0.0) pos = false;
          if (s > 0.0) neg = false;
        }
        if (pos || neg) return true;
      }
    }
    return false;
  }
}

/// Minimum probability content of the 2^d coordinate orthants under rho,
/// by polar quadrature. Nodes on an orthant boundary are shared equally.
template <int D>
double min_orthant_mass(const DensitySpec<D>& rho, const SphereRule<D>& rule, int radial_nodes = 64) {
  const Body<D>& S = rho.support_body();
  if (!origin_interior(S)) throw Error(ErrorKind::Unsupported, "orthant masses need o inside the density support");
  const auto [gx, gw] = gauss_legendre(radial_nodes);
  std::vector<double> mass(1u << D, 0.0);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Vec<D>& u = rule.nodes[i];
    const double R = radial_unit(S, u);
    double ray = 0.0;
    for (int k = 0; k < radial_nodes; ++k) {
      const double t = 0.5 * R * (gx[k] + 1.0);
      ray += 0.5 * R * gw[k] * rho.formula(Vec<D>(t * u)) * std::pow(t, D - 1);
    }
    std::vector<unsigned> cells{0};
    for (int c = 0; c < D; ++c) {
      std::vector<unsigned> next;
      for (unsigned m : cells) {
        if (u[c] >= -1e-15) next.push_back(m | (1u << c));
        if (u[c] <= 1e-15) next.push_back(m);
      }
      cells = std::move(next);
    }
    for (unsigned m : cells) mass[m] += rule.weights[i] * ray / cells.size();
  }
  return *std::min_element(mass.begin(), mass.end());
}

struct MissRow {
  std::size_t n;
  std::size_t trials;
  std::size_t misses;
  double probability;
  double ci_half;
  double bound;  // 2^d (1 - gamma_1)^n
};

template <int D>
std::vector<MissRow> miss_probability(const DensitySpec<D>& rho, std::span<const std::size_t> n_grid,
                                      std::size_t trials, std::uint64_t seed, unsigned threads = default_threads(),
                                      double* gamma1_out = nullptr) {
  const double gamma1 = min_orthant_mass<D>(rho, sphere_rule<D>(D == 2 ? 1024 : 64));
  if (gamma1_out) *gamma1_out = gamma1;
  const PointSampler<D> proto(rho);
  std::vector<MissRow> rows;
  for (std::size_t n : n_grid) {
    std::vector<unsigned char> miss(trials, 0);
    parallel_for(trials, threads, [&] {
      return [&, sampler = proto, pts = std::vector<Vec<D>>(), scratch = std::vector<double>()](std::size_t k) mutable {
        Stream s(StreamKey{seed, k, StreamRole::Point});
        sampler.draw_into(s, pts, n);
        miss[k] = origin_outside_hull<D>(pts, scratch) ? 1 : 0;
      };
    });
    std::size_t count = 0;
    for (auto m : miss) count += m;
    const double p = static_cast<double>(count) / trials;
    const double ci = 1.959963984540054 * std::sqrt(std::max(p * (1.0 - p), 0.0) / trials);
    rows.push_back({n, trials, count, p, ci, std::pow(2.0, D) * std::pow(1.0 - gamma1, static_cast<double>(n))});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Asymptotic integral check
// ---------------------------------------------------------------------------

struct GammaCheck {
  double integral;   // ∫_0^{g(n)} t^β (1 - ω t^{(d+1)/2})_+^n dt
  double asymptote;  // 2/((d+1) ω^α) Γ(α) n^{-α}
  double ratio;
  double g;
};

/// Compares the integral against its asymptotic form with g(n) = γ (ln n / n)^{1/d}.
/// Substituting s = n ω t^{(d+1)/2} turns the integral into
/// (2/(d+1)) (nω)^{-α} ∫_0^{s_max} s^{α-1} (1 - s/n)^n ds, clamped at s = n.
inline GammaCheck gamma_lemma_check(double beta, double omega, int d, double n, double gamma_coef) {
  if (!(beta >= 0.0) || !(omega > 0.0) || !(gamma_coef > 0.0) || (d != 2 && d != 3) || !(n > 1.0)) {
    throw Error(ErrorKind::DomainError, "need beta >= 0, omega > 0, gamma > 0, d in {2,3}, n > 1");
  }
  const double alpha = 2.0 * (beta + 1.0) / (d + 1.0);
  const double logn_n = std::log(n) / n;
  const double g = gamma_coef * std::pow(logn_n, 1.0 / d);
  const double g_min = std::pow(2.0 * (alpha + 1.0) / omega * logn_n, 2.0 / (d + 1.0));
  if (g < g_min) {
    throw Error(ErrorKind::HypothesisError, "g(n) = " + std::to_string(g) + " is below the required " + std::to_string(g_min));
  }
  const double s_max = std::min(n * omega * std::pow(g, 0.5 * (d + 1)), n);
  auto f = [&](double s) {
    if (s <= 0.0) return 0.0;
    return std::exp((alpha - 1.0) * std::log(s) + n * std::log1p(-std::min(s / n, 1.0)));
  };
  // The integrand decays like e^{-s}; tanh-sinh takes the s^{α-1} endpoint.
  const double split = std::min(s_max, 64.0);
  boost::math::quadrature::tanh_sinh<double> ts;
  double inner = ts.integrate(f, 0.0, split);
  if (s_max > split) inner += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, split, s_max, 15, 1e-14);
  const double pre = 2.0 / (d + 1.0) * std::pow(n * omega, -alpha);
  GammaCheck out;
  out.integral = pre * inner;
  out.asymptote = 2.0 / ((d + 1.0) * std::pow(omega, alpha)) * std::tgamma(alpha) * std::pow(n, -alpha);
  out.ratio = out.integral / out.asymptote;
  out.g = g;
  return out;
}

// ---------------------------------------------------------------------------
// Single nested trajectory
// ---------------------------------------------------------------------------

struct TracePoint {
  std::size_t n;
  double difference;
  double scaled;
};

template <int D>
std::vector<TracePoint> lln_trace(const ExperimentConfig<D>& cfg) {
  cfg.validate();
  if (cfg.mode != Mode::InscribedMeanWidth) throw Error(ErrorKind::ConfigError, "trajectory trace runs in inscribed mode");
  const auto rule = sphere_rule<D>(cfg.quad_m);
  PointSampler<D> sampler(*cfg.rho);
  InscribedEvaluator<D> eval(cfg.body, cfg.q, rule);
  std::vector<Vec<D>> pts;
  Stream s(StreamKey{cfg.seed, 0, StreamRole::Point});
  sampler.draw_into(s, pts, cfg.n_grid.back());
  std::vector<TracePoint> out;
  for (std::size_t n : cfg.n_grid) {
    const double diff = eval(std::span<const Vec<D>>(pts.data(), n));
    out.push_back({n, diff, std::pow(static_cast<double>(n), mean_exponent(D)) * diff});
  }
  return out;
}

}  // namespace randpoly
