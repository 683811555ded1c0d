#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "randpoly/experiments.hpp"

using namespace randpoly;

namespace {

using V2 = Vec<2>;
using V3 = Vec<3>;

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::IoError;  // sentinel: nothing thrown
}

ExperimentConfig<2> disk_config(Mode mode, std::vector<std::size_t> grid, std::size_t trials, std::uint64_t seed = 7) {
  ExperimentConfig<2> cfg;
  cfg.mode = mode;
  cfg.body = make_ball<2>(V2::Zero(), 1.0);
  cfg.q = WeightSpec<2>::constant(1);
  cfg.lambda = WeightSpec<2>::constant(1);
  cfg.rho = DensitySpec<2>::uniform(cfg.body, sphere_rule<2>(64));
  cfg.n_grid = std::move(grid);
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.quad_m = 1024;
  return cfg;
}

double binom(int n, int k) { return std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)); }

/// P(o not in hull of n symmetric points in general position in R^d).
double wendel(int n, int d) {
  double s = 0.0;
  for (int k = 0; k < d; ++k) s += binom(n - 1, k);
  return s / std::pow(2.0, n - 1);
}

/// Direct composite-Simpson evaluation of ∫_0^g t^β (1 - ω t^{(d+1)/2})_+^n dt.
double gamma_integral_oracle(double beta, double omega, int d, double n, double g) {
  auto f = [&](double t) {
    const double base = 1.0 - omega * std::pow(t, 0.5 * (d + 1));
    if (base <= 0.0) return 0.0;
    return std::pow(t, beta) * std::exp(n * std::log(base));
  };
  return oracle::simpson(f, 0.0, g, 1000000);
}

}  // namespace

TEST(ExperimentConfig, Validation) {
  auto cfg = disk_config(Mode::InscribedMeanWidth, {10, 20}, 5);
  EXPECT_NO_THROW(cfg.validate());
  auto bad = cfg;
  bad.n_grid = {20, 10};
  EXPECT_EQ(kind_of([&] { bad.validate(); }), ErrorKind::ConfigError);
  bad = cfg;
  bad.n_grid = {10, 10};
  EXPECT_EQ(kind_of([&] { bad.validate(); }), ErrorKind::ConfigError);
  bad = cfg;
  bad.quad_m = 32;
  EXPECT_EQ(kind_of([&] { bad.validate(); }), ErrorKind::ConfigError);
  bad = cfg;
  bad.body = make_ball<2>(V2(2, 0), 1.0);
  EXPECT_EQ(kind_of([&] { bad.validate(); }), ErrorKind::ConfigError);
  bad = cfg;
  bad.rho.reset();
  EXPECT_EQ(kind_of([&] { bad.validate(); }), ErrorKind::ConfigError);
  bad = cfg;
  bad.n_grid.clear();
  EXPECT_EQ(kind_of([&] { bad.validate(); }), ErrorKind::ConfigError);
}

TEST(RunExperiment, InscribedSinglePointIsFullWidth) {
  const auto res = run_experiment(disk_config(Mode::InscribedMeanWidth, {1}, 2000));
  ASSERT_EQ(res.summary.size(), 1u);
  EXPECT_NEAR(res.summary[0].mean, 2.0, std::max(res.summary[0].ci_half, 1e-12));
  for (const auto& r : res.records) EXPECT_NEAR(r.value, 2.0, 1e-12);
}

TEST(RunExperiment, CircumscribedSinglePlaneMatchesSegmentOracle) {
  // One plane: u uniform, t uniform on [1,2]; the clipped set is the radius-2
  // disk cut at distance t.
  const double oracle_mean =
      oracle::simpson([](double t) { return oracle::disk_below_line(2.0, t); }, 1.0, 2.0, 20000) - M_PI;
  const auto res = run_experiment(disk_config(Mode::CircumscribedVolume, {1}, 100000));
  EXPECT_NEAR(res.summary[0].mean, oracle_mean, res.summary[0].ci_half);
}

TEST(RunExperiment, DeterministicAndThreadIndependent) {
  auto cfg = disk_config(Mode::CircumscribedVolume, {10, 40}, 200);
  cfg.threads = 1;
  const auto a = run_experiment(cfg);
  cfg.threads = 4;
  const auto b = run_experiment(cfg);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) ASSERT_EQ(a.records[i].value, b.records[i].value);
  cfg.seed = 8;
  const auto c = run_experiment(cfg);
  EXPECT_NE(a.records[0].value, c.records[0].value);
}

TEST(RunExperiment, MonotoneDifferencesBothModes) {
  for (Mode mode : {Mode::InscribedMeanWidth, Mode::CircumscribedVolume}) {
    const auto res = run_experiment(disk_config(mode, {3, 30, 300}, 300));
    for (const auto& r : res.records) EXPECT_GE(r.value, -1e-9) << to_string(mode);
    for (const auto& s : res.summary) {
      EXPECT_GE(s.var, 0.0);
      EXPECT_GT(s.ci_half, 0.0);
    }
  }
}

TEST(RunExperiment, ThreeDimensionalModes) {
  ExperimentConfig<3> cfg;
  cfg.body = make_ellipsoid<3>(V3::Zero(), V3(1.2, 1, 0.8));
  cfg.q = WeightSpec<3>::constant(1);
  cfg.lambda = WeightSpec<3>::constant(1);
  cfg.rho = DensitySpec<3>::uniform(cfg.body, sphere_rule<3>(16));
  cfg.n_grid = {20, 80};
  cfg.trials = 40;
  cfg.quad_m = 64;
  for (Mode mode : {Mode::InscribedMeanWidth, Mode::CircumscribedVolume}) {
    cfg.mode = mode;
    const auto res = run_experiment(cfg);
    for (const auto& r : res.records) EXPECT_GE(r.value, -1e-9);
    EXPECT_GT(res.summary[0].mean, res.summary[1].mean);
  }
}

TEST(Summary, GaussianInjectionRecovered) {
  std::mt19937_64 gen(99);
  const double mu = 3.5, sigma = 0.7;
  std::normal_distribution<double> nd(mu, sigma);
  std::vector<double> xs(20000);
  for (auto& x : xs) x = nd(gen);
  const auto row = detail::summarize(100, 2, xs, 0.0);
  const double n = static_cast<double>(xs.size());
  EXPECT_NEAR(row.mean, mu, 3 * sigma / std::sqrt(n));
  EXPECT_NEAR(row.var, sigma * sigma, 3 * sigma * sigma * std::sqrt(2.0 / (n - 1)));
  EXPECT_NEAR(row.scaled_mean, std::pow(100.0, 2.0 / 3.0) * row.mean, 1e-12);
  EXPECT_NEAR(row.scaled_var, std::pow(100.0, 5.0 / 3.0) * row.var, 1e-9);
}

TEST(FitScaling, ExactPowerLaw) {
  std::vector<SummaryRow> rows;
  for (std::size_t n = 100; n <= 6400; n *= 2) rows.push_back({n, 1, 7.0 * std::pow(n, -2.0 / 3.0), 0, 0, 0, 0, 0});
  const auto r = fit_scaling(rows, SeriesColumn::Mean);
  EXPECT_NEAR(r.slope, -2.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.intercept, std::log(7.0), 1e-12);
  EXPECT_NEAR(r.r_squared, 1.0, 1e-12);
}

TEST(FitScaling, PerturbedPowerLaw) {
  std::vector<SummaryRow> rows;
  std::vector<double> lx, le;
  int sign = 1;
  for (std::size_t n = 100; n <= 6400; n *= 2, sign = -sign) {
    rows.push_back({n, 1, 0, 3.0 * std::pow(n, -5.0 / 3.0) * (1 + 0.01 * sign), 0, 0, 0, 0});
    lx.push_back(std::log(static_cast<double>(n)));
    le.push_back(std::log(1 + 0.01 * sign));
  }
  const auto r = fit_scaling(rows, SeriesColumn::Variance);
  // OLS slope = -5/3 + cov(log n, log(1+0.01 eps)) / var(log n).
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
  const double me = std::accumulate(le.begin(), le.end(), 0.0) / le.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (le[i] - me);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  EXPECT_NEAR(r.slope, -5.0 / 3.0 + sxy / sxx, 1e-12);
  EXPECT_NEAR(r.slope, -5.0 / 3.0, 0.02);
}

TEST(FitScaling, Preconditions) {
  std::vector<SummaryRow> rows = {{10, 1, 1.0, 0, 0, 0, 0, 0}, {20, 1, 0.5, 0, 0, 0, 0, 0}};
  EXPECT_EQ(kind_of([&] { fit_scaling(rows, SeriesColumn::Mean); }), ErrorKind::DomainError);
  rows.push_back({40, 1, 0.0, 0, 0, 0, 0, 0});
  EXPECT_EQ(kind_of([&] { fit_scaling(rows, SeriesColumn::Mean); }), ErrorKind::DomainError);
}

TEST(EfronStein, IncrementsNonnegativeAndZeroForInteriorPoint) {
  const auto rows = efron_stein_check(disk_config(Mode::InscribedMeanWidth, {5, 50}, 500));
  for (const auto& r : rows) EXPECT_GE(r.min_delta, -1e-9);

  const auto rule = sphere_rule<2>(1024);
  InscribedEvaluator<2> eval(make_ball<2>(V2::Zero(), 1.0), WeightSpec<2>::constant(1), rule);
  std::vector<V2> pts = {V2(0.9, 0), V2(-0.5, 0.7), V2(-0.4, -0.8), V2(0.3, 0.2)};
  const double before = eval(pts);
  pts.push_back(V2(0.0, 0.05));
  EXPECT_EQ(eval(pts), before);
}

TEST(EfronStein, BoundDominatesVariance) {
  const auto rows = efron_stein_check(disk_config(Mode::InscribedMeanWidth, {50}, 5000));
  EXPECT_GE(rows[0].es_bound, rows[0].direct_var - rows[0].var_ci);
}

TEST(EfronStein, RequiresInscribedMode) {
  EXPECT_EQ(kind_of([] { efron_stein_check(disk_config(Mode::CircumscribedVolume, {5}, 10)); }), ErrorKind::ConfigError);
}

TEST(Duality, SelfTestGivesZero) {
  const auto res = duality_test<2>(make_ball<2>(V2::Zero(), 1.0), WeightSpec<2>::constant(1), 20, 500, 3,
                                   DualityVariant::SelfTest);
  EXPECT_EQ(res.statistic, 0.0);
  EXPECT_FALSE(res.reject);
}

TEST(Duality, Preconditions) {
  const auto one = WeightSpec<2>::constant(1);
  EXPECT_EQ(kind_of([&] { duality_test<2>(make_ball<2>(V2::Zero(), 1.0), one, 20, 499, 3); }), ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([&] { duality_test<2>(make_ellipsoid<2>(V2::Zero(), V2(2, 1)), one, 20, 500, 3); }),
            ErrorKind::ConfigError);
}

TEST(Duality, CriticalValue) { EXPECT_NEAR(stats::ks_critical(0.01, 2000, 2000), 0.0515, 5e-4); }

TEST(OriginOutsideHull, KnownConfigurations) {
  std::vector<double> scratch;
  std::vector<V2> tri = {V2(1, 0), V2(-0.5, 0.8), V2(-0.5, -0.8)};
  EXPECT_FALSE(origin_outside_hull<2>(tri, scratch));
  tri[0] = V2(-0.1, 0.0);
  EXPECT_TRUE(origin_outside_hull<2>(tri, scratch));
  std::vector<V3> tet = {V3(1, 1, 1), V3(1, -1, -1), V3(-1, 1, -1), V3(-1, -1, 1)};
  EXPECT_FALSE(origin_outside_hull<3>(tet, scratch));
  for (auto& p : tet) p[2] = std::abs(p[2]) + 0.1;
  EXPECT_TRUE(origin_outside_hull<3>(tet, scratch));
}

TEST(OriginOutsideHull, WendelProbabilities) {
  std::vector<double> scratch;
  const int trials = 20000;
  for (int n : {3, 4, 6}) {
    Stream s(StreamKey{31, static_cast<std::uint64_t>(n), StreamRole::Aux});
    int miss = 0;
    std::vector<V2> pts(n);
    for (int k = 0; k < trials; ++k) {
      for (auto& p : pts) p = random_direction<2>(s) * s.uniform_open();
      miss += origin_outside_hull<2>(pts, scratch);
    }
    const double p = wendel(n, 2);
    EXPECT_NEAR(static_cast<double>(miss) / trials, p, 4 * std::sqrt(p * (1 - p) / trials)) << n;
  }
  for (int n : {4, 5, 7}) {
    Stream s(StreamKey{32, static_cast<std::uint64_t>(n), StreamRole::Aux});
    int miss = 0;
    std::vector<V3> pts(n);
    for (int k = 0; k < trials; ++k) {
      for (auto& p : pts) p = random_direction<3>(s) * s.uniform_open();
      miss += origin_outside_hull<3>(pts, scratch);
    }
    const double p = wendel(n, 3);
    EXPECT_NEAR(static_cast<double>(miss) / trials, p, 4 * std::sqrt(p * (1 - p) / trials)) << n;
  }
}

TEST(MissProbability, UniformDisk) {
  const auto rho = DensitySpec<2>::uniform(make_ball<2>(V2::Zero(), 1.0), sphere_rule<2>(64));
  const std::vector<std::size_t> grid = {1, 2, 5, 10};
  double gamma1 = 0.0;
  const auto rows = miss_probability<2>(rho, grid, 20000, 5, default_threads(), &gamma1);
  EXPECT_NEAR(gamma1, 0.25, 1e-12);
  EXPECT_EQ(rows[0].probability, 1.0);
  EXPECT_EQ(rows[1].probability, 1.0);
  for (const auto& r : rows) {
    EXPECT_LE(r.probability, r.bound + 2 * r.ci_half);
    EXPECT_NEAR(r.bound, 4 * std::pow(0.75, r.n), 1e-12);
  }
  EXPECT_NEAR(rows[2].probability, wendel(5, 2), 4 * std::sqrt(wendel(5, 2) / 20000));
}

TEST(MissProbability, OrthantMassOfShiftedBody) {
  // Uniform on the square [-1,3] x [-1,1]: the smallest quadrant mass is 1/8.
  // The radial function has corners, so the angular rule converges at O(m^-2).
  const auto K = make_polytope<2>({V2(-1, -1), V2(3, -1), V2(3, 1), V2(-1, 1)});
  const auto rho = DensitySpec<2>::uniform(K, sphere_rule<2>(64));
  const double e1 = std::abs(min_orthant_mass<2>(rho, sphere_rule<2>(2048)) - 0.125);
  const double e2 = std::abs(min_orthant_mass<2>(rho, sphere_rule<2>(4096)) - 0.125);
  EXPECT_LT(e2, 1e-6);
  EXPECT_LT(e2, e1);
  const auto B3 = DensitySpec<3>::uniform(make_ball<3>(V3::Zero(), 1.0), sphere_rule<3>(16));
  EXPECT_NEAR(min_orthant_mass<3>(B3, sphere_rule<3>(64)), 0.125, 1e-9);
}

TEST(GammaIntegral, RatioNearOneAndMatchesDirectQuadrature) {
  for (const auto& [beta, d] : std::vector<std::pair<double, int>>{{0.0, 2}, {1.5, 2}, {0.0, 3}}) {
    const auto g = gamma_lemma_check(beta, 1.0, d, 1e6, 4.0);
    EXPECT_NEAR(g.ratio, 1.0, 0.03);
    const double direct = gamma_integral_oracle(beta, 1.0, d, 1e6, g.g);
    EXPECT_NEAR(g.integral / direct, 1.0, 1e-6) << beta << " " << d;
  }
}

TEST(GammaIntegral, ConvergesInN) {
  for (const auto& [beta, d] : std::vector<std::pair<double, int>>{{0.0, 2}, {1.5, 2}, {0.0, 3}}) {
    const double r5 = gamma_lemma_check(beta, 1.0, d, 1e5, 4.0).ratio;
    const double r7 = gamma_lemma_check(beta, 1.0, d, 1e7, 4.0).ratio;
    EXPECT_LT(std::abs(r7 - 1.0), std::abs(r5 - 1.0));
  }
}

TEST(GammaIntegral, NonUnitOmega) {
  const auto g = gamma_lemma_check(0.5, 2.5, 3, 1e6, 4.0);
  EXPECT_NEAR(g.integral / gamma_integral_oracle(0.5, 2.5, 3, 1e6, g.g), 1.0, 1e-6);
  EXPECT_NEAR(g.ratio, 1.0, 0.03);
}

TEST(GammaIntegral, Hypotheses) {
  EXPECT_EQ(kind_of([] { gamma_lemma_check(0.0, 1.0, 2, 1e6, 0.01); }), ErrorKind::HypothesisError);
  EXPECT_EQ(kind_of([] { gamma_lemma_check(-1.0, 1.0, 2, 1e6, 4.0); }), ErrorKind::DomainError);
  EXPECT_EQ(kind_of([] { gamma_lemma_check(0.0, 0.0, 2, 1e6, 4.0); }), ErrorKind::DomainError);
  EXPECT_EQ(kind_of([] { gamma_lemma_check(0.0, 1.0, 4, 1e6, 4.0); }), ErrorKind::DomainError);
}

TEST(LlnTrace, NestedAndReproducible) {
  auto cfg = disk_config(Mode::InscribedMeanWidth, {10, 100, 1000, 10000}, 1, 11);
  const auto a = lln_trace(cfg);
  const auto b = lln_trace(cfg);
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].difference, b[i].difference);
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_LE(a[i].difference, a[i - 1].difference + 1e-12);
  const auto rule = sphere_rule<2>(1024);
  const double limit =
      limit_rhs<2>(Mode::InscribedMeanWidth, cfg.body, cfg.q, &*cfg.rho, cfg.lambda, rule);
  EXPECT_NEAR(a.back().scaled / limit, 1.0, 0.25);
}
