#include <doctest.h>

#include <cmath>
#include <vector>

#include "test_util.hpp"
#include "wsnd/bounds.hpp"

namespace {

wsnd::LikelihoodParams bound_params(int m, double eps = 0.25) {
  wsnd::LikelihoodParams p;
  p.window_len = m;
  p.sigma_v2 = 1.0;
  p.beta = wsnd::beta_scaling(m, eps);
  const wsnd::SourceModel src =
      wsnd::build_source_covariance(/*source_power=*/1.0, /*window_time=*/1.0,
                                    m, /*rho=*/0.5);
  p.trace_s = src.trace;
  p.eigenvalues = src.eigenvalues;
  return p;
}

Eigen::VectorXcd unit_gains(int n, double mag) {
  Eigen::VectorXcd h(n);
  for (int i = 0; i < n; ++i)
    h(i) = std::complex<double>(mag * std::cos(0.3 * i + 0.1),
                                mag * std::sin(0.3 * i + 0.1));
  return h;
}

}  // namespace

TEST_CASE("bounds: zero channel gains give zero error both ways") {
  const wsnd::LikelihoodParams p = bound_params(16);
  const Eigen::VectorXcd h = Eigen::VectorXcd::Zero(3);
  wsnd::RngStream rng(70, 0);
  const wsnd::BoundEstimate mc = wsnd::cf_l1_distance_mc(p, h, 2000, rng);
  CHECK(mc.value == doctest::Approx(0.0));
  CHECK(wsnd::analytic_error_bound(p, h, 3) == doctest::Approx(0.0));
}

TEST_CASE("bounds: MC error decreases with the window length") {
  // The chi-square approximation sharpens as M grows (CLT in the window),
  // so the L1 CF distance should fall along M = 8, 32, 128 at N = 1.
  wsnd::RngStream rng(71, 0);
  std::vector<double> vals;
  for (int m : {8, 32, 128}) {
    const wsnd::LikelihoodParams p = bound_params(m);
    wsnd::RngStream sub = rng.substream(m);
    const Eigen::VectorXcd h = unit_gains(1, 0.8);
    vals.push_back(wsnd::cf_l1_distance_mc(p, h, 50000, sub).value);
  }
  CHECK(vals[0] > vals[1]);
  CHECK(vals[1] > vals[2]);
}

TEST_CASE("bounds: MC stderr scales like 1/sqrt(n)") {
  const wsnd::LikelihoodParams p = bound_params(16);
  const Eigen::VectorXcd h = unit_gains(2, 0.7);
  std::vector<double> se;
  for (std::int64_t n : {1000, 10000, 100000}) {
    wsnd::RngStream rng(72, static_cast<std::uint64_t>(n));
    const wsnd::BoundEstimate est = wsnd::cf_l1_distance_mc(p, h, n, rng);
    CHECK(est.n_samples == n);
    CHECK(est.method == wsnd::BoundMethod::kMonteCarlo);
    se.push_back(est.stderr_);
  }
  // Each decade should shrink stderr by sqrt(10) within a factor of 1.5.
  for (int i = 0; i + 1 < 3; ++i) {
    const double ratio = se[i] / se[i + 1];
    CHECK(ratio > std::sqrt(10.0) / 1.5);
    CHECK(ratio < std::sqrt(10.0) * 1.5);
  }
}

TEST_CASE("bounds: analytic bound is monotone nonincreasing in M") {
  const Eigen::VectorXcd h = unit_gains(2, 0.5);
  double prev = -1.0;
  bool first = true;
  for (int m : {8, 16, 32}) {
    const wsnd::LikelihoodParams p = bound_params(m);
    const double b = wsnd::analytic_error_bound(p, h, 2);
    CHECK(std::isfinite(b));
    CHECK(b >= 0.0);
    if (!first) CHECK(b <= prev);
    prev = b;
    first = false;
  }
}

TEST_CASE("bounds: analytic bound rejects odd or tiny M") {
  const Eigen::VectorXcd h = unit_gains(1, 0.5);
  CHECK_THROWS_AS((void)wsnd::analytic_error_bound(bound_params(15), h, 1),
                  wsnd::InvalidParamError);
  CHECK_THROWS_AS((void)wsnd::analytic_error_bound(bound_params(2), h, 1),
                  wsnd::InvalidParamError);
}

TEST_CASE("bounds: MC estimate sits below the analytic bound") {
  const wsnd::LikelihoodParams p = bound_params(16);
  const Eigen::VectorXcd h = unit_gains(2, 0.6);
  wsnd::RngStream rng(73, 0);
  const wsnd::BoundEstimate mc = wsnd::cf_l1_distance_mc(p, h, 50000, rng);
  const double analytic = wsnd::analytic_error_bound(p, h, 2);
  CHECK(mc.value <= analytic + 3.0 * mc.stderr_);
}

TEST_CASE("bounds: two independent half-sample estimates agree") {
  const wsnd::LikelihoodParams p = bound_params(16);
  const Eigen::VectorXcd h = unit_gains(3, 0.6);
  wsnd::RngStream r1(74, 1), r2(74, 2);
  const wsnd::BoundEstimate a = wsnd::cf_l1_distance_mc(p, h, 30000, r1);
  const wsnd::BoundEstimate b = wsnd::cf_l1_distance_mc(p, h, 30000, r2);
  const double se = std::sqrt(a.stderr_ * a.stderr_ + b.stderr_ * b.stderr_);
  CHECK(std::abs(a.value - b.value) <= 3.0 * se);
}

TEST_CASE("bounds: fast-fading MC estimate is finite and nonnegative") {
  const wsnd::LikelihoodParams p = bound_params(16);
  const Eigen::VectorXd variances = Eigen::VectorXd::Constant(2, 0.5);
  wsnd::RngStream rng(75, 0);
  const wsnd::BoundEstimate est =
      wsnd::cf_l1_distance_mc_ff(p, variances, 5000, 32, rng);
  CHECK(std::isfinite(est.value));
  CHECK(est.value >= 0.0);
  CHECK(est.stderr_ >= 0.0);
}

TEST_CASE("bounds: experiment table shape and row-wise dominance") {
  wsnd::ScenarioConfig cfg;
  cfg.window_len = 16;
  cfg.beta_epsilon = 0.25;
  cfg.n_windows = 4;
  const std::vector<int> n_values = {1, 2, 4};
  wsnd::RngStream rng(76, 0);
  const std::vector<wsnd::BoundRow> rows =
      wsnd::bound_vs_n_experiment(cfg, n_values, 20000, rng);
  REQUIRE(rows.size() == n_values.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].n_nodes == n_values[i]);
    CHECK(std::isfinite(rows[i].mc_bound));
    CHECK(rows[i].mc_bound >= 0.0);
    CHECK(rows[i].analytic_bound >= 0.0);
    CHECK(rows[i].mc_bound <= rows[i].analytic_bound + 3.0 * rows[i].mc_stderr);
  }
}

TEST_CASE("bounds: experiment reproducible under the same seed") {
  wsnd::ScenarioConfig cfg;
  cfg.window_len = 16;
  cfg.beta_epsilon = 0.25;
  wsnd::RngStream r1(77, 0), r2(77, 0);
  const auto a = wsnd::bound_vs_n_experiment(cfg, {1, 2}, 5000, r1);
  const auto b = wsnd::bound_vs_n_experiment(cfg, {1, 2}, 5000, r2);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].mc_bound == b[i].mc_bound);
    CHECK(a[i].analytic_bound == b[i].analytic_bound);
  }
}
