#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>

#include "test_util.hpp"
#include "wsnd/numerics.hpp"
#include "wsnd/rng.hpp"

using wsnd::Complex;

namespace {

Eigen::MatrixXcd toeplitz(int m, double rho) {
  Eigen::MatrixXcd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = std::pow(rho, std::abs(i - j));
  return a;
}

// Eigenvalues of a symmetric 3x3 via the trigonometric cubic formula.
std::array<double, 3> eig3_closed_form(const Eigen::Matrix3d& a) {
  const double q = a.trace() / 3.0;
  Eigen::Matrix3d b = a - q * Eigen::Matrix3d::Identity();
  const double p = std::sqrt((b * b).trace() / 6.0);
  const double det = (b / p).determinant() / 2.0;
  const double phi = std::acos(std::clamp(det, -1.0, 1.0)) / 3.0;
  std::array<double, 3> eig{q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0),
                            q + 2.0 * p * std::cos(phi - 2.0 * M_PI / 3.0),
                            q + 2.0 * p * std::cos(phi)};
  std::sort(eig.begin(), eig.end());
  return eig;
}

}  // namespace

TEST_CASE("cholesky_psd: identity and diagonal") {
  Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(3, 3);
  CHECK((wsnd::cholesky_psd(id) - id).norm() == doctest::Approx(0.0));

  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  Eigen::MatrixXcd l = wsnd::cholesky_psd(d);
  CHECK(l(0, 0).real() == doctest::Approx(2.0));
  CHECK(l(1, 1).real() == doctest::Approx(3.0));
  CHECK(std::abs(l(0, 1)) == 0.0);
}

TEST_CASE("cholesky_psd: Toeplitz reconstruction") {
  const Eigen::MatrixXcd a = toeplitz(8, 0.5);
  const Eigen::MatrixXcd l = wsnd::cholesky_psd(a);
  CHECK((l * l.adjoint() - a).norm() / a.norm() < 1e-12);
  // Strictly lower triangular output.
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j) CHECK(std::abs(l(i, j)) == 0.0);
}

TEST_CASE("cholesky_psd: singular PSD allowed, indefinite rejected") {
  Eigen::MatrixXcd ones = Eigen::MatrixXcd::Ones(3, 3);  // rank 1 PSD
  const Eigen::MatrixXcd l = wsnd::cholesky_psd(ones);
  CHECK((l * l.adjoint() - ones).norm() / ones.norm() < 1e-10);

  Eigen::MatrixXcd neg = Eigen::MatrixXcd::Identity(2, 2);
  neg(1, 1) = -1.0;
  CHECK_THROWS_AS((void)wsnd::cholesky_psd(neg), wsnd::NotPsdError);
}

TEST_CASE("hermitian_eigenvalues: diagonal, trace, cubic oracle") {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  d(2, 2) = 2.0;
  const Eigen::VectorXd ev = wsnd::hermitian_eigenvalues(d);
  CHECK(ev(0) == doctest::Approx(1.0));
  CHECK(ev(1) == doctest::Approx(2.0));
  CHECK(ev(2) == doctest::Approx(3.0));

  // Random Hermitian: trace identity.
  wsnd::RngStream rng(42, 0);
  Eigen::MatrixXcd r(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) r(i, j) = rng.complex_normal();
  Eigen::MatrixXcd h = r + r.adjoint();
  const Eigen::VectorXd evh = wsnd::hermitian_eigenvalues(h);
  CHECK(evh.sum() ==
        doctest::Approx(h.trace().real()).epsilon(1e-10));

  // 3x3 Toeplitz(1, .5, .25) against the closed-form cubic roots.
  Eigen::Matrix3d t;
  t << 1, .5, .25, .5, 1, .5, .25, .5, 1;
  const auto oracle = eig3_closed_form(t);
  const Eigen::VectorXd evt =
      wsnd::hermitian_eigenvalues(t.cast<Complex>());
  for (int i = 0; i < 3; ++i)
    CHECK(evt(i) == doctest::Approx(oracle[i]).epsilon(1e-12));
}

TEST_CASE("log_bessel_i: trivial points and series oracle") {
  CHECK(wsnd::log_bessel_i(0, 0.0) == 0.0);
  CHECK(wsnd::log_bessel_i(3, 0.0) ==
        -std::numeric_limits<double>::infinity());
  CHECK(wsnd::log_bessel_i(9, 7.5) ==
        doctest::Approx(testutil::log_bessel_i_oracle(9, 7.5)).epsilon(1e-12));
}

TEST_CASE("log_bessel_i: oracle grid incl. the series/asymptotic seam") {
  for (int order : {0, 1, 2, 5, 9, 20, 50, 127, 200, 500}) {
    for (double x : {0.05, 0.5, 2.0, 7.5, 0.75 * (order + 1.0),
                     0.8 * (order + 1.0), 0.85 * (order + 1.0), 40.0, 250.0,
                     260.0, 1000.0, 10000.0}) {
      if (x <= 0.0) continue;
      const double got = wsnd::log_bessel_i(order, x);
      const double want = testutil::log_bessel_i_oracle(order, x);
      // Tolerance on I itself after exponentiation: |exp(got-want)-1|<=1e-10.
      CHECK(std::abs(got - want) < 1e-10);
    }
  }
}

TEST_CASE("log_bessel_i: three-term recurrence") {
  for (double x : {0.1, 1.0, 10.0, 100.0}) {
    for (int nu : {1, 2, 5, 10, 25, 50}) {
      const double lm = wsnd::log_bessel_i(nu - 1, x);
      const double l0 = wsnd::log_bessel_i(nu, x);
      const double lp = wsnd::log_bessel_i(nu + 1, x);
      // I_{nu-1} - I_{nu+1} = (2 nu / x) I_nu, evaluated relative to I_{nu-1}.
      const double lhs = 1.0 - std::exp(lp - lm);
      const double rhs = (2.0 * nu / x) * std::exp(l0 - lm);
      CHECK(std::abs(lhs - rhs) < 1e-8 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("log_gamma_lower_regularized: closed forms and oracle") {
  for (double x : {0.1, 1.0, 3.0, 10.0})
    CHECK(wsnd::log_gamma_lower_regularized(1.0, x) ==
          doctest::Approx(std::log1p(-std::exp(-x))).epsilon(1e-13));
  CHECK(wsnd::log_gamma_lower_regularized(4.0, 0.0) ==
        -std::numeric_limits<double>::infinity());
  CHECK(std::exp(wsnd::log_gamma_lower_regularized(5.0, 5.0)) ==
        doctest::Approx(testutil::gamma_p_oracle(5.0, 5.0)).epsilon(1e-12));
}

TEST_CASE("log_gamma_lower_regularized: oracle grid, both branches") {
  for (double a : {0.5, 1.0, 2.0, 5.0, 9.0, 31.0, 127.0}) {
    for (double mult : {0.1, 0.5, 0.9, 1.0, 1.5, 3.0, 10.0}) {
      const double x = a * mult;
      const double got = std::exp(wsnd::log_gamma_lower_regularized(a, x));
      const double want = testutil::gamma_p_oracle(a, x);
      CHECK(std::abs(got - want) < 1e-12);
    }
  }
}

TEST_CASE("log_gamma_lower_regularized: monotone in x, saturates to 1") {
  const double a = 9.0;
  double prev = -std::numeric_limits<double>::infinity();
  for (double x = 0.5; x < 60.0; x += 0.5) {
    const double v = wsnd::log_gamma_lower_regularized(a, x);
    CHECK(v >= prev);
    prev = v;
  }
  const double xinf = a + 40.0 * std::sqrt(a);
  CHECK(std::exp(wsnd::log_gamma_lower_regularized(a, xinf)) > 1.0 - 1e-9);
}

TEST_CASE("sample_complex_gaussian: zero factor and identity moments") {
  wsnd::RngStream rng(7, 0);
  const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(4, 4);
  CHECK(wsnd::sample_complex_gaussian(zero, rng).norm() == 0.0);

  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(3, 3);
  const int n = 100000;
  Eigen::Vector3d second = Eigen::Vector3d::Zero();
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXcd z = wsnd::sample_complex_gaussian(id, rng);
    for (int k = 0; k < 3; ++k) second(k) += std::norm(z(k));
  }
  second /= n;
  // |z|^2 is Exp(1): stderr of the mean is 1/sqrt(n).
  const double tol = 5.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < 3; ++k) CHECK(std::abs(second(k) - 1.0) < tol);
}

TEST_CASE("sample_complex_gaussian: recovers the target covariance") {
  const Eigen::MatrixXcd sigma = toeplitz(4, 0.5);
  const Eigen::MatrixXcd l = wsnd::cholesky_psd(sigma);
  wsnd::RngStream rng(11, 3);
  const int n = 50000;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(4, 4);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXcd z = wsnd::sample_complex_gaussian(l, rng);
    acc += z * z.adjoint();
  }
  acc /= n;
  // Entry-wise stderr is O(1/sqrt(n)); entries here are O(1).
  const double tol = 5.0 * 1.5 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(std::abs(acc(i, j) - sigma(i, j)) < tol);
}

TEST_CASE("maximize_scalar_bounded: quadratic, boundary, NaN") {
  const auto quad = [](double x) { return -(x - 2.0) * (x - 2.0); };
  const auto r1 = wsnd::maximize_scalar_bounded(quad, 0.0, 10.0, 5.0);
  CHECK(r1.x == doctest::Approx(2.0).epsilon(1e-6));

  const auto mono = [](double x) { return -x; };
  const auto r2 = wsnd::maximize_scalar_bounded(mono, 1.0, 5.0, 3.0);
  CHECK(r2.x == doctest::Approx(1.0));
  CHECK(r2.value == doctest::Approx(-1.0));

  const auto bad = [](double x) {
    return x > 2.0 ? std::numeric_limits<double>::quiet_NaN() : x;
  };
  CHECK_THROWS_AS((void)wsnd::maximize_scalar_bounded(bad, 0.0, 4.0, 1.0),
                  wsnd::NonFiniteError);
}

TEST_CASE("maximize_scalar_bounded: unimodal grid dominance") {
  // Skewed unimodal objective (log-Gamma-density shape); the returned value
  // must dominate a 10^4-point grid within tolerance.
  const auto f = [](double x) { return 3.0 * std::log(x + 5.0) - (x + 5.0); };
  const auto r = wsnd::maximize_scalar_bounded(f, -4.9, 20.0, 0.0);
  double grid_best = -1e300;
  for (int i = 0; i <= 10000; ++i)
    grid_best = std::max(grid_best, f(-4.9 + 24.9 * i / 10000.0));
  CHECK(r.value >= grid_best - 1e-6 * (1.0 + std::abs(grid_best)));
  CHECK(r.x == doctest::Approx(-2.0).epsilon(1e-5));  // max at x + 5 = 3
}

TEST_CASE("RngStream: reproducible and stream-separated") {
  wsnd::RngStream a(123, 5), b(123, 5), c(123, 6);
  bool same = true, diff = false;
  for (int i = 0; i < 256; ++i) {
    const auto va = a.next_u64();
    same = same && va == b.next_u64();
    diff = diff || va != c.next_u64();
  }
  CHECK(same);
  CHECK(diff);

  // substream determinism
  wsnd::RngStream p(9, 1);
  wsnd::RngStream s1 = p.substream(77);
  wsnd::RngStream s2 = p.substream(77);
  CHECK(s1.next_u64() == s2.next_u64());
}
