#include "wsnd/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace wsnd {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

}  // namespace

Eigen::MatrixXcd cholesky_psd(const Eigen::MatrixXcd& a) {
  const Eigen::Index n = a.rows();
  if (n == 0 || a.cols() != n) throw InvalidParamError("cholesky_psd: square matrix required");
  const double trace = a.trace().real();
  const double tol = 1e-12 * std::abs(trace) / static_cast<double>(n);

  Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = a(j, j).real();
    for (Eigen::Index k = 0; k < j; ++k) pivot -= std::norm(l(j, k));
    if (pivot < -tol) throw NotPsdError("cholesky_psd: matrix is not PSD");
    if (pivot <= tol) {
      // Semidefinite direction: zero column.
      continue;
    }
    const double d = std::sqrt(pivot);
    l(j, j) = d;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      Complex s = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / d;
    }
  }
  return l;
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw InvalidParamError("hermitian_eigenvalues: square matrix required");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("hermitian_eigenvalues: no convergence");
  return solver.eigenvalues();  // ascending
}

namespace {

// Power series sum_k (x^2/4)^k / (k! (nu+1)...(nu+k)), accumulated with
// rescaling so arbitrarily large sums stay representable.
double log_bessel_series(int nu, double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  double log_scale = 0.0;
  for (int k = 0;; ++k) {
    const double ratio = q / ((k + 1.0) * (nu + k + 1.0));
    term *= ratio;
    sum += term;
    if (ratio < 1.0 && term < sum * 1e-18) break;
    if (sum > 1e250) {
      sum *= 1e-250;
      term *= 1e-250;
      log_scale += 250.0 * std::log(10.0);
    }
  }
  return nu * std::log(0.5 * x) - std::lgamma(nu + 1.0) + std::log(sum) + log_scale;
}

// Coefficients of the Debye polynomials u_k(t), generated from
// u_{k+1} = t^2(1-t^2)/2 u_k' + 1/8 int_0^t (1-5s^2) u_k(s) ds.
std::vector<std::vector<double>> make_debye_polys(int kmax) {
  std::vector<std::vector<double>> u(kmax + 1);
  u[0] = {1.0};
  for (int k = 0; k < kmax; ++k) {
    const auto& p = u[k];
    std::vector<double> next(p.size() + 3, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == 0.0) continue;
      // t^2 (1 - t^2) / 2 * d/dt [t^i]
      if (i >= 1) {
        next[i + 1] += 0.5 * static_cast<double>(i) * p[i];
        next[i + 3] -= 0.5 * static_cast<double>(i) * p[i];
      }
      // 1/8 int_0^t (1 - 5 s^2) s^i ds
      next[i + 1] += p[i] / (8.0 * (i + 1.0));
      next[i + 3] -= 5.0 * p[i] / (8.0 * (i + 3.0));
    }
    while (!next.empty() && next.back() == 0.0) next.pop_back();
    u[k + 1] = std::move(next);
  }
  return u;
}

// Uniform (Debye-type) asymptotic expansion, written with r = 1/sqrt(nu^2+x^2)
// and t = nu * r so the order-zero case needs no special handling
// (u_k has lowest power t^k, so u_k(t)/nu^k = r^k * [u_k(t)/t^k]).
double log_bessel_debye(int nu, double x) {
  static const std::vector<std::vector<double>> u = make_debye_polys(12);
  const double s = std::hypot(static_cast<double>(nu), x);
  const double r = 1.0 / s;
  const double t = nu * r;
  double correction = 0.0;
  double rk = 1.0;
  for (std::size_t k = 0; k < u.size(); ++k, rk *= r) {
    // u_k(t) / t^k evaluated as a polynomial in t.
    double poly = 0.0;
    for (std::size_t i = u[k].size(); i-- > k;) poly = poly * t + u[k][i];
    correction += rk * poly;
  }
  double exponent = s;
  if (nu > 0) exponent += nu * std::log(x / (nu + s));
  return exponent - 0.5 * std::log(2.0 * kPi) - 0.25 * std::log(s * s) +
         std::log(correction);
}

}  // namespace

double log_bessel_i(int order, double x) {
  if (order < 0 || x < 0.0 || !std::isfinite(x))
    throw InvalidParamError("log_bessel_i: order >= 0 and finite x >= 0 required");
  if (x == 0.0) return order == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  // The series has no cancellation, so it is kept as the reference path for
  // all small arguments; the Debye expansion takes over only where its tail
  // is provably below 1e-12.
  if (x < 0.8 * (order + 1.0) || x <= 256.0) return log_bessel_series(order, x);
  return log_bessel_debye(order, x);
}

double log_gamma_lower_regularized(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || !std::isfinite(a) || !std::isfinite(x))
    throw InvalidParamError("log_gamma_lower_regularized: a > 0 and x >= 0 required");
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  if (x < a + 1.0) {
    // Series: P = x^a e^-x / Gamma(a+1) * sum_n x^n / ((a+1)...(a+n)).
    double term = 1.0;
    double sum = 1.0;
    for (int n = 1; n < 10000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (term < sum * 1e-17) break;
    }
    return a * std::log(x) - x - std::lgamma(a + 1.0) + std::log(sum);
  }
  // Continued fraction (modified Lentz) for Q = 1 - P.
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double frac = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    frac *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  const double log_q = a * std::log(x) - x - std::lgamma(a) + std::log(frac);
  const double q = std::exp(log_q);
  if (q >= 1.0) return -std::numeric_limits<double>::infinity();
  return std::log1p(-q);
}

Eigen::VectorXcd sample_complex_gaussian(const Eigen::MatrixXcd& chol,
                                         RngStream& rng) {
  const Eigen::Index n = chol.rows();
  Eigen::VectorXcd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = rng.complex_normal();
  return chol * w;
}

ScalarMaxResult maximize_scalar_bounded(const std::function<double(double)>& f,
                                        double lo, double hi, double x0,
                                        double tol) {
  if (!(lo < hi) || x0 < lo || x0 > hi)
    throw InvalidParamError("maximize_scalar_bounded: need lo < hi and x0 in [lo, hi]");

  double best_x = x0;
  double best_f = -std::numeric_limits<double>::infinity();
  auto eval = [&](double x) {
    const double v = f(x);
    if (std::isnan(v)) throw NonFiniteError("maximize_scalar_bounded: f(x) is NaN");
    if (v > best_f) {
      best_f = v;
      best_x = x;
    }
    return -v;  // minimize the negation
  };

  eval(lo);
  eval(hi);

  // Brent's localmin on [lo, hi], seeded at x0.
  const double golden = 0.3819660112501051518;
  const double eps = std::sqrt(std::numeric_limits<double>::epsilon());
  double a = lo, b = hi;
  double x = x0, w = x0, v = x0;
  double fx = eval(x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;

  for (int iter = 0; iter < 200; ++iter) {
    const double xm = 0.5 * (a + b);
    const double tol1 = eps * std::abs(x) + tol * 0.25 * (std::abs(x) + 1.0) + 1e-300;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;

    bool golden_step = true;
    if (std::abs(e) > tol1) {
      // Parabolic fit through (x, w, v).
      const double rr = (x - w) * (fx - fv);
      double qq = (x - v) * (fx - fw);
      double pp = (x - v) * qq - (x - w) * rr;
      qq = 2.0 * (qq - rr);
      if (qq > 0.0) pp = -pp;
      qq = std::abs(qq);
      const double etemp = e;
      e = d;
      if (std::abs(pp) < std::abs(0.5 * qq * etemp) && pp > qq * (a - x) &&
          pp < qq * (b - x)) {
        d = pp / qq;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = std::copysign(tol1, xm - x);
        golden_step = false;
      }
    }
    if (golden_step) {
      e = (x >= xm) ? a - x : b - x;
      d = golden * e;
    }
    const double u = (std::abs(d) >= tol1) ? x + d : x + std::copysign(tol1, d);
    const double fu = eval(u);
    if (fu <= fx) {
      if (u >= x) a = x; else b = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  return {best_x, best_f};
}

}  // namespace wsnd
