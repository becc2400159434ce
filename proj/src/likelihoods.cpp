#include "wsnd/likelihoods.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace wsnd {

namespace {

constexpr Complex kJ{0.0, 1.0};
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

Complex cf_h0(const Eigen::VectorXd& omega, const LikelihoodParams& p) {
  Complex log_cf = 0.0;
  for (Eigen::Index n = 0; n < omega.size(); ++n)
    log_cf -= static_cast<double>(p.window_len) *
              std::log(1.0 - kJ * omega(n) * p.sigma_v2 / p.beta);
  return std::exp(log_cf);
}

Complex cf_h1_exact(const Eigen::VectorXd& omega, const Eigen::VectorXcd& h,
                    const LikelihoodParams& p) {
  if (p.eigenvalues.size() != p.window_len)
    throw InvalidParamError("cf_h1_exact: eigenvalues of the source covariance required");
  // s = sum_n |h_n|^2 w_n / (1 - j w_n sigma_v^2 / beta)
  Complex s = 0.0;
  Complex log_cf = 0.0;
  for (Eigen::Index n = 0; n < omega.size(); ++n) {
    const Complex denom = 1.0 - kJ * omega(n) * p.sigma_v2 / p.beta;
    s += std::norm(h(n)) * omega(n) / denom;
    log_cf -= static_cast<double>(p.window_len) * std::log(denom);
  }
  for (Eigen::Index m = 0; m < p.eigenvalues.size(); ++m)
    log_cf -= std::log(1.0 - kJ * p.eigenvalues(m) / p.beta * s);
  return std::exp(log_cf);
}

Complex cf_h1_approx(const Eigen::VectorXd& omega, const Eigen::VectorXcd& h,
                     const LikelihoodParams& p) {
  Complex log_cf = 0.0;
  for (Eigen::Index n = 0; n < omega.size(); ++n) {
    const Complex denom = 1.0 - kJ * omega(n) * p.sigma_v2 / p.beta;
    log_cf += kJ * p.trace_s * std::norm(h(n)) * omega(n) / (p.beta * denom);
    log_cf -= static_cast<double>(p.window_len) * std::log(denom);
  }
  return std::exp(log_cf);
}

Complex cf_ff_avg(double omega, double d, const LikelihoodParams& p) {
  const Complex a = 1.0 - kJ * omega * p.sigma_v2 / p.beta;
  const Complex b = 1.0 - kJ * omega * (p.sigma_v2 + d) / p.beta;
  return std::exp(-static_cast<double>(p.window_len - 1) * std::log(a) -
                  std::log(b));
}

double log_pdf_h0(double energy, const LikelihoodParams& p) {
  if (energy < 0.0) return kNegInf;
  const int m = p.window_len;
  const double scale = p.sigma_v2 / p.beta;  // Gamma scale
  return (m - 1) * std::log(energy) - energy / scale - m * std::log(scale) -
         std::lgamma(static_cast<double>(m));
}

double log_pdf_marginal_h1(double energy, double h2, const LikelihoodParams& p,
                           bool* perturbed) {
  if (perturbed != nullptr) *perturbed = false;
  if (energy < 0.0) return kNegInf;
  if (p.eigenvalues.size() != p.window_len)
    throw InvalidParamError("log_pdf_marginal_h1: eigenvalues required");
  if (h2 == 0.0) return log_pdf_h0(energy, p);

  const int m = p.window_len;
  const double lambda_max = p.eigenvalues(m - 1);
  const double rel_gap_tol = 1e-8;

  // All-equal spectrum: white-source Gamma closed form.
  const double spread = p.eigenvalues(m - 1) - p.eigenvalues(0);
  if (spread <= rel_gap_tol * std::abs(lambda_max)) {
    const double scale = (p.eigenvalues(0) * h2 + p.sigma_v2) / p.beta;
    return (m - 1) * std::log(energy) - energy / scale - m * std::log(scale) -
           std::lgamma(static_cast<double>(m));
  }

  // Separate clustered eigenvalues so the partial fractions stay finite.
  std::vector<double> lam(p.eigenvalues.data(), p.eigenvalues.data() + m);
  std::sort(lam.begin(), lam.end());
  for (int pass = 0; pass < 3; ++pass) {
    bool clustered = false;
    for (int i = 1; i < m; ++i) {
      if (lam[i] - lam[i - 1] < rel_gap_tol * std::abs(lambda_max)) {
        lam[i] = lam[i - 1] + 1e-7 * std::max(std::abs(lambda_max), 1.0) *
                                  (pass + 1.0);
        if (perturbed != nullptr) *perturbed = true;
        clustered = true;
      }
    }
    if (!clustered) break;
    if (pass == 2) throw DegenerateSpectrumError(
        "log_pdf_marginal_h1: could not separate eigenvalue clusters");
  }

  // p(E) = sum_m w_m (beta/a_m) exp(-beta E / a_m), a_m = lambda_m h2 + sigma_v^2,
  // w_m = prod_{j != m} a_m / (a_m - a_j). Signed log-sum-exp.
  std::vector<double> a(m);
  for (int i = 0; i < m; ++i) a[i] = lam[i] * h2 + p.sigma_v2;

  double max_log = kNegInf;
  std::vector<double> logs(m);
  std::vector<double> signs(m);
  for (int i = 0; i < m; ++i) {
    double lt = std::log(p.beta) - std::log(a[i]) - p.beta * energy / a[i];
    double sign = 1.0;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      const double diff = a[i] - a[j];
      lt += std::log(a[i]) - std::log(std::abs(diff));
      if (diff < 0.0) sign = -sign;
    }
    logs[i] = lt;
    signs[i] = sign;
    max_log = std::max(max_log, lt);
  }
  double acc = 0.0;
  for (int i = 0; i < m; ++i) acc += signs[i] * std::exp(logs[i] - max_log);
  if (acc <= 0.0) return kNegInf;  // cancellation down to roundoff
  return max_log + std::log(acc);
}

double log_pdf_sf(double energy, double c, const LikelihoodParams& p) {
  if (energy < 0.0) return kNegInf;
  if (c <= p.param_floor()) return log_pdf_h0(energy, p);
  const int m = p.window_len;
  if (energy == 0.0) return m > 1 ? kNegInf : log_pdf_sf(1e-300, c, p);
  const double bessel_arg =
      2.0 * std::sqrt(p.beta * c) * std::sqrt(energy) / p.sigma_v2;
  return std::log(p.beta / p.sigma_v2) -
         (p.beta / p.sigma_v2) * (energy + c / p.beta) +
         0.5 * (m - 1) * (std::log(p.beta) + std::log(energy) - std::log(c)) +
         log_bessel_i(m - 1, bessel_arg);
}

double log_pdf_ff(double energy, double d, const LikelihoodParams& p) {
  const int m = p.window_len;
  if (m < 2) throw InvalidParamError("log_pdf_ff: M >= 2 required");
  if (energy < 0.0) return kNegInf;
  d = std::max(d, p.param_floor());
  const double total = p.sigma_v2 + d;
  const double gamma_arg = p.beta * d * energy / (p.sigma_v2 * total);
  return std::log(p.beta) + (m - 2) * std::log(total) - (m - 1) * std::log(d) -
         p.beta * energy / total +
         log_gamma_lower_regularized(static_cast<double>(m - 1), gamma_arg);
}

}  // namespace wsnd
