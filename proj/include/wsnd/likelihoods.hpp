#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

#include "wsnd/numerics.hpp"

namespace wsnd {

struct DegenerateSpectrumError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Everything the energy likelihoods depend on. `eigenvalues` is only needed
// by the exact CF and the exact marginal; the factorized densities use the
// trace alone.
struct LikelihoodParams {
  int window_len = 0;      // M
  double beta = 1.0;       // beta(M)
  double sigma_v2 = 1.0;   // noise power per complex sample
  double trace_s = 0.0;    // Tr(Sigma_s)
  Eigen::VectorXd eigenvalues;  // lambda_m, ascending, optional

  double param_floor() const { return 1e-12 * sigma_v2; }
};

// Joint CF of E under H0: prod_n (1 - j w_n sigma_v^2 / beta)^-M.
Complex cf_h0(const Eigen::VectorXd& omega, const LikelihoodParams& p);

// Exact joint CF of E under H1 conditioned on the channel gains.
Complex cf_h1_exact(const Eigen::VectorXd& omega, const Eigen::VectorXcd& h,
                    const LikelihoodParams& p);

// Factorized large-M approximation of the H1 CF (product of per-node
// noncentral chi-square CFs).
Complex cf_h1_approx(const Eigen::VectorXd& omega, const Eigen::VectorXcd& h,
                     const LikelihoodParams& p);

// Per-node H1 CF averaged over the Rayleigh gain law, d_n = Tr(Sigma_s) sigma_n^2:
// (1 - j sigma_v^2 w / beta)^-(M-1) * (1 - j (sigma_v^2 + d_n) w / beta)^-1.
Complex cf_ff_avg(double omega, double d, const LikelihoodParams& p);

// Per-node log density under H0: Gamma(shape M, scale sigma_v^2 / beta).
double log_pdf_h0(double energy, const LikelihoodParams& p);

// Exact marginal of E_n under H1 for squared gain h2, via the signed
// partial-fraction sum; degenerate eigenvalue clusters are perturbed by
// 1e-7 relative (reported through `perturbed` when non-null), and an
// all-equal spectrum falls back to the white-source Gamma closed form.
double log_pdf_marginal_h1(double energy, double h2, const LikelihoodParams& p,
                           bool* perturbed = nullptr);

// Per-node factor of the factorized slow-fading density, c = Tr(Sigma_s)|h_n|^2.
// c = 0 returns the H0 density (continuous limit).
double log_pdf_sf(double energy, double c, const LikelihoodParams& p);

// Per-node factor of the Rayleigh-averaged fast-fading density,
// d = Tr(Sigma_s) sigma_n^2. Requires M >= 2; d is clamped to the floor.
double log_pdf_ff(double energy, double d, const LikelihoodParams& p);

}  // namespace wsnd
