#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "wsnd/measurement.hpp"

namespace wsnd {

enum class BoundMethod { kMonteCarlo, kAnalytic };

struct BoundEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::int64_t n_samples = 0;
  BoundMethod method = BoundMethod::kMonteCarlo;
};

// Importance-sampling estimate of (2 pi)^-N int |Psi1 - Psi1_hat| d omega
// for fixed channel gains (slow fading). Proposal: per-dimension scaled
// Student-t with nu = M - 1 and scale beta / (sigma_v^2 sqrt(M-1)), which
// matches the shared (1 + sigma_v^4 w^2 / beta^2)^(-M/2) envelope exactly.
BoundEstimate cf_l1_distance_mc(const LikelihoodParams& p,
                                const Eigen::VectorXcd& h,
                                std::int64_t n_samples, RngStream& rng);

// Fast-fading variant: the exact CF is replaced by an inner Monte Carlo
// average over k_channel Rayleigh gain draws (redrawn per omega sample) and
// the approximation by the closed-form product of averaged per-node CFs.
BoundEstimate cf_l1_distance_mc_ff(const LikelihoodParams& p,
                                   const Eigen::VectorXd& variances,
                                   std::int64_t n_samples, int k_channel,
                                   RngStream& rng);

// Closed-form assembly of the analytic approximation-error bound
// (requires even M >= 4; double factorials computed in the log domain).
double analytic_error_bound(const LikelihoodParams& p,
                            const Eigen::VectorXcd& h, int n_nodes);

struct BoundRow {
  int n_nodes;
  double mc_bound;
  double mc_stderr;
  double analytic_bound;
};

// One scenario realization per N: nodes, variances, gains drawn from cfg,
// then both bounds evaluated (semi-log-ready table).
std::vector<BoundRow> bound_vs_n_experiment(const ScenarioConfig& cfg,
                                            const std::vector<int>& n_values,
                                            std::int64_t n_samples,
                                            RngStream& rng);

}  // namespace wsnd
