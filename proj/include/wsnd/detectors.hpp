#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "wsnd/measurement.hpp"

namespace wsnd {

enum class DetectorKind {
  kGlrtSf,
  kGlrtFf,
  kCsiSf,
  kCsiFf,
  kMd,   // mean detector
  kSd,   // square detector
  kMe,   // maximum eigenvalue of the sample covariance
  kSse,  // subspace eigenvalue detector
  kSc,   // selection combining
  kSsc,  // selection square combining
};

std::string detector_name(DetectorKind kind);
DetectorKind detector_from_name(const std::string& name);
const std::vector<DetectorKind>& all_detectors();
bool detector_needs_genie(DetectorKind kind);

enum class GlrtMode { kSlowFading, kFastFading };

// z = (E - mu0)/s0 with the exact H0 Gamma moments mu0 = M sigma_v^2/beta,
// s0 = sqrt(M) sigma_v^2/beta; m_{z,n} = sqrt(L) * mean_l z_{n,l}.
struct StandardizedEnergies {
  Eigen::MatrixXd z;
  Eigen::VectorXd node_means;  // m_{z,n}
};

StandardizedEnergies standardize(const EnergyMatrix& e,
                                 const LikelihoodParams& p);

// MLE of c = Tr(Sigma_s)|h|^2 for one node's energy row under the
// slow-fading factor; searched over log(c + floor) with Brent from a
// method-of-moments start. Returns a value >= 0.
double mle_c(const Eigen::VectorXd& energy_row, const LikelihoodParams& p);

// Same for d = Tr(Sigma_s) sigma_n^2 under the fast-fading factor.
double mle_d(const Eigen::VectorXd& energy_row, const LikelihoodParams& p);

// GLRT statistic: sum over nodes of the per-node MLE log likelihood ratio.
double glrt_statistic(const EnergyMatrix& e, const LikelihoodParams& p,
                      GlrtMode mode);

// Per-node inner sums of the GLRT (the locally computable statistics whose
// plain sum reproduces glrt_statistic bit-for-bit).
Eigen::VectorXd glrt_node_statistics(const EnergyMatrix& e,
                                     const LikelihoodParams& p, GlrtMode mode);

// Genie-aided variant: true per-node parameters instead of MLEs.
double csi_statistic(const EnergyMatrix& e, const LikelihoodParams& p,
                     const Eigen::VectorXd& true_params, GlrtMode mode);

double baseline_statistic(DetectorKind kind, const EnergyMatrix& e,
                          const LikelihoodParams& p);

// Any detector on a trial; genie detectors read c_true / d_true from `trial`.
double detector_statistic(DetectorKind kind, const EnergyMatrix& e,
                          const LikelihoodParams& p, const TrialDraw& trial);

// Empirical (1 - target_pfa) quantile of the H0 statistic over n_runs
// simulated trials (linear interpolation of order statistics). Warns on
// stderr when n_runs * target_pfa < 20.
double calibrate_threshold(DetectorKind kind, const ScenarioConfig& cfg,
                           const LikelihoodParams& p, double target_pfa,
                           int n_runs, RngStream& rng);

struct WilsonInterval {
  double lo;
  double hi;
};

// Wilson 95% score interval for k successes out of n.
WilsonInterval wilson_interval(long k, long n);

struct DetectorReport {
  DetectorKind kind;
  double pfa_target;
  double threshold;
  double pfa_emp;
  double pmd_emp;
  double pmd_ci_lo;
  double pmd_ci_hi;
};

void reports_to_csv(const std::vector<DetectorReport>& reports,
                    std::ostream& out);
void reports_to_json(const std::vector<DetectorReport>& reports,
                     std::ostream& out);

}  // namespace wsnd
