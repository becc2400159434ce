#pragma once

#include <Eigen/Dense>
#include <iosfwd>

#include "wsnd/likelihoods.hpp"
#include "wsnd/scenario.hpp"

namespace wsnd {

enum class Hypothesis { kH0, kH1 };

// Per-node channel variances plus the complex gains h_{n,l}. In slow fading
// the gains are constant across windows; in fast fading they are i.i.d.
struct ChannelDraw {
  Eigen::VectorXd variances;  // sigma_n^2, length N
  Eigen::MatrixXcd gains;     // N x L
};

struct EnergyMatrix {
  Eigen::MatrixXd values;  // N x L, E_{n,l} >= 0
  double beta = 1.0;
  Hypothesis hypothesis = Hypothesis::kH0;
};

ChannelDraw draw_channels(FadingMode mode, const Eigen::VectorXd& variances,
                          int n_windows, RngStream& rng);

// Simulate Eq-style energies: H0 -> ||v||^2 / beta; H1 -> ||h s + v||^2 / beta
// with one source draw per window shared by all nodes. The
// `independent_source_per_node` escape hatch (test fixture only) redraws the
// source for every node, destroying the spatial dependence.
EnergyMatrix simulate_energies(Hypothesis hyp, const ScenarioConfig& cfg,
                               const SourceModel& src, const ChannelDraw& ch,
                               RngStream& rng,
                               bool independent_source_per_node = false);

// CSV with columns node,window,energy.
void energy_to_csv(const EnergyMatrix& e, std::ostream& out);

// One full Monte Carlo trial's scenario ingredients: geometry, channel
// variances, per-run source power solved from the realized mean variance,
// source model, gains, and the genie parameters c_n / d_n.
struct TrialDraw {
  NodeLayout layout;
  Eigen::VectorXd variances;
  double source_power = 0.0;
  SourceModel source;
  ChannelDraw channels;
  Eigen::VectorXd c_true;  // Tr(Sigma_s) |h_n|^2 (slow-fading genie)
  Eigen::VectorXd d_true;  // Tr(Sigma_s) sigma_n^2 (fast-fading genie)
};

TrialDraw draw_trial(const ScenarioConfig& cfg, RngStream& rng);

// Likelihood parameters implied by a scenario (and optionally a source).
LikelihoodParams make_likelihood_params(const ScenarioConfig& cfg);
LikelihoodParams make_likelihood_params(const ScenarioConfig& cfg,
                                        const SourceModel& src);

}  // namespace wsnd
