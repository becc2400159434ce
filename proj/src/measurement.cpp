#include "wsnd/measurement.hpp"

#include <cmath>
#include <ostream>

namespace wsnd {

ChannelDraw draw_channels(FadingMode mode, const Eigen::VectorXd& variances,
                          int n_windows, RngStream& rng) {
  const Eigen::Index n = variances.size();
  ChannelDraw ch;
  ch.variances = variances;
  ch.gains.resize(n, n_windows);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sd = std::sqrt(variances(i));
    if (mode == FadingMode::kSlow) {
      const Complex h = sd * rng.complex_normal();
      ch.gains.row(i).setConstant(h);
    } else {
      for (int l = 0; l < n_windows; ++l)
        ch.gains(i, l) = sd * rng.complex_normal();
    }
  }
  return ch;
}

namespace {

Eigen::VectorXcd draw_source_window(const ScenarioConfig& cfg,
                                    const SourceModel& src, RngStream& rng) {
  if (src.kind == SourceKind::kOfdm)
    return make_ofdm_window(src.ofdm, src.power, src.window_time, rng);
  (void)cfg;
  return sample_complex_gaussian(src.chol, rng);
}

}  // namespace

EnergyMatrix simulate_energies(Hypothesis hyp, const ScenarioConfig& cfg,
                               const SourceModel& src, const ChannelDraw& ch,
                               RngStream& rng,
                               bool independent_source_per_node) {
  const int n = cfg.n_nodes;
  const int l_windows = cfg.n_windows;
  const int m = cfg.window_len;
  const double beta = cfg.beta();
  const double noise_sd = std::sqrt(cfg.sigma_v2());

  EnergyMatrix e;
  e.beta = beta;
  e.hypothesis = hyp;
  e.values.resize(n, l_windows);

  Eigen::VectorXcd window(m);
  for (int l = 0; l < l_windows; ++l) {
    Eigen::VectorXcd s;
    if (hyp == Hypothesis::kH1 && !independent_source_per_node)
      s = draw_source_window(cfg, src, rng);
    for (int node = 0; node < n; ++node) {
      if (hyp == Hypothesis::kH1 && independent_source_per_node)
        s = draw_source_window(cfg, src, rng);
      double energy = 0.0;
      for (int t = 0; t < m; ++t) {
        Complex y = noise_sd * rng.complex_normal();
        if (hyp == Hypothesis::kH1) y += ch.gains(node, l) * s(t);
        energy += std::norm(y);
      }
      e.values(node, l) = energy / beta;
    }
  }
  return e;
}

void energy_to_csv(const EnergyMatrix& e, std::ostream& out) {
  out << "node,window,energy\n";
  char buf[64];
  for (Eigen::Index n = 0; n < e.values.rows(); ++n)
    for (Eigen::Index l = 0; l < e.values.cols(); ++l) {
      std::snprintf(buf, sizeof(buf), "%.17g", e.values(n, l));
      out << n << ',' << l << ',' << buf << '\n';
    }
}

TrialDraw draw_trial(const ScenarioConfig& cfg, RngStream& rng) {
  TrialDraw trial;
  trial.layout = place_nodes(cfg, rng);
  trial.variances.resize(cfg.n_nodes);
  for (int i = 0; i < cfg.n_nodes; ++i)
    trial.variances(i) = channel_variance(trial.layout.distances(i), cfg, rng);
  trial.source_power = solve_source_power(cfg, trial.variances.mean());
  if (cfg.source_kind == SourceKind::kOfdm) {
    trial.source = build_ofdm_source({cfg.ofdm_subcarriers, cfg.ofdm_cp_len},
                                     trial.source_power, cfg.window_time_s);
  } else {
    trial.source = build_source_covariance(trial.source_power, cfg.window_time_s,
                                           cfg.window_len, cfg.corr_rho);
  }
  trial.channels = draw_channels(cfg.fading, trial.variances, cfg.n_windows, rng);
  trial.c_true.resize(cfg.n_nodes);
  trial.d_true.resize(cfg.n_nodes);
  for (int i = 0; i < cfg.n_nodes; ++i) {
    trial.c_true(i) = trial.source.trace * std::norm(trial.channels.gains(i, 0));
    trial.d_true(i) = trial.source.trace * trial.variances(i);
  }
  return trial;
}

LikelihoodParams make_likelihood_params(const ScenarioConfig& cfg) {
  LikelihoodParams p;
  p.window_len = cfg.window_len;
  p.beta = cfg.beta();
  p.sigma_v2 = cfg.sigma_v2();
  return p;
}

LikelihoodParams make_likelihood_params(const ScenarioConfig& cfg,
                                        const SourceModel& src) {
  LikelihoodParams p = make_likelihood_params(cfg);
  p.trace_s = src.trace;
  p.eigenvalues = src.eigenvalues;
  return p;
}

}  // namespace wsnd
