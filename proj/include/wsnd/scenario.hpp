#pragma once

#include <Eigen/Dense>
#include <string>

#include "wsnd/numerics.hpp"
#include "wsnd/rng.hpp"

namespace wsnd {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SourceKind { kGaussian, kOfdm };
enum class FadingMode { kSlow, kFast };

// Every free parameter of an experiment. Defaults follow the reference
// outdoor setup (5 MHz band, 2 us windows, -174 dBm/Hz noise floor).
struct ScenarioConfig {
  int n_nodes = 100;            // N
  int n_windows = 20;           // L
  int window_len = 10;          // M, ~ floor(W*T)
  double bandwidth_hz = 5e6;    // W
  double window_time_s = 2e-6;  // T
  double noise_psd_dbm_hz = -174.0;
  double snr_db = -9.0;
  double beta_epsilon = 0.25;   // epsilon in beta(M) = M^(1/2 - epsilon)
  double corr_rho = 0.5;        // Toeplitz correlation of the source
  double pathloss_k_db = -37.0;
  double pathloss_exp = 4.0;
  double ref_dist_m = 10.0;
  double shadow_sigma_db = 2.0;
  double dist_min_m = 800.0;
  double dist_max_m = 8000.0;
  SourceKind source_kind = SourceKind::kGaussian;
  FadingMode fading = FadingMode::kSlow;
  std::uint64_t master_seed = 0;
  int ofdm_subcarriers = 12;
  int ofdm_cp_len = 3;

  double sigma_v2() const;   // noise energy per complex sample, N0_lin
  double beta() const;       // beta(window_len, beta_epsilon)
  double snr_linear() const;
  void validate() const;
};

// Parse from a JSON file / JSON text. Unknown keys are a hard error.
ScenarioConfig load_scenario_config(const std::string& path);
ScenarioConfig parse_scenario_config(const std::string& json_text);

struct OfdmSpec {
  int n_subcarriers = 12;
  int cp_len = 3;
};

// Source signal description: M x M Hermitian covariance with cached
// eigenvalues / Cholesky factor, or an OFDM waveform spec.
struct SourceModel {
  SourceKind kind = SourceKind::kGaussian;
  Eigen::MatrixXcd covariance;
  Eigen::VectorXd eigenvalues;
  double trace = 0.0;  // = P_s * T
  Eigen::MatrixXcd chol;
  OfdmSpec ofdm;
  double power = 0.0;   // P_s
  double window_time = 0.0;  // T
  int window_len = 0;   // M
};

struct NodeLayout {
  Eigen::VectorXd distances;  // d_n
  Eigen::VectorXd angles;     // zeta_n in [0, pi]
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

// beta(M) = M^(1/2 - epsilon).
double beta_scaling(int window_len, double epsilon);

// Distances log-uniform on [d_min, d_max], angles uniform on [0, pi].
NodeLayout place_nodes(const ScenarioConfig& cfg, RngStream& rng);

// Path-loss / log-normal shadowing: sigma_n^2(dB) = K - 10 a log10(d/d0) - eta,
// eta ~ N(0, shadow_sigma^2); returned in linear scale.
double channel_variance(double dist, const ScenarioConfig& cfg, RngStream& rng);

// P_s from the SNR definition SNR = sqrt(M) P_s mean_var / (W N0).
double solve_source_power(const ScenarioConfig& cfg, double mean_channel_var);

// Toeplitz source covariance with first row (P_s T / M)[1, rho, ..., rho^(M-1)].
SourceModel build_source_covariance(double source_power, double window_time,
                                    int window_len, double rho);

// OFDM source descriptor (no covariance; detectors use trace = P_s T).
SourceModel build_ofdm_source(const OfdmSpec& spec, double source_power,
                              double window_time);

// One OFDM window: i.i.d. uniform 64-QAM symbols, inverse DFT, cyclic
// prefix, scaled so E||s||^2 = P_s T.
Eigen::VectorXcd make_ofdm_window(const OfdmSpec& spec, double source_power,
                                  double window_time, RngStream& rng);

}  // namespace wsnd
