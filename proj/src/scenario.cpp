#include "wsnd/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace wsnd {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

}  // namespace

double ScenarioConfig::sigma_v2() const {
  // dBm/Hz -> W/Hz. Samples are energy-normalized (spacing 1/W), so the
  // noise energy per complex sample is N0 * W * (1/W) = N0, matching the
  // source covariance whose trace is the window energy P_s * T.
  return std::pow(10.0, (noise_psd_dbm_hz - 30.0) / 10.0);
}

double ScenarioConfig::beta() const {
  return beta_scaling(window_len, beta_epsilon);
}

double ScenarioConfig::snr_linear() const { return std::pow(10.0, snr_db / 10.0); }

void ScenarioConfig::validate() const {
  if (n_nodes < 1) throw ConfigError("n_nodes must be >= 1");
  if (n_windows < 1) throw ConfigError("n_windows must be >= 1");
  if (window_len < 1) throw ConfigError("window_len must be >= 1");
  if (!(beta_epsilon > 0.0 && beta_epsilon < 0.5))
    throw ConfigError("beta_epsilon must lie in (0, 1/2)");
  if (!(corr_rho >= 0.0 && corr_rho < 1.0))
    throw ConfigError("corr_rho must lie in [0, 1)");
  if (!(dist_min_m > 0.0 && dist_min_m < dist_max_m))
    throw ConfigError("need 0 < dist_min_m < dist_max_m");
  if (!(ref_dist_m > 0.0)) throw ConfigError("ref_dist_m must be positive");
  if (bandwidth_hz > 0.0 && window_time_s > 0.0) {
    const int m_wt = static_cast<int>(std::floor(bandwidth_hz * window_time_s));
    if (source_kind == SourceKind::kGaussian && window_len != m_wt)
      throw ConfigError("window_len must equal floor(bandwidth_hz * window_time_s)");
  }
  if (source_kind == SourceKind::kOfdm &&
      ofdm_subcarriers + ofdm_cp_len != window_len)
    throw ConfigError("ofdm_subcarriers + ofdm_cp_len must equal window_len");
  if (!(sigma_v2() > 0.0)) throw ConfigError("noise power must be positive");
}

ScenarioConfig parse_scenario_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }

  static const std::set<std::string> known = {
      "n_nodes",        "n_windows",     "window_len",     "bandwidth_hz",
      "window_time_s",  "noise_psd_dbm_hz", "snr_db",      "beta_epsilon",
      "corr_rho",       "pathloss_k_db", "pathloss_exp",   "ref_dist_m",
      "shadow_sigma_db", "dist_min_m",   "dist_max_m",     "source_kind",
      "fading",         "master_seed",   "ofdm_subcarriers", "ofdm_cp_len"};
  for (const auto& item : j.items())
    if (known.find(item.key()) == known.end())
      throw ConfigError("unknown config key: " + item.key());

  ScenarioConfig cfg;
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).template get<std::decay_t<decltype(field)>>();
    };
    get("n_nodes", cfg.n_nodes);
    get("n_windows", cfg.n_windows);
    get("window_len", cfg.window_len);
    get("bandwidth_hz", cfg.bandwidth_hz);
    get("window_time_s", cfg.window_time_s);
    get("noise_psd_dbm_hz", cfg.noise_psd_dbm_hz);
    get("snr_db", cfg.snr_db);
    get("beta_epsilon", cfg.beta_epsilon);
    get("corr_rho", cfg.corr_rho);
    get("pathloss_k_db", cfg.pathloss_k_db);
    get("pathloss_exp", cfg.pathloss_exp);
    get("ref_dist_m", cfg.ref_dist_m);
    get("shadow_sigma_db", cfg.shadow_sigma_db);
    get("dist_min_m", cfg.dist_min_m);
    get("dist_max_m", cfg.dist_max_m);
    get("master_seed", cfg.master_seed);
    get("ofdm_subcarriers", cfg.ofdm_subcarriers);
    get("ofdm_cp_len", cfg.ofdm_cp_len);
    if (j.contains("source_kind")) {
      const std::string s = j.at("source_kind").get<std::string>();
      if (s == "gaussian") cfg.source_kind = SourceKind::kGaussian;
      else if (s == "ofdm") cfg.source_kind = SourceKind::kOfdm;
      else throw ConfigError("source_kind must be 'gaussian' or 'ofdm'");
    }
    if (j.contains("fading")) {
      const std::string s = j.at("fading").get<std::string>();
      if (s == "slow") cfg.fading = FadingMode::kSlow;
      else if (s == "fast") cfg.fading = FadingMode::kFast;
      else throw ConfigError("fading must be 'slow' or 'fast'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario_config(ss.str());
}

double beta_scaling(int window_len, double epsilon) {
  if (window_len < 1) throw InvalidParamError("beta_scaling: M >= 1 required");
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw InvalidParamError("beta_scaling: epsilon in (0, 1/2) required");
  return std::pow(static_cast<double>(window_len), 0.5 - epsilon);
}

NodeLayout place_nodes(const ScenarioConfig& cfg, RngStream& rng) {
  const int n = cfg.n_nodes;
  NodeLayout layout;
  layout.distances.resize(n);
  layout.angles.resize(n);
  layout.x.resize(n);
  layout.y.resize(n);
  const double lo = std::log10(cfg.dist_min_m / cfg.ref_dist_m);
  const double hi = std::log10(cfg.dist_max_m / cfg.ref_dist_m);
  for (int i = 0; i < n; ++i) {
    layout.distances(i) = cfg.ref_dist_m * std::pow(10.0, rng.uniform(lo, hi));
    layout.angles(i) = rng.uniform(0.0, kPi);
    layout.x(i) = layout.distances(i) * std::cos(layout.angles(i));
    layout.y(i) = layout.distances(i) * std::sin(layout.angles(i));
  }
  return layout;
}

double channel_variance(double dist, const ScenarioConfig& cfg, RngStream& rng) {
  if (!(dist > 0.0)) throw InvalidParamError("channel_variance: distance must be positive");
  const double shadow = cfg.shadow_sigma_db > 0.0
                            ? cfg.shadow_sigma_db * rng.normal()
                            : 0.0;
  const double db = cfg.pathloss_k_db -
                    10.0 * cfg.pathloss_exp * std::log10(dist / cfg.ref_dist_m) -
                    shadow;
  return std::pow(10.0, db / 10.0);
}

double solve_source_power(const ScenarioConfig& cfg, double mean_channel_var) {
  if (!(mean_channel_var > 0.0))
    throw InvalidParamError("solve_source_power: mean channel variance must be positive");
  const double n0_lin = std::pow(10.0, (cfg.noise_psd_dbm_hz - 30.0) / 10.0);
  return cfg.snr_linear() * cfg.bandwidth_hz * n0_lin /
         (std::sqrt(static_cast<double>(cfg.window_len)) * mean_channel_var);
}

SourceModel build_source_covariance(double source_power, double window_time,
                                    int window_len, double rho) {
  if (!(rho >= 0.0 && rho < 1.0))
    throw InvalidParamError("build_source_covariance: rho in [0, 1) required");
  SourceModel src;
  src.kind = SourceKind::kGaussian;
  src.power = source_power;
  src.window_time = window_time;
  src.window_len = window_len;
  src.trace = source_power * window_time;
  const double diag = src.trace / window_len;
  src.covariance.resize(window_len, window_len);
  for (int i = 0; i < window_len; ++i)
    for (int j = 0; j < window_len; ++j)
      src.covariance(i, j) = diag * std::pow(rho, std::abs(i - j));
  src.eigenvalues = hermitian_eigenvalues(src.covariance);
  src.chol = cholesky_psd(src.covariance);
  return src;
}

SourceModel build_ofdm_source(const OfdmSpec& spec, double source_power,
                              double window_time) {
  SourceModel src;
  src.kind = SourceKind::kOfdm;
  src.ofdm = spec;
  src.power = source_power;
  src.window_time = window_time;
  src.window_len = spec.n_subcarriers + spec.cp_len;
  src.trace = source_power * window_time;
  return src;
}

Eigen::VectorXcd make_ofdm_window(const OfdmSpec& spec, double source_power,
                                  double window_time, RngStream& rng) {
  const int nsub = spec.n_subcarriers;
  const int m = nsub + spec.cp_len;
  // Uniform 64-QAM, unit average symbol power: levels {-7,...,7}/sqrt(42).
  const double level_scale = 1.0 / std::sqrt(42.0);
  Eigen::VectorXcd symbols(nsub);
  for (int k = 0; k < nsub; ++k) {
    const int re = 2 * static_cast<int>(rng.next_u64() % 8) - 7;
    const int im = 2 * static_cast<int>(rng.next_u64() % 8) - 7;
    symbols(k) = Complex(re * level_scale, im * level_scale);
  }
  // Inverse DFT with 1/sqrt(nsub) so time samples keep unit average power.
  Eigen::VectorXcd time(nsub);
  for (int t = 0; t < nsub; ++t) {
    Complex acc = 0.0;
    for (int k = 0; k < nsub; ++k) {
      const double phase = 2.0 * kPi * k * t / nsub;
      acc += symbols(k) * Complex(std::cos(phase), std::sin(phase));
    }
    time(t) = acc / std::sqrt(static_cast<double>(nsub));
  }
  Eigen::VectorXcd window(m);
  window.head(spec.cp_len) = time.tail(spec.cp_len);  // cyclic prefix
  window.tail(nsub) = time;
  // E||window||^2 = m before scaling; enforce E||s||^2 = P_s T.
  window *= std::sqrt(source_power * window_time / static_cast<double>(m));
  return window;
}

}  // namespace wsnd
