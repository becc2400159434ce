#include "wsnd/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <iostream>
#include <ostream>

namespace wsnd {

std::string detector_name(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::kGlrtSf: return "GLRT-SF";
    case DetectorKind::kGlrtFf: return "GLRT-FF";
    case DetectorKind::kCsiSf: return "CSI-SF";
    case DetectorKind::kCsiFf: return "CSI-FF";
    case DetectorKind::kMd: return "MD";
    case DetectorKind::kSd: return "SD";
    case DetectorKind::kMe: return "ME";
    case DetectorKind::kSse: return "SSE";
    case DetectorKind::kSc: return "SC";
    case DetectorKind::kSsc: return "SSC";
  }
  return "?";
}

DetectorKind detector_from_name(const std::string& name) {
  std::string upper = name;
  for (char& c : upper) c = static_cast<char>(std::toupper(c));
  for (DetectorKind k : all_detectors())
    if (detector_name(k) == upper) return k;
  throw InvalidParamError("unknown detector: " + name);
}

const std::vector<DetectorKind>& all_detectors() {
  static const std::vector<DetectorKind> kinds = {
      DetectorKind::kGlrtSf, DetectorKind::kGlrtFf, DetectorKind::kCsiSf,
      DetectorKind::kCsiFf,  DetectorKind::kMd,     DetectorKind::kSd,
      DetectorKind::kMe,     DetectorKind::kSse,    DetectorKind::kSc,
      DetectorKind::kSsc};
  return kinds;
}

bool detector_needs_genie(DetectorKind kind) {
  return kind == DetectorKind::kCsiSf || kind == DetectorKind::kCsiFf;
}

StandardizedEnergies standardize(const EnergyMatrix& e,
                                 const LikelihoodParams& p) {
  const double m = p.window_len;
  const double mu0 = m * p.sigma_v2 / p.beta;
  const double s0 = std::sqrt(m) * p.sigma_v2 / p.beta;
  StandardizedEnergies out;
  out.z = (e.values.array() - mu0) / s0;
  const double l = static_cast<double>(e.values.cols());
  out.node_means = std::sqrt(l) * out.z.rowwise().mean();
  return out;
}

namespace {

// Shared machinery for the two scalar MLEs: maximize the row log likelihood
// over theta = log(param + floor).
double mle_scalar(const Eigen::VectorXd& row, const LikelihoodParams& p,
                  GlrtMode mode) {
  const double floor_v = p.param_floor();
  const double mean_e = row.mean();
  const double max_e = row.maxCoeff();
  const double hi_param = std::max(10.0 * p.beta * max_e, 16.0 * floor_v);
  // Method of moments: both factorized densities have mean (M sigma_v^2 + x)/beta.
  const double mom = std::max(floor_v, p.beta * mean_e - p.window_len * p.sigma_v2);

  auto objective = [&](double theta) {
    const double param = std::exp(theta) - floor_v;
    double acc = 0.0;
    if (mode == GlrtMode::kSlowFading) {
      for (Eigen::Index i = 0; i < row.size(); ++i)
        acc += log_pdf_sf(row(i), param, p);
    } else {
      for (Eigen::Index i = 0; i < row.size(); ++i)
        acc += log_pdf_ff(row(i), param, p);
    }
    return acc;
  };

  const double lo = std::log(floor_v);
  const double hi = std::log(hi_param + floor_v);
  const double start_mom = std::clamp(std::log(mom + floor_v), lo, hi);
  const double start_mid = 0.5 * (lo + hi);

  ScalarMaxResult best = maximize_scalar_bounded(objective, lo, hi, start_mom, 1e-8);
  const ScalarMaxResult alt =
      maximize_scalar_bounded(objective, lo, hi, start_mid, 1e-8);
  if (alt.value > best.value) best = alt;
  return std::max(0.0, std::exp(best.x) - floor_v);
}

}  // namespace

double mle_c(const Eigen::VectorXd& energy_row, const LikelihoodParams& p) {
  return mle_scalar(energy_row, p, GlrtMode::kSlowFading);
}

double mle_d(const Eigen::VectorXd& energy_row, const LikelihoodParams& p) {
  return mle_scalar(energy_row, p, GlrtMode::kFastFading);
}

Eigen::VectorXd glrt_node_statistics(const EnergyMatrix& e,
                                     const LikelihoodParams& p,
                                     GlrtMode mode) {
  const Eigen::Index n = e.values.rows();
  Eigen::VectorXd stats(n);
  for (Eigen::Index node = 0; node < n; ++node) {
    const Eigen::VectorXd row = e.values.row(node);
    const double param = mle_scalar(row, p, mode);
    double acc = 0.0;
    for (Eigen::Index l = 0; l < row.size(); ++l) {
      const double log_p1 = mode == GlrtMode::kSlowFading
                                ? log_pdf_sf(row(l), param, p)
                                : log_pdf_ff(row(l), param, p);
      acc += log_p1 - log_pdf_h0(row(l), p);
    }
    stats(node) = acc;
  }
  return stats;
}

double glrt_statistic(const EnergyMatrix& e, const LikelihoodParams& p,
                      GlrtMode mode) {
  const Eigen::VectorXd node_stats = glrt_node_statistics(e, p, mode);
  double total = 0.0;
  for (Eigen::Index i = 0; i < node_stats.size(); ++i) total += node_stats(i);
  return total;
}

double csi_statistic(const EnergyMatrix& e, const LikelihoodParams& p,
                     const Eigen::VectorXd& true_params, GlrtMode mode) {
  if (true_params.size() != e.values.rows())
    throw InvalidParamError("csi_statistic: one true parameter per node required");
  double total = 0.0;
  for (Eigen::Index node = 0; node < e.values.rows(); ++node) {
    double acc = 0.0;
    for (Eigen::Index l = 0; l < e.values.cols(); ++l) {
      const double energy = e.values(node, l);
      const double log_p1 = mode == GlrtMode::kSlowFading
                                ? log_pdf_sf(energy, true_params(node), p)
                                : log_pdf_ff(energy, true_params(node), p);
      acc += log_p1 - log_pdf_h0(energy, p);
    }
    total += acc;
  }
  return total;
}

double baseline_statistic(DetectorKind kind, const EnergyMatrix& e,
                          const LikelihoodParams& p) {
  switch (kind) {
    case DetectorKind::kMd:
      return e.values.mean();
    case DetectorKind::kSd:
      return e.values.array().square().mean();
    case DetectorKind::kSc: {
      return standardize(e, p).node_means.maxCoeff();
    }
    case DetectorKind::kSsc: {
      const Eigen::VectorXd mz = standardize(e, p).node_means;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < mz.size(); ++i)
        acc += std::pow(std::max(mz(i), 0.0), 2);
      return acc;
    }
    case DetectorKind::kMe:
    case DetectorKind::kSse: {
      // Sample covariance of the standardized energy columns, divisor L and
      // no mean removal (H0 mean already subtracted).
      const Eigen::MatrixXd z = standardize(e, p).z;
      const double l = static_cast<double>(z.cols());
      const Eigen::MatrixXd cov = z * z.transpose() / l;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov,
                                                            Eigen::EigenvaluesOnly);
      const Eigen::VectorXd eig = solver.eigenvalues();
      if (kind == DetectorKind::kMe) return eig(eig.size() - 1);
      double acc = 0.0;
      for (Eigen::Index i = 0; i < eig.size(); ++i) {
        const double plus = std::max(0.0, eig(i) - 1.0);
        if (plus > 0.0) acc += -std::log(plus) + plus;
      }
      return acc;
    }
    default:
      throw InvalidParamError("baseline_statistic: not a baseline detector");
  }
}

double detector_statistic(DetectorKind kind, const EnergyMatrix& e,
                          const LikelihoodParams& p, const TrialDraw& trial) {
  switch (kind) {
    case DetectorKind::kGlrtSf:
      return glrt_statistic(e, p, GlrtMode::kSlowFading);
    case DetectorKind::kGlrtFf:
      return glrt_statistic(e, p, GlrtMode::kFastFading);
    case DetectorKind::kCsiSf:
      return csi_statistic(e, p, trial.c_true, GlrtMode::kSlowFading);
    case DetectorKind::kCsiFf:
      return csi_statistic(e, p, trial.d_true, GlrtMode::kFastFading);
    default:
      return baseline_statistic(kind, e, p);
  }
}

namespace {

double quantile_interpolated(std::vector<double>& values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(i);
  return values[i] * (1.0 - frac) + values[i + 1] * frac;
}

}  // namespace

double calibrate_threshold(DetectorKind kind, const ScenarioConfig& cfg,
                           const LikelihoodParams& p, double target_pfa,
                           int n_runs, RngStream& rng) {
  if (!(target_pfa > 0.0 && target_pfa < 1.0))
    throw InvalidParamError("calibrate_threshold: target_pfa in (0, 1) required");
  if (n_runs * target_pfa < 20.0)
    std::cerr << "warning: calibrate_threshold(" << detector_name(kind)
              << "): n_runs * target_pfa < 20, quantile will be noisy\n";

  const bool genie = detector_needs_genie(kind);
  std::vector<double> stats;
  stats.reserve(n_runs);
  SourceModel no_source;  // H0 energies never touch the source
  for (int run = 0; run < n_runs; ++run) {
    RngStream run_rng = rng.substream(run);
    if (genie) {
      TrialDraw trial = draw_trial(cfg, run_rng);
      const EnergyMatrix e = simulate_energies(Hypothesis::kH0, cfg, no_source,
                                               trial.channels, run_rng);
      stats.push_back(detector_statistic(kind, e, p, trial));
    } else {
      ChannelDraw dummy;
      const EnergyMatrix e =
          simulate_energies(Hypothesis::kH0, cfg, no_source, dummy, run_rng);
      TrialDraw unused;
      stats.push_back(detector_statistic(kind, e, p, unused));
    }
  }
  return quantile_interpolated(stats, 1.0 - target_pfa);
}

WilsonInterval wilson_interval(long k, long n) {
  if (n <= 0) return {0.0, 1.0};
  const double z = 1.959963984540054;  // 97.5% normal quantile
  const double z2 = z * z;
  const double phat = static_cast<double>(k) / static_cast<double>(n);
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

void print_g17(std::ostream& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

}  // namespace

void reports_to_csv(const std::vector<DetectorReport>& reports,
                    std::ostream& out) {
  out << "detector,pfa_target,threshold,pfa_emp,pmd_emp,ci_lo,ci_hi\n";
  for (const auto& r : reports) {
    out << detector_name(r.kind) << ',';
    print_g17(out, r.pfa_target); out << ',';
    print_g17(out, r.threshold); out << ',';
    print_g17(out, r.pfa_emp); out << ',';
    print_g17(out, r.pmd_emp); out << ',';
    print_g17(out, r.pmd_ci_lo); out << ',';
    print_g17(out, r.pmd_ci_hi); out << '\n';
  }
}

void reports_to_json(const std::vector<DetectorReport>& reports,
                     std::ostream& out) {
  out << "[\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    out << "  {\"detector\": \"" << detector_name(r.kind) << "\", \"pfa_target\": ";
    print_g17(out, r.pfa_target); out << ", \"threshold\": ";
    print_g17(out, r.threshold); out << ", \"pfa_emp\": ";
    print_g17(out, r.pfa_emp); out << ", \"pmd_emp\": ";
    print_g17(out, r.pmd_emp); out << ", \"ci_lo\": ";
    print_g17(out, r.pmd_ci_lo); out << ", \"ci_hi\": ";
    print_g17(out, r.pmd_ci_hi);
    out << (i + 1 < reports.size() ? "},\n" : "}\n");
  }
  out << "]\n";
}

}  // namespace wsnd
