#include "wsnd/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <thread>

namespace wsnd {

namespace {

// Substream ids: calibration gets (detector_index + 1) << 32, evaluation
// trial t gets t + 1. Keeping the spaces disjoint means adding detectors
// never perturbs the trial data.
constexpr std::uint64_t kCalibBase = std::uint64_t{1} << 32;

struct TrialStats {
  std::vector<double> h0;  // one statistic per detector
  std::vector<double> h1;
};

TrialStats evaluate_trial(const ExperimentSpec& spec,
                          const LikelihoodParams& p, std::uint64_t trial_id,
                          RngStream root) {
  RngStream scen = root.substream(0);
  RngStream noise0 = root.substream(1);
  RngStream noise1 = root.substream(2);
  (void)trial_id;

  TrialDraw trial = draw_trial(spec.cfg, scen);
  EnergyMatrix e0 = simulate_energies(Hypothesis::kH0, spec.cfg, trial.source,
                                      trial.channels, noise0);
  EnergyMatrix e1 = simulate_energies(Hypothesis::kH1, spec.cfg, trial.source,
                                      trial.channels, noise1);

  TrialStats out;
  out.h0.reserve(spec.detectors.size());
  out.h1.reserve(spec.detectors.size());
  for (DetectorKind kind : spec.detectors) {
    out.h0.push_back(detector_statistic(kind, e0, p, trial));
    out.h1.push_back(detector_statistic(kind, e1, p, trial));
  }
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

CrocTable run_croc(const ExperimentSpec& spec) {
  spec.cfg.validate();
  if (spec.n_trials < 100)
    throw ConfigError("run_croc: n_trials >= 100 required");
  if (spec.detectors.empty())
    throw ConfigError("run_croc: at least one detector required");
  if (spec.pfa_targets.empty())
    throw ConfigError("run_croc: at least one pfa target required");
  for (std::size_t k = 0; k < spec.pfa_targets.size(); ++k) {
    const double t = spec.pfa_targets[k];
    if (!(t > 0.0 && t < 1.0))
      throw ConfigError("run_croc: pfa targets must lie in (0, 1)");
    if (k > 0 && !(t > spec.pfa_targets[k - 1]))
      throw ConfigError("run_croc: pfa targets must be strictly increasing");
  }
  const LikelihoodParams p = make_likelihood_params(spec.cfg);
  RngStream master(spec.seed, 0x9e3779b97f4a7c15ull);

  // Thresholds: one calibration stream per detector, shared across targets
  // so the quantiles come from a single ordered sample.
  const std::size_t n_det = spec.detectors.size();
  std::vector<std::vector<double>> thresholds(n_det);
  for (std::size_t d = 0; d < n_det; ++d) {
    for (double target : spec.pfa_targets) {
      RngStream calib = master.substream(kCalibBase + d);
      thresholds[d].push_back(calibrate_threshold(
          spec.detectors[d], spec.cfg, p, target, spec.n_calibration, calib));
    }
  }

  // Evaluation trials, optionally in parallel over contiguous chunks; every
  // trial result lands in a preallocated slot so aggregation order is fixed.
  std::vector<TrialStats> stats(static_cast<std::size_t>(spec.n_trials));
  const int n_threads = std::max(1, spec.n_threads);
  auto worker = [&](int first, int last) {
    for (int t = first; t < last; ++t)
      stats[static_cast<std::size_t>(t)] = evaluate_trial(
          spec, p, static_cast<std::uint64_t>(t),
          master.substream(static_cast<std::uint64_t>(t) + 1));
  };
  if (n_threads == 1) {
    worker(0, spec.n_trials);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (spec.n_trials + n_threads - 1) / n_threads;
    for (int i = 0; i < n_threads; ++i) {
      const int first = i * chunk;
      const int last = std::min(spec.n_trials, first + chunk);
      if (first < last) pool.emplace_back(worker, first, last);
    }
    for (auto& th : pool) th.join();
  }

  CrocTable table;
  for (std::size_t d = 0; d < n_det; ++d) {
    for (std::size_t k = 0; k < spec.pfa_targets.size(); ++k) {
      const double thr = thresholds[d][k];
      long fa = 0, md = 0;
      for (const TrialStats& s : stats) {
        if (s.h0[d] > thr) ++fa;
        if (s.h1[d] <= thr) ++md;
      }
      CrocRow row;
      row.detector = detector_name(spec.detectors[d]);
      row.snr_db = spec.cfg.snr_db;
      row.pfa_target = spec.pfa_targets[k];
      row.threshold = thr;
      row.n_trials = spec.n_trials;
      row.seed = spec.seed;
      row.pfa_emp = static_cast<double>(fa) / spec.n_trials;
      const WilsonInterval wf = wilson_interval(fa, spec.n_trials);
      row.pfa_ci_lo = wf.lo;
      row.pfa_ci_hi = wf.hi;
      row.pmd_emp = static_cast<double>(md) / spec.n_trials;
      const WilsonInterval wm = wilson_interval(md, spec.n_trials);
      row.pmd_ci_lo = wm.lo;
      row.pmd_ci_hi = wm.hi;
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

CrocTable run_pmd_vs_snr(const ExperimentSpec& spec,
                         const std::vector<double>& snr_values) {
  CrocTable table;
  for (double snr : snr_values) {
    ExperimentSpec local = spec;
    local.cfg.snr_db = snr;
    CrocTable part = run_croc(local);
    for (CrocRow& row : part.rows) table.rows.push_back(std::move(row));
  }
  return table;
}

void croc_to_csv(const CrocTable& table, std::ostream& out) {
  out << "detector,snr_db,pfa_target,threshold,pfa_emp,pfa_ci_lo,pfa_ci_hi,"
         "pmd_emp,pmd_ci_lo,pmd_ci_hi,n_trials,seed\n";
  for (const CrocRow& r : table.rows) {
    out << r.detector << ',' << fmt_double(r.snr_db) << ','
        << fmt_double(r.pfa_target) << ',' << fmt_double(r.threshold) << ','
        << fmt_double(r.pfa_emp) << ',' << fmt_double(r.pfa_ci_lo) << ','
        << fmt_double(r.pfa_ci_hi) << ',' << fmt_double(r.pmd_emp) << ','
        << fmt_double(r.pmd_ci_lo) << ',' << fmt_double(r.pmd_ci_hi) << ','
        << r.n_trials << ',' << r.seed << '\n';
  }
}

void croc_to_json(const CrocTable& table, std::ostream& out) {
  out << "[\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const CrocRow& r = table.rows[i];
    out << "  {\"detector\":\"" << r.detector << "\",\"snr_db\":"
        << fmt_double(r.snr_db) << ",\"pfa_target\":"
        << fmt_double(r.pfa_target) << ",\"threshold\":"
        << fmt_double(r.threshold) << ",\"pfa_emp\":" << fmt_double(r.pfa_emp)
        << ",\"pfa_ci_lo\":" << fmt_double(r.pfa_ci_lo) << ",\"pfa_ci_hi\":"
        << fmt_double(r.pfa_ci_hi) << ",\"pmd_emp\":" << fmt_double(r.pmd_emp)
        << ",\"pmd_ci_lo\":" << fmt_double(r.pmd_ci_lo) << ",\"pmd_ci_hi\":"
        << fmt_double(r.pmd_ci_hi) << ",\"n_trials\":" << r.n_trials
        << ",\"seed\":" << r.seed << '}' << (i + 1 < table.rows.size() ? "," : "")
        << '\n';
  }
  out << "]\n";
}

}  // namespace wsnd
