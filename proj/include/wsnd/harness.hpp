#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wsnd/detectors.hpp"

namespace wsnd {

// One Monte Carlo experiment: which detectors to run, at which false-alarm
// targets, with how many calibration / evaluation trials.
struct ExperimentSpec {
  ScenarioConfig cfg;
  std::vector<DetectorKind> detectors;
  std::vector<double> pfa_targets{0.1};
  std::uint64_t seed = 1;
  int n_trials = 2000;
  int n_calibration = 20000;
  int n_threads = 1;
};

struct CrocRow {
  std::string detector;
  double snr_db = 0.0;
  double pfa_target = 0.0;
  double threshold = 0.0;
  double pfa_emp = 0.0;
  double pfa_ci_lo = 0.0;
  double pfa_ci_hi = 0.0;
  double pmd_emp = 0.0;
  double pmd_ci_lo = 0.0;
  double pmd_ci_hi = 0.0;
  long n_trials = 0;
  std::uint64_t seed = 0;
};

struct CrocTable {
  std::vector<CrocRow> rows;
};

// Calibrate each detector at each target, then evaluate Pfa / Pmd on shared
// per-trial data. Results are bit-identical for any n_threads: every trial
// owns a seed-derived substream and rows are aggregated in trial order.
CrocTable run_croc(const ExperimentSpec& spec);

// run_croc repeated over snr_db values (one row per detector per SNR).
CrocTable run_pmd_vs_snr(const ExperimentSpec& spec,
                         const std::vector<double>& snr_values);

void croc_to_csv(const CrocTable& table, std::ostream& out);
void croc_to_json(const CrocTable& table, std::ostream& out);

}  // namespace wsnd
