#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tde/baseline.hpp"
#include "tde/chirp.hpp"
#include "tde/recovery.hpp"

namespace tde {

enum class Estimator { Bomp, IbompParabolic, IbompPolar, TdeMusic, DsMusic };

const char* estimator_name(Estimator e);
std::vector<Estimator> all_estimators();
// Parses the CSV display name ("BOMP", "IBOMP-Polar", ...).
Estimator parse_estimator(const std::string& name);

struct ExperimentConfig {
  ChirpSpec chirp = ChirpSpec::reference();
  SceneDrawSpec draw = SceneDrawSpec::for_chirp(ChirpSpec::reference());
  std::vector<double> kappa_list;
  std::vector<double> snr_list_db;               // empty = noise disabled
  double snr_kappa = 0.5;                        // fixed kappa for the SNR sweep
  int trials = 100;
  std::uint64_t master_seed = 0x7de0c5a11bd5ull;
  std::vector<Estimator> estimators = all_estimators();
  bool timing = false;                           // measure per-estimator wall clock
  int threads = 0;                               // 0 = hardware concurrency
  int l1_max_iterations = 5000;
  double l1_tolerance = 1e-8;
  int music_grid_oversampling = 20;

  void validate() const;
};

struct EstimatorOutcome {
  Estimator estimator{};
  double sq_err_sum_us2 = 0.0;  // squared delay error summed over the K pulses
  std::int64_t runtime_ns = 0;
  bool failed = false;
};

struct TrialRecord {
  int trial_index = 0;
  double kappa = 0.0;
  std::optional<double> snr_db;
  std::vector<EstimatorOutcome> outcomes;  // one per enabled estimator
};

struct SweepRow {
  double sweep_value = 0.0;
  std::string estimator;
  double mean_tau_mse_us2 = 0.0;
  int trials_ok = 0;
  int trials_failed = 0;
  std::int64_t mean_runtime_ns = 0;
};

using ResultTable = std::vector<SweepRow>;

// Mean squared delay error in (us)^2 under the best true/estimate pairing:
// exhaustive over permutations for K <= 6, sorted pairing otherwise.
double tau_mse(std::span<const double> true_delays, std::span<const double> est_delays);

// Immutable per-config state shared by every trial.
struct Workspace {
  Dictionary dict;
  MusicConfig music;
};

Workspace make_workspace(const ExperimentConfig& cfg);

// One Monte Carlo trial: seed-derived scene, measurement matrix and noise,
// every enabled estimator run on the same realization. Estimator failures are
// caught and flagged, never thrown.
TrialRecord run_trial(const ExperimentConfig& cfg, const Workspace& ws, double kappa,
                      std::optional<double> snr_db, int trial_index);

// Noise-free sweep over kappa_list.
ResultTable run_experiment_kappa(const ExperimentConfig& cfg);

// Noisy sweep over snr_list_db at fixed snr_kappa.
ResultTable run_experiment_snr(const ExperimentConfig& cfg);

// Deterministic CSV serialization: header plus one row per (sweep value,
// estimator), ordered by sweep value then estimator name.
std::string csv_string(const ResultTable& table);
void write_csv(const ResultTable& table, const std::string& path);

// Flat single-line serialization of one trial (fields in estimator-name order).
std::string trial_csv_row(const TrialRecord& record);

}  // namespace tde
