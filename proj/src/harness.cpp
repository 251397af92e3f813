#include "tde/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <thread>

#include "tde/errors.hpp"

namespace tde {

namespace {

// Stream tags for per-trial seed derivation; estimators never consume
// randomness, so the realization is identical for every enabled subset.
constexpr std::uint64_t kTagScene = 0x5ce21e;
constexpr std::uint64_t kTagMatrix = 0x9ab71c;
constexpr std::uint64_t kTagNoise = 0x201e53;
constexpr std::uint64_t kTagNoiseDs = 0xd5201e;
constexpr std::uint64_t kSweepKappa = 0x4a11a0;
constexpr std::uint64_t kSweepSnr = 0x51a2db;

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t sweep_kind, double sweep_value,
                         int trial_index) {
  const std::uint64_t value_bits = std::bit_cast<std::uint64_t>(sweep_value);
  return derive_seed(master, sweep_kind ^ value_bits, static_cast<std::uint64_t>(trial_index));
}

// Shortest round-trip decimal form, locale independent.
std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_int(std::int64_t v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct TimedCall {
  std::int64_t ns = 0;
};

template <typename F>
auto timed(bool enabled, TimedCall& t, F&& fn) {
  if (!enabled) return fn();
  const auto start = std::chrono::steady_clock::now();
  auto out = fn();
  t.ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() -
                                                              start)
             .count();
  return out;
}

}  // namespace

const char* estimator_name(Estimator e) {
  switch (e) {
    case Estimator::Bomp:
      return "BOMP";
    case Estimator::IbompParabolic:
      return "IBOMP-Parabolic";
    case Estimator::IbompPolar:
      return "IBOMP-Polar";
    case Estimator::TdeMusic:
      return "TDE-MUSIC";
    case Estimator::DsMusic:
      return "DS-MUSIC";
  }
  return "?";
}

std::vector<Estimator> all_estimators() {
  return {Estimator::Bomp, Estimator::IbompParabolic, Estimator::IbompPolar,
          Estimator::TdeMusic, Estimator::DsMusic};
}

Estimator parse_estimator(const std::string& name) {
  for (Estimator e : all_estimators())
    if (name == estimator_name(e)) return e;
  throw ParameterError("unknown estimator: " + name);
}

void ExperimentConfig::validate() const {
  chirp.validate();
  draw.validate();
  if (trials < 1) throw ParameterError("experiment: trials must be at least 1");
  for (double k : kappa_list)
    if (!(k > 0.0) || k > 1.0) throw ParameterError("experiment: kappa must lie in (0,1]");
  if (!(snr_kappa > 0.0) || snr_kappa > 1.0)
    throw ParameterError("experiment: snr_kappa must lie in (0,1]");
  if (estimators.empty()) throw ParameterError("experiment: no estimators enabled");
  if (l1_max_iterations < 1) throw ParameterError("experiment: l1_max_iterations must be positive");
  if (!(l1_tolerance > 0.0)) throw ParameterError("experiment: l1_tolerance must be positive");
  if (music_grid_oversampling < 1)
    throw ParameterError("experiment: music_grid_oversampling must be >= 1");
}

double tau_mse(std::span<const double> true_delays, std::span<const double> est_delays) {
  const std::size_t k = true_delays.size();
  if (est_delays.size() != k) throw ParameterError("tau mse: delay list length mismatch");
  if (k == 0) return 0.0;

  constexpr double kSecToUs = 1e6;
  auto mse_for = [&](std::span<const std::size_t> perm) {
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double d = (true_delays[i] - est_delays[perm[i]]) * kSecToUs;
      acc += d * d;
    }
    return acc / static_cast<double>(k);
  };

  if (k <= 6) {
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      best = std::min(best, mse_for(perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }

  // Large K: sorted pairing.
  std::vector<double> ts(true_delays.begin(), true_delays.end());
  std::vector<double> es(est_delays.begin(), est_delays.end());
  std::sort(ts.begin(), ts.end());
  std::sort(es.begin(), es.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double d = (ts[i] - es[i]) * kSecToUs;
    acc += d * d;
  }
  return acc / static_cast<double>(k);
}

Workspace make_workspace(const ExperimentConfig& cfg) {
  cfg.validate();
  Workspace ws;
  ws.dict = build_dictionary(cfg.chirp);
  ws.music = MusicConfig::for_signal(cfg.chirp.n, cfg.draw.k);
  ws.music.grid_oversampling = cfg.music_grid_oversampling;
  return ws;
}

TrialRecord run_trial(const ExperimentConfig& cfg, const Workspace& ws, double kappa,
                      std::optional<double> snr_db, int trial_index) {
  const std::uint64_t sweep_kind = snr_db ? kSweepSnr : kSweepKappa;
  const double sweep_value = snr_db ? *snr_db : kappa;
  const std::uint64_t seed = trial_seed(cfg.master_seed, sweep_kind, sweep_value, trial_index);

  Rng scene_rng(derive_seed(seed, kTagScene));
  Rng matrix_rng(derive_seed(seed, kTagMatrix));
  Rng noise_rng(derive_seed(seed, kTagNoise));
  Rng noise_ds_rng(derive_seed(seed, kTagNoiseDs));

  const SparseScene scene = draw_scene(cfg.draw, scene_rng);
  const std::vector<double> truth = scene.delays();
  const Vec f = synthesize(cfg.chirp, scene);
  const int n = cfg.chirp.n;
  const int m = static_cast<int>(std::lround(kappa * n));

  const MeasurementMatrix phi = random_demodulator(n, kappa, matrix_rng);
  const Vec y_clean = measure(phi, f);
  double sigma2 = 0.0;
  Vec y = y_clean;
  if (snr_db) {
    sigma2 = noise_variance(y_clean, *snr_db);
    y = add_noise(y_clean, {*snr_db, true}, noise_rng);
  }

  const bool needs_compressed = std::any_of(
      cfg.estimators.begin(), cfg.estimators.end(), [](Estimator e) { return e != Estimator::DsMusic; });
  Eigen::MatrixXcd compressed;
  if (needs_compressed) compressed = compress_atoms(phi, ws.dict);

  const int k = cfg.draw.k;

  TrialRecord record;
  record.trial_index = trial_index;
  record.kappa = kappa;
  record.snr_db = snr_db;

  for (Estimator est : cfg.estimators) {
    EstimatorOutcome outcome;
    outcome.estimator = est;
    TimedCall t;
    try {
      EstimationResult res = timed(true, t, [&]() -> EstimationResult {
        switch (est) {
          case Estimator::Bomp:
            return ibomp(y, phi, ws.dict, k, 0.0, InterpolationKind::None, &compressed);
          case Estimator::IbompParabolic:
            return ibomp(y, phi, ws.dict, k, 0.0, InterpolationKind::Parabolic, &compressed);
          case Estimator::IbompPolar:
            return ibomp(y, phi, ws.dict, k, 0.0, InterpolationKind::Polar, &compressed);
          case Estimator::TdeMusic: {
            L1SolverConfig l1;
            l1.max_iterations = cfg.l1_max_iterations;
            l1.tolerance = cfg.l1_tolerance;
            if (snr_db) {
              l1.mode = L1SolverConfig::Mode::Denoising;
              // Discrepancy-principle budget from the known noise variance.
              l1.epsilon = std::sqrt(m * sigma2) * (1.0 + 2.0 * std::sqrt(2.0 / m));
            }
            return tde_music(y, phi, ws.dict, k, l1, ws.music, &compressed);
          }
          case Estimator::DsMusic: {
            Vec f_low = downsample(f, m);
            if (snr_db) f_low = add_noise(f_low, {*snr_db, true}, noise_ds_rng);
            const auto kept = downsample_indices(n, m);
            Eigen::MatrixXcd dict_low(m, n);
            for (int r = 0; r < m; ++r) dict_low.row(r) = ws.dict.atoms.row(kept[r]);
            return downsample_music(f_low, dict_low, ws.dict, k, ws.music);
          }
        }
        throw ParameterError("unknown estimator");
      });
      outcome.sq_err_sum_us2 = tau_mse(truth, res.delays) * static_cast<double>(k);
    } catch (const std::exception&) {
      outcome.failed = true;
    }
    outcome.runtime_ns = cfg.timing ? t.ns : 0;
    record.outcomes.push_back(outcome);
  }
  return record;
}

namespace {

ResultTable run_sweep(const ExperimentConfig& cfg, const std::vector<double>& sweep_values,
                      bool snr_sweep) {
  cfg.validate();
  const Workspace ws = make_workspace(cfg);

  struct Item {
    int sweep_index;
    int trial_index;
  };
  std::vector<Item> items;
  for (int s = 0; s < static_cast<int>(sweep_values.size()); ++s)
    for (int t = 0; t < cfg.trials; ++t) items.push_back({s, t});

  std::vector<TrialRecord> records(items.size());
  std::atomic<std::size_t> next{0};
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers =
      cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                      : std::min<unsigned>(hw, static_cast<unsigned>(items.size()));

  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= items.size()) break;
      const auto [s, t] = items[i];
      const double value = sweep_values[s];
      const double kappa = snr_sweep ? cfg.snr_kappa : value;
      const std::optional<double> snr = snr_sweep ? std::optional<double>(value) : std::nullopt;
      records[i] = run_trial(cfg, ws, kappa, snr, t);
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  // Aggregate in deterministic (sweep, estimator) order.
  ResultTable table;
  const int k = cfg.draw.k;
  std::vector<Estimator> order = cfg.estimators;
  std::sort(order.begin(), order.end(), [](Estimator a, Estimator b) {
    return std::string(estimator_name(a)) < std::string(estimator_name(b));
  });

  std::vector<int> sweep_order(sweep_values.size());
  std::iota(sweep_order.begin(), sweep_order.end(), 0);
  std::sort(sweep_order.begin(), sweep_order.end(),
            [&](int a, int b) { return sweep_values[a] < sweep_values[b]; });

  for (int s : sweep_order) {
    for (Estimator est : order) {
      SweepRow row;
      row.sweep_value = sweep_values[s];
      row.estimator = estimator_name(est);
      double err_acc = 0.0;
      std::int64_t ns_acc = 0;
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].sweep_index != s) continue;
        for (const auto& oc : records[i].outcomes) {
          if (oc.estimator != est) continue;
          if (oc.failed) {
            ++row.trials_failed;
          } else {
            ++row.trials_ok;
            err_acc += oc.sq_err_sum_us2 / static_cast<double>(k);
            ns_acc += oc.runtime_ns;
          }
        }
      }
      if (row.trials_ok > 0) {
        row.mean_tau_mse_us2 = err_acc / row.trials_ok;
        row.mean_runtime_ns = ns_acc / row.trials_ok;
      }
      table.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace

ResultTable run_experiment_kappa(const ExperimentConfig& cfg) {
  if (cfg.kappa_list.empty()) throw ParameterError("kappa experiment: empty kappa list");
  return run_sweep(cfg, cfg.kappa_list, false);
}

ResultTable run_experiment_snr(const ExperimentConfig& cfg) {
  if (cfg.snr_list_db.empty()) throw ParameterError("snr experiment: empty SNR list");
  return run_sweep(cfg, cfg.snr_list_db, true);
}

std::string csv_string(const ResultTable& table) {
  std::string out = "sweep_var,estimator,mean_tau_mse_us2,trials_ok,trials_failed,mean_runtime_ns\n";
  for (const auto& row : table) {
    out += format_double(row.sweep_value);
    out += ',';
    out += row.estimator;
    out += ',';
    out += format_double(row.mean_tau_mse_us2);
    out += ',';
    out += format_int(row.trials_ok);
    out += ',';
    out += format_int(row.trials_failed);
    out += ',';
    out += format_int(row.mean_runtime_ns);
    out += '\n';
  }
  return out;
}

void write_csv(const ResultTable& table, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open for writing: " + path);
  file << csv_string(table);
  if (!file) throw IoError("write failed: " + path);
}

std::string trial_csv_row(const TrialRecord& record) {
  std::vector<EstimatorOutcome> outcomes = record.outcomes;
  std::sort(outcomes.begin(), outcomes.end(), [](const auto& a, const auto& b) {
    return std::string(estimator_name(a.estimator)) < std::string(estimator_name(b.estimator));
  });
  std::string out = format_int(record.trial_index);
  out += ',';
  out += format_double(record.kappa);
  out += ',';
  if (record.snr_db) out += format_double(*record.snr_db);
  for (const auto& oc : outcomes) {
    out += ',';
    out += estimator_name(oc.estimator);
    out += ',';
    out += format_double(oc.sq_err_sum_us2);
    out += ',';
    out += format_int(oc.runtime_ns);
    out += ',';
    out += oc.failed ? '1' : '0';
  }
  return out;
}

}  // namespace tde
