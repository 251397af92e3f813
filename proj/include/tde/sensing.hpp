#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "tde/dictionary.hpp"
#include "tde/rng.hpp"

namespace tde {

// Discrete equivalent of the Random Demodulator: an M x N matrix over
// {-1,0,+1} whose rows are disjoint contiguous sign blocks covering all
// columns (signed integrate-and-dump).
struct MeasurementMatrix {
  int m = 0;
  int n = 0;
  double kappa = 0.0;
  std::vector<std::int32_t> row_start;  // size m+1, row r owns columns [row_start[r], row_start[r+1])
  std::vector<double> sign;             // size n, chipping sign of each column

  int row_of_column(int k) const;
  Eigen::MatrixXd dense() const;
  void validate() const;

  // kappa = 1 matrix with all +1 signs.
  static MeasurementMatrix identity(int n);
};

// Row r sums columns [floor(r*N/M), floor((r+1)*N/M)) with i.i.d. +-1 signs.
MeasurementMatrix random_demodulator(int n, double kappa, Rng& rng);

// y = Phi f
Vec measure(const MeasurementMatrix& phi, const Vec& f);

// Cached compressed atoms Phi * Psi, computed once per (Phi, Psi) pair.
Eigen::MatrixXcd compress_atoms(const MeasurementMatrix& phi, const Dictionary& dict);

struct NoiseSpec {
  double snr_db = 0.0;
  bool enabled = false;
};

// Per-sample variance of circularly-symmetric complex white Gaussian noise
// that realizes the target SNR against y in expectation.
double noise_variance(const Vec& y, double snr_db);

// y + n with n drawn at noise_variance(y, snr_db); returns y unchanged when
// disabled.
Vec add_noise(const Vec& y, const NoiseSpec& spec, Rng& rng);

// Indices floor(k*N/M), k = 0..M-1.
std::vector<int> downsample_indices(int n, int m);

// Keep every (N/M)-th sample.
Vec downsample(const Vec& f, int m);

}  // namespace tde
