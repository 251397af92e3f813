#pragma once

#include <Eigen/Core>
#include <vector>

#include "tde/dictionary.hpp"
#include "tde/recovery.hpp"
#include "tde/sensing.hpp"

namespace tde {

// Constrained l1 minimization: min ||x||_1 s.t. ||Ax - y||_2 <= epsilon.
// Equality mode is epsilon = 0.
struct L1SolverConfig {
  enum class Mode { Equality, Denoising };
  Mode mode = Mode::Equality;
  double epsilon = 0.0;      // residual budget, same units as ||y||
  int max_iterations = 5000;
  double tolerance = 1e-8;   // relative iterate change

  void validate() const;
};

struct L1Diagnostics {
  int iterations = 0;
  bool converged = false;
  double final_change = 0.0;
  // Fixed-point residual of the splitting operator per iteration; this is the
  // scheme's convergence measure and is non-increasing.
  std::vector<double> merit;
};

// Douglas-Rachford splitting between the soft-threshold prox and the exact
// projection onto {x : ||Ax - y|| <= epsilon}. Returns the feasible iterate.
// Throws ConvergenceError (carrying the best iterate) when the relative
// iterate change has not fallen below tolerance within max_iterations.
Eigen::VectorXcd l1_reconstruct(const Vec& y, const Eigen::MatrixXcd& compressed_dict,
                                const L1SolverConfig& cfg, L1Diagnostics* diag = nullptr);

struct MusicConfig {
  int subarray_length = 0;   // L, snapshot window
  int grid_oversampling = 20;
  int model_order = 0;       // K

  void validate(int n) const;
  static MusicConfig for_signal(int n, int k);  // L = floor(N/2), oversampling 20
};

struct MusicResult {
  std::vector<double> delays;  // sorted ascending, exactly K entries [s]
  bool padded = false;         // fewer than K separable peaks were found
};

// Tap vector -> inverse DFT -> forward-backward smoothed covariance ->
// noise-subspace pseudospectrum on a fine grid -> K peaks with quadratic
// refinement, mapped back to delays.
MusicResult music_delays(const Eigen::VectorXcd& h, const MusicConfig& cfg, double delta);

// l1 reconstruction of the tap vector followed by MUSIC; amplitudes by least
// squares of y against the compressed continuous-delay templates.
EstimationResult tde_music(const Vec& y, const MeasurementMatrix& phi, const Dictionary& dict,
                           int k, const L1SolverConfig& l1cfg, const MusicConfig& musiccfg,
                           const Eigen::MatrixXcd* compressed = nullptr);

// Non-CS control: taps from a Tikhonov-regularized pseudo-inverse of the
// row-downsampled dictionary, then MUSIC.
EstimationResult downsample_music(const Vec& f_low, const Eigen::MatrixXcd& dict_low,
                                  const Dictionary& dict, int k, const MusicConfig& musiccfg);

}  // namespace tde
