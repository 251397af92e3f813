#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "tde/rng.hpp"

namespace tde {

using Vec = Eigen::VectorXcd;

// Parametric description of the known waveform and its sampling grid.
struct ChirpSpec {
  double f0;       // center frequency [Hz]
  double delta_f;  // swept frequency [Hz]
  double T;        // pulse duration [s]
  double fs;       // Nyquist sampling frequency [Hz]
  int n;           // record length [samples]

  double grid_step() const { return 1.0 / fs; }  // dictionary delay spacing
  // Latest delay for which the pulse still fits inside the record.
  double max_delay() const { return (n - 1) / fs - T; }
  int support_samples() const { return static_cast<int>(std::ceil(T * fs)); }

  void validate() const;  // throws ParameterError

  // 1 MHz center, 40 MHz sweep, 1 us pulse, 50 MHz sampling, 500 samples.
  static ChirpSpec reference();
};

struct Pulse {
  std::complex<double> amplitude;
  double delay;  // [s]
};

// Ground truth: K well-spaced pulses with continuous delays.
struct SparseScene {
  std::vector<Pulse> pulses;

  int size() const { return static_cast<int>(pulses.size()); }
  std::vector<double> delays() const;
  // Delays inside [0, max_delay], pairwise spacing >= T.
  void validate(const ChirpSpec& spec) const;
};

// Random scene distribution for Monte Carlo trials.
struct SceneDrawSpec {
  int k = 3;
  double amp_lo = -10.0;        // per real/imaginary part
  double amp_hi = 10.0;
  double amp_min_abs = 1.0;     // per-part minimum magnitude
  double tau_lo = 0.0;          // [s]
  double tau_hi = 0.0;          // [s]
  double min_spacing = 0.0;     // pairwise delay spacing, the pulse duration [s]

  void validate() const;
  static SceneDrawSpec for_chirp(const ChirpSpec& spec, int k = 3);
};

// Sampled pulse at continuous delay tau: [g(k/fs - tau)]_{k=0..N-1}.
// The tau=0 template has unit discrete l2 norm and the same scale constant is
// reused for every tau, so shifting never changes the energy. Samples with
// (k/fs - tau) outside (0,T) are exactly zero; there is no wrap-around.
Vec chirp_template(const ChirpSpec& spec, double tau);

// Sum of amplitude-weighted templates; no noise.
Vec synthesize(const ChirpSpec& spec, const SparseScene& scene);

// Rejection sampling: amplitudes per part until |part| >= amp_min_abs, the
// whole delay set redrawn until pairwise spacing >= min_spacing.
SparseScene draw_scene(const SceneDrawSpec& draw, Rng& rng);

}  // namespace tde
