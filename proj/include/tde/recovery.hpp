#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "tde/dictionary.hpp"
#include "tde/sensing.hpp"

namespace tde {

enum class InterpolationKind { None, Parabolic, Polar };

// Per-iteration snapshot of the greedy recovery, for diagnostics and tests.
struct RecoveryState {
  Vec residual;                     // y - Phi B a
  std::vector<int> selected;        // grid indices in selection order
  std::vector<double> delays;       // interpolated delays in selection order [s]
  Eigen::MatrixXcd basis;           // B, continuous-delay atoms (Nyquist domain)
  Eigen::VectorXcd coefficients;    // a
};

struct EstimationResult {
  std::vector<double> delays;                    // sorted ascending [s]
  std::vector<std::complex<double>> amplitudes;  // matched to delays
  double residual_norm = 0.0;
  Vec reconstructed;                             // B a, Nyquist domain
};

// Parabola vertex through the proxy values at n-1, n, n+1 (indices mod N).
// Falls back to the grid delay n*delta when the curvature vanishes.
double parabolic_interpolate(const Eigen::VectorXd& proxy, int n, double delta);

struct PolarEstimate {
  double tau = 0.0;
  std::complex<double> alpha{0.0, 0.0};
};

// Circle-arc interpolation around grid index p. triple holds the compressed
// atoms p-1, p, p+1 as columns; the arc basis comes from geom. Solves a
// 3-unknown least squares for (amplitude, angle) and maps the signed angle
// back to a delay offset within [-delta, delta].
PolarEstimate polar_interpolate(const Vec& y_res, const Eigen::MatrixXcd& triple,
                                const PolarGeometry& geom, int p, double delta);

// Band-excluded orthogonal matching pursuit with an optional interpolation
// step. Runs exactly k iterations (sparsity known). Each iteration picks the
// proxy argmax outside the eta-coherence band of the selected set, optionally
// interpolates the delay, rebuilds the atom at the continuous delay and
// re-solves the coefficients against all measurements.
//
// compressed may pass the cached Phi*Psi product; trace, when non-null,
// receives one RecoveryState per iteration.
EstimationResult ibomp(const Vec& y, const MeasurementMatrix& phi, const Dictionary& dict,
                       int k, double eta, InterpolationKind kind,
                       const Eigen::MatrixXcd* compressed = nullptr,
                       std::vector<RecoveryState>* trace = nullptr);

}  // namespace tde
