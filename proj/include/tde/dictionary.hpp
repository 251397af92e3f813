#pragma once

#include <Eigen/Core>
#include <vector>

#include "tde/chirp.hpp"

namespace tde {

// N x N circulant matrix of delayed templates. Column n is the circular shift
// by n samples of the Nyquist-sampled pulse, so wrap-around occurs for delays
// beyond N - T*fs samples by construction.
struct Dictionary {
  Eigen::MatrixXcd atoms;            // column n = pulse delayed by n*delta
  double delta = 0.0;                // grid spacing 1/fs [s]
  ChirpSpec spec{};                  // generating waveform
  Eigen::VectorXd coherence_profile; // |<psi_0, psi_d>| for d = 0..N-1

  int size() const { return static_cast<int>(atoms.cols()); }
};

// Precomputed circle-arc geometry shared by every grid index.
struct PolarGeometry {
  double r = 0.0;       // hypersphere radius, the atom norm
  double theta = 0.0;   // arc angle between adjacent atoms [rad]
  Eigen::Matrix3d a;    // inverted 3x3 arc basis matrix
};

Dictionary build_dictionary(const ChirpSpec& spec);

// Cross-correlation proxy |<y_res, (Phi Psi)_n>| for all n.
// compressed_atoms is the cached M x N product of the measurement matrix with
// the dictionary.
Eigen::VectorXd correlation_proxy(const Vec& y_res, const Eigen::MatrixXcd& compressed_atoms);

// Coherence mu(i,k) = |<psi_i, psi_k>| between Nyquist-domain atoms.
double coherence(int i, int k, const Dictionary& dict);

// Coherence band of an index set: union over k in s of
// { i : mu(i,k) > eta + eps_tol }, plus s itself. eps_tol absorbs the
// floating-point fuzz of disjoint-support inner products.
std::vector<int> band(double eta, const std::vector<int>& s, const Dictionary& dict);

// Arc radius, adjacent-atom angle and the inverted arc basis matrix. The
// angle uses the real part of the complex inner product.
PolarGeometry polar_geometry(const Dictionary& dict);

}  // namespace tde
