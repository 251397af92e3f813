#include "tde/recovery.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tde/errors.hpp"

namespace tde {

namespace {

constexpr double kRankTolerance = 1e-10;  // relative to the largest singular value

struct LsSolution {
  Eigen::VectorXcd coeffs;
  double residual_norm = 0.0;
  bool full_rank = true;
};

// Least squares of y against the columns of basis, rank-revealing via SVD.
LsSolution solve_ls(const Eigen::MatrixXcd& basis, const Vec& y) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(basis, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kRankTolerance);
  LsSolution sol;
  sol.coeffs = svd.solve(y);
  sol.residual_norm = (y - basis * sol.coeffs).norm();
  sol.full_rank = svd.rank() == basis.cols();
  return sol;
}

}  // namespace

double parabolic_interpolate(const Eigen::VectorXd& proxy, int n, double delta) {
  const int size = static_cast<int>(proxy.size());
  if (size < 3) throw ParameterError("parabolic interpolation: proxy too short");
  if (n < 0 || n >= size) throw ParameterError("parabolic interpolation: peak index out of range");

  const double prev = proxy[(n - 1 + size) % size];
  const double here = proxy[n];
  const double next = proxy[(n + 1) % size];

  const double denom = next - 2.0 * here + prev;
  if (std::abs(denom) < 1e-12 * std::abs(here)) return n * delta;  // flat peak
  return n * delta - 0.5 * delta * (next - prev) / denom;
}

PolarEstimate polar_interpolate(const Vec& y_res, const Eigen::MatrixXcd& triple,
                                const PolarGeometry& geom, int p, double delta) {
  if (triple.cols() != 3 || triple.rows() != y_res.size())
    throw ParameterError("polar interpolation: triple must be M x 3");

  // Rotate the three compressed atoms into the arc basis: the model is
  // y ~= [psi_{p-1} psi_p psi_{p+1}] A^T c with c = alpha [1, r cos, r sin]^T.
  const Eigen::MatrixXcd arc = triple * geom.a.transpose().cast<std::complex<double>>();

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(arc, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kRankTolerance);
  if (svd.rank() < 3) {
    // Degenerate arc system: fall back to the grid atom alone.
    PolarEstimate est;
    est.tau = p * delta;
    const auto& atom = triple.col(1);
    const double nn = atom.squaredNorm();
    est.alpha = nn > 0.0 ? atom.dot(y_res) / nn : std::complex<double>{0.0, 0.0};
    return est;
  }

  const Eigen::Vector3cd c = svd.solve(y_res);

  // c2 = alpha r cos(phi), c3 = alpha r sin(phi); project out the common
  // complex amplitude and read the signed angle.
  const double cos_part = std::norm(c[1]);
  const double sin_part = (std::conj(c[1]) * c[2]).real();
  double phi = std::atan2(sin_part, cos_part);
  phi = std::clamp(phi, -geom.theta, geom.theta);

  PolarEstimate est;
  est.tau = p * delta + delta * phi / geom.theta;
  est.alpha = c[0];
  return est;
}

EstimationResult ibomp(const Vec& y, const MeasurementMatrix& phi, const Dictionary& dict,
                       int k, double eta, InterpolationKind kind,
                       const Eigen::MatrixXcd* compressed,
                       std::vector<RecoveryState>* trace) {
  if (k < 1) throw ParameterError("ibomp: sparsity must be at least 1");
  if (y.size() != phi.m) throw ParameterError("ibomp: measurement length mismatch");

  Eigen::MatrixXcd local;
  if (!compressed) {
    local = compress_atoms(phi, dict);
    compressed = &local;
  }

  const int n = dict.size();
  const double delta = dict.delta;
  PolarGeometry geom;
  if (kind == InterpolationKind::Polar) geom = polar_geometry(dict);

  Vec y_res = y;
  std::vector<int> selected;
  std::vector<double> delays;
  Eigen::MatrixXcd basis(n, 0);             // Nyquist-domain atoms
  Eigen::MatrixXcd compressed_basis(phi.m, 0);
  Eigen::VectorXcd coeffs;
  std::vector<char> excluded(n, 0);

  // Tentatively extend the basis with the atom at tau and re-solve.
  auto try_atom = [&](double tau, Vec& atom_out, Vec& catom_out, LsSolution& sol_out) {
    atom_out = chirp_template(dict.spec, tau);
    catom_out = measure(phi, atom_out);
    Eigen::MatrixXcd cb(phi.m, compressed_basis.cols() + 1);
    cb << compressed_basis, catom_out;
    sol_out = solve_ls(cb, y);
  };

  for (int it = 0; it < k; ++it) {
    const Eigen::VectorXd proxy = correlation_proxy(y_res, *compressed);

    int best = -1;
    double best_val = -1.0;
    for (int i = 0; i < n; ++i) {
      if (excluded[i]) continue;
      if (proxy[i] > best_val) {
        best_val = proxy[i];
        best = i;
      }
    }
    if (best < 0) throw SelectionExhaustedError("ibomp: exclusion band covers every index");

    const double grid_tau = best * delta;
    double tau = grid_tau;
    switch (kind) {
      case InterpolationKind::None:
        break;
      case InterpolationKind::Parabolic:
        tau = parabolic_interpolate(proxy, best, delta);
        break;
      case InterpolationKind::Polar: {
        Eigen::MatrixXcd triple(phi.m, 3);
        triple << compressed->col((best - 1 + n) % n), compressed->col(best),
            compressed->col((best + 1) % n);
        tau = polar_interpolate(y_res, triple, geom, best, delta).tau;
        break;
      }
    }

    Vec atom, catom;
    LsSolution sol;
    try_atom(tau, atom, catom, sol);

    // Interpolation may only help: if the interpolated atom fits worse than
    // the grid atom, or breaks the rank, keep the grid atom.
    if (tau != grid_tau) {
      Vec grid_atom, grid_catom;
      LsSolution grid_sol;
      try_atom(grid_tau, grid_atom, grid_catom, grid_sol);
      if (!sol.full_rank || (grid_sol.full_rank && grid_sol.residual_norm < sol.residual_norm)) {
        tau = grid_tau;
        atom = std::move(grid_atom);
        catom = std::move(grid_catom);
        sol = std::move(grid_sol);
      }
    }
    if (!sol.full_rank)
      throw RankDeficiencyError("ibomp: new atom made the basis rank deficient");

    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = atom;
    compressed_basis.conservativeResize(Eigen::NoChange, compressed_basis.cols() + 1);
    compressed_basis.col(compressed_basis.cols() - 1) = catom;
    coeffs = sol.coeffs;
    y_res = y - compressed_basis * coeffs;
    selected.push_back(best);
    delays.push_back(tau);

    // Extend the exclusion band by the just-selected index.
    for (int i : band(eta, {best}, dict)) excluded[i] = 1;

    if (trace) {
      RecoveryState state;
      state.residual = y_res;
      state.selected = selected;
      state.delays = delays;
      state.basis = basis;
      state.coefficients = coeffs;
      trace->push_back(std::move(state));
    }
  }

  // Pair delays with coefficients and sort by delay.
  std::vector<int> order(delays.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return delays[a] < delays[b]; });

  EstimationResult result;
  for (int idx : order) {
    result.delays.push_back(delays[idx]);
    result.amplitudes.push_back(coeffs[idx]);
  }
  result.residual_norm = y_res.norm();
  result.reconstructed = basis * coeffs;
  return result;
}

}  // namespace tde
