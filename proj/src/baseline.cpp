#include "tde/baseline.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>

#include "tde/errors.hpp"

namespace tde {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

VectorXcd soft_threshold(const VectorXcd& v, double gamma) {
  VectorXcd out(v.size());
  for (int i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]);
    out[i] = mag > gamma ? v[i] * (1.0 - gamma / mag) : std::complex<double>{0.0, 0.0};
  }
  return out;
}

// Exact projection onto {x : ||Ax - y|| <= eps} for full-row-rank A, using a
// cached eigendecomposition of A A^H. eps = 0 projects onto the affine set.
class ResidualBallProjector {
 public:
  ResidualBallProjector(const MatrixXcd& a, const VectorXcd& y, double eps)
      : a_(a), y_(y), eps_(eps) {
    const MatrixXcd gram = a * a.adjoint();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(gram);
    if (es.info() != Eigen::Success)
      throw ParameterError("l1 solver: eigendecomposition of the Gram matrix failed");
    q_ = es.eigenvectors();
    lambda_ = es.eigenvalues().cwiseMax(0.0);
    const double lmax = lambda_.maxCoeff();
    if (!(lmax > 0.0)) throw ParameterError("l1 solver: compressed dictionary is zero");
    if (lambda_.minCoeff() < 1e-12 * lmax)
      throw ParameterError("l1 solver: compressed dictionary is row rank deficient");
  }

  VectorXcd operator()(const VectorXcd& v) const {
    const VectorXcd s = a_ * v - y_;
    if (eps_ > 0.0 && s.norm() <= eps_) return v;
    const VectorXcd w = q_.adjoint() * s;

    VectorXcd dual;
    if (eps_ == 0.0) {
      dual = q_ * w.cwiseQuotient(lambda_.cast<std::complex<double>>());
    } else {
      // Solve sum |w_i|^2 / (1 + t lam_i)^2 = eps^2 for t >= 0; the function
      // is convex and decreasing, so Newton from t = 0 is monotone.
      const VectorXd w2 = w.cwiseAbs2();
      double t = 0.0;
      for (int it = 0; it < 60; ++it) {
        double f = -eps_ * eps_;
        double df = 0.0;
        for (int i = 0; i < lambda_.size(); ++i) {
          const double d = 1.0 + t * lambda_[i];
          f += w2[i] / (d * d);
          df += -2.0 * lambda_[i] * w2[i] / (d * d * d);
        }
        if (std::abs(f) < 1e-13 * eps_ * eps_ || df == 0.0) break;
        t -= f / df;
        if (t < 0.0) t = 0.0;
      }
      VectorXcd shrink(w.size());
      for (int i = 0; i < w.size(); ++i) shrink[i] = w[i] * (t / (1.0 + t * lambda_[i]));
      dual = q_ * shrink;
    }
    return v - a_.adjoint() * dual;
  }

 private:
  const MatrixXcd& a_;
  VectorXcd y_;
  double eps_;
  MatrixXcd q_;
  VectorXd lambda_;
};

}  // namespace

void L1SolverConfig::validate() const {
  if (epsilon < 0.0) throw ParameterError("l1 config: epsilon must be nonnegative");
  if (max_iterations < 1) throw ParameterError("l1 config: max_iterations must be positive");
  if (!(tolerance > 0.0)) throw ParameterError("l1 config: tolerance must be positive");
  if (mode == Mode::Equality && epsilon != 0.0)
    throw ParameterError("l1 config: equality mode requires epsilon = 0");
}

Eigen::VectorXcd l1_reconstruct(const Vec& y, const Eigen::MatrixXcd& compressed_dict,
                                const L1SolverConfig& cfg, L1Diagnostics* diag) {
  cfg.validate();
  if (y.size() != compressed_dict.rows())
    throw ParameterError("l1 solver: measurement length mismatch");

  const int n = static_cast<int>(compressed_dict.cols());
  const double scale = y.norm();
  if (diag) *diag = L1Diagnostics{};

  if (scale == 0.0) {
    if (diag) diag->converged = true;
    return VectorXcd::Zero(n);
  }

  const double eps = cfg.mode == L1SolverConfig::Mode::Equality ? 0.0 : cfg.epsilon;
  const VectorXcd yt = y / scale;
  const double eps_t = eps / scale;
  if (eps_t >= 1.0) {
    // The ball around y already contains Ax = 0, so the minimizer is x = 0.
    if (diag) diag->converged = true;
    return VectorXcd::Zero(n);
  }

  const ResidualBallProjector project(compressed_dict, yt, eps_t);

  // Threshold step; iterates live at unit measurement scale.
  const double gamma = 0.05;

  VectorXcd w = project(VectorXcd::Zero(n));  // least-norm feasible start
  VectorXcd x = w;
  VectorXcd x_prev = x;
  bool converged = false;
  double change = 0.0;
  int it = 0;

  while (it < cfg.max_iterations) {
    ++it;
    x = project(w);
    const VectorXcd z = soft_threshold(2.0 * x - w, gamma);
    const double merit = (z - x).norm();  // fixed-point residual of the DR map
    w += z - x;
    if (diag) diag->merit.push_back(merit);

    change = (x - x_prev).norm() / std::max(x_prev.norm(), 1e-12);
    x_prev = x;
    if (it > 1 && change <= cfg.tolerance) {
      converged = true;
      break;
    }
  }

  if (diag) {
    diag->iterations = it;
    diag->converged = converged;
    diag->final_change = change;
  }
  if (!converged)
    throw ConvergenceError("l1 solver: no convergence within max_iterations", scale * x, it,
                           change);
  return scale * x;
}

void MusicConfig::validate(int n) const {
  if (model_order < 1) throw ParameterError("music config: model order must be positive");
  if (!(model_order < subarray_length && subarray_length < n))
    throw ParameterError("music config: need K < L < N");
  if (grid_oversampling < 1) throw ParameterError("music config: oversampling must be >= 1");
}

MusicConfig MusicConfig::for_signal(int n, int k) {
  MusicConfig cfg;
  cfg.subarray_length = n / 2;
  cfg.grid_oversampling = 20;
  cfg.model_order = k;
  return cfg;
}

MusicResult music_delays(const Eigen::VectorXcd& h, const MusicConfig& cfg, double delta) {
  const int n = static_cast<int>(h.size());
  cfg.validate(n);
  const int l = cfg.subarray_length;
  const int k = cfg.model_order;

  MusicResult result;
  const double hnorm = h.norm();
  if (!(hnorm > 0.0)) {
    result.delays.assign(k, 0.0);
    result.padded = true;
    return result;
  }

  // Scale invariance: delays depend on h only through its direction.
  const VectorXcd hn = h / hnorm;

  // Inverse DFT turns tap positions into frequencies of complex exponentials.
  VectorXcd z(n);
  for (int m = 0; m < n; ++m) {
    std::complex<double> acc{0.0, 0.0};
    for (int j = 0; j < n; ++j)
      acc += hn[j] * std::polar(1.0, 2.0 * M_PI * static_cast<double>(m) * j / n);
    z[m] = acc / static_cast<double>(n);
  }

  // Covariance of sliding snapshots with forward-backward averaging.
  const int snapshots = n - l + 1;
  MatrixXcd x(l, snapshots);
  for (int i = 0; i < snapshots; ++i) x.col(i) = z.segment(i, l);
  MatrixXcd r = (x * x.adjoint()) / static_cast<double>(snapshots);
  MatrixXcd rb(l, l);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j) rb(i, j) = std::conj(r(l - 1 - i, l - 1 - j));
  r = 0.5 * (r + rb);

  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(r);
  if (es.info() != Eigen::Success)
    throw ParameterError("music: eigendecomposition failed");
  const MatrixXcd signal_basis = es.eigenvectors().rightCols(k);  // L x K

  // Pseudospectrum P(f) = 1 / ||E_n^H a(f)||^2 = 1 / (L - ||E_s^H a(f)||^2).
  const int grid = n * cfg.grid_oversampling;
  VectorXd p(grid);
  VectorXcd steer(l);
  for (int i = 0; i < grid; ++i) {
    const double f = static_cast<double>(i) / grid;
    const std::complex<double> step = std::polar(1.0, 2.0 * M_PI * f);
    std::complex<double> cur{1.0, 0.0};
    for (int j = 0; j < l; ++j) {
      steer[j] = cur;
      cur *= step;
    }
    const double projected = (signal_basis.adjoint() * steer).squaredNorm();
    const double denom = std::max(static_cast<double>(l) - projected, 1e-12 * l);
    p[i] = 1.0 / denom;
  }

  // Circular local maxima, strongest first.
  std::vector<int> maxima;
  for (int i = 0; i < grid; ++i) {
    const double prev = p[(i - 1 + grid) % grid];
    const double next = p[(i + 1) % grid];
    if (p[i] > prev && p[i] >= next) maxima.push_back(i);
  }
  std::sort(maxima.begin(), maxima.end(), [&](int a, int b) { return p[a] > p[b]; });

  // Greedy pick with a one-Nyquist-cell separation so one lobe is never
  // counted twice.
  const int min_sep = cfg.grid_oversampling;
  std::vector<int> picked;
  for (int cand : maxima) {
    if (static_cast<int>(picked.size()) == k) break;
    bool ok = true;
    for (int sel : picked) {
      const int d = std::abs(cand - sel);
      if (std::min(d, grid - d) < min_sep) {
        ok = false;
        break;
      }
    }
    if (ok) picked.push_back(cand);
  }

  if (picked.empty()) {
    result.delays.assign(k, 0.0);
    result.padded = true;
    return result;
  }
  while (static_cast<int>(picked.size()) < k) {
    result.padded = true;
    picked.push_back(picked.front());  // repeat the strongest peak
  }

  // Quadratic refinement of each peak on the fine grid.
  for (int idx : picked) {
    const double ym = p[(idx - 1 + grid) % grid];
    const double y0 = p[idx];
    const double yp = p[(idx + 1) % grid];
    const double denom = ym + yp - 2.0 * y0;
    double offset = 0.0;
    if (std::abs(denom) > 1e-12 * std::abs(y0))
      offset = std::clamp((ym - yp) / (2.0 * denom), -0.5, 0.5);
    const double f = (idx + offset) / grid;
    result.delays.push_back(f * n * delta);
  }
  std::sort(result.delays.begin(), result.delays.end());
  return result;
}

namespace {

// Amplitudes by least squares of the observed vector against per-delay
// template columns; returns the result sorted by delay.
EstimationResult assemble_result(const std::vector<double>& delays, const ChirpSpec& spec,
                                 const std::function<Vec(const Vec&)>& observe,
                                 const Vec& observed) {
  const int k = static_cast<int>(delays.size());
  MatrixXcd templates(spec.n, k);
  MatrixXcd observed_templates(observed.size(), k);
  for (int i = 0; i < k; ++i) {
    templates.col(i) = chirp_template(spec, delays[i]);
    observed_templates.col(i) = observe(templates.col(i));
  }
  Eigen::JacobiSVD<MatrixXcd> svd(observed_templates, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  const VectorXcd amps = svd.solve(observed);

  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return delays[a] < delays[b]; });

  EstimationResult result;
  for (int idx : order) {
    result.delays.push_back(delays[idx]);
    result.amplitudes.push_back(amps[idx]);
  }
  result.residual_norm = (observed - observed_templates * amps).norm();
  result.reconstructed = templates * amps;
  return result;
}

}  // namespace

EstimationResult tde_music(const Vec& y, const MeasurementMatrix& phi, const Dictionary& dict,
                           int k, const L1SolverConfig& l1cfg, const MusicConfig& musiccfg,
                           const Eigen::MatrixXcd* compressed) {
  if (musiccfg.model_order != k)
    throw ParameterError("tde music: sparsity does not match the MUSIC model order");
  Eigen::MatrixXcd local;
  if (!compressed) {
    local = compress_atoms(phi, dict);
    compressed = &local;
  }
  const VectorXcd h = l1_reconstruct(y, *compressed, l1cfg);
  const MusicResult mus = music_delays(h, musiccfg, dict.delta);
  return assemble_result(
      mus.delays, dict.spec, [&](const Vec& v) { return measure(phi, v); }, y);
}

EstimationResult downsample_music(const Vec& f_low, const Eigen::MatrixXcd& dict_low,
                                  const Dictionary& dict, int k, const MusicConfig& musiccfg) {
  const int m = static_cast<int>(f_low.size());
  if (dict_low.rows() != m) throw ParameterError("downsample music: row count mismatch");
  if (dict_low.cols() != dict.size())
    throw ParameterError("downsample music: dictionary width mismatch");
  if (musiccfg.model_order != k)
    throw ParameterError("downsample music: sparsity does not match the MUSIC model order");

  // Tikhonov-regularized pseudo-inverse of the fat downsampled dictionary.
  const MatrixXcd gram = dict_low * dict_low.adjoint();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(gram);
  if (es.info() != Eigen::Success)
    throw ParameterError("downsample music: eigendecomposition failed");
  const VectorXd lambda = es.eigenvalues().cwiseMax(0.0);
  const double sigma_max = std::sqrt(lambda.maxCoeff());
  const double reg = 1e-6 * sigma_max;
  VectorXcd filtered = es.eigenvectors().adjoint() * f_low;
  for (int i = 0; i < filtered.size(); ++i) filtered[i] /= lambda[i] + reg * reg;
  const VectorXcd h = dict_low.adjoint() * (es.eigenvectors() * filtered);

  const MusicResult mus = music_delays(h, musiccfg, dict.delta);
  const auto kept = downsample_indices(dict.size(), m);
  auto observe = [&](const Vec& v) {
    Vec out(m);
    for (int i = 0; i < m; ++i) out[i] = v[kept[i]];
    return out;
  };
  return assemble_result(mus.delays, dict.spec, observe, f_low);
}

}  // namespace tde
