#include "tde/sensing.hpp"

#include <algorithm>
#include <cmath>

#include "tde/errors.hpp"

namespace tde {

int MeasurementMatrix::row_of_column(int k) const {
  // Rows are contiguous blocks; binary search the block boundaries.
  const auto it = std::upper_bound(row_start.begin(), row_start.end(), k);
  return static_cast<int>(it - row_start.begin()) - 1;
}

Eigen::MatrixXd MeasurementMatrix::dense() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, n);
  for (int r = 0; r < m; ++r)
    for (int k = row_start[r]; k < row_start[r + 1]; ++k) out(r, k) = sign[k];
  return out;
}

void MeasurementMatrix::validate() const {
  if (m < 1 || m > n) throw ParameterError("measurement matrix: need 1 <= M <= N");
  if (static_cast<int>(row_start.size()) != m + 1 || static_cast<int>(sign.size()) != n)
    throw ParameterError("measurement matrix: inconsistent block layout");
  if (row_start.front() != 0 || row_start.back() != n)
    throw ParameterError("measurement matrix: rows do not cover all columns");
  for (int r = 0; r < m; ++r)
    if (row_start[r + 1] <= row_start[r])
      throw ParameterError("measurement matrix: empty or overlapping row block");
  for (double s : sign)
    if (s != 1.0 && s != -1.0) throw ParameterError("measurement matrix: signs must be +-1");
}

MeasurementMatrix MeasurementMatrix::identity(int n) {
  MeasurementMatrix phi;
  phi.m = n;
  phi.n = n;
  phi.kappa = 1.0;
  phi.row_start.resize(n + 1);
  for (int r = 0; r <= n; ++r) phi.row_start[r] = r;
  phi.sign.assign(n, 1.0);
  return phi;
}

MeasurementMatrix random_demodulator(int n, double kappa, Rng& rng) {
  if (n < 1) throw ParameterError("random demodulator: N must be positive");
  const int m = static_cast<int>(std::lround(kappa * n));
  if (m < 1 || m > n)
    throw ParameterError("random demodulator: M = round(kappa*N) outside [1, N]");

  MeasurementMatrix phi;
  phi.m = m;
  phi.n = n;
  phi.kappa = kappa;
  phi.row_start.resize(m + 1);
  for (int r = 0; r <= m; ++r)
    phi.row_start[r] = static_cast<std::int32_t>((static_cast<std::int64_t>(r) * n) / m);
  phi.sign.resize(n);
  for (int k = 0; k < n; ++k) phi.sign[k] = rng.sign();
  phi.validate();
  return phi;
}

Vec measure(const MeasurementMatrix& phi, const Vec& f) {
  if (f.size() != phi.n) throw ParameterError("measure: signal length mismatch");
  Vec y = Vec::Zero(phi.m);
  for (int r = 0; r < phi.m; ++r)
    for (int k = phi.row_start[r]; k < phi.row_start[r + 1]; ++k)
      y[r] += phi.sign[k] * f[k];
  return y;
}

Eigen::MatrixXcd compress_atoms(const MeasurementMatrix& phi, const Dictionary& dict) {
  if (dict.size() != phi.n) throw ParameterError("compress atoms: dimension mismatch");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(phi.m, dict.size());
  // Each dictionary row is consumed by exactly one measurement row.
  for (int r = 0; r < phi.m; ++r)
    for (int k = phi.row_start[r]; k < phi.row_start[r + 1]; ++k)
      out.row(r) += phi.sign[k] * dict.atoms.row(k);
  return out;
}

double noise_variance(const Vec& y, double snr_db) {
  const double power = y.squaredNorm();
  if (!(power > 0.0)) throw ParameterError("noise: zero measurement power");
  if (!std::isfinite(snr_db)) throw ParameterError("noise: SNR must be finite");
  return (power / static_cast<double>(y.size())) / std::pow(10.0, snr_db / 10.0);
}

Vec add_noise(const Vec& y, const NoiseSpec& spec, Rng& rng) {
  if (!spec.enabled) return y;
  const double sigma2 = noise_variance(y, spec.snr_db);
  Vec out = y;
  for (int i = 0; i < out.size(); ++i) out[i] += rng.complex_normal(sigma2);
  return out;
}

std::vector<int> downsample_indices(int n, int m) {
  if (m < 1 || m > n) throw ParameterError("downsample: need 1 <= M <= N");
  std::vector<int> idx(m);
  for (int k = 0; k < m; ++k)
    idx[k] = static_cast<int>((static_cast<std::int64_t>(k) * n) / m);
  return idx;
}

Vec downsample(const Vec& f, int m) {
  const auto idx = downsample_indices(static_cast<int>(f.size()), m);
  Vec out(m);
  for (int k = 0; k < m; ++k) out[k] = f[idx[k]];
  return out;
}

}  // namespace tde
