#include "tde/dictionary.hpp"

#include <algorithm>
#include <cmath>

#include "tde/errors.hpp"

namespace tde {

Dictionary build_dictionary(const ChirpSpec& spec) {
  spec.validate();
  Dictionary dict;
  dict.delta = spec.grid_step();
  dict.spec = spec;

  const Vec g0 = chirp_template(spec, 0.0);
  const int n = spec.n;
  dict.atoms.resize(n, n);
  for (int col = 0; col < n; ++col)
    for (int row = 0; row < n; ++row)
      dict.atoms(row, col) = g0[(row - col + n) % n];

  dict.coherence_profile = (dict.atoms.adjoint() * dict.atoms.col(0)).cwiseAbs();
  return dict;
}

Eigen::VectorXd correlation_proxy(const Vec& y_res, const Eigen::MatrixXcd& compressed_atoms) {
  if (y_res.size() != compressed_atoms.rows())
    throw ParameterError("correlation proxy: residual length does not match atom rows");
  return (compressed_atoms.adjoint() * y_res).cwiseAbs();
}

double coherence(int i, int k, const Dictionary& dict) {
  const int n = dict.size();
  if (i < 0 || i >= n || k < 0 || k >= n)
    throw ParameterError("coherence: atom index out of range");
  return std::abs(dict.atoms.col(i).dot(dict.atoms.col(k)));
}

std::vector<int> band(double eta, const std::vector<int>& s, const Dictionary& dict) {
  const int n = dict.size();
  const double r2 = dict.coherence_profile[0];
  const double threshold = eta + 1e-9 * r2;

  std::vector<char> in_band(n, 0);
  for (int k : s) {
    if (k < 0 || k >= n) throw ParameterError("band: index out of range");
    in_band[k] = 1;  // the band always contains the set itself
    for (int i = 0; i < n; ++i)
      if (dict.coherence_profile[(k - i + n) % n] > threshold) in_band[i] = 1;
  }

  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (in_band[i]) out.push_back(i);
  return out;
}

PolarGeometry polar_geometry(const Dictionary& dict) {
  if (dict.size() < 3) throw ParameterError("polar geometry: dictionary too small");
  PolarGeometry geom;
  geom.r = dict.atoms.col(0).norm();

  const std::complex<double> ip = dict.atoms.col(0).dot(dict.atoms.col(1));
  const double c = std::clamp(ip.real() / (geom.r * geom.r), -1.0, 1.0);
  geom.theta = std::acos(c);
  if (geom.theta < 1e-12 || geom.theta > M_PI - 1e-12)
    throw GeometryError("polar geometry: degenerate arc angle");

  const double ct = std::cos(geom.theta);
  const double st = std::sin(geom.theta);
  Eigen::Matrix3d basis;
  basis << 1.0, geom.r * ct, -geom.r * st,  //
      1.0, geom.r, 0.0,                     //
      1.0, geom.r * ct, geom.r * st;
  geom.a = basis.inverse();
  return geom;
}

}  // namespace tde
