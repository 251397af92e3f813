#include "tde/chirp.hpp"

#include <algorithm>
#include <cmath>

#include "tde/errors.hpp"

namespace tde {

namespace {

// Raised-cosine window, zero outside the open interval (0,T).
double window(double t, double T) {
  if (t <= 0.0 || t >= T) return 0.0;
  return 0.5 * T * (1.0 + std::cos(2.0 * M_PI * (t - 0.5 * T) / T));
}

// Unnormalized complex chirp sample at time t.
std::complex<double> raw_chirp(const ChirpSpec& s, double t) {
  const double w = window(t, s.T);
  if (w == 0.0) return {0.0, 0.0};
  const double tc = t - 0.5 * s.T;
  const double phase = 2.0 * M_PI * (s.f0 + 0.5 * s.delta_f / s.T * tc) * tc;
  return std::polar(w, phase);
}

// 1/sqrt(energy) of the tau=0 sampled template.
double norm_scale(const ChirpSpec& s) {
  double energy = 0.0;
  for (int k = 0; k < s.n; ++k) energy += std::norm(raw_chirp(s, k / s.fs));
  return 1.0 / std::sqrt(energy);
}

}  // namespace

void ChirpSpec::validate() const {
  if (!(f0 > 0.0) || !(delta_f > 0.0) || !(T > 0.0) || !(fs > 0.0))
    throw ParameterError("chirp spec: f0, delta_f, T, fs must be positive");
  if (n < 2) throw ParameterError("chirp spec: need at least 2 samples");
  if (T * fs > static_cast<double>(n))
    throw ParameterError("chirp spec: pulse support T*fs exceeds record length");
}

ChirpSpec ChirpSpec::reference() { return {1e6, 40e6, 1e-6, 50e6, 500}; }

std::vector<double> SparseScene::delays() const {
  std::vector<double> out;
  out.reserve(pulses.size());
  for (const auto& p : pulses) out.push_back(p.delay);
  return out;
}

void SparseScene::validate(const ChirpSpec& spec) const {
  spec.validate();
  const double hi = spec.max_delay();
  for (const auto& p : pulses) {
    if (p.delay < 0.0 || p.delay > hi)
      throw ParameterError("scene: delay outside [0, (N-1)/fs - T]");
  }
  for (std::size_t i = 0; i < pulses.size(); ++i)
    for (std::size_t j = i + 1; j < pulses.size(); ++j)
      if (std::abs(pulses[i].delay - pulses[j].delay) < spec.T)
        throw ParameterError("scene: pulses closer than the pulse duration");
}

void SceneDrawSpec::validate() const {
  if (k < 0) throw ParameterError("draw spec: negative pulse count");
  if (!(amp_lo < amp_hi)) throw ParameterError("draw spec: empty amplitude range");
  if (!(amp_min_abs < amp_hi))
    throw ParameterError("draw spec: amp_min_abs not below upper amplitude bound");
  if (tau_hi < tau_lo) throw ParameterError("draw spec: empty delay range");
  if (k > 0 && !(k * min_spacing < tau_hi - tau_lo))
    throw ParameterError("draw spec: spacing infeasible for requested pulse count");
}

SceneDrawSpec SceneDrawSpec::for_chirp(const ChirpSpec& spec, int k) {
  SceneDrawSpec d;
  d.k = k;
  d.tau_lo = 0.0;
  d.tau_hi = spec.max_delay();
  d.min_spacing = spec.T;
  return d;
}

Vec chirp_template(const ChirpSpec& spec, double tau) {
  spec.validate();
  const double scale = norm_scale(spec);
  Vec g = Vec::Zero(spec.n);

  // Integer-grid delays take an exact shift path so that on-grid templates
  // are bitwise shifted copies of the tau=0 template.
  const double shift = tau * spec.fs;
  const double rounded = std::round(shift);
  if (std::abs(shift - rounded) <= 1e-9) {
    const long m = static_cast<long>(rounded);
    for (int k = 0; k < spec.n; ++k) {
      const long i = k - m;
      if (i < 0) continue;
      g[k] = scale * raw_chirp(spec, static_cast<double>(i) / spec.fs);
    }
  } else {
    for (int k = 0; k < spec.n; ++k)
      g[k] = scale * raw_chirp(spec, (k - shift) / spec.fs);
  }
  return g;
}

Vec synthesize(const ChirpSpec& spec, const SparseScene& scene) {
  scene.validate(spec);
  Vec f = Vec::Zero(spec.n);
  for (const auto& p : scene.pulses) f += p.amplitude * chirp_template(spec, p.delay);
  return f;
}

SparseScene draw_scene(const SceneDrawSpec& draw, Rng& rng) {
  draw.validate();
  SparseScene scene;
  if (draw.k == 0) return scene;

  constexpr long kMaxRetries = 1000000;
  std::vector<double> taus(draw.k);
  long attempts = 0;
  while (true) {
    if (++attempts > kMaxRetries)
      throw InfeasibleSceneError("scene draw: spacing rejection budget exhausted");
    for (double& t : taus) t = rng.uniform(draw.tau_lo, draw.tau_hi);
    bool ok = true;
    for (int i = 0; ok && i < draw.k; ++i)
      for (int j = i + 1; ok && j < draw.k; ++j)
        if (std::abs(taus[i] - taus[j]) < draw.min_spacing) ok = false;
    if (ok) break;
  }

  auto part = [&] {
    double v;
    do {
      v = rng.uniform(draw.amp_lo, draw.amp_hi);
    } while (std::abs(v) < draw.amp_min_abs);
    return v;
  };

  scene.pulses.resize(draw.k);
  for (int i = 0; i < draw.k; ++i) {
    const double re = part();
    const double im = part();
    scene.pulses[i] = {{re, im}, taus[i]};
  }
  return scene;
}

}  // namespace tde
