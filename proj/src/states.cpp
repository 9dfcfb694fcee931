#include "pulseforge/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pulseforge/errors.hpp"

namespace pulseforge {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over seed advanced by the stream index.
  std::uint64_t z = seed + (stream + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<Eigen::MatrixXcd> su_basis(int n) {
  if (n < 2) throw ConfigError("su(n) basis requires n >= 2");
  const std::complex<double> i{0.0, 1.0};
  std::vector<Eigen::MatrixXcd> basis;
  basis.reserve(n * n - 1);
  // Symmetric pair family.
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
      m(j, k) = 1.0;
      m(k, j) = 1.0;
      basis.push_back(std::move(m));
    }
  // Antisymmetric family (-i above the diagonal).
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
      m(j, k) = -i;
      m(k, j) = i;
      basis.push_back(std::move(m));
    }
  // Diagonal family: sqrt(2/(k(k+1))) diag(1,...,1, -k, 0,...).
  for (int k = 1; k < n; ++k) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    const double norm = std::sqrt(2.0 / (k * (k + 1.0)));
    for (int j = 0; j < k; ++j) m(j, j) = norm;
    m(k, k) = -norm * k;
    basis.push_back(std::move(m));
  }
  return basis;
}

Eigen::VectorXd featurize(const PureState& psi,
                          const std::vector<Eigen::MatrixXcd>& basis) {
  if (basis.empty() || psi.size() != basis.front().rows())
    throw ConfigError("featurize: state dimension does not match basis");
  Eigen::VectorXd features(static_cast<int>(basis.size()));
  for (int a = 0; a < static_cast<int>(basis.size()); ++a)
    features(a) = psi.dot(basis[a] * psi).real();  // real by Hermiticity
  return features;
}

PureState haar_sample(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  PureState psi(n);
  for (int j = 0; j < n; ++j) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    psi(j) = std::complex<double>(re, im);
  }
  psi /= psi.norm();
  return psi;
}

std::vector<PureState> haar_dataset(int count, int n, std::uint64_t seed) {
  if (count < 1) throw ConfigError("haar_dataset: count must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<PureState> states;
  states.reserve(count);
  for (int c = 0; c < count; ++c) states.push_back(haar_sample(n, rng));
  return states;
}

TargetSet make_target_set(std::vector<PureState> states, int n) {
  const auto basis = su_basis(n);
  TargetSet set;
  set.features.resize(n * n - 1, static_cast<int>(states.size()));
  for (int c = 0; c < static_cast<int>(states.size()); ++c)
    set.features.col(c) = featurize(states[c], basis);
  set.states = std::move(states);
  return set;
}

PureState bloch_to_state(const BlochAngles& angles) {
  PureState psi(2);
  psi(0) = std::cos(angles.theta / 2.0);
  psi(1) = std::polar(std::sin(angles.theta / 2.0), angles.phi);
  return psi;
}

BlochAngles bloch_from_features(const Eigen::VectorXd& features) {
  if (features.size() != 3)
    throw ConfigError("bloch_from_features expects qubit features (X, Y, Z)");
  BlochAngles angles;
  angles.theta = std::acos(std::clamp(features(2), -1.0, 1.0));
  angles.phi = std::atan2(features(1), features(0));
  if (angles.phi < 0.0) angles.phi += 2.0 * std::numbers::pi;
  const double sin_theta = std::hypot(features(0), features(1));
  if (sin_theta < 1e-14) angles.phi = 0.0;  // pole: phi undefined
  return angles;
}

std::vector<BlochAngles> bloch_grid(int resolution_theta, int resolution_phi) {
  if (resolution_theta < 2 || resolution_phi < 2)
    throw ConfigError("bloch_grid resolutions must be >= 2");
  std::vector<BlochAngles> grid;
  grid.reserve(static_cast<std::size_t>(resolution_theta) * resolution_phi);
  for (int ti = 0; ti < resolution_theta; ++ti) {
    // cos(theta) equally spaced from 1 down to -1 (area-uniform measure).
    const double c = 1.0 - 2.0 * ti / (resolution_theta - 1.0);
    const double theta = std::acos(std::clamp(c, -1.0, 1.0));
    for (int pj = 0; pj < resolution_phi; ++pj)
      grid.push_back({theta, 2.0 * std::numbers::pi * pj / resolution_phi});
  }
  return grid;
}

Eigen::MatrixXcd random_traceless_hermitian(int n, std::mt19937_64& rng) {
  const auto basis = su_basis(n);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& b : basis) m += gauss(rng) * b;
  const double frob = m.norm();
  if (frob < 1e-300) return random_traceless_hermitian(n, rng);  // astronomically unlikely
  return m / frob;
}

double ks_statistic_uniform(std::vector<double> samples, double lo, double hi) {
  if (samples.empty() || !(hi > lo))
    throw ConfigError("ks_statistic_uniform: need samples and hi > lo");
  std::sort(samples.begin(), samples.end());
  const double count = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double cdf = std::clamp((samples[k] - lo) / (hi - lo), 0.0, 1.0);
    d = std::max(d, std::abs(cdf - (k + 1) / count));
    d = std::max(d, std::abs(cdf - k / count));
  }
  return d;
}

double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw ConfigError("ks_statistic_two_sample: both samples must be nonempty");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < a.size() && ib < b.size()) {
    // Step past every copy of the smallest pending value in both samples
    // before comparing, so ties never produce a spurious mid-tie gap.
    const double v = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] == v) ++ia;
    while (ib < b.size() && b[ib] == v) ++ib;
    d = std::max(d, std::abs(ia / static_cast<double>(a.size()) -
                             ib / static_cast<double>(b.size())));
  }
  return d;
}

}  // namespace pulseforge
