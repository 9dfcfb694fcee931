#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pulseforge/quantum.hpp"

namespace pulseforge {

// ---------------------------------------------------------------- seeding ---

// Mixes a base seed with a stream index into an independent 64-bit seed
// (splitmix64 finalizer). Used to split one user seed into the dataset /
// validation / init / shuffle streams without correlations.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// ------------------------------------------------------------- su(n) basis ---

// Traceless Hermitian generator basis of su(n), n^2 - 1 matrices in a fixed
// order: first the symmetric pair family (E_jk + E_kj for j < k, pairs in
// lexicographic (j, k) order), then the antisymmetric family
// (-i E_jk + i E_kj, same order), then the diagonal family
// sqrt(2/(k(k+1))) * diag(1,...,1, -k, 0,...) for k = 1..n-1.
// Normalized so Tr(l_a l_b) = 2 delta_ab; n = 2 gives the Pauli X, Y, Z.
std::vector<Eigen::MatrixXcd> su_basis(int n);

// Expectation values <psi| l_a |psi> for every basis matrix; the feature
// vector fed to the network. Throws ConfigError on dimension mismatch.
Eigen::VectorXd featurize(const PureState& psi,
                          const std::vector<Eigen::MatrixXcd>& basis);

// ----------------------------------------------------------- state sampling ---

// One Haar-uniform pure state of dimension n: 2n independent standard
// normals as real/imaginary parts, then normalized.
PureState haar_sample(int n, std::mt19937_64& rng);

// `count` independent Haar samples from a dedicated generator seeded with
// `seed`. Same arguments always give the identical dataset.
std::vector<PureState> haar_dataset(int count, int n, std::uint64_t seed);

// A batch of target states with their feature vectors precomputed, column
// per state, so hot loops never re-featurize.
struct TargetSet {
  std::vector<PureState> states;
  Eigen::MatrixXd features;  // (n^2 - 1) x states.size()
};

TargetSet make_target_set(std::vector<PureState> states, int n);

// ------------------------------------------------------------- Bloch sphere ---

struct BlochAngles {
  double theta = 0.0;  // polar, [0, pi]
  double phi = 0.0;    // azimuthal, [0, 2*pi)
};

// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
PureState bloch_to_state(const BlochAngles& angles);

// Recovers (theta, phi) from qubit features (<X>, <Y>, <Z>); phi folded
// into [0, 2*pi). Ill-defined at the poles, where phi comes back as 0.
BlochAngles bloch_from_features(const Eigen::VectorXd& features);

// Area-uniform grid: cos(theta) equally spaced from 1 to -1 inclusive
// (resolution_theta points), phi = 2*pi*j/resolution_phi for
// j = 0..resolution_phi-1. Row-major theta-major ordering:
// index = i * resolution_phi + j. Throws ConfigError if a resolution < 2.
std::vector<BlochAngles> bloch_grid(int resolution_theta, int resolution_phi);

// -------------------------------------------------------- random directions ---

// Random traceless Hermitian n x n matrix with unit Frobenius norm:
// Gaussian coefficients over the su(n) basis, then normalized. Used as a
// rotation generator for target-state perturbations.
Eigen::MatrixXcd random_traceless_hermitian(int n, std::mt19937_64& rng);

// ------------------------------------------------------- distribution tests ---

// One-sample Kolmogorov-Smirnov statistic of `samples` against the uniform
// distribution on [lo, hi].
double ks_statistic_uniform(std::vector<double> samples, double lo, double hi);

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace pulseforge
