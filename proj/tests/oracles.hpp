// Independent reference implementations the tests check the library
// against. Deliberately slow and simple: Taylor series with scaling and
// squaring instead of eigendecomposition, central differences instead of
// analytic derivatives.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include <Eigen/Dense>

namespace oracles {

// e^A by scaling-and-squaring a truncated Taylor series. No
// diagonalization anywhere, so it is a genuinely independent check of
// spectral propagators.
inline Eigen::MatrixXcd matrix_exponential_series(const Eigen::MatrixXcd& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
  int squarings = 0;
  if (norm > 0.5)
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Eigen::MatrixXcd b = a / std::pow(2.0, squarings);

  const Eigen::Index dim = a.rows();
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Identity(dim, dim);
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(dim, dim);
  for (int k = 1; k <= 40; ++k) {
    term = (term * b) / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

// Central-difference gradient of a scalar function of a real vector.
inline Eigen::VectorXd numerical_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double eps) {
  Eigen::VectorXd grad(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd lo = x, hi = x;
    hi[i] += eps;
    lo[i] -= eps;
    grad[i] = (f(hi) - f(lo)) / (2.0 * eps);
  }
  return grad;
}

// Dense random Hermitian matrix with entries of order one.
inline Eigen::MatrixXcd random_hermitian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd raw(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      raw(r, c) = std::complex<double>(gauss(rng), gauss(rng));
  return 0.5 * (raw + raw.adjoint());
}

// Kronecker product, oscillator-major: (A ⊗ B)(ar*br + brow, ...).
inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a,
                             const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace oracles
