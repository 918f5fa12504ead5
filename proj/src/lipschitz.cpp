#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "sparsity/errors.hpp"
#include "sparsity/kernels.hpp"
#include "sparsity/solver.hpp"

namespace sparsity {

namespace {

double gram_eigen_max(const Matrix& X) {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> map(X.data().data(),
                                       static_cast<Eigen::Index>(X.rows()),
                                       static_cast<Eigen::Index>(X.cols()));
  const Eigen::MatrixXd gram =
      X.rows() <= X.cols() ? Eigen::MatrixXd(map * map.transpose())
                           : Eigen::MatrixXd(map.transpose() * map);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  return std::max(eig.eigenvalues().maxCoeff(), 0.0);
}

double power_iteration(const Matrix& X) {
  std::mt19937_64 gen(0x11b5);
  std::normal_distribution<double> gauss;
  std::vector<double> v(X.cols());
  for (double& e : v) e = gauss(gen);
  std::vector<double> xv(X.rows());
  double estimate = 0.0;
  for (int it = 0; it < 20000; ++it) {
    const double nv = kernels::norm(v);
    if (nv == 0.0) return 0.0;
    for (double& e : v) e /= nv;
    X.multiply(v, xv);
    const double next = kernels::squared_norm(xv);
    X.multiply_transpose(xv, v);
    const bool done = it > 0 && std::abs(next - estimate) <= 1e-12 * next;
    estimate = next;
    if (done) break;
  }
  return estimate;
}

}  // namespace

double spectral_norm_squared(const Matrix& X, LipschitzMethod method) {
  if (X.empty()) throw InvalidDimension("spectral_norm_squared: empty matrix");
  return method == LipschitzMethod::exact_svd ? gram_eigen_max(X) : power_iteration(X);
}

double lipschitz_constant(const Matrix& X, LipschitzMethod method) {
  double value = spectral_norm_squared(X, method);
  if (method == LipschitzMethod::power_iteration) value *= 1.01;
  // Any positive number bounds the zero operator.
  return value > 0.0 ? value : 1.0;
}

}  // namespace sparsity
