#include "sparsity/matrix.hpp"

#include "sparsity/errors.hpp"
#include "sparsity/kernels.hpp"

namespace sparsity {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw InvalidDimension("Matrix: data length does not match rows * cols");
}

Matrix Matrix::identity(std::size_t n, double scale) {
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = scale;
  return out;
}

void Matrix::multiply(std::span<const double> x, std::span<double> out) const {
  if (x.size() != cols_ || out.size() != rows_)
    throw InvalidDimension("Matrix::multiply: dimension mismatch");
  kernels::active().gemv(data_.data(), rows_, cols_, x.data(), out.data());
}

std::vector<double> Matrix::multiply(std::span<const double> x) const {
  std::vector<double> out(rows_);
  multiply(x, out);
  return out;
}

void Matrix::multiply_transpose(std::span<const double> r, std::span<double> out) const {
  if (r.size() != rows_ || out.size() != cols_)
    throw InvalidDimension("Matrix::multiply_transpose: dimension mismatch");
  kernels::active().gemv_t(data_.data(), rows_, cols_, r.data(), out.data());
}

std::vector<double> Matrix::multiply_transpose(std::span<const double> r) const {
  std::vector<double> out(cols_);
  multiply_transpose(r, out);
  return out;
}

}  // namespace sparsity
