#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hsumma {

// Dense row-major matrix of doubles.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0) {}

  double& operator()(int i, int j) {
    return data[static_cast<std::size_t>(i) * cols + j];
  }
  double operator()(int i, int j) const {
    return data[static_cast<std::size_t>(i) * cols + j];
  }
  double* row(int i) { return data.data() + static_cast<std::size_t>(i) * cols; }
  const double* row(int i) const {
    return data.data() + static_cast<std::size_t>(i) * cols;
  }

  static Matrix identity(int n);
};

// Plain triple-loop product, the numerical oracle every simulated run is
// checked against.  Accumulates each output element in ascending-k order.
Matrix reference_multiply(const Matrix& a, const Matrix& b);

// Fills `m` with uniform values in [-1, 1).  Uses the raw 64-bit stream of
// mt19937_64 so results are identical across platforms and standard library
// implementations (std::uniform_real_distribution is not portable).
void fill_uniform(Matrix& m, std::uint64_t seed);

double frobenius_norm(const Matrix& m);

// ||got - want||_F / ||want||_F, with a zero-norm guard.
double relative_frobenius_error(const Matrix& got, const Matrix& want);

}  // namespace hsumma
