#include "hsumma/matrix.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace hsumma {

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix reference_multiply(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows)
    throw std::invalid_argument("reference_multiply: inner dimensions differ");
  Matrix c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int j = 0; j < b.cols; ++j) {
      double acc = 0.0;
      for (int k = 0; k < a.cols; ++k) acc += a(i, k) * b(k, j);
      c(i, j) = acc;
    }
  }
  return c;
}

void fill_uniform(Matrix& m, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  for (double& x : m.data) {
    // 53 random bits -> [0, 1), affinely mapped to [-1, 1).
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    x = 2.0 * u - 1.0;
  }
}

double frobenius_norm(const Matrix& m) {
  double acc = 0.0;
  for (double x : m.data) acc += x * x;
  return std::sqrt(acc);
}

double relative_frobenius_error(const Matrix& got, const Matrix& want) {
  if (got.rows != want.rows || got.cols != want.cols)
    throw std::invalid_argument("relative_frobenius_error: shapes differ");
  double diff = 0.0;
  for (std::size_t i = 0; i < got.data.size(); ++i) {
    const double d = got.data[i] - want.data[i];
    diff += d * d;
  }
  const double ref = frobenius_norm(want);
  if (ref == 0.0) return std::sqrt(diff) == 0.0 ? 0.0 : INFINITY;
  return std::sqrt(diff) / ref;
}

}  // namespace hsumma
