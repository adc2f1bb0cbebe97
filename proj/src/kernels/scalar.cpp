#include "wavinv/kernels.hpp"

namespace wavinv::kernels::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double dot3_scalar(const double* a, const double* b, const double* c, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i] * c[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void axpy_product_scalar(double alpha, const double* x, const double* z, double* y,
                         std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i] * z[i];
}

}  // namespace

const Table& scalar_impl() {
  static const Table table{Isa::Scalar, "scalar", dot_scalar, dot3_scalar, axpy_scalar,
                           axpy_product_scalar};
  return table;
}

}  // namespace wavinv::kernels::detail
