#pragma once
// Data-parallel inner loops used by the spectral synthesis and the damped
// time quadrature. Every kernel has a scalar reference implementation; ISA
// specific variants (AVX2+FMA on x86-64, NEON on aarch64) are selected once at
// runtime and must agree with the reference up to summation reordering.

#include <cstddef>
#include <span>
#include <string_view>

namespace wavinv::kernels {

enum class Isa { Scalar, Avx2, Neon };

struct Table {
  Isa isa;
  const char* name;
  // sum_i a_i b_i
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i a_i b_i c_i
  double (*dot3)(const double* a, const double* b, const double* c, std::size_t n);
  // y_i += alpha x_i
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y_i += alpha x_i z_i
  void (*axpy_product)(double alpha, const double* x, const double* z, double* y, std::size_t n);
};

const Table& scalar_table();

/// nullptr when the variant was not compiled in or the CPU lacks the ISA.
const Table* avx2_table();
const Table* neon_table();

/// Best table for this machine. The environment variable WAVINV_SIMD
/// (scalar|avx2|neon) pins a choice; an unavailable request falls back to
/// scalar.
const Table& active();

/// Overrides the active table (tests, benchmarks). Not thread-safe.
void set_active(const Table& table);

std::string_view isa_name(Isa isa);

double dot(std::span<const double> a, std::span<const double> b);
double dot3(std::span<const double> a, std::span<const double> b, std::span<const double> c);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void axpy_product(double alpha, std::span<const double> x, std::span<const double> z,
                  std::span<double> y);

namespace detail {
// Per-ISA entry points; defined in scalar.cpp / avx2.cpp / neon.cpp.
const Table& scalar_impl();
const Table& avx2_impl();
const Table& neon_impl();
}  // namespace detail

}  // namespace wavinv::kernels
