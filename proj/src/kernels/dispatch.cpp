#include <cassert>
#include <cstdlib>
#include <string>

#include "wavinv/kernels.hpp"

namespace wavinv::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(WAVINV_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table* select_default() {
  const char* env = std::getenv("WAVINV_SIMD");
  if (env != nullptr) {
    const std::string requested(env);
    if (requested == "scalar") return &scalar_table();
    if (requested == "avx2") return avx2_table() ? avx2_table() : &scalar_table();
    if (requested == "neon") return neon_table() ? neon_table() : &scalar_table();
  }
  if (const Table* t = avx2_table()) return t;
  if (const Table* t = neon_table()) return t;
  return &scalar_table();
}

const Table*& active_slot() {
  static const Table* slot = select_default();
  return slot;
}

}  // namespace

const Table& scalar_table() { return detail::scalar_impl(); }

const Table* avx2_table() {
#if defined(WAVINV_HAVE_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? &detail::avx2_impl() : nullptr;
#else
  return nullptr;
#endif
}

const Table* neon_table() {
#if defined(WAVINV_HAVE_NEON)
  return &detail::neon_impl();
#else
  return nullptr;
#endif
}

const Table& active() { return *active_slot(); }

void set_active(const Table& table) { active_slot() = &table; }

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

double dot3(std::span<const double> a, std::span<const double> b, std::span<const double> c) {
  assert(a.size() == b.size() && a.size() == c.size());
  return active().dot3(a.data(), b.data(), c.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

void axpy_product(double alpha, std::span<const double> x, std::span<const double> z,
                  std::span<double> y) {
  assert(x.size() == y.size() && z.size() == y.size());
  active().axpy_product(alpha, x.data(), z.data(), y.data(), y.size());
}

}  // namespace wavinv::kernels
