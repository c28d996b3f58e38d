#include "stsa/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "kernels_detail.hpp"
#include "stsa/errors.hpp"

namespace stsa::kernels {

namespace scalar {

double sum(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size() < b.size() ? a.size() : b.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sumsq_centered(std::span<const double> x, double center) {
  double s = 0.0;
  for (double v : x) {
    const double d = v - center;
    s += d * d;
  }
  return s;
}

void affine(std::span<const double> in, std::span<double> out, double scale,
            double shift) {
  const std::size_t n = in.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = (in[i] - shift) * scale;
}

double abs_diff_sum(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

double sq_diff_sum(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void classify_bins(std::span<const double> x,
                   std::span<const double> upper_bounds,
                   std::span<std::uint8_t> out) {
  const std::size_t n = x.size();
  const std::size_t nb = upper_bounds.size();
  for (std::size_t i = 0; i < n; ++i) {
    unsigned c = 0;
    for (std::size_t j = 0; j < nb; ++j) c += x[i] > upper_bounds[j] ? 1u : 0u;
    out[i] = static_cast<std::uint8_t>(c);
  }
}

}  // namespace scalar

namespace {

struct Table {
  double (*sum)(std::span<const double>);
  double (*dot)(std::span<const double>, std::span<const double>);
  double (*sumsq_centered)(std::span<const double>, double);
  void (*affine)(std::span<const double>, std::span<double>, double, double);
  double (*abs_diff_sum)(std::span<const double>, std::span<const double>);
  double (*sq_diff_sum)(std::span<const double>, std::span<const double>);
  void (*axpy)(double, std::span<const double>, std::span<double>);
  void (*classify_bins)(std::span<const double>, std::span<const double>,
                        std::span<std::uint8_t>);
  Backend backend;
};

constexpr Table kScalarTable = {
    scalar::sum,          scalar::dot,         scalar::sumsq_centered,
    scalar::affine,       scalar::abs_diff_sum, scalar::sq_diff_sum,
    scalar::axpy,         scalar::classify_bins, Backend::Scalar};

#if defined(STSA_HAVE_AVX2)
constexpr Table kAvx2Table = {
    avx2::sum,          avx2::dot,         avx2::sumsq_centered,
    avx2::affine,       avx2::abs_diff_sum, avx2::sq_diff_sum,
    avx2::axpy,         avx2::classify_bins, Backend::Avx2};
#endif

bool cpu_has_avx2() {
#if defined(STSA_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table* table_for(Backend b) {
#if defined(STSA_HAVE_AVX2)
  if (b == Backend::Avx2) return &kAvx2Table;
#else
  if (b == Backend::Avx2) return nullptr;
#endif
  (void)b;
  return &kScalarTable;
}

const Table* resolve_default() {
  if (const char* env = std::getenv("STSA_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return &kScalarTable;
    if (std::strcmp(env, "avx2") == 0) {
      if (!cpu_has_avx2())
        throw Error("STSA_KERNELS=avx2 requested but AVX2 is not available");
      return table_for(Backend::Avx2);
    }
    // Anything else, including "auto", falls through to detection.
  }
  if (cpu_has_avx2()) return table_for(Backend::Avx2);
  return &kScalarTable;
}

std::atomic<const Table*> g_table{nullptr};

const Table& active() {
  const Table* t = g_table.load(std::memory_order_acquire);
  if (t == nullptr) {
    // Benign race: concurrent first calls resolve to the same table.
    t = resolve_default();
    g_table.store(t, std::memory_order_release);
  }
  return *t;
}

}  // namespace

Backend active_backend() { return active().backend; }

bool avx2_supported() { return cpu_has_avx2(); }

void force_backend(Backend backend) {
  if (backend == Backend::Avx2 && !cpu_has_avx2())
    throw Error("AVX2 backend is not available on this machine");
  g_table.store(table_for(backend), std::memory_order_release);
}

void reset_backend() { g_table.store(resolve_default(), std::memory_order_release); }

double sum(std::span<const double> x) { return active().sum(x); }

double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a, b);
}

double sumsq_centered(std::span<const double> x, double center) {
  return active().sumsq_centered(x, center);
}

void affine(std::span<const double> in, std::span<double> out, double scale,
            double shift) {
  active().affine(in, out, scale, shift);
}

double abs_diff_sum(std::span<const double> a, std::span<const double> b) {
  return active().abs_diff_sum(a, b);
}

double sq_diff_sum(std::span<const double> a, std::span<const double> b) {
  return active().sq_diff_sum(a, b);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x, y);
}

void classify_bins(std::span<const double> x,
                   std::span<const double> upper_bounds,
                   std::span<std::uint8_t> out) {
  active().classify_bins(x, upper_bounds, out);
}

}  // namespace stsa::kernels
