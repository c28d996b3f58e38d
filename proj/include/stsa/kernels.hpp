#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

// Low-level array kernels used by the analysis modules. Every kernel has a
// scalar reference implementation and, on x86-64, an AVX2 variant; the
// active variant is chosen once at runtime from CPU capabilities. The
// environment variable STSA_KERNELS (auto|scalar|avx2) overrides the choice,
// and force_backend() does the same programmatically (used by the
// equivalence tests).
namespace stsa::kernels {

enum class Backend { Scalar, Avx2 };

// Backend currently in effect.
Backend active_backend();

// True when AVX2 variants are compiled in and the CPU supports them.
bool avx2_supported();

// Pin the backend. Throws stsa::Error if the requested backend is not
// available on this machine.
void force_backend(Backend backend);

// Return to automatic selection.
void reset_backend();

double sum(std::span<const double> x);

// Dot product over min(a.size(), b.size()) elements; callers pass equal
// sizes, overlapping views are allowed.
double dot(std::span<const double> a, std::span<const double> b);

// Sum of (x[i] - center)^2.
double sumsq_centered(std::span<const double> x, double center);

// out[i] = (in[i] - shift) * scale. in and out must have equal size.
void affine(std::span<const double> in, std::span<double> out, double scale,
            double shift);

// Sum of |a[i] - b[i]|.
double abs_diff_sum(std::span<const double> a, std::span<const double> b);

// Sum of (a[i] - b[i])^2.
double sq_diff_sum(std::span<const double> a, std::span<const double> b);

// y[i] += alpha * x[i].
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// out[i] = number of entries in upper_bounds that are strictly below x[i].
// With sorted upper_bounds this is the index of the half-open cell
// (bounds[j-1], bounds[j]] containing x[i], values above the last bound
// landing in the last cell.
void classify_bins(std::span<const double> x,
                   std::span<const double> upper_bounds,
                   std::span<std::uint8_t> out);

}  // namespace stsa::kernels
