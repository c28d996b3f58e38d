#pragma once

#include <cstdint>
#include <span>

// Implementation variants behind the dispatch table in kernels.cpp.
namespace stsa::kernels::scalar {

double sum(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
double sumsq_centered(std::span<const double> x, double center);
void affine(std::span<const double> in, std::span<double> out, double scale,
            double shift);
double abs_diff_sum(std::span<const double> a, std::span<const double> b);
double sq_diff_sum(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void classify_bins(std::span<const double> x,
                   std::span<const double> upper_bounds,
                   std::span<std::uint8_t> out);

}  // namespace stsa::kernels::scalar

#if defined(STSA_HAVE_AVX2)
namespace stsa::kernels::avx2 {

double sum(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
double sumsq_centered(std::span<const double> x, double center);
void affine(std::span<const double> in, std::span<double> out, double scale,
            double shift);
double abs_diff_sum(std::span<const double> a, std::span<const double> b);
double sq_diff_sum(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void classify_bins(std::span<const double> x,
                   std::span<const double> upper_bounds,
                   std::span<std::uint8_t> out);

}  // namespace stsa::kernels::avx2
#endif
