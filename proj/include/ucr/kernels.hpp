#pragma once

#include <span>
#include <string_view>

// Dense vector kernels used on the hot paths of the simplex engine (eta-file
// FTRAN/BTRAN, basic-variable updates) and of the similarity code (load
// distances, k-means assignment).
//
// Every kernel has a scalar reference implementation. Vectorized variants are
// compiled per ISA and selected once at runtime; `UCR_KERNELS=scalar` in the
// environment pins the reference path.

namespace ucr::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;

/// True if `isa` was compiled in and the running CPU supports it.
bool isa_supported(Isa isa) noexcept;

/// ISA used by the dispatching entry points below.
Isa active_isa() noexcept;

/// Pins the dispatch target. Throws std::invalid_argument if unsupported.
void set_active_isa(Isa isa);

double dot(std::span<const double> x, std::span<const double> y);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

double squared_distance(std::span<const double> x, std::span<const double> y);

/// max_i |x_i|, 0 for an empty span.
double max_abs(std::span<const double> x);

namespace scalar {
double dot(const double* x, const double* y, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
double squared_distance(const double* x, const double* y, std::size_t n) noexcept;
double max_abs(const double* x, std::size_t n) noexcept;
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define UCR_KERNELS_HAVE_AVX2 1
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
double squared_distance(const double* x, const double* y, std::size_t n) noexcept;
double max_abs(const double* x, std::size_t n) noexcept;
}  // namespace avx2
#endif

#if defined(__aarch64__) || defined(__ARM_NEON)
#define UCR_KERNELS_HAVE_NEON 1
namespace neon {
double dot(const double* x, const double* y, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
double squared_distance(const double* x, const double* y, std::size_t n) noexcept;
double max_abs(const double* x, std::size_t n) noexcept;
}  // namespace neon
#endif

}  // namespace ucr::kernels
