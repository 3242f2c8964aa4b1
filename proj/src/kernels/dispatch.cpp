#include "ucr/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace ucr::kernels {
namespace {

struct KernelTable {
    Isa isa;
    double (*dot)(const double*, const double*, std::size_t) noexcept;
    void (*axpy)(double, const double*, double*, std::size_t) noexcept;
    double (*squared_distance)(const double*, const double*, std::size_t) noexcept;
    double (*max_abs)(const double*, std::size_t) noexcept;
};

constexpr KernelTable kScalar{Isa::scalar, scalar::dot, scalar::axpy, scalar::squared_distance,
                              scalar::max_abs};
#if defined(UCR_KERNELS_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, avx2::dot, avx2::axpy, avx2::squared_distance, avx2::max_abs};
#endif
#if defined(UCR_KERNELS_HAVE_NEON)
constexpr KernelTable kNeon{Isa::neon, neon::dot, neon::axpy, neon::squared_distance, neon::max_abs};
#endif

const KernelTable* table_for(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return &kScalar;
#if defined(UCR_KERNELS_HAVE_AVX2)
        case Isa::avx2: return &kAvx2;
#endif
#if defined(UCR_KERNELS_HAVE_NEON)
        case Isa::neon: return &kNeon;
#endif
        default: return nullptr;
    }
}

const KernelTable* detect() noexcept {
    if (const char* env = std::getenv("UCR_KERNELS"); env && std::string(env) == "scalar") return &kScalar;
#if defined(UCR_KERNELS_HAVE_AVX2)
    if (isa_supported(Isa::avx2)) return &kAvx2;
#endif
#if defined(UCR_KERNELS_HAVE_NEON)
    return &kNeon;
#endif
    return &kScalar;
}

std::atomic<const KernelTable*>& current() noexcept {
    static std::atomic<const KernelTable*> table{detect()};
    return table;
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_relaxed); }

void require_same_size(std::size_t a, std::size_t b) {
    if (a != b) throw std::invalid_argument("kernels: span length mismatch");
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

bool isa_supported(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2:
#if defined(UCR_KERNELS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::neon:
#if defined(UCR_KERNELS_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Isa active_isa() noexcept { return active().isa; }

void set_active_isa(Isa isa) {
    const KernelTable* t = isa_supported(isa) ? table_for(isa) : nullptr;
    if (!t) throw std::invalid_argument("kernels: ISA not available: " + std::string(isa_name(isa)));
    current().store(t, std::memory_order_relaxed);
}

double dot(std::span<const double> x, std::span<const double> y) {
    require_same_size(x.size(), y.size());
    return active().dot(x.data(), y.data(), x.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    require_same_size(x.size(), y.size());
    active().axpy(alpha, x.data(), y.data(), x.size());
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
    require_same_size(x.size(), y.size());
    return active().squared_distance(x.data(), y.data(), x.size());
}

double max_abs(std::span<const double> x) { return active().max_abs(x.data(), x.size()); }

}  // namespace ucr::kernels
