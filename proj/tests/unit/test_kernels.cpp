#include "ucr/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace ucr::kernels;

TEST_CASE("vector kernels agree with the scalar reference on every supported ISA") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ud(-10.0, 10.0);
    const Isa original = active_isa();
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
        if (!isa_supported(isa)) continue;
        set_active_isa(isa);
        CAPTURE(isa_name(isa));
        for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 17u, 64u, 1001u}) {
            std::vector<double> x(n), y(n);
            for (auto& v : x) v = ud(rng);
            for (auto& v : y) v = ud(rng);
            const double ref_dot = scalar::dot(x.data(), y.data(), n);
            const double ref_sq = scalar::squared_distance(x.data(), y.data(), n);
            CHECK(dot(x, y) == doctest::Approx(ref_dot).epsilon(1e-12));
            CHECK(squared_distance(x, y) == doctest::Approx(ref_sq).epsilon(1e-12));
            CHECK(max_abs(x) == scalar::max_abs(x.data(), n));

            auto y1 = y, y2 = y;
            scalar::axpy(0.75, x.data(), y1.data(), n);
            axpy(0.75, x, y2);
            for (std::size_t i = 0; i < n; ++i) CHECK(y2[i] == doctest::Approx(y1[i]).epsilon(1e-14));
        }
    }
    set_active_isa(original);
}

TEST_CASE("kernel edge cases") {
    const std::vector<double> empty;
    CHECK(max_abs(empty) == 0.0);
    CHECK(dot(empty, empty) == 0.0);
    const std::vector<double> v{-3.0, 2.0, -7.5};
    CHECK(max_abs(v) == 7.5);
    CHECK(squared_distance(v, v) == 0.0);
    CHECK(isa_supported(Isa::scalar));
}
