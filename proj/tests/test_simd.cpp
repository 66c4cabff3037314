#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "szego/simd.hpp"

using szego::simd::cplx;
namespace simd = szego::simd;

namespace {

std::vector<double> random_doubles(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> d(0.0, scale);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 17, 64, 1023};

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("scalar reference kernels on hand-checked values") {
    const auto& k = simd::scalar_kernels();
    double v[4] = {1.0, 2.0, 0.5, -1.0};
    k.cubic_inplace(v, 2);
    CHECK(v[0] == 5.0);
    CHECK(v[1] == 10.0);
    CHECK(v[2] == doctest::Approx(0.625));
    CHECK(v[3] == doctest::Approx(-1.25));

    double x[2] = {1.0, 2.0}, y[2] = {3.0, -1.0}, out[2];
    k.dot_conj(x, y, 1, out);  // (1+2i)(3+i) = 1 + 7i
    CHECK(out[0] == 1.0);
    CHECK(out[1] == 7.0);

    double m[2] = {1.0, 2.0};
    k.mul(m, y, 1);  // (1+2i)(3-i) = 5 + 5i
    CHECK(m[0] == 5.0);
    CHECK(m[1] == 5.0);

    double t[6] = {1e-13, 0.0, 1.0, 0.0, 0.0, 0.0};
    CHECK(k.threshold_zero(t, 1e-12, 3) == 1);
    CHECK(t[0] == 0.0);
    CHECK(t[2] == 1.0);
}

TEST_CASE("AVX2 kernels match the scalar reference") {
    if (!simd::avx2_available()) {
        MESSAGE("AVX2 not available; equivalence not exercised");
        return;
    }
    const auto& s = simd::scalar_kernels();
    const auto& a = simd::avx2_kernels();
    std::mt19937_64 rng(12345);
    for (std::size_t n : kLengths) {
        CAPTURE(n);
        const auto x = random_doubles(2 * n, rng);
        const auto y = random_doubles(2 * n, rng);
        std::vector<double> w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 + static_cast<double>(i);

        auto v1 = x, v2 = x;
        s.cubic_inplace(v1.data(), n);
        a.cubic_inplace(v2.data(), n);
        for (std::size_t i = 0; i < 2 * n; ++i) CHECK(close(v2[i], v1[i], 1e-14));

        std::vector<double> o1(2 * n), o2(2 * n);
        s.scaled_add(o1.data(), x.data(), 0.37, y.data(), n);
        a.scaled_add(o2.data(), x.data(), 0.37, y.data(), n);
        for (std::size_t i = 0; i < 2 * n; ++i) CHECK(close(o2[i], o1[i], 1e-15));

        v1 = x;
        v2 = x;
        s.scale(v1.data(), -1.5, n);
        a.scale(v2.data(), -1.5, n);
        CHECK(v1 == v2);

        v1 = x;
        v2 = x;
        s.mul(v1.data(), y.data(), n);
        a.mul(v2.data(), y.data(), n);
        for (std::size_t i = 0; i < 2 * n; ++i) CHECK(close(v2[i], v1[i], 1e-14));

        CHECK(close(a.norm_sq(x.data(), n), s.norm_sq(x.data(), n), 1e-13));
        CHECK(close(a.weighted_norm_sq(x.data(), w.data(), n), s.weighted_norm_sq(x.data(), w.data(), n), 1e-13));

        double d1[2], d2[2];
        s.dot_conj(x.data(), y.data(), n, d1);
        a.dot_conj(x.data(), y.data(), n, d2);
        CHECK(close(d2[0], d1[0], 1e-13));
        CHECK(close(d2[1], d1[1], 1e-13));

        auto z = random_doubles(2 * n, rng, 1e-12);
        auto z1 = z, z2 = z;
        const std::size_t c1 = s.threshold_zero(z1.data(), 1e-12, n);
        const std::size_t c2 = a.threshold_zero(z2.data(), 1e-12, n);
        CHECK(c1 == c2);
        CHECK(z1 == z2);
    }
}

TEST_CASE("threshold_zero counts only entries that were nonzero") {
    for (const auto* table : {&simd::scalar_kernels(), simd::avx2_available() ? &simd::avx2_kernels() : nullptr}) {
        if (!table) continue;
        std::vector<double> v(10, 0.0);
        v[4] = 1e-14;
        v[9] = 2.0;
        CHECK(table->threshold_zero(v.data(), 1e-12, 5) == 1);
        CHECK(v[9] == 2.0);
    }
}

TEST_CASE("backend switching") {
    const auto before = simd::active_backend();
    simd::set_backend(simd::Backend::Scalar);
    CHECK(simd::active_backend() == simd::Backend::Scalar);
    CHECK(&simd::kernels() == &simd::scalar_kernels());
    CHECK(simd::backend_name(simd::Backend::Scalar) == "scalar");
    CHECK(simd::backend_name(simd::Backend::Avx2) == "avx2");

    std::vector<cplx> v{{3.0, 4.0}, {0.0, 1.0}};
    CHECK(simd::norm_sq(v) == 26.0);
    CHECK(simd::dot_conj(v, v) == cplx{26.0, 0.0});
    simd::set_backend(before);
}
