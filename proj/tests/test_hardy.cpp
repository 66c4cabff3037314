#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "szego/error.hpp"
#include "szego/hardy.hpp"

using namespace szego;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<cplx> random_coeffs(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    std::vector<cplx> c(n);
    for (auto& z : c) z = {d(rng), d(rng)};
    return c;
}

// Direct O(N^2) synthesis u(x_n) = sum_k u^(k) e^{i k x_n}.
std::vector<cplx> dft_synthesis(const std::vector<cplx>& c, std::size_t N) {
    std::vector<cplx> v(N);
    for (std::size_t n = 0; n < N; ++n) {
        const double x = -kPi + 2.0 * kPi * static_cast<double>(n + 1) / static_cast<double>(N);
        for (std::size_t k = 0; k < c.size(); ++k) v[n] += c[k] * std::polar(1.0, static_cast<double>(k) * x);
    }
    return v;
}

double max_diff(std::span<const cplx> a, std::span<const cplx> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("grid points") {
    CHECK(grid_point(8, 0) == doctest::Approx(-kPi + kPi / 4.0));
    CHECK(grid_point(8, 7) == doctest::Approx(kPi));
    CHECK(grid_point(8, 3) == doctest::Approx(0.0));
}

TEST_CASE("to_grid matches direct synthesis") {
    for (std::size_t N : {8u, 16u, 64u}) {
        const auto c = random_coeffs(N / 2, 7 + N);
        const HardyState u(c, N);
        const GridField g = to_grid(u);
        const auto ref = dft_synthesis(c, N);
        CHECK(max_diff(g.values, ref) < 1e-12);
    }
}

TEST_CASE("from_grid matches direct analysis and drops negative modes") {
    const std::size_t N = 32;
    std::vector<cplx> f(N);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> d;
    for (auto& z : f) z = {d(rng), d(rng)};
    const HardyState u = from_grid(GridField{f});
    REQUIRE(u.mode_count() == N / 2);
    for (std::size_t k = 0; k < N / 2; ++k) {
        cplx acc{};
        for (std::size_t n = 0; n < N; ++n) {
            const double x = grid_point(N, n);
            acc += f[n] * std::polar(1.0, -static_cast<double>(k) * x);
        }
        CHECK(std::abs(u[k] - acc / static_cast<double>(N)) < 1e-12);
    }
}

TEST_CASE("round trip through the grid is the identity on L2_+") {
    const auto c = random_coeffs(128, 11);
    const HardyState u(c, 256);
    const HardyState v = from_grid(to_grid(u));
    CHECK(l2_distance(u, v) < 1e-12);
}

TEST_CASE("projection of a sampled rational function") {
    const double p = 0.5;
    const HardyState u = project([p](double x) { return std::polar(1.0, x) / (1.0 - p * std::polar(1.0, x)); }, 128);
    CHECK(std::abs(u[0]) < 1e-14);
    for (std::size_t k = 1; k < 40; ++k) CHECK(std::abs(u[k] - std::pow(p, static_cast<double>(k - 1))) < 1e-13);
}

TEST_CASE("projection removes negative frequencies") {
    const HardyState u = project([](double x) { return std::cos(3.0 * x); }, 32);
    CHECK(std::abs(u[3] - 0.5) < 1e-14);
    CHECK(l2_norm_sq(u) == doctest::Approx(0.25));
}

TEST_CASE("invalid grids and coefficients") {
    CHECK_THROWS_AS(HardyState(7), InvalidGrid);
    CHECK_THROWS_AS(HardyState(0), InvalidGrid);
    CHECK_THROWS_AS(HardyState(std::vector<cplx>(5), 8), InvalidGrid);
    CHECK_THROWS_AS(HardyState(std::vector<cplx>{cplx{std::nan(""), 0.0}}, 8), DomainError);
    CHECK_THROWS_AS(from_grid(GridField{std::vector<cplx>(7)}), InvalidGrid);
}

TEST_CASE("norms of the single-pole state against geometric sums") {
    const double p = 0.5, r = p * p;
    std::vector<cplx> c(512);
    for (std::size_t k = 1; k < c.size(); ++k) c[k] = std::pow(p, static_cast<double>(k - 1));
    const HardyState u(c, 1024);
    CHECK(l2_norm_sq(u) == doctest::Approx(1.0 / (1.0 - r)).epsilon(1e-14));
    CHECK(momentum(u) == doctest::Approx(1.0 / ((1.0 - r) * (1.0 - r))).epsilon(1e-14));
    // sum (1 + k^2) r^{k-1} = 1/(1-r) + (1+r)/(1-r)^3
    const double h1 = 1.0 / (1.0 - r) + (1.0 + r) / std::pow(1.0 - r, 3);
    CHECK(hs_norm_sq(u, 1.0) == doctest::Approx(h1).epsilon(1e-14));
    CHECK(hs_norm_sq(u, 0.0) == doctest::Approx(l2_norm_sq(u)).epsilon(1e-14));
    CHECK(inner_with_one(u) == cplx{0.0, 0.0});
    // sum_{k>=2} (k+1) r^{k-1}
    double tail = 0.0;
    for (std::size_t k = 2; k < 512; ++k) tail += static_cast<double>(k + 1) * std::pow(r, static_cast<double>(k - 1));
    CHECK(tail_mass(u, 2) == doctest::Approx(tail).epsilon(1e-13));
}

TEST_CASE("weights") {
    const auto w = hs_weights(4, 1.5);
    CHECK(w[2] == doctest::Approx(std::pow(5.0, 1.5)));
    const auto m = momentum_weights(4);
    CHECK(m[0] == 0.0);
    CHECK(m[3] == 3.0);
}
