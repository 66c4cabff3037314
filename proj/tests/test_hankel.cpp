#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "szego/error.hpp"
#include "szego/hankel.hpp"

using namespace szego;

namespace {

std::vector<cplx> random_coeffs(std::size_t n, unsigned seed, double decay) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    std::vector<cplx> c(n);
    for (std::size_t k = 0; k < n; ++k) c[k] = cplx{d(rng), d(rng)} * std::pow(decay, static_cast<double>(k));
    return c;
}

HardyState pole_state(cplx p, std::size_t N) {
    std::vector<cplx> c(N / 2);
    cplx t = 1.0;
    for (std::size_t k = 1; k < c.size(); ++k) {
        c[k] = t;
        t *= p;
    }
    return HardyState(c, N);
}

// Taylor coefficients of prod_j (z - a_j) / (1 - conj(a_j) z).
std::vector<cplx> blaschke_product(const std::vector<cplx>& zeros, std::size_t n) {
    std::vector<cplx> acc(n);
    acc[0] = 1.0;
    for (const cplx& a : zeros) {
        std::vector<cplx> factor(n);
        factor[0] = -a;
        cplx t = 1.0;
        for (std::size_t k = 1; k < n; ++k) {
            factor[k] = (1.0 - std::norm(a)) * t;
            t *= std::conj(a);
        }
        std::vector<cplx> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; i + j < n; ++j) next[i + j] += acc[i] * factor[j];
        }
        acc = next;
    }
    return acc;
}

// Tr(A^k) for a Hermitian matrix by repeated multiplication.
double power_trace(const HermitianMatrix& a, int power) {
    const std::size_t n = a.size();
    std::vector<cplx> p(n * n), q(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) p[i * n + j] = a(i, j);
    for (int r = 1; r < power; ++r) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                cplx s{};
                for (std::size_t k = 0; k < n; ++k) s += p[i * n + k] * a(k, j);
                q[i * n + j] = s;
            }
        p.swap(q);
    }
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i) tr += p[i * n + i].real();
    return tr;
}

}  // namespace

TEST_CASE("Gram traces equal weighted coefficient sums") {
    const auto c = random_coeffs(32, 1, 0.7);
    const HardyState u(c, 64);
    double th = 0.0, tk = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
        th += static_cast<double>(j + 1) * std::norm(c[j]);
        tk += static_cast<double>(j) * std::norm(c[j]);
    }
    CHECK(gram_h(u, 32).trace() == doctest::Approx(th).epsilon(1e-13));
    CHECK(gram_k(u, 32).trace() == doctest::Approx(tk).epsilon(1e-13));
    CHECK(gram_k(u, 32).trace() == doctest::Approx(momentum(u)).epsilon(1e-13));
}

TEST_CASE("Gram entries against the defining sum") {
    const auto c = random_coeffs(16, 2, 0.8);
    const HardyState u(c, 32);
    const HermitianMatrix a = gram_h(u, 5);
    cplx s{};
    for (std::size_t k = 0; k + 3 < c.size(); ++k) s += c[1 + k] * std::conj(c[3 + k]);
    CHECK(std::abs(a(1, 3) - s) < 1e-14);
    CHECK(std::abs(a(3, 1) - std::conj(s)) < 1e-14);
    const HermitianMatrix b = gram_k(u, 5);
    CHECK(std::abs(b(0, 2) - a(1, 3)) < 1e-14);
}

TEST_CASE("eigenvalues against power sums") {
    const auto c = random_coeffs(12, 3, 0.9);
    const HardyState u(c, 24);
    const HermitianMatrix a = gram_h(u, 4);
    const auto ev = eigenvalues(a);
    REQUIRE(ev.size() == 4);
    for (std::size_t i = 1; i < ev.size(); ++i) CHECK(ev[i] <= ev[i - 1]);
    for (int k = 1; k <= 4; ++k) {
        double s = 0.0;
        for (double x : ev) s += std::pow(x, k);
        CHECK(s == doctest::Approx(power_trace(a, k)).epsilon(1e-11));
    }
}

TEST_CASE("2x2 eigenvalues against the closed form") {
    HermitianMatrix m(2);
    m(0, 0) = 2.0;
    m(1, 1) = -1.0;
    m(0, 1) = cplx{1.0, 1.0};
    m(1, 0) = cplx{1.0, -1.0};
    const auto ev = eigenvalues(m);
    const double mid = 0.5, rad = std::sqrt(1.5 * 1.5 + 2.0);
    CHECK(ev[0] == doctest::Approx(mid + rad).epsilon(1e-14));
    CHECK(ev[1] == doctest::Approx(mid - rad).epsilon(1e-14));
}

TEST_CASE("non-Hermitian input is rejected") {
    HermitianMatrix m(2);
    m(0, 1) = 1.0;
    CHECK_THROWS_AS(eigenvalues(m), InvalidMatrix);
}

TEST_CASE("truncation larger than the mode count is rejected") {
    CHECK_THROWS_AS(gram_k(HardyState(16), 9), DomainError);
}

TEST_CASE("Cauchy interlacing of H and K spectra") {
    const auto c = random_coeffs(40, 4, 0.85);
    const HardyState u(c, 80);
    const auto h = eigenvalues(gram_h(u, 21));
    const auto k = eigenvalues(gram_k(u, 20));
    for (std::size_t i = 0; i < k.size(); ++i) {
        CHECK(h[i] >= k[i] - 1e-12);
        CHECK(k[i] >= h[i + 1] - 1e-12);
    }
}

TEST_CASE("single pole: K_u^2 has rank one with eigenvalue M") {
    const HardyState u = pole_state(0.5, 512);
    const KSpectrum s = k_spectrum(u);
    REQUIRE(s.rank() == 1);
    CHECK(s.distinct_eigenvalues[0] == doctest::Approx(16.0 / 9.0).epsilon(1e-13));
    CHECK(f_functional(s) == doctest::Approx(16.0 / 9.0).epsilon(1e-13));
    CHECK(limit_l2_sq(s) == f_functional(s));
    const auto v = explosion_criterion(u);
    CHECK(v.verdict == Verdict::ExplodesStrict);
    CHECK(v.l2_sq == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("two poles: rank two") {
    std::vector<cplx> c(512);
    for (std::size_t k = 1; k < c.size(); ++k) {
        c[k] = std::pow(0.7, static_cast<double>(k - 1)) + std::pow(0.8, static_cast<double>(k - 1));
    }
    const KSpectrum s = k_spectrum(HardyState(c, 1024));
    CHECK(s.rank() == 2);
    CHECK_FALSE(s.has_cluster());
}

TEST_CASE("Blaschke factor: equality case") {
    const auto c = blaschke_product({0.3}, 256);
    const HardyState u(c, 512);
    const auto v = explosion_criterion(u);
    CHECK(v.l2_sq == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(v.f_value == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(v.verdict == Verdict::ExplodesEqualCase);
}

// Kronecker: for an inner symbol of degree d, H has rank d + 1 and K rank d,
// both with every nonzero eigenvalue equal to 1.
TEST_CASE("Blaschke product of degree 3: eigenvalue 1 with multiplicity 3") {
    const auto c = blaschke_product({0.3, cplx{-0.2, 0.5}, cplx{0.1, -0.4}}, 256);
    const HardyState u(c, 512);
    const KSpectrum s = k_spectrum(u);
    REQUIRE(s.distinct_eigenvalues.size() == 1);
    CHECK(s.multiplicities[0] == 3);
    CHECK(s.has_cluster());
    CHECK(s.distinct_eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
    const auto h = eigenvalues(gram_h(u, 64));
    for (int i = 0; i < 4; ++i) CHECK(h[i] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(h[4] < 1e-12);
}

TEST_CASE("circle state is inconclusive") {
    std::vector<cplx> c(64);
    c[1] = 1.0;
    const auto v = explosion_criterion(HardyState(c, 128));
    CHECK(v.verdict == Verdict::Inconclusive);
    CHECK(v.f_value == doctest::Approx(1.0));
}

TEST_CASE("degree-two Blaschke product: K has rank two") {
    const auto c = blaschke_product({0.3, -0.3}, 128);
    const HardyState u(c, 256);
    const KSpectrum s = k_spectrum(u, 64, 1e-8, 1e-10);
    REQUIRE(s.distinct_eigenvalues.size() == 1);
    CHECK(s.multiplicities[0] == 2);
    CHECK(s.rank() == 2);
    CHECK(s.rank_cutoff == doctest::Approx(1e-10 * s.distinct_eigenvalues[0]));
}

TEST_CASE("suggested Gram size") {
    const HardyState slow = pole_state(0.95, 4096);
    const std::size_t n = suggest_gram_size(slow);
    CHECK(n % 32 == 0);
    CHECK(n >= 128);
    CHECK(tail_mass(slow, n) <= 1e-13 * tail_mass(slow, 0));
    CHECK(suggest_gram_size(pole_state(0.1, 4096)) == 128);
}

TEST_CASE("spectrum CSV") {
    const KSpectrum s = k_spectrum(pole_state(0.5, 256));
    std::ostringstream os;
    write_spectrum_csv(os, s);
    const std::string text = os.str();
    CHECK(text.rfind("index,eigenvalue,multiplicity\n1,1.77777777777777", 0) == 0);
    CHECK(text.substr(text.size() - 3) == ",1\n");
    CHECK(verdict_name(Verdict::ExplodesEqualCase) == "ExplodesEqualCase");
}
