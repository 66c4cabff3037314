#include "szego/hardy.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <numbers>

#include "szego/error.hpp"
#include "szego/fft.hpp"
#include "szego/simd.hpp"
#include "transform.hpp"

namespace szego {

namespace {

void check_grid(std::size_t n) {
    if (n == 0 || n % 2 != 0) throw InvalidGrid("grid size must be even and positive, got " + std::to_string(n));
}

}  // namespace

HardyState::HardyState(std::size_t grid_size) : grid_size_(grid_size) {
    check_grid(grid_size);
    coeffs_.assign(grid_size / 2, cplx{0.0, 0.0});
}

HardyState::HardyState(std::vector<cplx> coeffs, std::size_t grid_size)
    : coeffs_(std::move(coeffs)), grid_size_(grid_size) {
    check_grid(grid_size);
    if (coeffs_.size() > grid_size / 2) {
        throw InvalidGrid("too many coefficients for grid size " + std::to_string(grid_size));
    }
    coeffs_.resize(grid_size / 2, cplx{0.0, 0.0});
    for (const cplx& c : coeffs_) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw DomainError("non-finite Fourier coefficient");
    }
}

double grid_point(std::size_t grid_size, std::size_t index) {
    return -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(index + 1) / static_cast<double>(grid_size);
}

namespace detail {

HardyTransform::HardyTransform(std::size_t n) : plan(n), phase(n / 2) {
    // e^{i k x_1} = (-1)^k e^{2 pi i k / N}
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        phase[k] = sign * cplx{std::cos(angle), std::sin(angle)};
    }
}

void HardyTransform::to_grid(std::span<const cplx> coeffs, std::span<cplx> out) {
    auto buf = plan.buffer();
    const std::size_t kmax = plan.size() / 2;
    for (std::size_t k = 0; k < kmax; ++k) buf[k] = coeffs[k] * phase[k];
    for (std::size_t k = kmax; k < plan.size(); ++k) buf[k] = 0.0;
    plan.backward();
    std::copy(buf.begin(), buf.end(), out.begin());
}

void HardyTransform::from_grid(std::span<const cplx> values, std::span<cplx> coeffs) {
    auto buf = plan.buffer();
    std::copy(values.begin(), values.end(), buf.begin());
    plan.forward();
    const double inv = 1.0 / static_cast<double>(plan.size());
    for (std::size_t k = 0; k < plan.size() / 2; ++k) coeffs[k] = buf[k] * std::conj(phase[k]) * inv;
}

HardyTransform& transform_for(std::size_t n) {
    thread_local std::map<std::size_t, std::unique_ptr<HardyTransform>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<HardyTransform>(n);
    return *slot;
}

}  // namespace detail

GridField to_grid(const HardyState& u) {
    GridField f;
    f.values.resize(u.grid_size());
    detail::transform_for(u.grid_size()).to_grid(u.coeffs(), f.values);
    return f;
}

HardyState from_grid(const GridField& f) {
    const std::size_t n = f.values.size();
    check_grid(n);
    std::vector<cplx> coeffs(n / 2);
    detail::transform_for(n).from_grid(f.values, coeffs);
    return HardyState(std::move(coeffs), n);
}

HardyState project(const std::function<cplx(double)>& f, std::size_t grid_size) {
    check_grid(grid_size);
    GridField g;
    g.values.resize(grid_size);
    for (std::size_t j = 0; j < grid_size; ++j) g.values[j] = f(grid_point(grid_size, j));
    return from_grid(g);
}

cplx inner_with_one(const HardyState& u) { return u[0]; }

double l2_norm_sq(const HardyState& u) { return simd::norm_sq(u.coeffs()); }

std::vector<double> momentum_weights(std::size_t mode_count) {
    std::vector<double> w(mode_count);
    for (std::size_t k = 0; k < mode_count; ++k) w[k] = static_cast<double>(k);
    return w;
}

double momentum(const HardyState& u) { return simd::weighted_norm_sq(u.coeffs(), momentum_weights(u.mode_count())); }

std::vector<double> hs_weights(std::size_t mode_count, double s) {
    std::vector<double> w(mode_count);
    for (std::size_t k = 0; k < mode_count; ++k) {
        const double kk = static_cast<double>(k);
        w[k] = std::pow(1.0 + kk * kk, s);
    }
    return w;
}

double hs_norm_sq(const HardyState& u, double s) { return hs_norm_sq(u, hs_weights(u.mode_count(), s)); }

double hs_norm_sq(const HardyState& u, std::span<const double> weights) {
    return simd::weighted_norm_sq(u.coeffs(), weights);
}

double tail_mass(const HardyState& u, std::size_t from) {
    double s = 0.0;
    for (std::size_t k = from; k < u.mode_count(); ++k) s += static_cast<double>(k + 1) * std::norm(u[k]);
    return s;
}

double l2_distance(const HardyState& a, const HardyState& b) {
    const std::size_t n = std::max(a.mode_count(), b.mode_count());
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const cplx x = k < a.mode_count() ? a[k] : cplx{};
        const cplx y = k < b.mode_count() ? b[k] : cplx{};
        s += std::norm(x - y);
    }
    return std::sqrt(s);
}

}  // namespace szego
