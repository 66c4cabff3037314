#pragma once

// Functions in the Hardy space L^2_+ of the circle, truncated to the
// nonnegative Fourier modes k = 0 .. N/2 - 1 of an N-point grid.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace szego {

using cplx = std::complex<double>;

// Truncated coefficient vector u^(0), ..., u^(N/2 - 1). Immutable once built.
// The Nyquist mode k = N/2 and every negative mode are identically zero.
class HardyState {
public:
    // Zero state on an N-point grid. N must be even and positive.
    explicit HardyState(std::size_t grid_size);
    // Takes up to N/2 leading coefficients; missing ones are zero.
    HardyState(std::vector<cplx> coeffs, std::size_t grid_size);

    std::size_t grid_size() const { return grid_size_; }
    std::size_t mode_count() const { return coeffs_.size(); }
    std::span<const cplx> coeffs() const { return coeffs_; }
    cplx operator[](std::size_t k) const { return coeffs_[k]; }

private:
    std::vector<cplx> coeffs_;
    std::size_t grid_size_;
};

// Samples u(x_n) at x_n = -pi + 2 pi n / N, n = 1..N (stored at index n - 1).
struct GridField {
    std::vector<cplx> values;
};

double grid_point(std::size_t grid_size, std::size_t index);

GridField to_grid(const HardyState& u);
// DFT followed by the Szego projector: negative and Nyquist modes are dropped.
HardyState from_grid(const GridField& f);

// Samples f on the grid and projects.
HardyState project(const std::function<cplx(double)>& f, std::size_t grid_size);

// (u|1) = u^(0)
cplx inner_with_one(const HardyState& u);
double l2_norm_sq(const HardyState& u);
// M(u) = sum_{k>=1} k |u^(k)|^2
double momentum(const HardyState& u);
// sum_k (1 + k^2)^s |u^(k)|^2
double hs_norm_sq(const HardyState& u, double s);
double hs_norm_sq(const HardyState& u, std::span<const double> weights);
std::vector<double> hs_weights(std::size_t mode_count, double s);
std::vector<double> momentum_weights(std::size_t mode_count);

// sum_{k>=from} (k+1)|u^(k)|^2, the part of Tr(H_u^2) beyond a truncation size.
double tail_mass(const HardyState& u, std::size_t from);

double l2_distance(const HardyState& a, const HardyState& b);

}  // namespace szego
