#pragma once

#include <complex>
#include <span>
#include <vector>

#include "szego/fft.hpp"

namespace szego::detail {

// Grid <-> coefficient transform for one grid size, including the phase of
// the shifted grid origin x_1 = -pi + 2 pi / N.
struct HardyTransform {
    explicit HardyTransform(std::size_t n);

    void to_grid(std::span<const std::complex<double>> coeffs, std::span<std::complex<double>> out);
    void from_grid(std::span<const std::complex<double>> values, std::span<std::complex<double>> coeffs);

    FftPlan plan;
    std::vector<std::complex<double>> phase;
};

// Per-thread cache; FFTW plans are not shared across threads.
HardyTransform& transform_for(std::size_t n);

}  // namespace szego::detail
