#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace szego {

// In-place complex DFT of fixed length on an owned, SIMD-aligned buffer.
// forward: X[k] = sum_j x[j] e^{-2 pi i jk/n}; backward uses e^{+...}.
// Neither direction normalizes.
class FftPlan {
public:
    explicit FftPlan(std::size_t n);
    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    FftPlan(FftPlan&& other) noexcept;
    FftPlan& operator=(FftPlan&& other) noexcept;

    std::size_t size() const { return n_; }
    std::span<std::complex<double>> buffer() { return {buf_, n_}; }
    std::span<const std::complex<double>> buffer() const { return {buf_, n_}; }

    void forward();
    void backward();

private:
    void release();

    std::size_t n_ = 0;
    std::complex<double>* buf_ = nullptr;
    void* fwd_ = nullptr;
    void* bwd_ = nullptr;
};

}  // namespace szego
