#include "szego/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <new>
#include <utility>

namespace szego {
namespace {
// The FFTW planner is not reentrant.
std::mutex g_planner_mutex;
}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n) {
    buf_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (buf_ == nullptr) throw std::bad_alloc();
    auto* data = reinterpret_cast<fftw_complex*>(buf_);
    std::lock_guard<std::mutex> lock(g_planner_mutex);
    fwd_ = fftw_plan_dft_1d(static_cast<int>(n), data, data, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(static_cast<int>(n), data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
    for (std::size_t i = 0; i < n; ++i) buf_[i] = 0.0;
}

FftPlan::~FftPlan() { release(); }

FftPlan::FftPlan(FftPlan&& other) noexcept
    : n_(std::exchange(other.n_, 0)),
      buf_(std::exchange(other.buf_, nullptr)),
      fwd_(std::exchange(other.fwd_, nullptr)),
      bwd_(std::exchange(other.bwd_, nullptr)) {}

FftPlan& FftPlan::operator=(FftPlan&& other) noexcept {
    if (this != &other) {
        release();
        n_ = std::exchange(other.n_, 0);
        buf_ = std::exchange(other.buf_, nullptr);
        fwd_ = std::exchange(other.fwd_, nullptr);
        bwd_ = std::exchange(other.bwd_, nullptr);
    }
    return *this;
}

void FftPlan::release() {
    std::lock_guard<std::mutex> lock(g_planner_mutex);
    if (fwd_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    if (bwd_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
    if (buf_ != nullptr) fftw_free(buf_);
    fwd_ = bwd_ = nullptr;
    buf_ = nullptr;
}

void FftPlan::forward() { fftw_execute(static_cast<fftw_plan>(fwd_)); }

void FftPlan::backward() { fftw_execute(static_cast<fftw_plan>(bwd_)); }

}  // namespace szego
