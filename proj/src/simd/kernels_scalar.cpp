#include "szego/simd.hpp"

namespace szego::simd {
namespace {

void cubic_inplace_ref(double* v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double re = v[2 * i], im = v[2 * i + 1];
        const double m = re * re + im * im;
        v[2 * i] = m * re;
        v[2 * i + 1] = m * im;
    }
}

void scaled_add_ref(double* out, const double* u, double a, const double* k, std::size_t n) {
    for (std::size_t i = 0; i < 2 * n; ++i) out[i] = u[i] + a * k[i];
}

void scale_ref(double* v, double s, std::size_t n) {
    for (std::size_t i = 0; i < 2 * n; ++i) v[i] *= s;
}

void mul_ref(double* v, const double* w, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double a = v[2 * i], b = v[2 * i + 1];
        const double c = w[2 * i], d = w[2 * i + 1];
        v[2 * i] = a * c - b * d;
        v[2 * i + 1] = a * d + b * c;
    }
}

double norm_sq_ref(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < 2 * n; ++i) s += x[i] * x[i];
    return s;
}

double weighted_norm_sq_ref(const double* x, const double* w, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * (x[2 * i] * x[2 * i] + x[2 * i + 1] * x[2 * i + 1]);
    return s;
}

void dot_conj_ref(const double* x, const double* y, std::size_t n, double* out) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = x[2 * i], xi = x[2 * i + 1];
        const double yr = y[2 * i], yi = y[2 * i + 1];
        re += xr * yr + xi * yi;
        im += xi * yr - xr * yi;
    }
    out[0] = re;
    out[1] = im;
}

std::size_t threshold_zero_ref(double* v, double threshold, std::size_t n) {
    const double t2 = threshold * threshold;
    std::size_t zeroed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = v[2 * i] * v[2 * i] + v[2 * i + 1] * v[2 * i + 1];
        if (m < t2) {
            zeroed += (m > 0.0);
            v[2 * i] = 0.0;
            v[2 * i + 1] = 0.0;
        }
    }
    return zeroed;
}

constexpr KernelTable kScalar{
    cubic_inplace_ref, scaled_add_ref, scale_ref,      mul_ref,
    norm_sq_ref,       weighted_norm_sq_ref, dot_conj_ref, threshold_zero_ref,
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace szego::simd
