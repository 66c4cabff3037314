#pragma once

// Data-parallel inner loops used by the spectral solver and the Hankel Gram
// builders. Every kernel has a scalar reference implementation; an AVX2+FMA
// variant is picked at runtime when the CPU supports it. Complex arrays are
// interleaved (re, im) doubles, the layout of std::complex<double>.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace szego::simd {

using cplx = std::complex<double>;

enum class Backend { Scalar, Avx2 };

struct KernelTable {
    // v[i] <- |v[i]|^2 v[i]
    void (*cubic_inplace)(double* v, std::size_t n);
    // out[i] <- u[i] + a k[i]
    void (*scaled_add)(double* out, const double* u, double a, const double* k, std::size_t n);
    // v[i] <- s v[i]
    void (*scale)(double* v, double s, std::size_t n);
    // v[i] <- v[i] * w[i]   (complex product)
    void (*mul)(double* v, const double* w, std::size_t n);
    // sum |x[i]|^2
    double (*norm_sq)(const double* x, std::size_t n);
    // sum w[i] |x[i]|^2 with real weights
    double (*weighted_norm_sq)(const double* x, const double* w, std::size_t n);
    // sum x[i] conj(y[i]); result written as (re, im)
    void (*dot_conj)(const double* x, const double* y, std::size_t n, double* out);
    // zero entries with |v[i]| < threshold; returns the number zeroed
    std::size_t (*threshold_zero)(double* v, double threshold, std::size_t n);
};

const KernelTable& scalar_kernels();
// Throws if the running CPU lacks AVX2/FMA or the build has no x86 path.
const KernelTable& avx2_kernels();

bool avx2_available();

// Active table. The first call resolves the backend from the CPU, unless the
// environment variable SZEGO_SIMD=scalar forces the reference path.
const KernelTable& kernels();
Backend active_backend();
void set_backend(Backend backend);
std::string_view backend_name(Backend backend);

// Span conveniences over the active table.
void cubic_inplace(std::span<cplx> v);
void scaled_add(std::span<cplx> out, std::span<const cplx> u, double a, std::span<const cplx> k);
void scale(std::span<cplx> v, double s);
void mul(std::span<cplx> v, std::span<const cplx> w);
double norm_sq(std::span<const cplx> x);
double weighted_norm_sq(std::span<const cplx> x, std::span<const double> w);
cplx dot_conj(std::span<const cplx> x, std::span<const cplx> y);
std::size_t threshold_zero(std::span<cplx> v, double threshold);

}  // namespace szego::simd
