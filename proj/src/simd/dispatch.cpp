#include "szego/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace szego::simd {
namespace {

Backend resolve_default() {
    if (const char* env = std::getenv("SZEGO_SIMD"); env != nullptr && std::strcmp(env, "scalar") == 0) {
        return Backend::Scalar;
    }
    return avx2_available() ? Backend::Avx2 : Backend::Scalar;
}

const KernelTable* table_for(Backend b) { return b == Backend::Avx2 ? &avx2_kernels() : &scalar_kernels(); }

std::atomic<const KernelTable*> g_table{nullptr};
std::atomic<Backend> g_backend{Backend::Scalar};

void install(Backend b) {
    const KernelTable* t = table_for(b);
    g_backend.store(b, std::memory_order_relaxed);
    g_table.store(t, std::memory_order_release);
}

inline double* raw(std::span<cplx> v) { return reinterpret_cast<double*>(v.data()); }
inline const double* raw(std::span<const cplx> v) { return reinterpret_cast<const double*>(v.data()); }

}  // namespace

const KernelTable& kernels() {
    const KernelTable* t = g_table.load(std::memory_order_acquire);
    if (t == nullptr) {
        install(resolve_default());
        t = g_table.load(std::memory_order_acquire);
    }
    return *t;
}

Backend active_backend() {
    kernels();
    return g_backend.load(std::memory_order_relaxed);
}

void set_backend(Backend backend) { install(backend); }

std::string_view backend_name(Backend backend) { return backend == Backend::Avx2 ? "avx2" : "scalar"; }

void cubic_inplace(std::span<cplx> v) { kernels().cubic_inplace(raw(v), v.size()); }

void scaled_add(std::span<cplx> out, std::span<const cplx> u, double a, std::span<const cplx> k) {
    kernels().scaled_add(raw(out), raw(u), a, raw(k), out.size());
}

void scale(std::span<cplx> v, double s) { kernels().scale(raw(v), s, v.size()); }

void mul(std::span<cplx> v, std::span<const cplx> w) { kernels().mul(raw(v), raw(w), v.size()); }

double norm_sq(std::span<const cplx> x) { return kernels().norm_sq(raw(x), x.size()); }

double weighted_norm_sq(std::span<const cplx> x, std::span<const double> w) {
    return kernels().weighted_norm_sq(raw(x), w.data(), x.size());
}

cplx dot_conj(std::span<const cplx> x, std::span<const cplx> y) {
    double out[2];
    kernels().dot_conj(raw(x), raw(y), x.size(), out);
    return {out[0], out[1]};
}

std::size_t threshold_zero(std::span<cplx> v, double threshold) {
    return kernels().threshold_zero(raw(v), threshold, v.size());
}

}  // namespace szego::simd
