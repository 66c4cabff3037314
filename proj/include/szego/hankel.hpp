#pragma once

// Gram matrices of the Hankel operators H_u^2 and K_u^2 in the Fourier
// basis, their spectra, the alternating functional F(u) and the explosion
// criterion built on it.

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "szego/hardy.hpp"

namespace szego {

// Dense row-major square matrix, Hermitian by construction where built here.
class HermitianMatrix {
public:
    explicit HermitianMatrix(std::size_t n) : n_(n), data_(n * n) {}

    std::size_t size() const { return n_; }
    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    cplx operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    double trace() const;
    double max_abs() const;

private:
    std::size_t n_;
    std::vector<cplx> data_;
};

// A[n][m] = sum_k u^(n+k) conj(u^(m+k)), the matrix of H_u^2.
HermitianMatrix gram_h(const HardyState& u, std::size_t size);
// B[n][m] = sum_k u^(n+k+1) conj(u^(m+k+1)), the matrix of K_u^2.
HermitianMatrix gram_k(const HardyState& u, std::size_t size);

// All eigenvalues in descending order. Rejects input whose Hermitian defect
// exceeds hermitian_tol relative to the largest entry.
std::vector<double> eigenvalues(const HermitianMatrix& m, double hermitian_tol = 1e-12);

struct SpectrumOptions {
    std::size_t size = 128;     // Gram truncation; 0 picks one from the tail mass
    double cluster_tol = 1e-8;  // relative to sigma_1^2
    double rank_cutoff = 1e-10; // relative to sigma_1^2
};

struct KSpectrum {
    std::vector<double> distinct_eigenvalues;  // strictly decreasing
    std::vector<int> multiplicities;
    double cluster_tol = 0.0;
    double rank_cutoff = 0.0;  // absolute threshold actually applied
    std::size_t size = 0;      // Gram truncation used
    double tail_mass = 0.0;    // sum_{k>=size} (k+1)|u^(k)|^2

    bool has_cluster() const;
    std::size_t rank() const;
};

// Smallest multiple of 32 (at least min_size, at most the mode count) whose
// tail mass is below rel_tol times Tr(H_u^2).
std::size_t suggest_gram_size(const HardyState& u, double rel_tol = 1e-13, std::size_t min_size = 128);

KSpectrum k_spectrum(const HardyState& u, std::size_t size, double cluster_tol, double rank_cutoff);
KSpectrum k_spectrum(const HardyState& u, const SpectrumOptions& opts = {});

// F(u) = sum_k (-1)^{k-1} sigma_k^2 over the distinct eigenvalues.
double f_functional(const KSpectrum& spec);
// Limiting L2 mass of LaSalle limit points; same value as F.
double limit_l2_sq(const KSpectrum& spec);

enum class Verdict { ExplodesStrict, ExplodesEqualCase, Inconclusive };

std::string_view verdict_name(Verdict v);

struct CriterionVerdict {
    double l2_sq = 0.0;
    double f_value = 0.0;
    double u0_coeff_abs = 0.0;
    double tol = 0.0;
    Verdict verdict = Verdict::Inconclusive;
};

// tol < 0 selects the default 1e-8 * max(1, |u|^2).
CriterionVerdict explosion_criterion(const HardyState& u, const SpectrumOptions& opts = {}, double tol = -1.0);
CriterionVerdict explosion_criterion(const HardyState& u, const KSpectrum& spec, double tol = -1.0);

// index,eigenvalue,multiplicity with 1-based index.
void write_spectrum_csv(std::ostream& os, const KSpectrum& spec);

}  // namespace szego
