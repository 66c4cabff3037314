#include "szego/hankel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <ostream>

#include "szego/csv.hpp"
#include "szego/error.hpp"
#include "szego/simd.hpp"

namespace szego {

double HermitianMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i).real();
    return t;
}

double HermitianMatrix::max_abs() const {
    double m = 0.0;
    for (const cplx& c : data_) m = std::max(m, std::abs(c));
    return m;
}

namespace {

HermitianMatrix gram(const HardyState& u, std::size_t size, std::size_t shift) {
    if (size > u.mode_count()) {
        throw DomainError("Gram truncation " + std::to_string(size) + " exceeds the " + std::to_string(u.mode_count()) +
                          " stored modes");
    }
    const auto c = u.coeffs();
    const std::size_t modes = c.size();
    HermitianMatrix m(size);
    for (std::size_t n = 0; n < size; ++n) {
        for (std::size_t j = n; j < size; ++j) {
            // sum_k u(n+k+shift) conj(u(j+k+shift)), k while both indices stay stored
            const std::size_t hi = j + shift;
            if (hi >= modes) {
                m(n, j) = m(j, n) = cplx{};
                continue;
            }
            const std::size_t len = modes - hi;
            const cplx v = simd::dot_conj(c.subspan(n + shift, len), c.subspan(hi, len));
            m(n, j) = v;
            m(j, n) = std::conj(v);
        }
        m(n, n) = cplx{m(n, n).real(), 0.0};
    }
    return m;
}

}  // namespace

HermitianMatrix gram_h(const HardyState& u, std::size_t size) { return gram(u, size, 0); }

HermitianMatrix gram_k(const HardyState& u, std::size_t size) { return gram(u, size, 1); }

std::vector<double> eigenvalues(const HermitianMatrix& m, double hermitian_tol) {
    const std::size_t n = m.size();
    if (n == 0) return {};
    const double scale = std::max(m.max_abs(), 1e-300);
    Eigen::MatrixXcd a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(m(i, j) - std::conj(m(j, i))) > hermitian_tol * scale) {
                throw InvalidMatrix("matrix is not Hermitian within tolerance");
            }
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw InvalidMatrix("Hermitian eigensolver did not converge");
    std::vector<double> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
}

bool KSpectrum::has_cluster() const {
    return std::any_of(multiplicities.begin(), multiplicities.end(), [](int m) { return m > 1; });
}

std::size_t KSpectrum::rank() const {
    std::size_t r = 0;
    for (int m : multiplicities) r += static_cast<std::size_t>(m);
    return r;
}

std::size_t suggest_gram_size(const HardyState& u, double rel_tol, std::size_t min_size) {
    const std::size_t modes = u.mode_count();
    const double total = tail_mass(u, 0);
    std::size_t size = std::min(min_size, modes);
    while (size < modes && tail_mass(u, size) > rel_tol * total) size = std::min(size + 32, modes);
    return size;
}

KSpectrum k_spectrum(const HardyState& u, std::size_t size, double cluster_tol, double rank_cutoff) {
    KSpectrum spec;
    spec.size = size;
    spec.cluster_tol = cluster_tol;
    spec.tail_mass = tail_mass(u, size);
    const auto ev = eigenvalues(gram_k(u, size));
    const double top = ev.empty() ? 0.0 : ev.front();
    spec.rank_cutoff = top > 0.0 ? rank_cutoff * top : 1e-14;

    const double merge = cluster_tol * top;
    std::vector<double> members;
    auto flush = [&] {
        if (members.empty()) return;
        double s = 0.0;
        for (double x : members) s += x;
        spec.distinct_eigenvalues.push_back(s / static_cast<double>(members.size()));
        spec.multiplicities.push_back(static_cast<int>(members.size()));
        members.clear();
    };
    for (double x : ev) {
        if (x <= spec.rank_cutoff) break;
        if (!members.empty() && members.back() - x > merge) flush();
        members.push_back(x);
    }
    flush();
    return spec;
}

KSpectrum k_spectrum(const HardyState& u, const SpectrumOptions& opts) {
    const std::size_t size = opts.size == 0 ? suggest_gram_size(u) : std::min(opts.size, u.mode_count());
    return k_spectrum(u, size, opts.cluster_tol, opts.rank_cutoff);
}

double f_functional(const KSpectrum& spec) {
    double f = 0.0;
    double sign = 1.0;
    for (double s : spec.distinct_eigenvalues) {
        f += sign * s;
        sign = -sign;
    }
    return f;
}

double limit_l2_sq(const KSpectrum& spec) { return f_functional(spec); }

std::string_view verdict_name(Verdict v) {
    switch (v) {
        case Verdict::ExplodesStrict: return "ExplodesStrict";
        case Verdict::ExplodesEqualCase: return "ExplodesEqualCase";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

CriterionVerdict explosion_criterion(const HardyState& u, const KSpectrum& spec, double tol) {
    CriterionVerdict v;
    v.l2_sq = l2_norm_sq(u);
    v.f_value = f_functional(spec);
    v.u0_coeff_abs = std::abs(inner_with_one(u));
    v.tol = tol >= 0.0 ? tol : 1e-8 * std::max(1.0, v.l2_sq);
    if (v.l2_sq < v.f_value - v.tol) {
        v.verdict = Verdict::ExplodesStrict;
    } else if (std::abs(v.l2_sq - v.f_value) <= v.tol && v.u0_coeff_abs > v.tol) {
        v.verdict = Verdict::ExplodesEqualCase;
    } else {
        v.verdict = Verdict::Inconclusive;
    }
    return v;
}

CriterionVerdict explosion_criterion(const HardyState& u, const SpectrumOptions& opts, double tol) {
    return explosion_criterion(u, k_spectrum(u, opts), tol);
}

void write_spectrum_csv(std::ostream& os, const KSpectrum& spec) {
    os << "index,eigenvalue,multiplicity\n";
    for (std::size_t i = 0; i < spec.distinct_eigenvalues.size(); ++i) {
        os << (i + 1) << ',' << format_double(spec.distinct_eigenvalues[i]) << ',' << spec.multiplicities[i] << '\n';
    }
}

}  // namespace szego
