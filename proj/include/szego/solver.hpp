#pragma once

// Explicit RK4 integration of the damped cubic Szego equation
//   i u_t + i alpha (u|1) = Pi(|u|^2 u)
// in Fourier-coefficient space, with a Krasny filter after every step.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "szego/hardy.hpp"

namespace szego {

enum class KrasnyMode {
    Absolute,              // zero |u^(k)| < threshold
    RelativeToInitialMax,  // zero |u^(k)| < threshold * max_k |u0^(k)|
};

struct SolverConfig {
    double alpha = 1.0;
    double dt = 2e-4;
    double t_end = 20.0;
    std::size_t grid_size = 4096;
    double krasny_threshold = 1e-12;  // 0 disables the filter
    KrasnyMode krasny_mode = KrasnyMode::Absolute;
    std::size_t record_stride = 10;
    std::vector<double> sobolev_exponents{1.0};
    // Evaluate the cubic term on a 2N grid. The retained-half layout is
    // already alias-free, so this only serves as a cross-check.
    bool dealias = false;
    double blowup_l2 = 1e12;
    double resolution_tol = 1e-8;

    void validate() const;
    std::size_t step_count() const;
};

struct DiagnosticsRow {
    double t = 0.0;
    double l2_sq = 0.0;
    double momentum = 0.0;
    double u0_abs = 0.0;
    std::vector<double> hs_sq;
};

struct DiagnosticsSeries {
    std::vector<double> sobolev_exponents;
    std::vector<DiagnosticsRow> rows;

    std::string csv_header() const;
    void write_csv(std::ostream& os) const;
    std::vector<double> times() const;
    std::vector<double> l2_sq() const;
    std::vector<double> momentum() const;
    // Column for sobolev_exponents[index].
    std::vector<double> hs_sq(std::size_t index) const;
};

// du/dt = -i Pi(|u|^2 u) - alpha u^(0) e_0
HardyState rhs(const HardyState& u, double alpha);

// One classical RK4 step; a positive krasny_threshold applies the absolute
// filter to the result. Throws BlowUp if the result is not finite.
HardyState rk4_step(const HardyState& u, double alpha, double dt, double krasny_threshold = 0.0);

HardyState krasny_filter(const HardyState& u, double threshold);

struct EvolveResult {
    HardyState final_state;
    DiagnosticsSeries series;
    std::size_t steps = 0;
    bool resolution_lost = false;
    double resolution_lost_at = std::numeric_limits<double>::quiet_NaN();
};

// Called with each recorded state, in time order.
using RecordObserver = std::function<void(double t, const HardyState& u)>;

EvolveResult evolve(const HardyState& u0, const SolverConfig& cfg, const RecordObserver& observer = {});

// max over interior records of |d/dt l2_sq + 2 alpha |u^(0)|^2| using centred
// differences, normalized by max(1, l2_sq(0)).
double check_lyapunov(const DiagnosticsSeries& series, double alpha);

}  // namespace szego
