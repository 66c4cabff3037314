#pragma once

#include <span>

namespace szego {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Ordinary least squares y ~ slope x + intercept. Needs two distinct x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

struct PowerFit {
    double prefactor = 0.0;  // C
    double exponent = 0.0;   // q
    double offset = 0.0;     // D
};

// y ~ C t^q + D: golden-section search on q in [q_lo, q_hi] with C and D
// solved by least squares for each trial exponent.
PowerFit fit_power_with_offset(std::span<const double> t, std::span<const double> y, double q_lo, double q_hi);

}  // namespace szego
