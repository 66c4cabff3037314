#include "szego/fit.hpp"

#include <cmath>
#include <vector>

#include "szego/error.hpp"

namespace szego {

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw FitError("line fit needs at least two paired samples");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0) throw FitError("line fit needs two distinct abscissae");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

namespace {

double residual_for(std::span<const double> t, std::span<const double> y, double q, PowerFit* out) {
    std::vector<double> tq(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) tq[i] = std::pow(t[i], q);
    const LinearFit lf = fit_line(tq, y);
    double r = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double e = y[i] - (lf.slope * tq[i] + lf.intercept);
        r += e * e;
    }
    if (out != nullptr) *out = PowerFit{lf.slope, q, lf.intercept};
    return r;
}

}  // namespace

PowerFit fit_power_with_offset(std::span<const double> t, std::span<const double> y, double q_lo, double q_hi) {
    if (t.size() < 3) throw FitError("power fit needs at least three samples");
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = q_lo, b = q_hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = residual_for(t, y, c, nullptr), fd = residual_for(t, y, d, nullptr);
    for (int it = 0; it < 200 && (b - a) > 1e-12 * std::max(1.0, std::abs(b)); ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = residual_for(t, y, c, nullptr);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = residual_for(t, y, d, nullptr);
        }
    }
    PowerFit best;
    residual_for(t, y, 0.5 * (a + b), &best);
    return best;
}

}  // namespace szego
