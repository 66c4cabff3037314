#include "szego/solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "szego/csv.hpp"
#include "szego/error.hpp"
#include "szego/fft.hpp"
#include "szego/simd.hpp"

namespace szego {

void SolverConfig::validate() const {
    if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
    if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
    if (!(t_end > 0.0)) throw ConfigError("t_end must be > 0");
    if (grid_size == 0 || grid_size % 2 != 0) throw ConfigError("grid size N must be even and positive");
    if (!(krasny_threshold >= 0.0 && krasny_threshold < 1.0)) throw ConfigError("krasny_threshold must lie in [0, 1)");
    if (record_stride == 0) throw ConfigError("record_stride must be positive");
    for (double s : sobolev_exponents) {
        if (!(s >= 0.5)) throw ConfigError("sobolev exponents must be >= 1/2");
    }
}

std::size_t SolverConfig::step_count() const {
    return static_cast<std::size_t>(std::llround(t_end / dt));
}

std::string DiagnosticsSeries::csv_header() const {
    std::string h = "t,l2_sq,momentum,u0_abs";
    for (double s : sobolev_exponents) h += ",hs_sq_" + format_label(s);
    return h;
}

void DiagnosticsSeries::write_csv(std::ostream& os) const {
    os << csv_header() << '\n';
    for (const auto& r : rows) {
        os << format_double(r.t) << ',' << format_double(r.l2_sq) << ',' << format_double(r.momentum) << ','
           << format_double(r.u0_abs);
        for (double h : r.hs_sq) os << ',' << format_double(h);
        os << '\n';
    }
}

std::vector<double> DiagnosticsSeries::times() const {
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(r.t);
    return v;
}

std::vector<double> DiagnosticsSeries::l2_sq() const {
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(r.l2_sq);
    return v;
}

std::vector<double> DiagnosticsSeries::momentum() const {
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(r.momentum);
    return v;
}

std::vector<double> DiagnosticsSeries::hs_sq(std::size_t index) const {
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(r.hs_sq.at(index));
    return v;
}

namespace {

// Scratch space for repeated right-hand-side evaluations on one grid.
class Stepper {
public:
    Stepper(std::size_t grid_size, bool dealias)
        : modes_(grid_size / 2),
          plan_(dealias ? 2 * grid_size : grid_size),
          k1_(modes_),
          k2_(modes_),
          k3_(modes_),
          k4_(modes_),
          tmp_(modes_) {}

    std::size_t modes() const { return modes_; }

    void rhs(std::span<const cplx> u, double alpha, std::span<cplx> out) {
        // Grid origin shifts are translations and commute with the cubic
        // term, so the unshifted grid is used here.
        auto buf = plan_.buffer();
        std::copy(u.begin(), u.end(), buf.begin());
        std::fill(buf.begin() + static_cast<std::ptrdiff_t>(modes_), buf.end(), cplx{0.0, 0.0});
        plan_.backward();
        simd::cubic_inplace(buf);
        plan_.forward();
        const double inv = 1.0 / static_cast<double>(plan_.size());
        for (std::size_t k = 0; k < modes_; ++k) out[k] = cplx{buf[k].imag() * inv, -buf[k].real() * inv};
        out[0] -= alpha * u[0];
    }

    void step(std::vector<cplx>& u, double alpha, double dt) {
        rhs(u, alpha, k1_);
        simd::scaled_add(tmp_, u, 0.5 * dt, k1_);
        rhs(tmp_, alpha, k2_);
        simd::scaled_add(tmp_, u, 0.5 * dt, k2_);
        rhs(tmp_, alpha, k3_);
        simd::scaled_add(tmp_, u, dt, k3_);
        rhs(tmp_, alpha, k4_);
        simd::scaled_add(u, u, dt / 6.0, k1_);
        simd::scaled_add(u, u, dt / 3.0, k2_);
        simd::scaled_add(u, u, dt / 3.0, k3_);
        simd::scaled_add(u, u, dt / 6.0, k4_);
    }

private:
    std::size_t modes_;
    FftPlan plan_;
    std::vector<cplx> k1_, k2_, k3_, k4_, tmp_;
};

bool all_finite(std::span<const cplx> u) {
    return std::isfinite(simd::norm_sq(u));
}

double max_modulus(std::span<const cplx> u) {
    double m = 0.0;
    for (const cplx& c : u) m = std::max(m, std::abs(c));
    return m;
}

}  // namespace

HardyState rhs(const HardyState& u, double alpha) {
    Stepper s(u.grid_size(), false);
    std::vector<cplx> out(u.mode_count());
    s.rhs(u.coeffs(), alpha, out);
    return HardyState(std::move(out), u.grid_size());
}

HardyState krasny_filter(const HardyState& u, double threshold) {
    std::vector<cplx> c(u.coeffs().begin(), u.coeffs().end());
    if (threshold > 0.0) simd::threshold_zero(c, threshold);
    return HardyState(std::move(c), u.grid_size());
}

HardyState rk4_step(const HardyState& u, double alpha, double dt, double krasny_threshold) {
    if (!(dt > 0.0)) throw DomainError("rk4_step requires dt > 0");
    Stepper s(u.grid_size(), false);
    std::vector<cplx> c(u.coeffs().begin(), u.coeffs().end());
    s.step(c, alpha, dt);
    if (!all_finite(c)) throw BlowUp("non-finite state after RK4 step", dt);
    if (krasny_threshold > 0.0) simd::threshold_zero(c, krasny_threshold);
    return HardyState(std::move(c), u.grid_size());
}

EvolveResult evolve(const HardyState& u0, const SolverConfig& cfg, const RecordObserver& observer) {
    cfg.validate();
    if (u0.grid_size() != cfg.grid_size) throw ConfigError("initial state grid size differs from solver grid size");

    Stepper stepper(cfg.grid_size, cfg.dealias);
    const std::size_t modes = stepper.modes();
    std::vector<cplx> u(u0.coeffs().begin(), u0.coeffs().end());

    double threshold = cfg.krasny_threshold;
    if (cfg.krasny_mode == KrasnyMode::RelativeToInitialMax) threshold *= max_modulus(u);

    const auto mweights = momentum_weights(modes);
    std::vector<std::vector<double>> sweights;
    for (double s : cfg.sobolev_exponents) sweights.push_back(hs_weights(modes, s));

    EvolveResult result{HardyState(cfg.grid_size), {}, 0, false};
    result.series.sobolev_exponents = cfg.sobolev_exponents;

    auto record = [&](double t) {
        DiagnosticsRow row;
        row.t = t;
        row.l2_sq = simd::norm_sq(u);
        row.momentum = simd::weighted_norm_sq(u, mweights);
        row.u0_abs = std::abs(u[0]);
        for (const auto& w : sweights) row.hs_sq.push_back(simd::weighted_norm_sq(u, w));
        result.series.rows.push_back(std::move(row));
        if (!result.resolution_lost && std::abs(u[modes - 1]) > cfg.resolution_tol * max_modulus(u)) {
            result.resolution_lost = true;
            result.resolution_lost_at = t;
        }
        if (observer) observer(t, HardyState(u, cfg.grid_size));
    };

    record(0.0);
    const std::size_t nsteps = cfg.step_count();
    for (std::size_t n = 1; n <= nsteps; ++n) {
        stepper.step(u, cfg.alpha, cfg.dt);
        const double t = static_cast<double>(n) * cfg.dt;
        const double l2 = simd::norm_sq(u);
        if (!std::isfinite(l2)) throw BlowUp("non-finite state at t = " + format_double(t), t);
        if (l2 > cfg.blowup_l2) throw BlowUp("L2 norm exceeded blow-up bound at t = " + format_double(t), t);
        if (threshold > 0.0) simd::threshold_zero(u, threshold);
        if (n % cfg.record_stride == 0 || n == nsteps) record(t);
    }
    result.steps = nsteps;
    result.final_state = HardyState(std::move(u), cfg.grid_size);
    return result;
}

double check_lyapunov(const DiagnosticsSeries& series, double alpha) {
    const auto& r = series.rows;
    if (r.size() < 3) throw DomainError("check_lyapunov needs at least three records");
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < r.size(); ++i) {
        const double d = (r[i + 1].l2_sq - r[i - 1].l2_sq) / (r[i + 1].t - r[i - 1].t);
        worst = std::max(worst, std::abs(d + 2.0 * alpha * r[i].u0_abs * r[i].u0_abs));
    }
    return worst / std::max(1.0, r.front().l2_sq);
}

}  // namespace szego
