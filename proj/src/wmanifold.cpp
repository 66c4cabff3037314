#include "szego/wmanifold.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <ostream>

#include "szego/csv.hpp"
#include "szego/error.hpp"
#include "szego/fit.hpp"

namespace szego {

namespace {

constexpr cplx kI{0.0, 1.0};

template <class State, class Rhs>
State rk4(const State& x, double dt, Rhs&& f) {
    const State k1 = f(x);
    const State k2 = f(x + (0.5 * dt) * k1);
    const State k3 = f(x + (0.5 * dt) * k2);
    const State k4 = f(x + dt * k3);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

using WVec = Eigen::Matrix<cplx, 3, 1>;

WVec pack(const WState& w) { return WVec(w.b, w.c, w.p); }
WState unpack(const WVec& v) { return WState{v(0), v(1), v(2)}; }

// (beta, gamma, Re zeta, Im zeta)
Eigen::Vector4d pack(const ReducedState& r) { return {r.beta, r.gamma, r.zeta.real(), r.zeta.imag()}; }
ReducedState unpack_reduced(const Eigen::Vector4d& v) { return ReducedState{v(0), v(1), cplx{v(2), v(3)}}; }

std::size_t step_count(double dt, double t_end) {
    if (!(dt > 0.0) || !(t_end > 0.0)) throw DomainError("integration needs dt > 0 and t_end > 0");
    return static_cast<std::size_t>(std::llround(t_end / dt));
}

}  // namespace

double WState::momentum() const {
    const double g = 1.0 - std::norm(p);
    return std::norm(c) / (g * g);
}

double WState::l2_norm_sq() const { return std::norm(b) + std::norm(c) / (1.0 - std::norm(p)); }

void WState::validate() const {
    if (!(std::abs(p) < 1.0)) throw DomainError("W state requires |p| < 1");
    if (c == cplx{}) throw DomainError("W state requires c != 0");
}

ReducedState reduce(const WState& w) {
    const double M = w.momentum();
    return ReducedState{std::norm(w.b), M * (1.0 - std::norm(w.p)), M * w.c * std::conj(w.b) * std::conj(w.p)};
}

DeltaState to_delta(const ReducedState& r, double M) { return DeltaState{r.beta, M - r.gamma, r.zeta}; }

ReducedState to_gamma(const DeltaState& d, double M) { return ReducedState{d.beta, M - d.delta, d.zeta}; }

double constraint_defect(const ReducedState& r, double M) {
    return std::norm(r.zeta) - (M - r.gamma) * r.gamma * r.gamma * r.beta;
}

double constraint_defect(const DeltaState& d, double M) { return constraint_defect(to_gamma(d, M), M); }

WState lift_to_w(const DeltaState& d, double M) {
    if (!(d.beta > 0.0) || !(d.delta > 0.0) || !(d.delta < M)) {
        throw DomainError("lift needs beta > 0 and 0 < delta < M");
    }
    const double b = std::sqrt(d.beta);
    const double p = std::sqrt(d.delta / M);
    return WState{b, d.zeta / (M * b * p), p};
}

double AsymptoticConstants::growth_coeff(double s) const {
    return std::tgamma(2.0 * s + 1.0) * std::pow(M, 4.0 * s - 1.0) *
           std::pow((alpha * alpha + M * M) / (2.0 * alpha), 1.0 - 2.0 * s);
}

Eigen::Vector4d AsymptoticConstants::stable_direction() const {
    return {1.0, (a - alpha) / (a + alpha), M * (alpha - a) / a, (alpha - a) / 2.0};
}

AsymptoticConstants asymptotic_constants(double alpha, double M) {
    if (!(alpha > 0.0) || !(M > 0.0)) throw DomainError("asymptotic constants need alpha > 0 and M > 0");
    AsymptoticConstants k;
    k.M = M;
    k.alpha = alpha;
    k.kappa = (alpha * alpha + M * M) / (2.0 * alpha * M);
    k.rho = (alpha * alpha + M * M) / (2.0 * alpha * M * M);
    const double a2 = alpha * alpha;
    k.a = std::sqrt((std::sqrt(a2 * a2 + 16.0 * M * M * a2) + a2) / 2.0);
    k.omega = std::sqrt(k.a * k.a - a2);
    const cplx root{k.a, k.omega};
    k.lambda_plus = (-alpha + root) / 2.0;
    k.lambda_minus = (-alpha - root) / 2.0;
    k.decay_rate = k.a + alpha;
    k.dist_rate = 0.5 * (k.a + alpha);
    return k;
}

HardyState w_to_hardy(const WState& w, std::size_t grid_size) {
    if (!(std::abs(w.p) < 1.0)) throw DomainError("w_to_hardy requires |p| < 1");
    std::vector<cplx> c(grid_size / 2);
    if (!c.empty()) c[0] = w.b;
    cplx term = w.c;
    for (std::size_t k = 1; k < c.size(); ++k) {
        c[k] = term;
        term *= w.p;
    }
    return HardyState(std::move(c), grid_size);
}

WState hardy_to_w(const HardyState& u, double tol) {
    if (u.mode_count() < 3) throw NotInW("too few modes to identify a W state", 0.0);
    const cplx c = u[1];
    if (c == cplx{}) throw NotInW("u^(1) = 0, so c = 0 and u is not in W", 0.0);
    const cplx p = u[2] / c;
    if (!(std::abs(p) < 1.0)) throw NotInW("coefficient ratio has modulus >= 1", std::abs(p));
    double dev = 0.0;
    for (std::size_t k = 1; k + 1 < u.mode_count(); ++k) dev = std::max(dev, std::abs(u[k + 1] - p * u[k]));
    dev /= std::abs(c);
    if (dev > tol) throw NotInW("coefficients are not geometric beyond k = 1", dev);
    return WState{u[0], c, p};
}

WDerivative w_rhs(const WState& w, double alpha) {
    const double g = 1.0 - std::norm(w.p);
    const double M = std::norm(w.c) / (g * g);
    const double bb = std::norm(w.b);
    WDerivative d;
    d.db = -kI * ((bb + 2.0 * M * g) * w.b + M * w.c * std::conj(w.p)) - alpha * w.b;
    d.dc = -kI * ((2.0 * bb + M) * w.c + 2.0 * M * g * w.b * w.p);
    d.dp = -kI * (M * g * w.p + w.c * std::conj(w.b));
    return d;
}

ReducedDerivative reduced_rhs(const ReducedState& r, double alpha, double M) {
    ReducedDerivative d;
    d.dbeta = -2.0 * alpha * r.beta + 2.0 * r.zeta.imag();
    d.dgamma = -2.0 * r.zeta.imag();
    d.dzeta = -(alpha + kI * M) * r.zeta + kI * (3.0 * r.gamma - r.beta) * r.zeta - 2.0 * kI * r.beta * r.gamma * M +
              kI * r.gamma * r.gamma * (M - r.gamma + 3.0 * r.beta);
    return d;
}

DeltaDerivative delta_rhs(const DeltaState& s, double alpha, double M) {
    DeltaDerivative d;
    const double md = M - s.delta;
    d.dbeta = -2.0 * alpha * s.beta + 2.0 * s.zeta.imag();
    d.ddelta = 2.0 * s.zeta.imag();
    d.dzeta = -(alpha - 2.0 * kI * M) * s.zeta - kI * (3.0 * s.delta + s.beta) * s.zeta +
              kI * md * md * (s.delta + s.beta) - 2.0 * kI * s.beta * s.delta * md;
    return d;
}

void WTrajectory::write_csv(std::ostream& os) const {
    os << "t,re_b,im_b,re_c,im_c,re_p,im_p,beta,gamma,momentum\n";
    for (const auto& r : records) {
        os << format_double(r.t) << ',' << format_double(r.w.b.real()) << ',' << format_double(r.w.b.imag()) << ','
           << format_double(r.w.c.real()) << ',' << format_double(r.w.c.imag()) << ','
           << format_double(r.w.p.real()) << ',' << format_double(r.w.p.imag()) << ',' << format_double(r.beta)
           << ',' << format_double(r.gamma) << ',' << format_double(r.momentum) << '\n';
    }
}

WTrajectory integrate_w(const WState& w0, double alpha, double dt, double t_end, std::size_t record_stride) {
    w0.validate();
    if (record_stride == 0) throw DomainError("record_stride must be positive");
    const std::size_t n = step_count(dt, t_end);
    WTrajectory traj;
    traj.alpha = alpha;
    auto f = [alpha](const WVec& v) {
        const WDerivative d = w_rhs(unpack(v), alpha);
        return WVec(d.db, d.dc, d.dp);
    };
    auto record = [&](double t, const WState& w) {
        const ReducedState r = reduce(w);
        traj.records.push_back(WRecord{t, w, w.momentum(), r.beta, r.gamma});
        if (!traj.near_boundary && 1.0 - std::abs(w.p) < 1e-6) {
            traj.near_boundary = true;
            traj.near_boundary_at = t;
        }
    };
    WVec x = pack(w0);
    record(0.0, w0);
    for (std::size_t i = 1; i <= n; ++i) {
        x = rk4(x, dt, f);
        if (!std::isfinite(x.norm()) || !(std::abs(x(2)) < 1.0)) {
            throw BlowUp("W trajectory left the manifold", static_cast<double>(i) * dt);
        }
        if (i % record_stride == 0 || i == n) record(static_cast<double>(i) * dt, unpack(x));
    }
    return traj;
}

ReducedTrajectory integrate_reduced(const ReducedState& r0, double alpha, double M, double dt, double t_end,
                                    std::size_t record_stride) {
    if (record_stride == 0) throw DomainError("record_stride must be positive");
    const std::size_t n = step_count(dt, t_end);
    ReducedTrajectory traj{alpha, M, {}};
    auto f = [alpha, M](const Eigen::Vector4d& v) {
        const ReducedDerivative d = reduced_rhs(unpack_reduced(v), alpha, M);
        return Eigen::Vector4d(d.dbeta, d.dgamma, d.dzeta.real(), d.dzeta.imag());
    };
    Eigen::Vector4d x = pack(r0);
    traj.records.push_back({0.0, r0});
    for (std::size_t i = 1; i <= n; ++i) {
        x = rk4(x, dt, f);
        if (!std::isfinite(x.norm())) throw BlowUp("reduced trajectory is not finite", static_cast<double>(i) * dt);
        if (i % record_stride == 0 || i == n) traj.records.push_back({static_cast<double>(i) * dt, unpack_reduced(x)});
    }
    return traj;
}

double gamma_tail_fit(const ReducedTrajectory& traj, double t_begin, double t_end) {
    std::vector<const ReducedRecord*> window;
    for (const auto& r : traj.records) {
        if (r.t >= t_begin && r.t <= t_end && r.t > 0.0) window.push_back(&r);
    }
    if (window.size() < 3) throw FitError("gamma tail window holds fewer than three records");
    if (!(window.back()->r.gamma < 0.9 * window.front()->r.gamma)) {
        throw FitError("gamma is not decaying over the fit window; trajectory is not exploding");
    }
    // argmin_C sum (gamma t - C)^2 is the mean of gamma t.
    double s = 0.0;
    for (const auto* r : window) s += r->r.gamma * r->t;
    return s / static_cast<double>(window.size());
}

double gamma_tail_fit(const ReducedTrajectory& traj) {
    if (traj.records.empty()) throw FitError("empty trajectory");
    const double t_final = traj.records.back().t;
    return gamma_tail_fit(traj, 0.5 * t_final, t_final);
}

cplx linearized_q0(double alpha, double M, cplx q0_0, cplx dq0_0, double t) {
    const AsymptoticConstants k = asymptotic_constants(alpha, M);
    const cplx gap = k.lambda_plus - k.lambda_minus;
    if (std::abs(gap) == 0.0) throw DomainError("characteristic roots coincide");
    const cplx a_plus = (dq0_0 - k.lambda_minus * q0_0) / gap;
    const cplx a_minus = (k.lambda_plus * q0_0 - dq0_0) / gap;
    return a_plus * std::exp(k.lambda_plus * t) + a_minus * std::exp(k.lambda_minus * t);
}

Linearization linearization_matrix(double alpha, double M) {
    Linearization lin;
    lin.A << 2.0 * alpha, 0.0, 0.0, -2.0,
             0.0, 0.0, 0.0, -2.0,
             0.0, 0.0, alpha, 2.0 * M,
             -M * M, -M * M, -2.0 * M, alpha;
    Eigen::EigenSolver<Eigen::Matrix4d> es(lin.A, false);
    for (int i = 0; i < 4; ++i) lin.eigenvalues[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    return lin;
}

std::array<cplx, 4> closed_form_eigenvalues(const AsymptoticConstants& k) {
    return {cplx{k.alpha + k.a, 0.0}, cplx{k.alpha - k.a, 0.0}, cplx{k.alpha, k.omega}, cplx{k.alpha, -k.omega}};
}

Eigen::Vector4d delta_nonlinearity(const Eigen::Vector4d& x, double M) {
    const double beta = x(0), delta = x(1), zr = x(2), zi = x(3);
    return {0.0, 0.0, (beta + 3.0 * delta) * zi,
            -(beta + 3.0 * delta) * zr - 2.0 * M * delta * delta - 4.0 * M * beta * delta + delta * delta * delta +
                3.0 * beta * delta * delta};
}

double w_hs_norm_sq(const WState& w, double s) {
    const double r = std::norm(w.p);
    if (!(r < 1.0)) throw DomainError("w_hs_norm_sq requires |p| < 1");
    const double c2 = std::norm(w.c);
    // sum_{k>=1} k^{2j} r^{k-1} in closed form for the integer cases
    const double q = 1.0 - r;
    const double m0 = 1.0 / q;
    const double m2 = (1.0 + r) / (q * q * q);
    if (s == 0.0) return std::norm(w.b) + c2 * m0;
    if (s == 1.0) return std::norm(w.b) + c2 * (m0 + m2);
    if (s == 2.0) {
        const double m4 = (1.0 + r * (11.0 + r * (11.0 + r))) / (q * q * q * q * q);
        return std::norm(w.b) + c2 * (m0 + 2.0 * m2 + m4);
    }
    double sum = 0.0;
    double geom = c2;  // |c|^2 r^{k-1}
    for (std::size_t k = 1; k < 100000000; ++k) {
        const double kk = static_cast<double>(k);
        const double term = std::pow(1.0 + kk * kk, s) * geom;
        sum += term;
        const double ratio = r * std::pow((1.0 + (kk + 1.0) * (kk + 1.0)) / (1.0 + kk * kk), s);
        if (ratio < 1.0 && term * ratio / (1.0 - ratio) < 1e-17 * sum) break;
        if (term == 0.0 && k > 1) break;
        geom *= r;
    }
    return std::norm(w.b) + sum;
}

SobolevFitReport wbis_endstate_check(const WTrajectory& traj, const AsymptoticConstants& k, double s) {
    if (!(s > 0.5)) throw DomainError("growth fit needs s > 1/2");
    if (traj.records.size() < 3) throw FitError("trajectory too short for a growth fit");
    const double t_final = traj.records.back().t;
    SobolevFitReport rep;
    rep.s = s;
    rep.window_begin = t_final / 10.0;
    rep.window_end = t_final;
    std::vector<double> t, h, logt, logh;
    double g_first = 0.0, g_last = 0.0;
    for (const auto& r : traj.records) {
        if (r.t < rep.window_begin || r.t <= 0.0) continue;
        const double g = 1.0 - std::norm(r.w.p);
        if (t.empty()) g_first = g;
        g_last = g;
        t.push_back(r.t);
        h.push_back(w_hs_norm_sq(r.w, s));
        logt.push_back(std::log(r.t));
        logh.push_back(std::log(h.back()));
    }
    if (t.size() < 3) throw FitError("growth fit window holds fewer than three records");
    if (!(g_last < 0.9 * g_first) || !(h.back() > h.front())) {
        throw FitError("Sobolev norm is not growing over the fit window; trajectory is not exploding");
    }
    rep.exponent_target = 2.0 * s - 1.0;
    rep.prefactor_target = k.growth_coeff(s);
    rep.loglog_slope = fit_line(logt, logh).slope;
    const PowerFit pf = fit_power_with_offset(t, h, std::max(0.05, 0.25 * rep.exponent_target),
                                              2.0 * rep.exponent_target + 0.5);
    rep.exponent = pf.exponent;
    std::vector<double> tq(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) tq[i] = std::pow(t[i], rep.exponent_target);
    rep.prefactor = fit_line(tq, h).slope;
    rep.exponent_rel_dev = std::abs(rep.exponent - rep.exponent_target) / rep.exponent_target;
    rep.prefactor_rel_dev = std::abs(rep.prefactor - rep.prefactor_target) / rep.prefactor_target;
    return rep;
}

WRunClass classify_w_run(const WTrajectory& traj) {
    if (traj.records.size() < 4) return WRunClass::Undetermined;
    const double t_mid = 0.5 * traj.records.back().t;
    const double M = traj.records.front().momentum;
    const double l2_0 = traj.records.front().w.l2_norm_sq();
    double max_p = 0.0;
    bool monotone = true;
    double g_mid = -1.0, g_prev = -1.0, g_last = 0.0;
    for (const auto& r : traj.records) {
        if (r.t < t_mid) continue;
        const double ap = std::abs(r.w.p);
        max_p = std::max(max_p, ap);
        const double g = 1.0 - ap * ap;
        if (g_mid < 0.0) g_mid = g;
        if (g_prev >= 0.0 && g > g_prev * (1.0 + 1e-12)) monotone = false;
        g_prev = g;
        g_last = g;
    }
    if (max_p < 0.9 && l2_0 >= M * (1.0 - 1e-9)) return WRunClass::Bounded;
    if (monotone && g_last <= 0.9 * g_mid) return WRunClass::Exploding;
    return WRunClass::Undetermined;
}

}  // namespace szego
