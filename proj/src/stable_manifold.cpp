#include "szego/stable_manifold.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "szego/csv.hpp"
#include "szego/error.hpp"
#include "szego/fit.hpp"

namespace szego {

namespace {

Eigen::Vector4d to_vec(const DeltaState& d) { return {d.beta, d.delta, d.zeta.real(), d.zeta.imag()}; }
DeltaState from_vec(const Eigen::Vector4d& v) { return DeltaState{v(0), v(1), cplx{v(2), v(3)}}; }

Eigen::Vector4d f(const Eigen::Vector4d& x, double alpha, double M) {
    const DeltaDerivative d = delta_rhs(from_vec(x), alpha, M);
    return {d.dbeta, d.ddelta, d.dzeta.real(), d.dzeta.imag()};
}

Eigen::Vector4d rk4(const Eigen::Vector4d& x, double h, double alpha, double M) {
    const Eigen::Vector4d k1 = f(x, alpha, M);
    const Eigen::Vector4d k2 = f(x + 0.5 * h * k1, alpha, M);
    const Eigen::Vector4d k3 = f(x + 0.5 * h * k2, alpha, M);
    const Eigen::Vector4d k4 = f(x + h * k3, alpha, M);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

void StableManifoldTrajectory::write_csv(std::ostream& os) const {
    os << "t,beta,delta,re_zeta,im_zeta\n";
    for (const auto& r : records) {
        os << format_double(r.t) << ',' << format_double(r.x.beta) << ',' << format_double(r.x.delta) << ','
           << format_double(r.x.zeta.real()) << ',' << format_double(r.x.zeta.imag()) << '\n';
    }
}

double default_t_start(double beta_inf, const AsymptoticConstants& k) {
    return std::max(0.0, std::log(beta_inf / (1e-6 * k.M)) / k.decay_rate);
}

DeltaState integrate_delta(const DeltaState& x0, double alpha, double M, double t0, double t1, double dt) {
    if (!(dt > 0.0)) throw DomainError("dt must be positive");
    const double span = t1 - t0;
    const auto n = static_cast<std::size_t>(std::max<long long>(1, std::llround(std::abs(span) / dt)));
    const double h = span / static_cast<double>(n);
    Eigen::Vector4d x = to_vec(x0);
    for (std::size_t i = 0; i < n; ++i) x = rk4(x, h, alpha, M);
    return from_vec(x);
}

StableManifoldTrajectory stable_manifold_trajectory(double beta_inf, double alpha, double M,
                                                    const StableManifoldOptions& opt) {
    if (!(beta_inf > 0.0)) throw DomainError("beta_inf must be positive");
    if (!(opt.dt > 0.0)) throw DomainError("dt must be positive");
    const AsymptoticConstants k = asymptotic_constants(alpha, M);
    const double T = opt.t_start ? *opt.t_start : default_t_start(beta_inf, k);
    if (!(opt.t_end_back <= T)) throw DomainError("t_end_back must not exceed t_start");
    const double rate = k.decay_rate;
    const Eigen::Vector4d x_inf = beta_inf * k.stable_direction();
    const Eigen::Matrix4d A = linearization_matrix(alpha, M).A;

    const double L = opt.horizon_decays / rate;
    const auto n = static_cast<std::size_t>(std::llround(L / opt.dt));
    const double h = L / static_cast<double>(n);
    const Eigen::Matrix4d E = (h * A).exp();

    std::vector<double> weight(n + 1);
    std::vector<Eigen::Vector4d> lead(n + 1), x(n + 1), q(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = T + h * static_cast<double>(i);
        weight[i] = std::exp(rate * t);
        lead[i] = std::exp(-rate * t) * x_inf;
        x[i] = lead[i];
    }
    const double tol = opt.fp_tol * std::max(1.0, x_inf.norm());
    std::size_t iter = 0;
    double change = 0.0, prev_change = 0.0;
    std::size_t growth_streak = 0;
    for (;;) {
        if (iter == opt.max_iter) {
            throw FixedPointDivergence("fixed point did not converge in " + std::to_string(opt.max_iter) +
                                       " iterations; try a larger t_start");
        }
        ++iter;
        for (std::size_t i = 0; i <= n; ++i) q[i] = delta_nonlinearity(x[i], M);
        // I(t) = int_t^inf e^{(s-t)A} Q(s) ds by backward trapezoid; the tail past T+L is dropped.
        Eigen::Vector4d integral = Eigen::Vector4d::Zero();
        change = 0.0;
        for (std::size_t j = n + 1; j-- > 0;) {
            if (j < n) integral = E * integral + 0.5 * h * (q[j] + E * q[j + 1]);
            const Eigen::Vector4d next = lead[j] - integral;
            if (!std::isfinite(next.norm())) throw FixedPointDivergence("fixed point iterate is not finite; try a larger t_start");
            change = std::max(change, weight[j] * (next - x[j]).norm());
            x[j] = next;
        }
        if (change < tol) break;
        growth_streak = (iter > 1 && change > prev_change) ? growth_streak + 1 : 0;
        if (growth_streak >= 5) throw FixedPointDivergence("fixed point iteration is expanding; try a larger t_start");
        prev_change = change;
    }

    StableManifoldTrajectory traj;
    traj.beta_inf = beta_inf;
    traj.alpha = alpha;
    traj.M = M;
    traj.t_start = T;
    traj.iterations = iter;
    traj.seed = from_vec(x[0]);

    const double span = T - opt.t_end_back;
    const auto nb = static_cast<std::size_t>(std::llround(span / opt.dt));
    std::vector<StableRecord> rec;
    rec.reserve(nb + 1);
    Eigen::Vector4d y = x[0];
    rec.push_back({T, traj.seed});
    if (nb > 0) {
        const double hb = span / static_cast<double>(nb);
        for (std::size_t i = 1; i <= nb; ++i) {
            y = rk4(y, -hb, alpha, M);
            if (!std::isfinite(y.norm())) throw BlowUp("backward stable-manifold integration is not finite", T - hb * i);
            rec.push_back({i == nb ? opt.t_end_back : T - hb * static_cast<double>(i), from_vec(y)});
        }
    }
    std::reverse(rec.begin(), rec.end());
    traj.records = std::move(rec);
    return traj;
}

double stable_manifold_roundtrip(const StableManifoldTrajectory& traj, double dt) {
    if (traj.records.empty()) throw DomainError("empty stable-manifold trajectory");
    const StableRecord& start = traj.records.front();
    const DeltaState fwd = integrate_delta(start.x, traj.alpha, traj.M, start.t, traj.t_start, dt);
    return (to_vec(fwd) - to_vec(traj.seed)).norm() / to_vec(traj.seed).norm();
}

StableFitReport stable_manifold_fit(const StableManifoldTrajectory& traj) {
    const AsymptoticConstants k = asymptotic_constants(traj.alpha, traj.M);
    StableFitReport rep;
    rep.window_begin = 0.5 * traj.t_start;
    rep.window_end = traj.t_start;
    std::vector<double> t, lb;
    for (const auto& r : traj.records) {
        if (r.t < rep.window_begin || r.t > rep.window_end) continue;
        if (!(r.x.beta > 0.0)) throw FitError("beta is not positive inside the fit window");
        t.push_back(r.t);
        lb.push_back(std::log(r.x.beta));
    }
    if (t.size() < 3) throw FitError("stable-manifold fit window holds fewer than three records");
    rep.decay_rate = -fit_line(t, lb).slope;
    rep.decay_target = k.decay_rate;
    rep.ratio = traj.seed.delta / traj.seed.beta;
    rep.ratio_target = (k.a - k.alpha) / (k.a + k.alpha);
    return rep;
}

}  // namespace szego
