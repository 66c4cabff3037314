// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any line fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "szego/experiments.hpp"
#include "szego/fit.hpp"
#include "szego/hankel.hpp"
#include "szego/simd.hpp"
#include "szego/solver.hpp"
#include "szego/stable_manifold.hpp"
#include "szego/wmanifold.hpp"

using namespace szego;

namespace {

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
    if (!pass) ++failures;
    std::printf("%s %2d %-24s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double rel_dev(double x, double target) { return std::abs(x - target) / std::abs(target); }

double max_drift(const std::vector<double>& v) {
    double d = 0.0;
    for (double x : v) d = std::max(d, std::abs(x - v.front()) / std::abs(v.front()));
    return d;
}

std::vector<double> window(const std::vector<double>& t, const std::vector<double>& y, double a, double b,
                           std::vector<double>& tw) {
    std::vector<double> yw;
    tw.clear();
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= a - 1e-9 && t[i] <= b + 1e-9) {
            tw.push_back(t[i]);
            yw.push_back(y[i]);
        }
    }
    return yw;
}

HardyState single_pole(std::size_t n) {
    InitialCondition ic;
    return build_initial(ic, n);
}

// Top eigenvalues of K^2, descending; values under 1e-10 of the largest are
// roundoff of an exactly finite-rank operator and are set to zero.
std::vector<double> top_k2(const HardyState& u, std::size_t count) {
    std::vector<double> ev = eigenvalues(gram_k(u, suggest_gram_size(u)));
    std::sort(ev.begin(), ev.end(), std::greater<>());
    ev.resize(count, 0.0);
    for (double& e : ev) {
        if (e < 1e-10 * ev.front()) e = 0.0;
    }
    return ev;
}

// Criteria 1, 2, 3 and 6 share the single-pole run.
void single_pole_run() {
    const double alpha = 1.0;
    SolverConfig cfg;  // N = 4096, dt = 2e-4, t in [0, 20]
    cfg.alpha = alpha;
    const HardyState u0 = single_pole(cfg.grid_size);
    const double M = momentum(u0);
    HardyState at5 = u0;
    const EvolveResult run = evolve(u0, cfg, [&](double t, const HardyState& u) {
        if (std::abs(t - 5.0) < 1e-9) at5 = u;
    });

    std::vector<double> tw;
    const std::vector<double> hw = window(run.series.times(), run.series.hs_sq(0), 10.0, 20.0, tw);
    const LinearFit lf = fit_line(tw, hw);
    const double target = 4.0 * alpha * M * M * M / (alpha * alpha + M * M);
    report(1, "h1_growth_slope", rel_dev(lf.slope, target) <= 0.05,
           fmt("slope %.5f on [10,20], target %.5f (M=%.6f), rel dev %.4f <= 0.05", lf.slope, target, M,
               rel_dev(lf.slope, target)));

    const double drift = max_drift(run.series.momentum());
    report(2, "momentum_drift", drift <= 1e-9, fmt("max relative drift %.3e <= 1e-9", drift));

    const double lyap = check_lyapunov(run.series, alpha);
    SolverConfig cons = cfg;
    cons.alpha = 0.0;
    cons.grid_size = 1024;
    const EvolveResult free_run = evolve(single_pole(cons.grid_size), cons);
    const double l2_drift = max_drift(free_run.series.l2_sq());
    report(3, "lyapunov_residual", lyap <= 1e-5 && l2_drift <= 1e-9,
           fmt("residual %.3e <= 1e-5; alpha=0 L2 drift %.3e <= 1e-9", lyap, l2_drift));

    const WTrajectory w = integrate_w(WState{0.0, 1.0, 0.5}, alpha, cfg.dt, 5.0, 1000);
    const HardyState w5 = w_to_hardy(w.records.back().w, cfg.grid_size);
    const double dist = l2_distance(at5, w5);
    report(6, "pde_vs_w_ode", dist <= 1e-6 && std::abs(w.records.back().t - 5.0) < 1e-9,
           fmt("l2 coefficient distance at t=5: %.3e <= 1e-6", dist));
}

void lax_pair_spectrum() {
    ExperimentConfig cfg = preset_config(Preset::TwoPoles);
    cfg.solver.t_end = 5.0;
    const HardyState u0 = build_initial(cfg.ic, cfg.solver.grid_size);
    std::map<double, std::vector<double>> spectra;
    evolve(u0, cfg.solver, [&](double t, const HardyState& u) {
        for (double s : {0.0, 2.5, 5.0}) {
            if (std::abs(t - s) < 1e-9) spectra[s] = top_k2(u, 5);
        }
    });
    double worst = 0.0;
    bool complete = spectra.size() == 3;
    if (complete) {
        const auto& ref = spectra[0.0];
        for (const auto& [t, ev] : spectra) {
            for (std::size_t i = 0; i < 5; ++i) {
                if (ref[i] == 0.0 && ev[i] == 0.0) continue;
                worst = std::max(worst, std::abs(ev[i] - ref[i]) / std::max(ref[i], ev[i]));
            }
        }
    }
    const auto& r = spectra[0.0];
    report(4, "k2_spectrum_invariance", complete && worst <= 1e-6,
           fmt("top-5 at t=0: %.10g %.10g %.3g %.3g %.3g; max rel change over t={2.5,5}: %.3e <= 1e-6", r[0], r[1],
               r[2], r[3], r[4], worst));
}

void verdicts() {
    InitialCondition pole;
    const CriterionVerdict a = explosion_criterion(build_initial(pole, 4096));

    InitialCondition bl;
    bl.shape = Shape::Blaschke;
    bl.poles = {cplx{0.3, 0.0}};
    const CriterionVerdict b = explosion_criterion(build_initial(bl, 4096));

    InitialCondition circle;
    circle.shape = Shape::W;
    circle.w = WState{0.0, 1.0, 0.0};
    const CriterionVerdict c = explosion_criterion(build_initial(circle, 4096));

    const bool pass = a.verdict == Verdict::ExplodesStrict && b.verdict == Verdict::ExplodesEqualCase &&
                      std::abs(b.f_value - 1.0) < 1e-10 && std::abs(b.l2_sq - 1.0) < 1e-10 &&
                      c.verdict == Verdict::Inconclusive;
    report(5, "criterion_verdicts", pass,
           fmt("pole 0.5: %s (|u|^2=%.6f, F=%.6f); blaschke 0.3: %s (F=%.12f, |u|^2=%.12f); e^{ix}: %s",
               std::string(verdict_name(a.verdict)).c_str(), a.l2_sq, a.f_value,
               std::string(verdict_name(b.verdict)).c_str(), b.f_value, b.l2_sq,
               std::string(verdict_name(c.verdict)).c_str()));
}

void kappa() {
    const double alpha = 1.0;
    const WState w{0.0, 1.0, 0.5};
    const double M = w.momentum();
    const ReducedTrajectory tr = integrate_reduced(reduce(w), alpha, M, 1e-3, 500.0, 100);
    const double fitted = gamma_tail_fit(tr, 250.0, 500.0);
    const double target = (alpha * alpha + M * M) / (2.0 * alpha * M);
    report(7, "kappa_asymptotics", rel_dev(fitted, target) <= 0.05,
           fmt("gamma*t on [250,500] = %.5f, target %.5f, rel dev %.4f <= 0.05", fitted, target,
               rel_dev(fitted, target)));
}

void closed_forms() {
    double worst = 0.0;
    for (double alpha : {1.0, 2.0}) {
        for (double M : {1.0, 16.0 / 9.0, 3.0}) {
            const VerifyReport r = run_verify(alpha, M);
            worst = std::max(worst, r.max_residual());
            const AsymptoticConstants& k = r.constants;
            worst = std::max(worst, std::abs(k.a * std::sqrt(k.a * k.a - alpha * alpha) - 2.0 * M * alpha) /
                                        (2.0 * M * alpha));
            worst = std::max(worst, std::abs(k.lambda_plus + k.lambda_minus + alpha));
        }
    }
    report(8, "closed_form_identities", worst <= 1e-10, fmt("max residual over 6 (alpha, M) pairs %.3e <= 1e-10", worst));
}

void stable_manifold() {
    const StableManifoldTrajectory tr = stable_manifold_trajectory(1.0, 1.0, 1.0);
    const StableFitReport f = stable_manifold_fit(tr);
    const double rt = stable_manifold_roundtrip(tr, 1e-3);
    const double dr = rel_dev(f.decay_rate, f.decay_target);
    const double rr = rel_dev(f.ratio, f.ratio_target);
    report(9, "stable_manifold", dr <= 0.01 && rr <= 0.01 && rt <= 1e-8,
           fmt("decay %.5f vs %.5f (%.1e); delta/beta %.6f vs %.6f (%.1e); roundtrip %.2e <= 1e-8", f.decay_rate,
               f.decay_target, dr, f.ratio, f.ratio_target, rr, rt));
}

void baby() {
    const double alpha = 1.0, eps = 0.05;
    ExperimentConfig cfg = preset_config(Preset::Baby);
    const HardyState u0 = build_initial(cfg.ic, cfg.solver.grid_size);
    const EvolveResult run = evolve(u0, cfg.solver);
    const auto l2 = run.series.l2_sq();
    const double l2_min = *std::min_element(l2.begin(), l2.end());

    const AsymptoticConstants k = asymptotic_constants(alpha, momentum(u0));
    const cplx dq0 = rhs(u0, alpha)[0];
    const double rate = (std::log(std::abs(linearized_q0(alpha, k.M, u0[0], dq0, 40.0))) -
                         std::log(std::abs(linearized_q0(alpha, k.M, u0[0], dq0, 30.0)))) /
                        10.0;
    const double expected = (k.a - alpha) / 2.0;
    const bool pass = l2_min <= 1.0 && std::abs(rate - k.lambda_plus.real()) <= 1e-10 &&
                      std::abs(k.lambda_plus.real() - expected) <= 1e-10;
    report(10, "baby_example", pass,
           fmt("|u0|^2=%.6f, min |u|^2 on [0,20] = %.6f <= 1; q0 rate %.12f vs (a-alpha)/2 = %.12f", 1.0 + eps * eps,
               l2_min, rate, expected));
}

void convergence_order() {
    SolverConfig cfg;
    cfg.grid_size = 256;
    // Short horizon: later the pole nears the circle and the error constant
    // keeps the observed order above 4 until much smaller steps.
    cfg.t_end = 2.0;
    cfg.krasny_threshold = 0.0;
    cfg.record_stride = 1000000;
    const HardyState u0 = single_pole(cfg.grid_size);
    auto final_state = [&](double dt) {
        SolverConfig c = cfg;
        c.dt = dt;
        return evolve(u0, c).final_state;
    };
    const std::vector<double> dts{0.02, 0.01, 0.005};
    const HardyState ref = final_state(dts.back() / 32.0);
    std::vector<double> err;
    for (double dt : dts) err.push_back(l2_distance(final_state(dt), ref));
    const double q1 = std::log2(err[0] / err[1]);
    const double q2 = std::log2(err[1] / err[2]);
    const bool pass = q1 >= 3.7 && q1 <= 4.3 && q2 >= 3.7 && q2 <= 4.3;
    report(11, "rk4_order", pass,
           fmt("errors %.3e %.3e %.3e at dt=0.02,0.01,0.005 (t=2); observed orders %.3f %.3f in [3.7,4.3]", err[0], err[1],
               err[2], q1, q2));
}

void gaussian_check() {
    ExperimentConfig cfg = preset_config(Preset::Gaussian);  // t_end = 100
    const HardyState u0 = build_initial(cfg.ic, cfg.solver.grid_size);
    const EvolveResult run = evolve(u0, cfg.solver);
    const double t_end = cfg.solver.t_end;
    std::vector<double> tw;
    const std::vector<double> hw = window(run.series.times(), run.series.hs_sq(0), t_end / 2.0, t_end, tw);
    const LinearFit lf = fit_line(tw, hw);
    const double drift = max_drift(run.series.momentum());
    report(12, "gaussian_t100", lf.r_squared >= 0.99 && drift <= 1e-8,
           fmt("H1 linear fit on [50,100]: R^2 %.4f >= 0.99, slope %.3e; momentum drift %.2e <= 1e-8",
               lf.r_squared, lf.slope, drift));
}

}  // namespace

int main() {
    std::printf("simd backend: %s\n", std::string(simd::backend_name(simd::active_backend())).c_str());
    single_pole_run();
    lax_pair_spectrum();
    verdicts();
    kappa();
    closed_forms();
    stable_manifold();
    baby();
    convergence_order();
    gaussian_check();
    std::printf("%d failing\n", failures);
    return failures == 0 ? 0 : 1;
}
