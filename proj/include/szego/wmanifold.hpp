#pragma once

// The damped Szego flow restricted to the invariant six-dimensional manifold
//   W = { u = b + c e^{ix} / (1 - p e^{ix}) : c != 0, |p| < 1 },
// its gauge-reduced form in (beta, gamma, zeta), and the closed-form
// asymptotic constants of the exploding and stable regimes.

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <vector>

#include "szego/hardy.hpp"

namespace szego {

struct WState {
    cplx b{0.0, 0.0};
    cplx c{1.0, 0.0};
    cplx p{0.0, 0.0};

    // M = |c|^2 / (1 - |p|^2)^2
    double momentum() const;
    double l2_norm_sq() const;
    // Throws DomainError unless |p| < 1 and c != 0.
    void validate() const;
};

// gamma form: beta = |b|^2, gamma = M (1 - |p|^2), zeta = M c conj(b) conj(p).
struct ReducedState {
    double beta = 0.0;
    double gamma = 0.0;
    cplx zeta{0.0, 0.0};
};

// delta form with delta = M - gamma = M |p|^2.
struct DeltaState {
    double beta = 0.0;
    double delta = 0.0;
    cplx zeta{0.0, 0.0};
};

ReducedState reduce(const WState& w);
DeltaState to_delta(const ReducedState& r, double M);
ReducedState to_gamma(const DeltaState& d, double M);
// |zeta|^2 - (M - gamma) gamma^2 beta; zero on the physical constraint set.
double constraint_defect(const ReducedState& r, double M);
double constraint_defect(const DeltaState& d, double M);
// A W point with the given reduced coordinates, fixing the gauge and
// translation angles so that b and p are real and nonnegative.
WState lift_to_w(const DeltaState& d, double M);

struct AsymptoticConstants {
    double M = 0.0;
    double alpha = 0.0;
    double kappa = 0.0;       // (alpha^2 + M^2) / (2 alpha M)
    double rho = 0.0;         // kappa / M, the rate constant of 1 - |p|^2
    double a = 0.0;           // ((sqrt(alpha^4 + 16 M^2 alpha^2) + alpha^2) / 2)^{1/2}
    double omega = 0.0;       // sqrt(a^2 - alpha^2)
    cplx lambda_plus;         // roots of l^2 + alpha l - i M alpha
    cplx lambda_minus;
    double decay_rate = 0.0;  // a + alpha
    double dist_rate = 0.0;   // (a + alpha) / 2

    // c^2(s, alpha, M) = Gamma(2s+1) M^{4s-1} ((alpha^2 + M^2) / (2 alpha))^{1-2s}
    double growth_coeff(double s) const;
    // Eigenvector of the linearization for the eigenvalue alpha + a, scaled
    // so its beta component is 1: (1, (a-alpha)/(a+alpha), M(alpha-a)/a, (alpha-a)/2).
    Eigen::Vector4d stable_direction() const;
};

AsymptoticConstants asymptotic_constants(double alpha, double M);

HardyState w_to_hardy(const WState& w, std::size_t grid_size);
// b = u^(0), c = u^(1), p = u^(2)/u^(1). Fails with NotInW when
// max_k |u^(k+1) - p u^(k)| / |u^(1)| over k >= 1 exceeds tol.
WState hardy_to_w(const HardyState& u, double tol = 1e-8);

struct WDerivative {
    cplx db, dc, dp;
};

WDerivative w_rhs(const WState& w, double alpha);

struct ReducedDerivative {
    double dbeta = 0.0;
    double dgamma = 0.0;
    cplx dzeta;
};

struct DeltaDerivative {
    double dbeta = 0.0;
    double ddelta = 0.0;
    cplx dzeta;
};

ReducedDerivative reduced_rhs(const ReducedState& r, double alpha, double M);
DeltaDerivative delta_rhs(const DeltaState& d, double alpha, double M);

struct WRecord {
    double t = 0.0;
    WState w;
    double momentum = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
};

struct WTrajectory {
    double alpha = 0.0;
    std::vector<WRecord> records;
    bool near_boundary = false;  // |p| came within 1e-6 of 1
    double near_boundary_at = std::numeric_limits<double>::quiet_NaN();

    // t,re_b,im_b,re_c,im_c,re_p,im_p,beta,gamma,momentum
    void write_csv(std::ostream& os) const;
};

// Classical RK4 on w_rhs. The final time is always recorded.
WTrajectory integrate_w(const WState& w0, double alpha, double dt, double t_end, std::size_t record_stride = 1);

struct ReducedRecord {
    double t = 0.0;
    ReducedState r;
};

struct ReducedTrajectory {
    double alpha = 0.0;
    double M = 0.0;
    std::vector<ReducedRecord> records;
};

ReducedTrajectory integrate_reduced(const ReducedState& r0, double alpha, double M, double dt, double t_end,
                                    std::size_t record_stride = 1);

// Least-squares constant fit of gamma(t) t over [t_begin, t_end]. Throws
// FitError when the window holds fewer than 3 records or gamma is not
// decaying across it (bounded trajectories).
double gamma_tail_fit(const ReducedTrajectory& traj, double t_begin, double t_end);
// Window [t_final / 2, t_final].
double gamma_tail_fit(const ReducedTrajectory& traj);

// Closed-form solution of q'' + alpha q' - i alpha M q = 0.
cplx linearized_q0(double alpha, double M, cplx q0_0, cplx dq0_0, double t);

struct Linearization {
    Eigen::Matrix4d A;
    std::array<cplx, 4> eigenvalues;  // numerical, unordered
};

// Linear part of the delta-form system written as X' + A X = Q(X),
// X = (beta, delta, Re zeta, Im zeta).
Linearization linearization_matrix(double alpha, double M);
// alpha + a, alpha - a, alpha + i omega, alpha - i omega
std::array<cplx, 4> closed_form_eigenvalues(const AsymptoticConstants& k);
// Quadratic and cubic remainder Q(X).
Eigen::Vector4d delta_nonlinearity(const Eigen::Vector4d& x, double M);

// ||u||_{H^s}^2 over the geometric coefficients: closed form for s in {0, 1, 2},
// direct summation to roundoff otherwise.
double w_hs_norm_sq(const WState& w, double s);

struct SobolevFitReport {
    double s = 0.0;
    double window_begin = 0.0;
    double window_end = 0.0;
    double exponent = 0.0;         // q in C t^q + D, all three free
    double exponent_target = 0.0;  // 2s - 1
    double prefactor = 0.0;        // C with q pinned at 2s - 1
    double prefactor_target = 0.0; // c^2(s, alpha, M)
    double loglog_slope = 0.0;     // raw slope of log ||u||^2_{H^s} against log t
    double exponent_rel_dev = 0.0;
    double prefactor_rel_dev = 0.0;
};

// Fits ||u(t)||^2_{H^s} ~ C t^q + D over the last decade of recorded times.
// The prefactor is refitted with q fixed at its target.
// Throws FitError on trajectories that are not exploding.
SobolevFitReport wbis_endstate_check(const WTrajectory& traj, const AsymptoticConstants& k, double s);

enum class WRunClass { Bounded, Exploding, Undetermined };

// Bounded: |p| stays below 0.9 over the second half and |u0|^2 >= M.
// Exploding: 1 - |p|^2 is nonincreasing over the second half and drops by
// at least 10% across it. Anything else is Undetermined.
WRunClass classify_w_run(const WTrajectory& traj);

}  // namespace szego
