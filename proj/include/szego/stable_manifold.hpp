#pragma once

// Trajectories on the stable manifold of the circle orbit, built in the
// delta form X = (beta, delta, Re zeta, Im zeta) from the prescribed decay
// X(t) ~ beta_inf e^{-(a+alpha) t} v with v the stable direction.

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "szego/wmanifold.hpp"

namespace szego {

struct StableManifoldOptions {
    // Default: beta_inf e^{-(a+alpha) T} = 1e-6 M.
    std::optional<double> t_start;
    double t_end_back = 0.0;
    double dt = 1e-3;
    double fp_tol = 1e-12;
    std::size_t max_iter = 200;
    // Length of the fixed-point grid past t_start, in units of 1/(a+alpha).
    double horizon_decays = 25.0;
};

struct StableRecord {
    double t = 0.0;
    DeltaState x;
};

struct StableManifoldTrajectory {
    double beta_inf = 0.0;
    double alpha = 0.0;
    double M = 0.0;
    double t_start = 0.0;
    std::size_t iterations = 0;
    DeltaState seed;  // fixed-point value at t_start
    std::vector<StableRecord> records;  // ascending t, from t_end_back to t_start

    // t,beta,delta,re_zeta,im_zeta
    void write_csv(std::ostream& os) const;
};

double default_t_start(double beta_inf, const AsymptoticConstants& k);

// Throws FixedPointDivergence when the scattering iteration does not
// contract, which happens when t_start is too small.
StableManifoldTrajectory stable_manifold_trajectory(double beta_inf, double alpha, double M,
                                                    const StableManifoldOptions& opt = {});

// RK4 on the delta form from x0 over [t0, t1] (t1 < t0 integrates backward).
DeltaState integrate_delta(const DeltaState& x0, double alpha, double M, double t0, double t1, double dt);

// |X_fwd(t_start) - seed| / |seed| after re-integrating forward from the
// backward endpoint.
double stable_manifold_roundtrip(const StableManifoldTrajectory& traj, double dt);

struct StableFitReport {
    double window_begin = 0.0;
    double window_end = 0.0;
    double decay_rate = 0.0;
    double decay_target = 0.0;
    double ratio = 0.0;  // delta / beta at t_start
    double ratio_target = 0.0;
};

// Slope of log beta over [t_start / 2, t_start].
StableFitReport stable_manifold_fit(const StableManifoldTrajectory& traj);

}  // namespace szego
