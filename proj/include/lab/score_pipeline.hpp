#pragma once

#include <vector>

#include "lab/density.hpp"
#include "lab/fpe_solver.hpp"

namespace lab {

// Forward heat run stored densely enough that score evaluation at arbitrary
// reverse time uses the nearest snapshot. Immutable once built; the drifts
// below hold a pointer to it, so it must outlive them.
struct ForwardRecord {
  Trajectory trajectory;
  double horizon = 0.0;
  double epsilon = 0.0;  // reverse integration halts at horizon - epsilon

  double usable_horizon() const { return horizon - epsilon; }
  const DensityField& nearest(double forward_time) const {
    return trajectory.nearest(forward_time);
  }
};

// heat trajectory from the data density; epsilon defaults to 2*cfg.dt
ForwardRecord run_forward(const DensityField& rho_d, double T,
                          const SolverConfig& cfg, double epsilon = -1.0);

// 2ab/(a+b) across each interior face
FaceField harmonic_face_mean(const CellField& f);

// score at reverse time t: gradient(rho^f_{T-t}) / harmonic face mean of
// rho^f_{T-t}; t beyond T - epsilon is rejected (blow-up guard)
FaceField exact_score(const ForwardRecord& record, double t_reverse);

// the exact score as a solver drift; breakpoints at the reverse images of the
// stored snapshot times, sup_norm scanned over the stored snapshots
TimeField score_drift(const ForwardRecord& record);

// time-trapezoid over the stored instants of the rho^f_{T-t}-weighted squared
// face norm of (candidate - exact score)
double score_matching_loss(const TimeField& candidate,
                           const ForwardRecord& record);

// rung n = exact score + amplitudes[n] * shape; amplitudes must be positive
// and strictly decreasing, shape bounded
std::vector<TimeField> perturbed_score_ladder(
    const ForwardRecord& record, const std::vector<double>& amplitudes,
    const FaceField& shape);

// Solves d rho/dt = Lap rho - div(factor * V_t rho) forward in the solver
// clock. factor = 2 is the density-level time reversal (with drift =
// exact score and start = rho^f_T the output tracks rho^f_{T-t}); factor = 1
// is the plain tracking equation the score-approximation ladder compares.
Trajectory reverse_solve(const TimeField& drift, const DensityField& start,
                         double T, const SolverConfig& cfg,
                         double reverse_drift_factor = 2.0);

}  // namespace lab
