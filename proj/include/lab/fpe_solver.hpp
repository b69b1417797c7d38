#pragma once

#include <filesystem>
#include <functional>
#include <limits>
#include <vector>

#include "lab/density.hpp"
#include "lab/grid.hpp"

namespace lab {

enum class FluxScheme { chang_cooper, upwind };

struct SolverConfig {
  double dt = 1e-3;
  FluxScheme scheme = FluxScheme::chang_cooper;
  bool diffusion = true;
  double linear_solver_tol = 1e-10;
  int max_linear_iters = 5000;
};

// Drift V_t(x) on grid faces: either piecewise constant in time over
// `breakpoints` (fields[k] active on [breakpoints[k], breakpoints[k+1])) or a
// closure sampled at every step start. The solver aligns its steps to the
// breakpoints and freezes the drift per step at the left endpoint.
struct TimeField {
  std::vector<double> breakpoints;
  std::vector<FaceField> fields;
  std::function<FaceField(double)> sampler;
  double sup_norm = 0.0;
  double lipschitz = std::numeric_limits<double>::quiet_NaN();

  FaceField at(double t) const;
  double start() const { return breakpoints.front(); }
  double end() const { return breakpoints.back(); }
};

TimeField zero_drift(const Grid& grid);
TimeField constant_drift(FaceField field);
TimeField piecewise_drift(std::vector<double> breakpoints,
                          std::vector<FaceField> fields);
TimeField sampled_drift(std::function<FaceField(double)> sampler,
                        std::vector<double> breakpoints, double sup_norm);
// same drift scaled by a constant factor
TimeField scaled_drift(const TimeField& base, double factor);

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityField> states;
  SolverConfig config;

  const DensityField& nearest(double t) const;
  const DensityField& terminal() const { return states.back(); }
  double horizon() const { return times.back(); }
};

// One implicit-Euler step of d rho/dt = div(grad rho) - div(V rho) with
// Chang-Cooper (or upwind) face fluxes; no-flux boundaries by construction.
// With cfg.diffusion == false: one explicit conservative upwind step.
DensityField step(const DensityField& rho, const FaceField& drift,
                  const SolverConfig& cfg);

// d rho/dt = Lap rho - div(V_t rho) on [0,T]; trajectory stored every step
Trajectory solve(const DensityField& rho0, const TimeField& drift, double T,
                 const SolverConfig& cfg);

// heat equation: solve with V == 0
Trajectory solve_heat(const DensityField& rho0, double T,
                      const SolverConfig& cfg);

// diffusion-free continuity equation d rho/dt = -div(V_t rho); explicit
// conservative upwind under the CFL condition dt <= min cell width / ||V||,
// rejected before stepping when violated
Trajectory solve_continuity(const DensityField& rho0, const TimeField& drift,
                            double T, const SolverConfig& cfg);

// meta.csv (time, mass, floor, l2_norm per instant) + strided snapshot CSVs
void write_trajectory(const Trajectory& traj, const std::filesystem::path& dir,
                      int snapshot_stride = 0);

// exponential-fitting weight B(x) = x/(e^x - 1) used by the Chang-Cooper flux
double bernoulli_weight(double x);

// Discrete grad(log f) on faces: w_f = log(f_R/f_L)/h. Under this drift the
// state rho ~ f is the exact zero-flux equilibrium of the Chang-Cooper
// scheme, since the flux vanishes iff rho_R/rho_L = e^{w_f h}.
FaceField log_ratio_drift(const CellField& positive_field);

}  // namespace lab
