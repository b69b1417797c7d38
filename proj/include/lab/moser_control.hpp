#pragma once

#include "lab/density.hpp"
#include "lab/fpe_solver.hpp"

namespace lab {

// The exact-transfer construction: along the linear interpolation
// rho_t = (1-t) rho_0 + t rho_d, the drift
//   V_t = grad(rho_t)/rho_t - grad(phi)/rho_t,   Lap phi = rho_d - rho_0,
// moves rho_0 to rho_d in unit time under the drift-diffusion equation.
// phi is a single time-independent Poisson solve with Neumann data.
struct MoserField {
  DensityField rho0;
  DensityField rho_d;
  CellField phi;            // zero mean
  double sup_norm = 0.0;
  double empirical_two_c = 0.0;   // sup_norm * l / max(grad sups)
  double projected_mean = 0.0;    // mean removed from rho_d - rho_0
  double poisson_residual = 0.0;  // L2 norm of Lap(phi) - projected rhs

  // grad(rho_t)/rho_t as the log-ratio face field (the Chang-Cooper
  // equilibrium form), grad(phi)/rho_t over the harmonic face mean
  FaceField drift_at(double t) const;
  // sampler on [0,1]; holds a pointer to this MoserField
  TimeField as_time_field() const;
};

// zero-mean phi with laplacian(phi) = rhs - mean(rhs); the compatibility
// projection is applied unconditionally (for exact data the mean is ~0)
CellField solve_neumann_poisson(const CellField& rhs, double tol = 1e-12,
                                int max_iters = 2000000);

MoserField build_moser_field(const DensityField& rho0,
                             const DensityField& rho_d,
                             double poisson_tol = 1e-12);

}  // namespace lab
