#pragma once

#include "lab/density.hpp"
#include "lab/grid.hpp"

namespace lab {

double l2_distance(const CellField& p, const CellField& q);
double l2_norm(const CellField& p);

// sum over faces of |F|^2 * (face-interpolated g) * cell_volume; the
// quadrature of the g-weighted squared L2 norm of a vector field
double weighted_l2_sq(const FaceField& F, const CellField& g);

double h1_seminorm(const CellField& p);
double h1_norm(const CellField& p);

// 1D: exact integral of |CDF_p - CDF_q| for the piecewise-constant cell
// densities (piecewise-linear CDFs, sign crossings handled exactly).
// 2D: sliced approximation, 1D W1 averaged over a fixed seeded set of 16
// projection directions.
double w1_distance(const DensityField& p, const DensityField& q);
constexpr int kSlicedW1Directions = 16;

// sum p*log(p/q)*cell_volume with 0*log 0 = 0; support violations are hard
// errors naming the offending cell
double kl_divergence(const DensityField& p, const DensityField& q);

struct ChainReport {
  double w1 = 0.0;
  double kl = 0.0;
  double l2_sq = 0.0;
  double ratio_w1_kl = 0.0;
  double ratio_kl_l2sq = 0.0;
};

ChainReport inequality_chain_report(const DensityField& p,
                                    const DensityField& q);

}  // namespace lab
