#pragma once

#include <vector>

#include "lab/grid.hpp"

namespace lab {

// Nonnegative unit-mass grid function; mass and floor are cached at
// construction and after every solver step.
struct DensityField {
  CellField field;
  double mass = 0.0;
  double floor = 0.0;
};

enum class DensityFamily { uniform, bump_mixture, tilted };

struct BumpComponent {
  Vec2 center{0.5, 0.5};
  double width = 0.25;   // support half-width of the raised cosine
  double weight = 1.0;
};

// Constructive density family: raised-cosine bumps (C^1, compact support)
// or per-axis linear tilts, mixed with a uniform background that guarantees
// the positive lower bound l = floor_fraction the theorems assume.
// floor_fraction = 0 produces a density with vanishing floor; downstream
// operations that need a positive floor reject it.
struct DensitySpec {
  DensityFamily family = DensityFamily::uniform;
  std::vector<BumpComponent> components;
  double floor_fraction = 0.1;
};

DensityField uniform_density(const Grid& grid);
DensityField realize_density(const DensitySpec& spec, const Grid& grid);

// wraps an existing field, recomputing the caches; rejects negative values
DensityField density_from_cells(CellField field);
// caches only, no validation; used on solver output which may carry
// -1e-13-level iteration noise
DensityField density_stats(CellField field);

// idempotent: a second application returns its argument bitwise
DensityField normalize(const DensityField& rho);

// max over interior faces and axes of |gradient(rho)|
double grad_sup_norm(const DensityField& rho);

}  // namespace lab
