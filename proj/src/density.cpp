#include "lab/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lab {

namespace {

double field_min(const CellField& f) {
  return *std::min_element(f.values.begin(), f.values.end());
}

constexpr double kPi = 3.14159265358979323846;

double raised_cosine(const Vec2& x, const BumpComponent& c, int dim) {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) {
    const double r = std::fabs(x[a] - c.center[a]) / c.width;
    if (r >= 1.0) return 0.0;
    v *= 0.5 * (1.0 + std::cos(kPi * r));
  }
  return v;
}

}  // namespace

DensityField density_stats(CellField field) {
  DensityField rho;
  rho.mass = cell_mass(field);
  rho.floor = field_min(field);
  rho.field = std::move(field);
  return rho;
}

DensityField density_from_cells(CellField field) {
  for (double v : field.values)
    if (!(v >= 0.0))
      throw std::invalid_argument("density_from_cells: negative cell value");
  return density_stats(std::move(field));
}

DensityField uniform_density(const Grid& grid) {
  return DensityField{make_cell_field(grid, 1.0), 1.0, 1.0};
}

DensityField realize_density(const DensitySpec& spec, const Grid& grid) {
  if (spec.floor_fraction < 0.0 || spec.floor_fraction >= 1.0)
    throw std::invalid_argument("realize_density: floor_fraction must be in [0,1)");
  for (const auto& c : spec.components) {
    if (c.weight <= 0.0)
      throw std::invalid_argument("realize_density: component weights must be positive");
    if (spec.family == DensityFamily::bump_mixture && c.width <= 0.0)
      throw std::invalid_argument("realize_density: bump widths must be positive");
  }

  if (spec.family == DensityFamily::uniform || spec.components.empty())
    return uniform_density(grid);

  CellField shape = make_cell_field(grid);
  if (spec.family == DensityFamily::bump_mixture) {
    for (int ic = 0; ic < grid.n_cells(); ++ic) {
      const Vec2 x = grid.cell_center(ic);
      double v = 0.0;
      for (const auto& c : spec.components)
        v += c.weight * raised_cosine(x, c, grid.dim);
      shape.values[ic] = v;
    }
  } else {  // tilted: components[j].weight is the signed slope along axis j
    for (int ic = 0; ic < grid.n_cells(); ++ic) {
      const Vec2 x = grid.cell_center(ic);
      double v = 1.0;
      for (std::size_t j = 0; j < spec.components.size() && j < 2; ++j)
        v += spec.components[j].weight * (x[j] - 0.5);
      if (v < 0.0)
        throw std::invalid_argument("realize_density: tilt slope makes density negative");
      shape.values[ic] = v;
    }
  }

  const double shape_mass = cell_mass(shape);
  if (!(shape_mass > 1e-300))
    throw std::invalid_argument(
        "realize_density: components carry no mass on this grid (bump narrower "
        "than a cell?)");
  for (double v : shape.values)
    if (!std::isfinite(v / shape_mass))
      throw std::invalid_argument("realize_density: component concentration out of range");

  const double ff = spec.floor_fraction;
  CellField out = make_cell_field(grid);
  for (int ic = 0; ic < grid.n_cells(); ++ic)
    out.values[ic] = ff + (1.0 - ff) * (shape.values[ic] / shape_mass);
  return density_stats(std::move(out));
}

DensityField normalize(const DensityField& rho) {
  const double m = cell_mass(rho.field);
  if (std::fabs(m - 1.0) <= 1e-13) {
    DensityField out = rho;
    out.mass = m;
    return out;
  }
  if (!(m > 0.0)) throw std::invalid_argument("normalize: nonpositive mass");
  CellField f = rho.field;
  for (double& v : f.values) v /= m;
  return density_stats(std::move(f));
}

double grad_sup_norm(const DensityField& rho) {
  return face_sup(gradient(rho.field));
}

}  // namespace lab
