#include "lab/moser_control.hpp"

#include <cmath>
#include <stdexcept>

#include "lab/linalg.hpp"
#include "lab/metrics.hpp"
#include "lab/score_pipeline.hpp"

namespace lab {

CellField solve_neumann_poisson(const CellField& rhs, double tol,
                                int max_iters) {
  const Grid& g = rhs.grid;
  const int n = g.n_cells();
  auto project = [n](std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    for (double& x : v) x -= mean;
  };
  auto neg_lap = [&](const std::vector<double>& in, std::vector<double>& out) {
    CellField f{g, in};
    CellField l = laplacian(f);
    out.resize(in.size());
    for (int i = 0; i < n; ++i) out[i] = -l.values[i];
  };
  std::vector<double> b(rhs.values);
  for (double& v : b) v = -v;
  project(b);
  std::vector<double> x(n, 0.0);
  const SolveReport rep = conjugate_gradient(neg_lap, b, x, tol, max_iters, project);
  if (!rep.converged)
    throw std::runtime_error(
        "solve_neumann_poisson: CG stalled at relative residual " +
        std::to_string(rep.residual) + " after " +
        std::to_string(rep.iterations) + " iterations");
  CellField phi{g, std::move(x)};
  const double mean = cell_mass(phi) / (n * g.cell_volume);
  for (double& v : phi.values) v -= mean;
  return phi;
}

FaceField MoserField::drift_at(double t) const {
  const Grid& g = phi.grid;
  CellField interp = make_cell_field(g);
  for (int i = 0; i < g.n_cells(); ++i)
    interp.values[i] =
        (1.0 - t) * rho0.field.values[i] + t * rho_d.field.values[i];
  FaceField drift = log_ratio_drift(interp);
  const FaceField grad_phi = gradient(phi);
  const FaceField denom = harmonic_face_mean(interp);
  for (int axis = 0; axis < g.dim; ++axis)
    for (std::size_t k = 0; k < drift.axis[axis].size(); ++k)
      drift.axis[axis][k] -= grad_phi.axis[axis][k] / denom.axis[axis][k];
  return drift;
}

TimeField MoserField::as_time_field() const {
  const MoserField* self = this;
  return sampled_drift([self](double t) { return self->drift_at(t); },
                       {0.0, 1.0}, sup_norm);
}

MoserField build_moser_field(const DensityField& rho0,
                             const DensityField& rho_d, double poisson_tol) {
  require_same_grid(rho0.field.grid, rho_d.field.grid, "build_moser_field");
  if (!(rho0.floor > 0.0) || !(rho_d.floor > 0.0))
    throw std::invalid_argument(
        "build_moser_field: endpoint densities need positive floors");
  const Grid& g = rho0.field.grid;

  CellField rhs = make_cell_field(g);
  for (int i = 0; i < g.n_cells(); ++i)
    rhs.values[i] = rho_d.field.values[i] - rho0.field.values[i];
  const double mean = cell_mass(rhs);  // analytically zero, logged

  MoserField m;
  m.rho0 = rho0;
  m.rho_d = rho_d;
  m.projected_mean = mean;
  m.phi = solve_neumann_poisson(rhs, poisson_tol);
  {
    CellField defect = laplacian(m.phi);
    for (int i = 0; i < g.n_cells(); ++i)
      defect.values[i] -= rhs.values[i] - mean;
    m.poisson_residual = l2_norm(defect);
  }

  double sup = 0.0;
  constexpr int kTimeSamples = 41;
  for (int k = 0; k < kTimeSamples; ++k)
    sup = std::max(sup, face_sup(m.drift_at(k / double(kTimeSamples - 1))));
  m.sup_norm = sup;
  if (!std::isfinite(sup))
    throw std::runtime_error("build_moser_field: drift is not bounded");

  const double l = std::min(rho0.floor, rho_d.floor);
  const double grad_max = std::max(grad_sup_norm(rho0), grad_sup_norm(rho_d));
  m.empirical_two_c = grad_max > 0.0 ? sup * l / grad_max : 0.0;
  return m;
}

}  // namespace lab
