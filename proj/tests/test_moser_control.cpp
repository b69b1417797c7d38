#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "lab/density.hpp"
#include "lab/fpe_solver.hpp"
#include "lab/grid.hpp"
#include "lab/metrics.hpp"
#include "lab/moser_control.hpp"
#include "lab/rng.hpp"

using namespace lab;

namespace {
constexpr double kPi = 3.14159265358979323846;

DensityField bump_density(const Grid& g, double center, double width, double ff) {
  DensitySpec s;
  s.family = DensityFamily::bump_mixture;
  s.components = {{{center, 0.5}, width, 1.0}};
  s.floor_fraction = ff;
  return realize_density(s, g);
}
}  // namespace

TEST_SUITE("moser_control") {

TEST_CASE("poisson: zero rhs gives zero potential") {
  const Grid g = build_grid(1, {32});
  const CellField phi = solve_neumann_poisson(make_cell_field(g));
  for (double v : phi.values) CHECK(v == 0.0);
}

TEST_CASE("poisson: cosine mode inverts the eigenvalue") {
  const Grid g = build_grid(1, {128});
  const CellField rhs =
      sample_cells(g, [](const Vec2& x) { return std::cos(kPi * x[0]); });
  const CellField phi = solve_neumann_poisson(rhs);
  for (int i = 0; i < g.n_cells(); ++i) {
    const double expect = -rhs.values[i] / (kPi * kPi);
    CHECK(phi.values[i] == doctest::Approx(expect).epsilon(0.01));
  }
}

TEST_CASE("poisson 2D: separable mode") {
  const Grid g = build_grid(2, {24, 24});
  const CellField rhs = sample_cells(g, [](const Vec2& x) {
    return std::cos(kPi * x[0]) * std::cos(kPi * x[1]);
  });
  const CellField phi = solve_neumann_poisson(rhs);
  for (int i = 0; i < g.n_cells(); ++i) {
    const double expect = -rhs.values[i] / (2.0 * kPi * kPi);
    CHECK(phi.values[i] == doctest::Approx(expect).epsilon(0.015));
  }
}

TEST_CASE("poisson residual below 10x tolerance for random zero-mean rhs") {
  const Grid g = build_grid(1, {64});
  rng::Stream s(19);
  CellField rhs = make_cell_field(g);
  for (double& v : rhs.values) v = s.unit() - 0.5;
  const double mean = cell_mass(rhs);
  for (double& v : rhs.values) v -= mean;

  const double tol = 1e-12;
  const CellField phi = solve_neumann_poisson(rhs, tol);
  CHECK(std::fabs(cell_mass(phi)) <= 1e-12);
  CellField defect = laplacian(phi);
  for (int i = 0; i < g.n_cells(); ++i) defect.values[i] -= rhs.values[i];
  CHECK(l2_norm(defect) <= 10 * tol);
}

TEST_CASE("coincident endpoints: phi = 0 and rho0 is stationary") {
  const Grid g = build_grid(1, {64});
  const DensityField rho = bump_density(g, 0.45, 0.3, 0.25);
  const MoserField m = build_moser_field(rho, rho);
  CHECK(cell_sup(m.phi) <= 1e-11);
  CHECK(m.projected_mean == doctest::Approx(0.0).epsilon(1e-12));

  SolverConfig cfg;
  cfg.dt = 2e-3;
  const Trajectory t = solve(rho, m.as_time_field(), 1.0, cfg);
  double worst = 0.0;
  for (const auto& s : t.states)
    worst = std::max(worst, l2_distance(s.field, rho.field));
  CHECK(worst <= 100 * cfg.linear_solver_tol);
}

TEST_CASE("unit-time transfer: uniform to bump within scheme error") {
  const Grid g = build_grid(1, {128});
  const DensityField rho0 = uniform_density(g);
  const DensityField rho_d = bump_density(g, 0.6, 0.25, 0.2);
  const MoserField m = build_moser_field(rho0, rho_d);
  CHECK(std::fabs(m.projected_mean) <= 1e-12);
  CHECK(m.poisson_residual <= 1e-10);
  CHECK(m.sup_norm > 0.0);
  CHECK(m.empirical_two_c > 0.0);

  SolverConfig cfg;
  cfg.dt = 2e-4;
  const Trajectory t = solve(rho0, m.as_time_field(), 1.0, cfg);
  CHECK(l2_distance(t.terminal().field, rho_d.field) <= 0.01);

  // pathwise: the linear interpolation is the discrete solution up to
  // O(dx^2 + dt)
  double worst = 0.0;
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    const double tau = t.times[k];
    CellField interp = make_cell_field(g);
    for (int i = 0; i < g.n_cells(); ++i)
      interp.values[i] = (1.0 - tau) * rho0.field.values[i] +
                         tau * rho_d.field.values[i];
    worst = std::max(worst, l2_distance(t.states[k].field, interp));
  }
  CHECK(worst <= 0.01);
}

TEST_CASE("defect identity: div(grad rho_t - grad phi) = rhs up to the "
          "poisson residual") {
  const Grid g = build_grid(1, {96});
  const DensityField rho0 = bump_density(g, 0.3, 0.2, 0.3);
  const DensityField rho_d = bump_density(g, 0.7, 0.25, 0.3);
  const MoserField m = build_moser_field(rho0, rho_d);
  for (double tau : {0.0, 0.3, 0.8, 1.0}) {
    CellField interp = make_cell_field(g);
    for (int i = 0; i < g.n_cells(); ++i)
      interp.values[i] = (1.0 - tau) * rho0.field.values[i] +
                         tau * rho_d.field.values[i];
    FaceField advective = gradient(interp);
    const FaceField grad_phi = gradient(m.phi);
    for (int axis = 0; axis < g.dim; ++axis)
      for (std::size_t k = 0; k < advective.axis[axis].size(); ++k)
        advective.axis[axis][k] -= grad_phi.axis[axis][k];
    const CellField lhs_div = divergence(advective);
    const CellField lap = laplacian(interp);
    double worst = 0.0;
    for (int i = 0; i < g.n_cells(); ++i) {
      const double rhs_i = rho_d.field.values[i] - rho0.field.values[i];
      worst = std::max(worst,
                       std::fabs(lap.values[i] - lhs_div.values[i] - rhs_i));
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("time symmetry: the reversed field transfers back") {
  const Grid g = build_grid(1, {96});
  const DensityField a = bump_density(g, 0.35, 0.3, 0.25);
  const DensityField b = bump_density(g, 0.65, 0.2, 0.25);
  SolverConfig cfg;
  cfg.dt = 2e-4;

  const MoserField fwd = build_moser_field(a, b);
  const Trajectory t1 = solve(a, fwd.as_time_field(), 1.0, cfg);
  const double err_fwd = l2_distance(t1.terminal().field, b.field);

  const MoserField bwd = build_moser_field(b, a);
  const Trajectory t2 = solve(b, bwd.as_time_field(), 1.0, cfg);
  const double err_bwd = l2_distance(t2.terminal().field, a.field);

  CHECK(err_fwd <= 0.01);
  CHECK(err_bwd <= 0.01);
  CHECK(err_bwd <= 3.0 * err_fwd + 1e-3);
}

TEST_CASE("2D transfer stays within budget") {
  const Grid g = build_grid(2, {24, 24});
  DensitySpec s;
  s.family = DensityFamily::bump_mixture;
  s.components = {{{0.35, 0.6}, 0.25, 1.0}};
  s.floor_fraction = 0.3;
  const DensityField rho_d = realize_density(s, g);
  const MoserField m = build_moser_field(uniform_density(g), rho_d);
  SolverConfig cfg;
  cfg.dt = 5e-4;
  const Trajectory t = solve(uniform_density(g), m.as_time_field(), 1.0, cfg);
  CHECK(l2_distance(t.terminal().field, rho_d.field) <= 0.02);
}

TEST_CASE("zero floor endpoints are rejected") {
  const Grid g = build_grid(1, {64});
  const DensityField ok = bump_density(g, 0.5, 0.3, 0.2);
  const DensityField bad = bump_density(g, 0.5, 0.2, 0.0);
  CHECK_THROWS_AS(build_moser_field(ok, bad), std::invalid_argument);
  CHECK_THROWS_AS(build_moser_field(bad, ok), std::invalid_argument);
}

}  // TEST_SUITE
