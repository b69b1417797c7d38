#include "lab/fpe_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lab/csv.hpp"
#include "lab/linalg.hpp"
#include "lab/metrics.hpp"

namespace lab {

double bernoulli_weight(double x) {
  if (std::fabs(x) < 1e-8) return 1.0 - 0.5 * x + x * x / 12.0;
  if (x > 700.0) return 0.0;
  if (x < -700.0) return -x;
  return x / std::expm1(x);
}

FaceField log_ratio_drift(const CellField& f) {
  const Grid& g = f.grid;
  FaceField out = make_face_field(g);
  const int nx = g.cells[0];
  const int ny = g.cells[1];
  auto ratio = [&](int left, int right, double h) {
    const double a = f.values[left];
    const double b = f.values[right];
    if (!(a > 0.0) || !(b > 0.0))
      throw std::invalid_argument("log_ratio_drift: field must be positive");
    return std::log(b / a) / h;
  };
  for (int iy = 0; iy < ny; ++iy)
    for (int fx = 0; fx + 1 < nx; ++fx)
      out.axis[0][iy * (nx - 1) + fx] =
          ratio(iy * nx + fx, iy * nx + fx + 1, g.width[0]);
  if (g.dim == 2)
    for (int fy = 0; fy + 1 < ny; ++fy)
      for (int ix = 0; ix < nx; ++ix)
        out.axis[1][fy * nx + ix] =
            ratio(fy * nx + ix, (fy + 1) * nx + ix, g.width[1]);
  return out;
}

FaceField TimeField::at(double t) const {
  if (sampler) return sampler(t);
  if (fields.empty()) throw std::logic_error("TimeField: empty");
  const auto it =
      std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
  int k = static_cast<int>(it - breakpoints.begin()) - 1;
  k = std::clamp(k, 0, static_cast<int>(fields.size()) - 1);
  return fields[k];
}

TimeField zero_drift(const Grid& grid) {
  TimeField v;
  v.breakpoints = {0.0, std::numeric_limits<double>::infinity()};
  v.fields = {make_face_field(grid)};
  v.sup_norm = 0.0;
  v.lipschitz = 0.0;
  return v;
}

TimeField constant_drift(FaceField field) {
  TimeField v;
  v.sup_norm = face_sup(field);
  v.breakpoints = {0.0, std::numeric_limits<double>::infinity()};
  v.fields.push_back(std::move(field));
  return v;
}

TimeField piecewise_drift(std::vector<double> breakpoints,
                          std::vector<FaceField> fields) {
  if (breakpoints.size() != fields.size() + 1)
    throw std::invalid_argument("piecewise_drift: need one breakpoint more than fields");
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
    if (!(breakpoints[i] < breakpoints[i + 1]))
      throw std::invalid_argument("piecewise_drift: breakpoints must increase");
  TimeField v;
  v.sup_norm = 0.0;
  for (const auto& f : fields) v.sup_norm = std::max(v.sup_norm, face_sup(f));
  if (!std::isfinite(v.sup_norm))
    throw std::invalid_argument("piecewise_drift: field is not bounded");
  v.breakpoints = std::move(breakpoints);
  v.fields = std::move(fields);
  return v;
}

TimeField sampled_drift(std::function<FaceField(double)> sampler,
                        std::vector<double> breakpoints, double sup_norm) {
  if (breakpoints.size() < 2)
    throw std::invalid_argument("sampled_drift: need at least [t0, t1]");
  if (!std::isfinite(sup_norm))
    throw std::invalid_argument("sampled_drift: sup_norm must be finite");
  TimeField v;
  v.sampler = std::move(sampler);
  v.breakpoints = std::move(breakpoints);
  v.sup_norm = sup_norm;
  return v;
}

TimeField scaled_drift(const TimeField& base, double factor) {
  TimeField v;
  v.breakpoints = base.breakpoints;
  v.sup_norm = std::fabs(factor) * base.sup_norm;
  v.lipschitz = std::fabs(factor) * base.lipschitz;
  if (base.sampler) {
    auto inner = base.sampler;
    v.sampler = [inner, factor](double t) {
      FaceField f = inner(t);
      for (int axis = 0; axis < f.grid.dim; ++axis)
        for (double& x : f.axis[axis]) x *= factor;
      return f;
    };
  } else {
    v.fields = base.fields;
    for (auto& f : v.fields)
      for (int axis = 0; axis < f.grid.dim; ++axis)
        for (double& x : f.axis[axis]) x *= factor;
  }
  return v;
}

const DensityField& Trajectory::nearest(double t) const {
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return states.front();
  if (it == times.end()) return states.back();
  const std::size_t hi = it - times.begin();
  return (t - times[hi - 1] <= times[hi] - t) ? states[hi - 1] : states[hi];
}

namespace {

// Per-face coefficients of the one-sided flux J_f = (bm*rho_L - bp*rho_R)/h.
// Chang-Cooper: bp = B(w), bm = B(-w) = B(w) + w with w = V_f * h, which makes
// rho_R/rho_L = e^w the exact zero-flux state. Upwind + diffusion:
// bm = 1 + h*max(V,0), bp = 1 - h*min(V,0).
struct FluxCoeffs {
  std::array<std::vector<double>, 2> bm, bp;
};

FluxCoeffs flux_coeffs(const FaceField& drift, const Grid& g, FluxScheme scheme) {
  FluxCoeffs c;
  for (int axis = 0; axis < g.dim; ++axis) {
    const double h = g.width[axis];
    const int nf = g.n_faces(axis);
    c.bm[axis].resize(nf);
    c.bp[axis].resize(nf);
    for (int k = 0; k < nf; ++k) {
      const double w = drift.axis[axis][k] * h;
      if (scheme == FluxScheme::chang_cooper) {
        const double b = bernoulli_weight(w);
        c.bp[axis][k] = b;
        c.bm[axis][k] = b + w;
      } else {
        c.bm[axis][k] = 1.0 + std::max(w, 0.0);
        c.bp[axis][k] = 1.0 - std::min(w, 0.0);
      }
    }
  }
  return c;
}

// out = x + dt * div J(x), the implicit-Euler system matrix
void apply_system(const Grid& g, const FluxCoeffs& c, double dt,
                  const std::vector<double>& x, std::vector<double>& out) {
  const int nx = g.cells[0];
  const int ny = g.cells[1];
  out.assign(x.size(), 0.0);
  const double cx = dt / (g.width[0] * g.width[0]);
  for (int iy = 0; iy < ny; ++iy)
    for (int fx = 0; fx + 1 < nx; ++fx) {
      const int f = iy * (nx - 1) + fx;
      const int left = iy * nx + fx;
      const double j = c.bm[0][f] * x[left] - c.bp[0][f] * x[left + 1];
      out[left] += cx * j;
      out[left + 1] -= cx * j;
    }
  if (g.dim == 2) {
    const double cy = dt / (g.width[1] * g.width[1]);
    for (int fy = 0; fy + 1 < ny; ++fy)
      for (int ix = 0; ix < nx; ++ix) {
        const int f = fy * nx + ix;
        const int below = fy * nx + ix;
        const double j = c.bm[1][f] * x[below] - c.bp[1][f] * x[below + nx];
        out[below] += cy * j;
        out[below + nx] -= cy * j;
      }
  }
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += x[i];
}

std::vector<double> system_diagonal(const Grid& g, const FluxCoeffs& c,
                                    double dt) {
  const int nx = g.cells[0];
  const int ny = g.cells[1];
  std::vector<double> diag(g.n_cells(), 1.0);
  const double cx = dt / (g.width[0] * g.width[0]);
  for (int iy = 0; iy < ny; ++iy)
    for (int fx = 0; fx + 1 < nx; ++fx) {
      const int f = iy * (nx - 1) + fx;
      const int left = iy * nx + fx;
      diag[left] += cx * c.bm[0][f];
      diag[left + 1] += cx * c.bp[0][f];
    }
  if (g.dim == 2) {
    const double cy = dt / (g.width[1] * g.width[1]);
    for (int fy = 0; fy + 1 < ny; ++fy)
      for (int ix = 0; ix < nx; ++ix) {
        const int f = fy * nx + ix;
        const int below = fy * nx + ix;
        diag[below] += cy * c.bm[1][f];
        diag[below + nx] += cy * c.bp[1][f];
      }
  }
  return diag;
}

double kahan_sum(const std::vector<double>& v) {
  double sum = 0.0, c = 0.0;
  for (double x : v) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum;
}

void check_finite(const std::vector<double>& v, double t) {
  for (double x : v)
    if (!std::isfinite(x)) {
      std::ostringstream msg;
      msg << "solver: non-finite state at t=" << t;
      throw std::runtime_error(msg.str());
    }
}

// one implicit step; rho is updated in place
void implicit_step(const Grid& g, std::vector<double>& rho,
                   const FluxCoeffs& coeffs, double dt,
                   const SolverConfig& cfg, double t_after) {
  auto op = [&](const std::vector<double>& x, std::vector<double>& out) {
    apply_system(g, coeffs, dt, x, out);
  };
  const std::vector<double> diag = system_diagonal(g, coeffs, dt);
  std::vector<double> x = rho;  // warm start
  SolveReport rep = bicgstab(op, rho, x, diag, cfg.linear_solver_tol,
                             cfg.max_linear_iters);
  if (!rep.converged) {
    std::ostringstream msg;
    msg << "solver: linear solve did not converge (relative residual "
        << rep.residual << " after " << rep.iterations << " iterations)";
    throw std::runtime_error(msg.str());
  }
  check_finite(x, t_after);
  // The scheme conserves mass identically; the residual component along the
  // constant is pure solver noise, projected out so long runs do not drift.
  const double m_in = kahan_sum(rho);
  const double m_out = kahan_sum(x);
  if (m_out != 0.0 && m_in != 0.0) {
    const double scale = m_in / m_out;
    for (double& v : x) v *= scale;
  }
  rho.swap(x);
}

// one explicit conservative upwind step of the continuity equation
void upwind_explicit_step(const Grid& g, std::vector<double>& rho,
                          const FaceField& drift, double dt, double t_after) {
  const int nx = g.cells[0];
  const int ny = g.cells[1];
  std::vector<double> out = rho;
  const double rx = dt / g.width[0];
  for (int iy = 0; iy < ny; ++iy)
    for (int fx = 0; fx + 1 < nx; ++fx) {
      const int f = iy * (nx - 1) + fx;
      const int left = iy * nx + fx;
      const double v = drift.axis[0][f];
      const double j = std::max(v, 0.0) * rho[left] + std::min(v, 0.0) * rho[left + 1];
      out[left] -= rx * j;
      out[left + 1] += rx * j;
    }
  if (g.dim == 2) {
    const double ry = dt / g.width[1];
    for (int fy = 0; fy + 1 < ny; ++fy)
      for (int ix = 0; ix < nx; ++ix) {
        const int f = fy * nx + ix;
        const int below = fy * nx + ix;
        const double v = drift.axis[1][f];
        const double j = std::max(v, 0.0) * rho[below] + std::min(v, 0.0) * rho[below + nx];
        out[below] -= ry * j;
        out[below + nx] += ry * j;
      }
  }
  check_finite(out, t_after);
  rho.swap(out);
}

void validate_config(const SolverConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("solver: dt must be positive");
  if (!(cfg.linear_solver_tol > 0.0))
    throw std::invalid_argument("solver: linear_solver_tol must be positive");
  if (!cfg.diffusion && cfg.scheme == FluxScheme::chang_cooper)
    throw std::invalid_argument(
        "solver: diffusion-free runs need the upwind scheme (nothing "
        "stabilizes the exponential fitting)");
}

void check_cfl(const Grid& g, double dt, double sup_norm) {
  if (sup_norm <= 0.0) return;
  const double limit = g.min_width() / sup_norm;
  if (dt > limit) {
    std::ostringstream msg;
    msg << "solve_continuity: CFL violation, dt=" << dt << " exceeds "
        << limit << " = min cell width / ||V||_inf";
    throw std::invalid_argument(msg.str());
  }
}

Trajectory run(const DensityField& rho0, const TimeField& drift, double T,
               SolverConfig cfg, bool continuity) {
  validate_config(cfg);
  if (!(T > 0.0)) throw std::invalid_argument("solve: T must be positive");
  require_same_grid(rho0.field.grid, drift.at(drift.start()).grid, "solve");
  if (drift.start() > 1e-12 || drift.end() < T - 1e-12)
    throw std::invalid_argument("solve: drift breakpoints do not cover [0,T]");
  if (continuity) check_cfl(rho0.field.grid, cfg.dt, drift.sup_norm);

  const Grid& g = rho0.field.grid;
  Trajectory traj;
  traj.config = cfg;
  traj.times.push_back(0.0);
  traj.states.push_back(rho0);

  // interval edges: drift breakpoints inside (0,T), plus 0 and T
  std::vector<double> edges{0.0};
  for (double b : drift.breakpoints)
    if (b > 1e-12 && b < T - 1e-12) edges.push_back(b);
  edges.push_back(T);
  std::sort(edges.begin(), edges.end());

  std::vector<double> state = rho0.field.values;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double a = edges[e];
    const double b = edges[e + 1];
    const int n_steps = std::max(1, static_cast<int>(std::ceil((b - a) / cfg.dt - 1e-9)));
    const double dt_local = (b - a) / n_steps;
    FaceField field = drift.at(a);
    FluxCoeffs coeffs;
    if (!continuity) coeffs = flux_coeffs(field, g, cfg.scheme);
    for (int s = 0; s < n_steps; ++s) {
      const double t0 = a + s * dt_local;
      if (drift.sampler && s > 0) {
        field = drift.at(t0);
        if (!continuity) coeffs = flux_coeffs(field, g, cfg.scheme);
      }
      const double t1 = (s + 1 == n_steps) ? b : t0 + dt_local;
      if (continuity)
        upwind_explicit_step(g, state, field, dt_local, t1);
      else
        implicit_step(g, state, coeffs, dt_local, cfg, t1);
      traj.times.push_back(t1);
      traj.states.push_back(density_stats(CellField{g, state}));
    }
  }
  return traj;
}

}  // namespace

DensityField step(const DensityField& rho, const FaceField& drift,
                  const SolverConfig& cfg) {
  validate_config(cfg);
  require_same_grid(rho.field.grid, drift.grid, "step");
  std::vector<double> state = rho.field.values;
  const Grid& g = rho.field.grid;
  if (cfg.diffusion) {
    const FluxCoeffs coeffs = flux_coeffs(drift, g, cfg.scheme);
    implicit_step(g, state, coeffs, cfg.dt, cfg, cfg.dt);
  } else {
    check_cfl(g, cfg.dt, face_sup(drift));
    upwind_explicit_step(g, state, drift, cfg.dt, cfg.dt);
  }
  return density_stats(CellField{g, std::move(state)});
}

Trajectory solve(const DensityField& rho0, const TimeField& drift, double T,
                 const SolverConfig& cfg) {
  if (!cfg.diffusion)
    throw std::invalid_argument(
        "solve: cfg.diffusion is off; use solve_continuity");
  return run(rho0, drift, T, cfg, /*continuity=*/false);
}

Trajectory solve_heat(const DensityField& rho0, double T,
                      const SolverConfig& cfg) {
  return solve(rho0, zero_drift(rho0.field.grid), T, cfg);
}

Trajectory solve_continuity(const DensityField& rho0, const TimeField& drift,
                            double T, const SolverConfig& cfg) {
  SolverConfig c = cfg;
  c.scheme = FluxScheme::upwind;
  c.diffusion = false;
  return run(rho0, drift, T, c, /*continuity=*/true);
}

void write_trajectory(const Trajectory& traj, const std::filesystem::path& dir,
                      int snapshot_stride) {
  std::filesystem::create_directories(dir);
  Table meta;
  meta.columns = {"time", "mass", "floor", "l2_norm"};
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const DensityField& d = traj.states[k];
    meta.rows.push_back({traj.times[k], d.mass, d.floor, l2_norm(d.field)});
  }
  write_csv(meta, dir / "meta.csv");
  if (snapshot_stride > 0) {
    for (std::size_t k = 0; k < traj.times.size();
         k += static_cast<std::size_t>(snapshot_stride)) {
      char name[32];
      std::snprintf(name, sizeof(name), "snapshot_%06zu.csv", k);
      write_cell_csv(traj.states[k].field, dir / name);
    }
  }
}

}  // namespace lab
