#include "lab/grid.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lab/csv.hpp"
#include "lab/linalg.hpp"
#include "lab/rng.hpp"

namespace lab {

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b))
    throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

Grid build_grid(int dim, const std::vector<int>& cells_per_axis) {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("build_grid: dim must be 1 or 2");
  if (static_cast<int>(cells_per_axis.size()) != dim)
    throw std::invalid_argument("build_grid: need one cell count per axis");
  for (int n : cells_per_axis)
    if (n < 4)
      throw std::invalid_argument("build_grid: cells_per_axis must be >= 4");
  Grid g;
  g.dim = dim;
  g.cells = {cells_per_axis[0], dim == 2 ? cells_per_axis[1] : 1};
  g.width = {1.0 / g.cells[0], dim == 2 ? 1.0 / g.cells[1] : 1.0};
  g.cell_volume = g.width[0] * g.width[1];
  return g;
}

CellField make_cell_field(const Grid& grid, double fill) {
  return CellField{grid, std::vector<double>(grid.n_cells(), fill)};
}

FaceField make_face_field(const Grid& grid, double fill) {
  FaceField f;
  f.grid = grid;
  for (int axis = 0; axis < grid.dim; ++axis)
    f.axis[axis].assign(grid.n_faces(axis), fill);
  return f;
}

CellField sample_cells(const Grid& grid,
                       const std::function<double(const Vec2&)>& f) {
  CellField out = make_cell_field(grid);
  for (int ic = 0; ic < grid.n_cells(); ++ic) out.values[ic] = f(grid.cell_center(ic));
  return out;
}

FaceField sample_faces(const Grid& grid,
                       const std::function<Vec2(const Vec2&)>& f) {
  FaceField out = make_face_field(grid);
  for (int axis = 0; axis < grid.dim; ++axis)
    for (int k = 0; k < grid.n_faces(axis); ++k)
      out.axis[axis][k] = f(grid.face_center(axis, k))[axis];
  return out;
}

FaceField gradient(const CellField& f) {
  const Grid& g = f.grid;
  FaceField out = make_face_field(g);
  const int nx = g.cells[0];
  const int ny = g.cells[1];
  for (int iy = 0; iy < ny; ++iy)
    for (int fx = 0; fx + 1 < nx; ++fx) {
      const int left = g.cell_index(fx, iy);
      out.axis[0][iy * (nx - 1) + fx] =
          (f.values[left + 1] - f.values[left]) / g.width[0];
    }
  if (g.dim == 2)
    for (int fy = 0; fy + 1 < ny; ++fy)
      for (int ix = 0; ix < nx; ++ix) {
        const int below = g.cell_index(ix, fy);
        out.axis[1][fy * nx + ix] =
            (f.values[below + nx] - f.values[below]) / g.width[1];
      }
  return out;
}

CellField divergence(const FaceField& flux) {
  const Grid& g = flux.grid;
  CellField out = make_cell_field(g);
  const int nx = g.cells[0];
  const int ny = g.cells[1];
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const int ic = g.cell_index(ix, iy);
      const double left = ix > 0 ? flux.axis[0][iy * (nx - 1) + ix - 1] : 0.0;
      const double right = ix + 1 < nx ? flux.axis[0][iy * (nx - 1) + ix] : 0.0;
      double d = (right - left) / g.width[0];
      if (g.dim == 2) {
        const double below = iy > 0 ? flux.axis[1][(iy - 1) * nx + ix] : 0.0;
        const double above = iy + 1 < ny ? flux.axis[1][iy * nx + ix] : 0.0;
        d += (above - below) / g.width[1];
      }
      out.values[ic] = d;
    }
  return out;
}

CellField laplacian(const CellField& f) { return divergence(gradient(f)); }

double cell_inner(const CellField& a, const CellField& b) {
  require_same_grid(a.grid, b.grid, "cell_inner");
  // Kahan; these sums feed tolerance checks at 1e-12
  double sum = 0.0, c = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double y = a.values[i] * b.values[i] - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum * a.grid.cell_volume;
}

double face_inner(const FaceField& a, const FaceField& b) {
  require_same_grid(a.grid, b.grid, "face_inner");
  double sum = 0.0, c = 0.0;
  for (int axis = 0; axis < a.grid.dim; ++axis)
    for (std::size_t i = 0; i < a.axis[axis].size(); ++i) {
      const double y = a.axis[axis][i] * b.axis[axis][i] - c;
      const double t = sum + y;
      c = (t - sum) - y;
      sum = t;
    }
  return sum * a.grid.cell_volume;
}

double cell_mass(const CellField& f) {
  double sum = 0.0, c = 0.0;
  for (double v : f.values) {
    const double y = v - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum * f.grid.cell_volume;
}

double face_sup(const FaceField& f) {
  double m = 0.0;
  for (int axis = 0; axis < f.grid.dim; ++axis)
    for (double v : f.axis[axis]) m = std::max(m, std::fabs(v));
  return m;
}

double cell_sup(const CellField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::fabs(v));
  return m;
}

double neumann_spectral_gap(const Grid& grid, int max_iters, double tol) {
  const int n = grid.n_cells();
  auto neg_lap = [&](const std::vector<double>& in, std::vector<double>& out) {
    CellField tmp{grid, in};
    CellField l = laplacian(tmp);
    out.resize(in.size());
    for (int i = 0; i < n; ++i) out[i] = -l.values[i];
  };
  auto project_mean = [n](std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    for (double& x : v) x -= mean;
  };

  // deterministic generic start vector
  std::vector<double> x(n);
  rng::Stream s(0x9aCD0FFEEull);
  for (int i = 0; i < n; ++i) x[i] = s.unit() - 0.5;
  project_mean(x);
  double xn = norm2(x);
  for (double& v : x) v /= xn;

  double lambda = 0.0;
  std::vector<double> y, ax;
  for (int it = 0; it < max_iters; ++it) {
    y = x;
    SolveReport rep =
        conjugate_gradient(neg_lap, x, y, 1e-13, 200 * n, project_mean);
    if (!rep.converged)
      throw std::runtime_error(
          "neumann_spectral_gap: inner CG did not converge, iterations=" +
          std::to_string(rep.iterations));
    project_mean(y);
    const double yn = norm2(y);
    for (double& v : y) v /= yn;
    neg_lap(y, ax);
    const double lambda_new = dot(y, ax);
    x = y;
    if (it > 0 && std::fabs(lambda_new - lambda) <=
                      tol * std::max(1.0, std::fabs(lambda_new))) {
      return lambda_new;
    }
    lambda = lambda_new;
  }
  throw std::runtime_error(
      "neumann_spectral_gap: inverse iteration did not converge after " +
      std::to_string(max_iters) + " iterations");
}

void write_cell_csv(const CellField& f, const std::filesystem::path& path) {
  std::ostringstream out;
  out << (f.grid.dim == 2 ? "x,y,value" : "x,value") << '\n';
  for (int ic = 0; ic < f.grid.n_cells(); ++ic) {
    const Vec2 c = f.grid.cell_center(ic);
    out << format_double(c[0]) << ',';
    if (f.grid.dim == 2) out << format_double(c[1]) << ',';
    out << format_double(f.values[ic]) << '\n';
  }
  write_text_atomic(out.str(), path);
}

}  // namespace lab
