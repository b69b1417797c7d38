#include "lab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lab/rng.hpp"

namespace lab {

double l2_distance(const CellField& p, const CellField& q) {
  require_same_grid(p.grid, q.grid, "l2_distance");
  double sum = 0.0, c = 0.0;
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    const double d = p.values[i] - q.values[i];
    const double y = d * d - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return std::sqrt(sum * p.grid.cell_volume);
}

double l2_norm(const CellField& p) { return std::sqrt(cell_inner(p, p)); }

double weighted_l2_sq(const FaceField& F, const CellField& g) {
  require_same_grid(F.grid, g.grid, "weighted_l2_sq");
  const Grid& gr = F.grid;
  for (double v : g.values)
    if (v < 0.0) throw std::invalid_argument("weighted_l2_sq: negative weight");
  const int nx = gr.cells[0];
  double sum = 0.0;
  for (int axis = 0; axis < gr.dim; ++axis)
    for (int k = 0; k < gr.n_faces(axis); ++k) {
      int left, right;
      if (axis == 0) {
        const int nfx = nx - 1;
        const int fx = k % nfx;
        const int iy = k / nfx;
        left = gr.cell_index(fx, iy);
        right = left + 1;
      } else {
        const int ix = k % nx;
        const int fy = k / nx;
        left = gr.cell_index(ix, fy);
        right = left + nx;
      }
      const double w = 0.5 * (g.values[left] + g.values[right]);
      const double v = F.axis[axis][k];
      sum += v * v * w;
    }
  return sum * gr.cell_volume;
}

double h1_seminorm(const CellField& p) {
  FaceField g = gradient(p);
  return std::sqrt(face_inner(g, g));
}

double h1_norm(const CellField& p) {
  const double a = l2_norm(p);
  const double b = h1_seminorm(p);
  return std::sqrt(a * a + b * b);
}

namespace {

// exact integral of |linear segment| running from da to db over length h
double abs_linear_integral(double da, double db, double h) {
  if (da * db >= 0.0) return 0.5 * (std::fabs(da) + std::fabs(db)) * h;
  // one sign crossing inside the segment
  const double sa = std::fabs(da);
  const double sb = std::fabs(db);
  return 0.5 * h * (sa * sa + sb * sb) / (sa + sb);
}

double w1_1d(const DensityField& p, const DensityField& q) {
  const Grid& g = p.field.grid;
  const int n = g.cells[0];
  const double h = g.width[0];
  double w = 0.0;
  double cdf_gap = 0.0;  // F_p - F_q at the left edge of the current cell
  for (int i = 0; i < n; ++i) {
    const double next = cdf_gap + (p.field.values[i] - q.field.values[i]) * h;
    w += abs_linear_integral(cdf_gap, next, h);
    cdf_gap = next;
  }
  return w;
}

// point-mass W1 along a fixed direction: both measures live on the same
// projected cell centers
double w1_projected(const DensityField& p, const DensityField& q,
                    double cx, double cy) {
  const Grid& g = p.field.grid;
  const int n = g.n_cells();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> pos(n);
  for (int ic = 0; ic < n; ++ic) {
    const Vec2 c = g.cell_center(ic);
    pos[ic] = cx * c[0] + cy * c[1];
  }
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return pos[a] < pos[b]; });
  double w = 0.0, gap = 0.0;
  for (int k = 0; k + 1 < n; ++k) {
    const int ic = order[k];
    gap += (p.field.values[ic] - q.field.values[ic]) * g.cell_volume;
    w += std::fabs(gap) * (pos[order[k + 1]] - pos[order[k]]);
  }
  return w;
}

}  // namespace

double w1_distance(const DensityField& p, const DensityField& q) {
  require_same_grid(p.field.grid, q.field.grid, "w1_distance");
  if (std::fabs(p.mass - q.mass) > 1e-8)
    throw std::invalid_argument("w1_distance: mass mismatch exceeds 1e-8");
  if (p.field.grid.dim == 1) return w1_1d(p, q);
  // sliced: fixed seeded direction set, deterministic across runs
  rng::Stream s(0x51D0D112ull);
  double acc = 0.0;
  for (int j = 0; j < kSlicedW1Directions; ++j) {
    const double theta = s.unit() * 3.14159265358979323846;
    acc += w1_projected(p, q, std::cos(theta), std::sin(theta));
  }
  return acc / kSlicedW1Directions;
}

double kl_divergence(const DensityField& p, const DensityField& q) {
  require_same_grid(p.field.grid, q.field.grid, "kl_divergence");
  double sum = 0.0, c = 0.0;
  for (std::size_t i = 0; i < p.field.values.size(); ++i) {
    const double pi = p.field.values[i];
    if (pi == 0.0) continue;
    const double qi = q.field.values[i];
    if (!(qi > 0.0))
      throw std::invalid_argument(
          "kl_divergence: q vanishes on the support of p at cell " +
          std::to_string(i));
    const double y = pi * std::log(pi / qi) - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum * p.field.grid.cell_volume;
}

ChainReport inequality_chain_report(const DensityField& p,
                                    const DensityField& q) {
  if (!(p.floor > 0.0) || !(q.floor > 0.0))
    throw std::invalid_argument(
        "inequality_chain_report: needs common support (positive floors)");
  ChainReport r;
  r.w1 = w1_distance(p, q);
  r.kl = kl_divergence(p, q);
  const double d = l2_distance(p.field, q.field);
  r.l2_sq = d * d;
  r.ratio_w1_kl = r.kl > 0.0 ? r.w1 / r.kl : 0.0;
  r.ratio_kl_l2sq = r.l2_sq > 0.0 ? r.kl / r.l2_sq : 0.0;
  return r;
}

}  // namespace lab
