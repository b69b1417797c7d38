#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <vector>

namespace lab {

using Vec2 = std::array<double, 2>;

// Cell-centered finite-volume grid on the unit box [0,1]^dim, dim in {1,2}.
// Scalars live at cell centers; flux components live at interior faces.
// Boundary faces are structurally absent, which is the discrete form of the
// no-flux condition n.(grad rho - V rho) = 0: whatever flux a face field
// represents, the boundary contribution is identically zero.
struct Grid {
  int dim = 1;
  std::array<int, 2> cells{1, 1};    // cells[1] == 1 when dim == 1
  std::array<double, 2> width{1.0, 1.0};
  double cell_volume = 1.0;

  int n_cells() const { return cells[0] * cells[1]; }
  // interior faces with normal along `axis`
  int n_faces(int axis) const {
    if (axis == 0) return (cells[0] - 1) * cells[1];
    return dim == 2 ? cells[0] * (cells[1] - 1) : 0;
  }
  int cell_index(int ix, int iy) const { return iy * cells[0] + ix; }
  Vec2 cell_center(int ic) const {
    const int ix = ic % cells[0];
    const int iy = ic / cells[0];
    return {(ix + 0.5) * width[0], dim == 2 ? (iy + 0.5) * width[1] : 0.5};
  }
  // face f sits between the cells it separates, at coordinate (f+1)*width
  // along its axis
  Vec2 face_center(int axis, int f) const {
    if (axis == 0) {
      const int nfx = cells[0] - 1;
      const int fx = f % nfx;
      const int iy = f / nfx;
      return {(fx + 1) * width[0], dim == 2 ? (iy + 0.5) * width[1] : 0.5};
    }
    const int ix = f % cells[0];
    const int fy = f / cells[0];
    return {(ix + 0.5) * width[0], (fy + 1) * width[1]};
  }
  double min_width() const { return dim == 2 ? std::min(width[0], width[1]) : width[0]; }

  bool operator==(const Grid&) const = default;
};

Grid build_grid(int dim, const std::vector<int>& cells_per_axis);

struct CellField {
  Grid grid;
  std::vector<double> values;
};

// One scalar per interior face per axis; axis[1] is empty in 1D.
struct FaceField {
  Grid grid;
  std::array<std::vector<double>, 2> axis;
};

CellField make_cell_field(const Grid& grid, double fill = 0.0);
FaceField make_face_field(const Grid& grid, double fill = 0.0);
CellField sample_cells(const Grid& grid,
                       const std::function<double(const Vec2&)>& f);
// samples the axis-th vector component at face centers
FaceField sample_faces(const Grid& grid,
                       const std::function<Vec2(const Vec2&)>& f);

FaceField gradient(const CellField& f);
CellField divergence(const FaceField& flux);
CellField laplacian(const CellField& f);

// cell_volume-weighted quadratures of the L2 inner products
double cell_inner(const CellField& a, const CellField& b);
double face_inner(const FaceField& a, const FaceField& b);
double cell_mass(const CellField& f);  // integral of f
double face_sup(const FaceField& f);
double cell_sup(const CellField& f);

// Smallest nonzero eigenvalue of the discrete Neumann -Laplacian, by inverse
// iteration with the constant mode deflated. Throws on non-convergence with
// the iteration count in the message.
double neumann_spectral_gap(const Grid& grid, int max_iters = 300,
                            double tol = 1e-11);

// header `x[,y],value`, one row per cell in cell-index order
void write_cell_csv(const CellField& f, const std::filesystem::path& path);

void require_same_grid(const Grid& a, const Grid& b, const char* where);

}  // namespace lab
