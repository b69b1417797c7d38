#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "lab/csv.hpp"
#include "lab/grid.hpp"
#include "lab/linalg.hpp"
#include "lab/rng.hpp"
#include "oracle_helpers.hpp"

using namespace lab;

namespace {
constexpr double kPi = 3.14159265358979323846;

FaceField random_interior_faces(const Grid& g, std::uint64_t seed) {
  FaceField f = make_face_field(g);
  rng::Stream s(seed);
  for (int axis = 0; axis < g.dim; ++axis)
    for (double& v : f.axis[axis]) v = s.unit() - 0.5;
  return f;
}
}  // namespace

TEST_SUITE("grid") {

TEST_CASE("build_grid: 1D centers and volumes") {
  const Grid g = build_grid(1, {8});
  CHECK(g.n_cells() == 8);
  CHECK(g.cell_volume == doctest::Approx(0.125).epsilon(1e-15));
  for (int i = 0; i < 8; ++i)
    CHECK(g.cell_center(i)[0] == doctest::Approx(0.0625 + 0.125 * i).epsilon(1e-15));
  CHECK(std::fabs(g.n_cells() * g.cell_volume - 1.0) <= 2e-16);
}

TEST_CASE("build_grid: 2D cell count and volume") {
  const Grid g = build_grid(2, {4, 4});
  CHECK(g.n_cells() == 16);
  CHECK(g.cell_volume == doctest::Approx(1.0 / 16).epsilon(1e-15));
  CHECK(g.n_faces(0) == 12);
  CHECK(g.n_faces(1) == 12);
  CHECK(std::fabs(g.n_cells() * g.cell_volume - 1.0) <= 2e-16);
}

TEST_CASE("build_grid: rejects bad arguments") {
  CHECK_THROWS_AS(build_grid(1, {2}), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(3, {8, 8, 8}), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(0, {}), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(2, {8}), std::invalid_argument);
}

TEST_CASE("gradient: constant field is flat") {
  const Grid g = build_grid(1, {16});
  const FaceField grad = gradient(make_cell_field(g, 3.7));
  for (double v : grad.axis[0]) CHECK(v == 0.0);
}

TEST_CASE("gradient: linear field is exact") {
  const Grid g = build_grid(1, {8});
  const CellField f = sample_cells(g, [](const Vec2& x) { return x[0]; });
  const FaceField grad = gradient(f);
  for (double v : grad.axis[0]) CHECK(v == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("gradient: quadratic field gives 2*x_f at faces") {
  // centered difference of x^2 across a face at x_f is exactly 2*x_f
  const Grid g = build_grid(1, {16});
  const CellField f = sample_cells(g, [](const Vec2& x) { return x[0] * x[0]; });
  const FaceField grad = gradient(f);
  for (int k = 0; k < g.n_faces(0); ++k) {
    const double xf = g.face_center(0, k)[0];
    CHECK(grad.axis[0][k] == doctest::Approx(2.0 * xf).epsilon(1e-12));
  }
}

TEST_CASE("divergence: zero flux and conservation identity") {
  const Grid g1 = build_grid(1, {12});
  const CellField z = divergence(make_face_field(g1));
  for (double v : z.values) CHECK(v == 0.0);

  for (const Grid& g : {build_grid(1, {32}), build_grid(2, {8, 12})}) {
    const FaceField f = random_interior_faces(g, 42);
    const CellField div = divergence(f);
    CHECK(std::fabs(cell_mass(div)) <= 1e-14);
  }
}

TEST_CASE("divergence of gradient(x^2) is 2 away from the boundary") {
  const Grid g = build_grid(1, {16});
  const CellField f = sample_cells(g, [](const Vec2& x) { return x[0] * x[0]; });
  const CellField lap = divergence(gradient(f));
  for (int i = 1; i + 1 < 16; ++i)
    CHECK(lap.values[i] == doctest::Approx(2.0).epsilon(1e-11));
}

TEST_CASE("laplacian: constant, cosine mode, zero mass") {
  const Grid g = build_grid(1, {64});
  const CellField c = laplacian(make_cell_field(g, 1.0));
  for (double v : c.values) CHECK(std::fabs(v) <= 1e-12);

  const CellField f = sample_cells(g, [](const Vec2& x) { return std::cos(kPi * x[0]); });
  const CellField lap = laplacian(f);
  for (int i = 0; i < g.n_cells(); ++i) {
    const double expect = -kPi * kPi * f.values[i];
    CHECK(lap.values[i] == doctest::Approx(expect).epsilon(1.5e-3));
  }
  CHECK(std::fabs(cell_mass(lap)) <= 1e-12);
}

TEST_CASE("laplacian: 2D separable mode") {
  const Grid g = build_grid(2, {24, 24});
  const CellField f = sample_cells(g, [](const Vec2& x) {
    return std::cos(kPi * x[0]) * std::cos(kPi * x[1]);
  });
  const CellField lap = laplacian(f);
  for (int i = 0; i < g.n_cells(); ++i)
    CHECK(lap.values[i] == doctest::Approx(-2.0 * kPi * kPi * f.values[i]).epsilon(8e-3));
}

TEST_CASE("adjointness: <grad f, F>_face = -<f, div F>_cell") {
  for (const Grid& g : {build_grid(1, {32}), build_grid(2, {8, 16})}) {
    rng::Stream s(7);
    CellField f = make_cell_field(g);
    for (double& v : f.values) v = s.unit() - 0.5;
    const FaceField F = random_interior_faces(g, 8);
    const double lhs = face_inner(gradient(f), F);
    const double rhs = -cell_inner(f, divergence(F));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("second-order consistency of the laplacian") {
  // log-log slope of the max error over a 3-level refinement
  std::vector<double> log_h, log_err;
  for (int n : {32, 64, 128}) {
    const Grid g = build_grid(1, {n});
    const CellField f =
        sample_cells(g, [](const Vec2& x) { return std::cos(kPi * x[0]); });
    const CellField lap = laplacian(f);
    double err = 0.0;
    for (int i = 0; i < n; ++i)
      err = std::max(err, std::fabs(lap.values[i] + kPi * kPi * f.values[i]));
    log_h.push_back(std::log(g.width[0]));
    log_err.push_back(std::log(err));
  }
  const double slope = linear_fit_slope(log_h, log_err);
  CHECK(slope == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("neumann_spectral_gap: 1D/64 matches dense eigensolve and pi^2") {
  const Grid g = build_grid(1, {64});
  const double gap = neumann_spectral_gap(g);
  const auto dense = oracle::dense_operator(g, [](const CellField& f) {
    CellField out = laplacian(f);
    for (double& v : out.values) v = -v;
    return out;
  });
  const double gap_oracle = oracle::jacobi_smallest_nonzero(dense, g.n_cells());
  CHECK(gap == doctest::Approx(gap_oracle).epsilon(1e-8));
  CHECK(gap == doctest::Approx(kPi * kPi).epsilon(0.01));
}

TEST_CASE("neumann_spectral_gap: 2D 16x16 near pi^2") {
  const Grid g = build_grid(2, {16, 16});
  const double gap = neumann_spectral_gap(g);
  const auto dense = oracle::dense_operator(g, [](const CellField& f) {
    CellField out = laplacian(f);
    for (double& v : out.values) v = -v;
    return out;
  });
  const double gap_oracle = oracle::jacobi_smallest_nonzero(dense, g.n_cells());
  CHECK(gap == doctest::Approx(gap_oracle).epsilon(1e-7));
  CHECK(gap == doctest::Approx(kPi * kPi).epsilon(0.02));
}

TEST_CASE("neumann_spectral_gap: refinement approaches pi^2 monotonically") {
  double prev = 0.0;
  for (int n : {32, 64, 128}) {
    const double gap = neumann_spectral_gap(build_grid(1, {n}));
    CHECK(gap > prev);
    CHECK(gap < kPi * kPi);
    prev = gap;
  }
  CHECK(prev == doctest::Approx(kPi * kPi).epsilon(2e-4));
}

TEST_CASE("cell CSV round trip") {
  const Grid g = build_grid(2, {4, 5});
  rng::Stream s(3);
  CellField f = make_cell_field(g);
  for (double& v : f.values) v = s.unit();
  const auto path = std::filesystem::temp_directory_path() / "lab_cell_test.csv";
  write_cell_csv(f, path);
  const Table t = read_csv(path);
  REQUIRE(t.columns == std::vector<std::string>{"x", "y", "value"});
  REQUIRE(static_cast<int>(t.rows.size()) == g.n_cells());
  for (int ic = 0; ic < g.n_cells(); ++ic) {
    CHECK(t.rows[ic][0] == g.cell_center(ic)[0]);
    CHECK(t.rows[ic][1] == g.cell_center(ic)[1]);
    CHECK(t.rows[ic][2] == f.values[ic]);
  }
  std::filesystem::remove(path);
}

}  // TEST_SUITE
