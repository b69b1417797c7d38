#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "lab/fpe_solver.hpp"
#include "lab/grid.hpp"

namespace lab {

struct Activation {
  enum class Kind { relu, logistic, tanh };
  Kind kind = Kind::logistic;
  double lipschitz = 0.25;

  static Activation make(Kind k);
  double operator()(double x) const;
};

// empirical |sigma(x)-sigma(y)|/|x-y| maximum over a deterministic sample
double sampled_lipschitz(const Activation& a, int n_samples = 4096);

// one term A Sigma(W x + B); matrices row-major, dim <= 2
struct WideTerm {
  std::array<double, 4> A{0.0, 0.0, 0.0, 0.0};
  std::array<double, 4> W{0.0, 0.0, 0.0, 0.0};
  std::array<double, 2> B{0.0, 0.0};
};

// x -> sum_i A_i Sigma(W_i x + B_i), the width-d building block
struct WideNet {
  int dim = 1;
  Activation activation;
  std::vector<WideTerm> terms;

  Vec2 evaluate(const Vec2& x) const;
  // sum_i ||A_i||_2 K ||W_i||_2, an upper Lipschitz bound
  double lipschitz_bound() const;
};

// exact spectral norm of a 1x1 / 2x2 matrix
double operator_norm(const std::array<double, 4>& m, int dim);

struct FitResult {
  WideNet net;
  double uniform_residual = 0.0;
  double ridge_used = 0.0;
  bool ridge_fallback = false;
};

using VectorFieldFn = std::function<Vec2(const Vec2&)>;

// Random-feature ridge fit sampled at cell centers: W_i, B_i drawn from a
// seeded stream (sequentially, so larger m extends smaller m), A_i from
// ridge-regularized least squares. Ill-conditioned normal equations fall
// back to a larger ridge with a flag.
FitResult fit_wide(const Grid& grid, const VectorFieldFn& target, int m,
                   Activation act, std::uint64_t seed, double ridge = 1e-8);

// T/N-periodic single-term weight path: each period splits into m slots and
// slot i carries (m A_i, W_i, B_i); the time average over any period equals
// the wide net exactly.
struct WeightSchedule {
  int dim = 1;
  double horizon = 1.0;
  Activation activation;
  std::vector<double> breakpoints;   // m*N + 1 edges covering [0, T]
  std::vector<WideTerm> intervals;   // already scaled by m
  double uniform_lipschitz = 0.0;    // m * max_i ||A_i|| K ||W_i||, N-free

  Vec2 evaluate(double t, const Vec2& x) const;
};

WeightSchedule oscillation_schedule(const WideNet& net, int N, double T);

// face-sampled drift per interval; sup_norm and the uniform Lipschitz
// constant are cached for the solver
TimeField schedule_as_timefield(const WeightSchedule& s, const Grid& grid);
TimeField wide_net_drift(const WideNet& net, const Grid& grid);

// |int int (Q^N - wide) . phi dx dt| with the time integral split per
// schedule interval; the same panels integrate both sides, so the defect
// isolates the oscillation
double weak_pairing_defect(
    const WeightSchedule& s, const WideNet& net, const Grid& grid,
    const std::function<Vec2(double, const Vec2&)>& phi);

// columns t_start,t_end then the row-major A, W, B entries
void write_schedule_csv(const WeightSchedule& s,
                        const std::filesystem::path& path);

}  // namespace lab
