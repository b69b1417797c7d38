#include "lab/score_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lab/metrics.hpp"

namespace lab {

ForwardRecord run_forward(const DensityField& rho_d, double T,
                          const SolverConfig& cfg, double epsilon) {
  ForwardRecord rec;
  rec.trajectory = solve_heat(rho_d, T, cfg);
  rec.horizon = T;
  rec.epsilon = epsilon >= 0.0 ? epsilon : 2.0 * cfg.dt;
  if (rec.epsilon >= T)
    throw std::invalid_argument("run_forward: epsilon must be below the horizon");
  return rec;
}

FaceField harmonic_face_mean(const CellField& f) {
  const Grid& g = f.grid;
  FaceField out = make_face_field(g);
  const int nx = g.cells[0];
  const int ny = g.cells[1];
  auto harm = [&](int left, int right) {
    const double a = f.values[left];
    const double b = f.values[right];
    if (!(a > 0.0) || !(b > 0.0))
      throw std::invalid_argument("harmonic_face_mean: field must be positive");
    return 2.0 * a * b / (a + b);
  };
  for (int iy = 0; iy < ny; ++iy)
    for (int fx = 0; fx + 1 < nx; ++fx)
      out.axis[0][iy * (nx - 1) + fx] = harm(iy * nx + fx, iy * nx + fx + 1);
  if (g.dim == 2)
    for (int fy = 0; fy + 1 < ny; ++fy)
      for (int ix = 0; ix < nx; ++ix)
        out.axis[1][fy * nx + ix] = harm(fy * nx + ix, (fy + 1) * nx + ix);
  return out;
}

namespace {

FaceField score_of_snapshot(const DensityField& snap) {
  FaceField grad = gradient(snap.field);
  const FaceField denom = harmonic_face_mean(snap.field);
  for (int axis = 0; axis < grad.grid.dim; ++axis)
    for (std::size_t k = 0; k < grad.axis[axis].size(); ++k)
      grad.axis[axis][k] /= denom.axis[axis][k];
  return grad;
}

}  // namespace

FaceField exact_score(const ForwardRecord& record, double t_reverse) {
  if (t_reverse < -1e-12 || t_reverse > record.usable_horizon() + 1e-12)
    throw std::invalid_argument(
        "exact_score: reverse time outside [0, T - epsilon]");
  const double s = std::max(record.horizon - t_reverse, record.epsilon);
  return score_of_snapshot(record.nearest(s));
}

TimeField score_drift(const ForwardRecord& record) {
  const double usable = record.usable_horizon();
  std::vector<double> breakpoints;
  for (auto it = record.trajectory.times.rbegin();
       it != record.trajectory.times.rend(); ++it) {
    const double t_rev = record.horizon - *it;
    if (t_rev > usable + 1e-12) break;
    breakpoints.push_back(t_rev);
  }
  if (breakpoints.empty() || breakpoints.back() < usable - 1e-12)
    breakpoints.push_back(usable);

  double sup = 0.0;
  for (std::size_t k = 0; k < record.trajectory.times.size(); ++k) {
    if (record.trajectory.times[k] < record.epsilon - 1e-12) continue;
    sup = std::max(sup, face_sup(score_of_snapshot(record.trajectory.states[k])));
  }

  const ForwardRecord* rec = &record;
  auto sampler = [rec](double t) {
    return exact_score(*rec, std::clamp(t, 0.0, rec->usable_horizon()));
  };
  return sampled_drift(sampler, std::move(breakpoints), sup);
}

double score_matching_loss(const TimeField& candidate,
                           const ForwardRecord& record) {
  const double usable = record.usable_horizon();
  if (candidate.end() < usable - 1e-9)
    throw std::invalid_argument(
        "score_matching_loss: candidate horizon falls short of T - epsilon");
  // stored forward instants with s >= epsilon, visited in reverse-time order
  std::vector<double> ts;
  std::vector<double> integrand;
  for (auto it = record.trajectory.times.rbegin();
       it != record.trajectory.times.rend(); ++it) {
    const double s = *it;
    if (s < record.epsilon - 1e-12) continue;
    const double t_rev = record.horizon - s;
    if (t_rev > usable + 1e-12) continue;
    const DensityField& weight = record.nearest(s);
    FaceField diff = candidate.at(t_rev);
    const FaceField score = score_of_snapshot(weight);
    for (int axis = 0; axis < diff.grid.dim; ++axis)
      for (std::size_t k = 0; k < diff.axis[axis].size(); ++k)
        diff.axis[axis][k] -= score.axis[axis][k];
    ts.push_back(t_rev);
    integrand.push_back(weighted_l2_sq(diff, weight.field));
  }
  double loss = 0.0;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k)
    loss += 0.5 * (integrand[k] + integrand[k + 1]) * (ts[k + 1] - ts[k]);
  return loss;
}

std::vector<TimeField> perturbed_score_ladder(
    const ForwardRecord& record, const std::vector<double>& amplitudes,
    const FaceField& shape) {
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    if (!(amplitudes[i] > 0.0))
      throw std::invalid_argument("perturbed_score_ladder: amplitudes must be positive");
    if (i > 0 && !(amplitudes[i] < amplitudes[i - 1]))
      throw std::invalid_argument("perturbed_score_ladder: amplitudes must decrease");
  }
  for (int axis = 0; axis < shape.grid.dim; ++axis)
    for (double v : shape.axis[axis])
      if (!std::isfinite(v))
        throw std::invalid_argument("perturbed_score_ladder: shape is not bounded");
  const double shape_sup = face_sup(shape);

  const TimeField base = score_drift(record);
  std::vector<TimeField> ladder;
  ladder.reserve(amplitudes.size());
  for (double a : amplitudes) {
    auto base_sampler = base.sampler;
    FaceField bump = shape;
    auto sampler = [base_sampler, bump, a](double t) {
      FaceField f = base_sampler(t);
      for (int axis = 0; axis < f.grid.dim; ++axis)
        for (std::size_t k = 0; k < f.axis[axis].size(); ++k)
          f.axis[axis][k] += a * bump.axis[axis][k];
      return f;
    };
    ladder.push_back(sampled_drift(sampler, base.breakpoints,
                                   base.sup_norm + a * shape_sup));
  }
  return ladder;
}

Trajectory reverse_solve(const TimeField& drift, const DensityField& start,
                         double T, const SolverConfig& cfg,
                         double reverse_drift_factor) {
  if (reverse_drift_factor == 1.0) return solve(start, drift, T, cfg);
  return solve(start, scaled_drift(drift, reverse_drift_factor), T, cfg);
}

}  // namespace lab
