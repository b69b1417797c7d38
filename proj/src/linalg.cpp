#include "lab/linalg.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace lab {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

SolveReport bicgstab(const LinearOp& op, const std::vector<double>& b,
                     std::vector<double>& x, const std::vector<double>& diag,
                     double tol, int max_iters) {
  const std::size_t n = b.size();
  SolveReport rep;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    x.assign(n, 0.0);
    rep.converged = true;
    return rep;
  }
  const bool use_diag = !diag.empty();
  auto precond = [&](const std::vector<double>& v, std::vector<double>& out) {
    out = v;
    if (use_diag)
      for (std::size_t i = 0; i < n; ++i) out[i] /= diag[i];
  };

  std::vector<double> r(n), r0(n), p(n, 0.0), v(n, 0.0), s(n), t(n), phat(n),
      shat(n), tmp(n);
  if (x.size() != n) x.assign(n, 0.0);
  op(x, tmp);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - tmp[i];
  r0 = r;

  double rho = 1.0, alpha = 1.0, omega = 1.0;
  double rnorm = norm2(r);
  for (int it = 0; it < max_iters; ++it) {
    rep.iterations = it;
    if (rnorm <= tol * bnorm) {
      rep.converged = true;
      rep.residual = rnorm / bnorm;
      return rep;
    }
    const double rho_new = dot(r0, r);
    if (std::fabs(rho_new) < 1e-300) {  // breakdown: restart from current r
      r0 = r;
      rho = 1.0;
      alpha = 1.0;
      omega = 1.0;
      p.assign(n, 0.0);
      v.assign(n, 0.0);
      continue;
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    precond(p, phat);
    op(phat, v);
    alpha = rho / dot(r0, v);
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (norm2(s) <= tol * bnorm) {
      for (std::size_t i = 0; i < n; ++i) x[i] += alpha * phat[i];
      op(x, tmp);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - tmp[i];
      rnorm = norm2(r);
      rep.converged = rnorm <= tol * bnorm;
      rep.residual = rnorm / bnorm;
      rep.iterations = it + 1;
      if (rep.converged) return rep;
      continue;
    }
    precond(s, shat);
    op(shat, t);
    const double tt = dot(t, t);
    omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * phat[i] + omega * shat[i];
      r[i] = s[i] - omega * t[i];
    }
    rnorm = norm2(r);
    if (omega == 0.0) {  // stagnation: restart
      r0 = r;
      rho = 1.0;
      alpha = 1.0;
      omega = 1.0;
      p.assign(n, 0.0);
      v.assign(n, 0.0);
    }
  }
  rep.converged = rnorm <= tol * bnorm;
  rep.residual = rnorm / bnorm;
  rep.iterations = max_iters;
  return rep;
}

SolveReport conjugate_gradient(
    const LinearOp& op, const std::vector<double>& b, std::vector<double>& x,
    double tol, int max_iters,
    const std::function<void(std::vector<double>&)>& project) {
  const std::size_t n = b.size();
  SolveReport rep;
  std::vector<double> bb = b;
  if (project) project(bb);
  const double bnorm = norm2(bb);
  if (bnorm == 0.0) {
    x.assign(n, 0.0);
    rep.converged = true;
    return rep;
  }
  if (x.size() != n) x.assign(n, 0.0);
  if (project) project(x);
  std::vector<double> r(n), p(n), ap(n);
  op(x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = bb[i] - ap[i];
  if (project) project(r);
  p = r;
  double rr = dot(r, r);
  for (int it = 0; it < max_iters; ++it) {
    rep.iterations = it;
    if (std::sqrt(rr) <= tol * bnorm) {
      rep.converged = true;
      rep.residual = std::sqrt(rr) / bnorm;
      return rep;
    }
    op(p, ap);
    const double pap = dot(p, ap);
    if (pap <= 0.0) break;
    const double alpha = rr / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    if (project && (it % 16 == 15)) {
      project(x);
      project(r);
    }
    const double rr_new = dot(r, r);
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + (rr_new / rr) * p[i];
    rr = rr_new;
  }
  rep.converged = std::sqrt(rr) <= tol * bnorm;
  rep.residual = std::sqrt(rr) / bnorm;
  rep.iterations = max_iters;
  return rep;
}

bool cholesky_solve_in_place(std::vector<double>& a, std::vector<double>& b,
                             int n) {
  // a = L L^T, lower triangle stored in place
  for (int j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (int k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (d <= 0.0) return false;
    const double ljj = std::sqrt(d);
    a[j * n + j] = ljj;
    for (int i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (int k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / ljj;
    }
  }
  // forward then backward substitution
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
    b[i] = s / a[i * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int k = i + 1; k < n; ++k) s -= a[k * n + i] * b[k];
    b[i] = s / a[i * n + i];
  }
  return true;
}

double linear_fit_slope(const std::vector<double>& x,
                        const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("linear_fit_slope: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("linear_fit_slope: degenerate x");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace lab
