#pragma once

#include <functional>
#include <string>
#include <vector>

namespace lab {

// y = A(x); operators are matrix-free stencil applications.
using LinearOp =
    std::function<void(const std::vector<double>&, std::vector<double>&)>;

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // final ||r||_2 / ||b||_2
};

// Preconditioned BiCGStab with a diagonal preconditioner (pass empty vector
// for identity). Stops at ||r||_2 <= tol * ||b||_2.
SolveReport bicgstab(const LinearOp& op, const std::vector<double>& b,
                     std::vector<double>& x, const std::vector<double>& diag,
                     double tol, int max_iters);

// Conjugate gradient for SPD operators. `project`, when set, is applied to b
// and to every iterate; used to pin down the constant nullspace of the pure
// Neumann Laplacian.
SolveReport conjugate_gradient(const LinearOp& op, const std::vector<double>& b,
                               std::vector<double>& x, double tol,
                               int max_iters,
                               const std::function<void(std::vector<double>&)>&
                                   project = nullptr);

// Dense SPD solve via Cholesky; a is n*n row-major and is overwritten.
// Returns false if a pivot is not positive.
bool cholesky_solve_in_place(std::vector<double>& a, std::vector<double>& b,
                             int n);

// Least-squares slope of y against x.
double linear_fit_slope(const std::vector<double>& x,
                        const std::vector<double>& y);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& a);

}  // namespace lab
