#pragma once

#include <optional>

#include <Eigen/Dense>

namespace desslab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Largest eigenvalue magnitude. Empty matrices have radius 0.
double spectral_radius(const Matrix& m);

// Entrywise max norm, the ||.||_inf used for every residual and threshold here.
double max_abs(const Matrix& m);

// Moore-Penrose inverse with singular values at or below rel_tol * sigma_max
// treated as zero. An all-zero matrix maps to the zero matrix.
Matrix pinv(const Matrix& m, double rel_tol);

int numeric_rank(const Matrix& m, double rel_tol);

Matrix symmetrized(const Matrix& m);

bool is_symmetric(const Matrix& m, double tol);

// Minimum eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& sym);

// Solves the Stein equation X = a^T X a + q by squaring (X <- X + a^T X a,
// a <- a^2). Returns nullopt when a is not a contraction (rho(a) >= 1) or the
// series fails to settle within max_doublings.
std::optional<Matrix> solve_stein(const Matrix& a, const Matrix& q, int max_doublings = 64);

// Vertical concatenation [top; bottom]; both must have the same column count.
Matrix vstack(const Matrix& top, const Matrix& bottom);

}  // namespace desslab
