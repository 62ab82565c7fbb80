#include "desslab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace desslab {

double spectral_radius(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double max_abs(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

Matrix pinv(const Matrix& m, double rel_tol) {
  Matrix out = Matrix::Zero(m.cols(), m.rows());
  if (m.size() == 0) return out;
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return out;
  const double cutoff = rel_tol * s(0);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) <= cutoff) break;
    out.noalias() += svd.matrixV().col(i) * (1.0 / s(i)) * svd.matrixU().col(i).transpose();
  }
  return out;
}

int numeric_rank(const Matrix& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0) return 0;
  return static_cast<int>((s.array() > rel_tol * s(0)).count());
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

bool is_symmetric(const Matrix& m, double tol) {
  return m.rows() == m.cols() && max_abs(m - m.transpose()) <= tol;
}

double min_eigenvalue(const Matrix& sym) {
  if (sym.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

std::optional<Matrix> solve_stein(const Matrix& a, const Matrix& q, int max_doublings) {
  if (spectral_radius(a) >= 1.0) return std::nullopt;
  Matrix x = q;
  Matrix power = a;
  for (int k = 0; k < max_doublings; ++k) {
    Matrix increment = power.transpose() * x * power;
    x += increment;
    const double scale = std::max(max_abs(x), 1e-300);
    if (!x.allFinite()) return std::nullopt;
    if (max_abs(increment) <= 1e-17 * scale) return symmetrized(x);
    power = power * power;
    if (max_abs(power) == 0.0) return symmetrized(x);
  }
  return std::nullopt;
}

Matrix vstack(const Matrix& top, const Matrix& bottom) {
  if (top.rows() == 0) return bottom;
  if (bottom.rows() == 0) return top;
  if (top.cols() != bottom.cols()) throw std::invalid_argument("vstack: column counts differ");
  Matrix out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

}  // namespace desslab
