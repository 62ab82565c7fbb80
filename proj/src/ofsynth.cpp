#include "desslab/ofsynth.hpp"

#include <stdexcept>

namespace desslab {

Matrix downshift(int blocks, int block_size) {
  if (blocks < 0 || block_size < 0) throw std::invalid_argument("downshift: negative size");
  const int dim = blocks * block_size;
  Matrix z = Matrix::Zero(dim, dim);
  for (int b = 1; b < blocks; ++b) z.block(b * block_size, (b - 1) * block_size, block_size, block_size).setIdentity();
  return z;
}

OFPlant build_of_plant(const RingSpec& spec, const Matrix& B_2r, const Matrix& C_r, int d_a, int d_s) {
  spec.validate();
  const int n = spec.n;
  if (B_2r.rows() != n || B_2r.cols() < 1) throw std::invalid_argument("B_2r must be n x m with m >= 1");
  if (C_r.cols() != n || C_r.rows() < 1) throw std::invalid_argument("C_r must be p x n with p >= 1");
  if (d_a < 0 || d_s < 0) throw std::invalid_argument("delays must be >= 0");

  OFPlant plant;
  OFDims& dims = plant.dims;
  dims = {n, static_cast<int>(B_2r.cols()), static_cast<int>(C_r.rows()), d_a, d_s};
  const int m = dims.m, p = dims.p_r;
  const int N = dims.state_dim();
  const int act = dims.actuation_offset(), sen = dims.sensing_offset();

  OFBlocks& b = plant.blocks;
  b.A_r = build_ring_matrix(spec);
  b.B_2r = B_2r;
  b.C_r = C_r;
  b.B_1r = Matrix::Identity(n, n);
  b.Z_act = downshift(d_a, m);
  b.Z_sen = downshift(d_s, p);
  b.B2r_hat = Matrix::Zero(n, m * d_a);
  if (d_a > 0) b.B2r_hat.rightCols(m) = B_2r;
  b.Cr_hat = Matrix::Zero(p * d_s, n);
  if (d_s > 0) b.Cr_hat.topRows(p) = C_r;
  b.I_B = Matrix::Zero(m * d_a, m);
  if (d_a > 0) b.I_B.topRows(m).setIdentity();
  b.I_C = Matrix::Zero(p, p * d_s);
  if (d_s > 0) b.I_C.rightCols(p).setIdentity();

  plant.A = Matrix::Zero(N, N);
  plant.A.topLeftCorner(n, n) = b.A_r;
  plant.A.block(0, act, n, m * d_a) = b.B2r_hat;
  plant.A.block(act, act, m * d_a, m * d_a) = b.Z_act;
  plant.A.block(sen, 0, p * d_s, n) = b.Cr_hat;
  plant.A.block(sen, sen, p * d_s, p * d_s) = b.Z_sen;

  plant.B2 = Matrix::Zero(N, dims.input_dim());
  if (d_a > 0) {
    plant.B2.block(act, 0, m * d_a, m) = b.I_B;
  } else {
    plant.B2.block(0, 0, n, m) = B_2r;
  }
  plant.B2.block(sen, m, p * d_s, p * d_s).setIdentity();

  plant.B1 = Matrix::Zero(N, n);
  plant.B1.topRows(n) = b.B_1r;

  plant.C = Matrix::Zero(p, N);
  if (d_s > 0) {
    plant.C.block(0, sen, p, p * d_s) = b.I_C;
  } else {
    plant.C.leftCols(n) = C_r;
  }
  return plant;
}

OFWeights OFWeights::defaults(const OFPlant& plant, double eps_u, double eps_v) {
  const int N = plant.dims.state_dim();
  OFWeights w;
  w.Q = Matrix::Zero(N, N);
  w.Q.topLeftCorner(plant.dims.n, plant.dims.n).setIdentity();
  w.R_u = eps_u * Matrix::Identity(plant.dims.input_dim(), plant.dims.input_dim());
  w.W = plant.B1 * plant.B1.transpose();
  w.V = eps_v * Matrix::Identity(plant.dims.p_r, plant.dims.p_r);
  return w;
}

double OFGains::relative_L2() const {
  const double total = L.norm();
  return total > 0.0 ? residual_L2 / total : 0.0;
}

double OFGains::relative_K3() const {
  const double total = std::sqrt(K1.squaredNorm() + K2.squaredNorm() + K3.squaredNorm());
  return total > 0.0 ? residual_K3 / total : 0.0;
}

OFGains of_synthesis(const OFPlant& plant, const OFWeights& weights, const DareOptions& opts) {
  const OFDims& dims = plant.dims;
  const int N = dims.state_dim();
  if (weights.Q.rows() != N || weights.W.rows() != N || weights.R_u.rows() != dims.input_dim() ||
      weights.V.rows() != dims.p_r) {
    throw std::invalid_argument("of_synthesis: weight dimensions do not match the plant");
  }

  OFGains g;
  const DareSolution control = solve_dare_sf(plant.A, plant.B2, weights.Q, weights.R_u, opts);
  const Matrix& Pc = control.status == DareStatus::Converged ? control.P : control.moderate_iterate;
  g.control_status = control.status;
  g.K = sf_gain(Pc, plant.A, plant.B2, weights.R_u, opts.pinv_rel_tol);

  const DareSolution filter = solve_dare_sf(plant.A.transpose(), plant.C.transpose(), weights.W, weights.V, opts);
  const Matrix& S = filter.status == DareStatus::Converged ? filter.P : filter.moderate_iterate;
  g.filter_status = filter.status;
  g.L = plant.A * S * plant.C.transpose() *
        pinv(symmetrized(plant.C * S * plant.C.transpose() + weights.V), opts.pinv_rel_tol);

  const int n = dims.n, act_len = dims.m * dims.d_a, sen_len = dims.p_r * dims.d_s;
  g.L1 = g.L.topRows(n);
  g.L2 = g.L.middleRows(dims.actuation_offset(), act_len);
  g.L3 = g.L.middleRows(dims.sensing_offset(), sen_len);
  const Matrix Kr = g.K.topRows(dims.m);
  g.K1 = Kr.leftCols(n);
  g.K2 = Kr.middleCols(dims.actuation_offset(), act_len);
  g.K3 = Kr.middleCols(dims.sensing_offset(), sen_len);
  g.residual_L2 = g.L2.norm();
  g.residual_K3 = g.K3.norm();
  return g;
}

OFTrajectory simulate_of(const OFPlant& plant, const OFGains& gains, int horizon, const Vector& w0) {
  const OFDims& dims = plant.dims;
  if (dims.d_a != 1 || dims.d_s != 1) throw std::invalid_argument("simulate_of: reduced recursion needs d_a = d_s = 1");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  const OFBlocks& b = plant.blocks;
  const int n = dims.n, m = dims.m, p = dims.p_r;

  OFTrajectory out;
  out.x_r.resize(horizon + 1, n);
  out.x_a.resize(horizon + 1, m);
  out.x_hat_r.resize(horizon + 1, n);
  out.delta.resize(horizon + 1, p);
  out.u_r.resize(horizon, m);

  Vector x_r = b.B_1r * w0;
  Vector x_a = Vector::Zero(m);
  Vector x_hat = Vector::Zero(n);
  Vector delta = Vector::Zero(p);
  for (int t = 0;; ++t) {
    out.x_r.row(t) = x_r.transpose();
    out.x_a.row(t) = x_a.transpose();
    out.x_hat_r.row(t) = x_hat.transpose();
    out.delta.row(t) = delta.transpose();
    if (t == horizon) break;

    const Vector u_r = -(gains.K1 * x_hat + gains.K2 * x_a);
    out.u_r.row(t) = u_r.transpose();
    Vector next_delta = b.C_r * x_r - b.C_r * x_hat - gains.L3 * delta;
    Vector next_hat = b.A_r * x_hat + b.B_2r * x_a + gains.L1 * delta;
    Vector next_x_r = b.A_r * x_r + b.B_2r * x_a;
    x_a = u_r;
    x_r = std::move(next_x_r);
    x_hat = std::move(next_hat);
    delta = std::move(next_delta);
  }
  return out;
}

OFTrajectory simulate_of(const OFPlant& plant, const OFGains& gains, int horizon, int impulse_node) {
  if (impulse_node < 0 || impulse_node >= plant.dims.n) throw std::invalid_argument("impulse node out of range");
  return simulate_of(plant, gains, horizon, Vector::Unit(plant.dims.n, impulse_node));
}

Matrix simulate_of_block(const OFPlant& plant, const OFGains& gains, int horizon, const Vector& w0) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  const int n = plant.dims.n;
  Matrix out(horizon + 1, n);
  Vector x = plant.B1 * w0;
  Vector x_hat = Vector::Zero(x.size());
  for (int t = 0;; ++t) {
    out.row(t) = x.head(n).transpose();
    if (t == horizon) break;
    const Vector u = -(gains.K * x_hat);
    const Vector innovation = plant.C * x - plant.C * x_hat;
    Vector next_hat = plant.A * x_hat + plant.B2 * u + gains.L * innovation;
    x = plant.A * x + plant.B2 * u;
    x_hat = std::move(next_hat);
  }
  return out;
}

Matrix of_closed_loop(const OFPlant& plant, const OFGains& gains) {
  const Eigen::Index N = plant.A.rows();
  Matrix big(2 * N, 2 * N);
  big << plant.A, -plant.B2 * gains.K, gains.L * plant.C, plant.A - plant.B2 * gains.K - gains.L * plant.C;
  return big;
}

SeparationRadii separation_radii(const OFPlant& plant, const OFGains& gains) {
  return {spectral_radius(of_closed_loop(plant, gains)), spectral_radius(plant.A - plant.B2 * gains.K),
          spectral_radius(plant.A - gains.L * plant.C)};
}

const IFPPathway& IFPReport::at(const std::string& name) const {
  for (const auto& p : pathways) {
    if (p.name == name) return p;
  }
  throw std::out_of_range("no IFP pathway named " + name);
}

IFPReport ifp_report(const OFGains& gains, const OFPlant& plant) {
  const OFDims& dims = plant.dims;
  const OFBlocks& b = plant.blocks;
  IFPReport report;
  report.pathways = {
      {"IFP-Sense-1", dims.p_r * dims.d_s, gains.L3.norm()},
      {"IFP-Act-1", dims.m * dims.d_a, gains.K2.norm()},
      {"IFP-State", dims.n, b.A_r.norm()},
      {"IFP-Act-2", dims.m, b.B_2r.norm()},
      {"IFP-Sense-2", dims.n, b.C_r.norm()},
  };
  return report;
}

}  // namespace desslab
