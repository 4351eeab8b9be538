/* Copyright 2026 The PulsePINN Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "pulsepinn/losses.hpp"

#include <cmath>
#include <complex>

namespace pulsepinn::losses {

using cx::CMatrix;
using cx::CVector;
using pinn::PinnModel;
using tape::DiffGraph;
using tape::kNoNode;
using tape::NodeId;
using cd = std::complex<double>;

namespace {

// squarings for the recorded per-step exponentials; Taylor-12 keeps about
// 1e-10 accuracy up to ||A||_F/2^s ~ 1, far beyond sensible control norms
constexpr int kClosedSquarings = 2;
constexpr int kOpenSquarings = 3;

CMatrix minus_i_h_dt(const qsys::SystemSpec& sys, std::span<const double> u,
                     double dt) {
  return cx::scale(qsys::total_hamiltonian(sys, u), cd(0, -dt));
}

}  // namespace

PropagatorResult propagator_product(const qsys::SystemSpec& sys,
                                    const Controls& controls,
                                    const pinn::TimeGrid& grid,
                                    bool keep_steps) {
  if (static_cast<int>(controls.size()) != grid.n_steps)
    throw ShapeMismatch("propagator_product: controls do not match the grid");
  PropagatorResult res;
  res.final_u = CMatrix::identity(4);
  const double dt = grid.dt();
  for (int k = 0; k < grid.n_steps; ++k) {
    const CMatrix step = cx::matexp(minus_i_h_dt(sys, controls[k], dt));
    if (keep_steps) res.steps.push_back(step);
    res.final_u = cx::matmul(step, res.final_u);
  }
  return res;
}

cx::CMatrix channel_trotter(const qsys::SystemSpec& sys,
                            const Controls& controls,
                            const std::vector<cx::CMatrix>& collapse,
                            const pinn::TimeGrid& grid) {
  if (static_cast<int>(controls.size()) != grid.n_steps)
    throw ShapeMismatch("channel_trotter: controls do not match the grid");
  CMatrix e_tot = CMatrix::identity(16);
  const double dt = grid.dt();
  for (int k = 0; k < grid.n_steps; ++k) {
    const CMatrix h = qsys::total_hamiltonian(sys, controls[k]);
    const CMatrix lv = qsys::build_liouvillian(h, collapse);
    const CMatrix step = cx::matexp(cx::scale(lv, dt));
    e_tot = cx::matmul(step, e_tot);
  }
  return e_tot;
}

double unitary_process_fidelity(const cx::CMatrix& u_targ,
                                const cx::CMatrix& u) {
  if (u_targ.rows != 4 || u_targ.cols != 4 || u.rows != 4 || u.cols != 4)
    throw ShapeMismatch("unitary_process_fidelity expects 4x4 matrices");
  const cd tr = cx::trace(cx::matmul(u_targ, cx::adjoint(u)));
  return std::norm(tr) / 16.0;
}

double open_process_fidelity(const cx::CMatrix& e_tot,
                             const cx::CMatrix& u_targ) {
  if (e_tot.rows != 16 || e_tot.cols != 16)
    throw ShapeMismatch("open_process_fidelity expects a 16x16 channel");
  if (u_targ.rows != 4 || u_targ.cols != 4)
    throw ShapeMismatch("open_process_fidelity expects a 4x4 target");
  const auto basis = qsys::pauli_basis_2q();
  cd acc = 0.0;
  for (const CMatrix& p : basis) {
    const CMatrix ep = cx::unvec(cx::matvec(e_tot, cx::vec(p)), 4);
    const CMatrix m = cx::matmul(
        cx::matmul(u_targ, cx::adjoint(p)), cx::adjoint(u_targ));
    acc += cx::trace(cx::matmul(m, ep));
  }
  acc /= 64.0;  // d^3 with d = 4
  if (std::abs(acc.imag()) >= 1e-8)
    throw NonPhysicalFidelity("process fidelity has imaginary part " +
                              std::to_string(acc.imag()));
  const double f = acc.real();
  if (f < -1e-6 || f > 1.0 + 1e-6)
    throw NonPhysicalFidelity("process fidelity " + std::to_string(f) +
                              " outside [0,1]");
  return std::clamp(f, 0.0, 1.0);
}

std::pair<cx::CMatrix, cx::CMatrix> density_and_derivative(
    const pinn::PinnModel& model, double t, const cx::CVector& x0) {
  const CVector x = pinn::state(model, t, x0);
  const CVector xd = pinn::state_time_derivative(model, t, x0);
  const CMatrix rho = cx::outer(x, x);
  const CMatrix rho_dot = cx::add(cx::outer(xd, x), cx::outer(x, xd));
  return {rho, rho_dot};
}

double closed_model_loss_from_states(const qsys::SystemSpec& sys,
                                     const Controls& controls,
                                     const std::vector<cx::CVector>& states,
                                     const std::vector<cx::CVector>& derivs) {
  if (controls.size() != states.size() || states.size() != derivs.size())
    throw ShapeMismatch("closed_model_loss_from_states: length mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const CMatrix h = qsys::total_hamiltonian(sys, controls[k]);
    // r = x_dot + i H x
    const CVector hx = cx::matvec(h, states[k]);
    CVector r(4);
    for (int i = 0; i < 4; ++i) {
      r.re[i] = derivs[k].re[i] - hx.im[i];
      r.im[i] = derivs[k].im[i] + hx.re[i];
    }
    const double nrm = cx::euclidean_norm(r);
    acc += nrm * nrm;
  }
  return acc / states.size();
}

double open_model_loss_from_states(const qsys::SystemSpec& sys,
                                   const Controls& controls,
                                   const std::vector<cx::CMatrix>& rhos,
                                   const std::vector<cx::CMatrix>& rho_dots,
                                   const std::vector<cx::CMatrix>& collapse) {
  if (controls.size() != rhos.size() || rhos.size() != rho_dots.size())
    throw ShapeMismatch("open_model_loss_from_states: length mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < rhos.size(); ++k) {
    const CMatrix h = qsys::total_hamiltonian(sys, controls[k]);
    const CMatrix lv = qsys::build_liouvillian(h, collapse);
    const CMatrix lrho = cx::unvec(cx::matvec(lv, cx::vec(rhos[k])), 4);
    const double nrm = cx::frobenius_norm(cx::sub(rho_dots[k], lrho));
    acc += nrm * nrm;
  }
  return acc / rhos.size();
}

double trace_loss_from_states(const std::vector<cx::CMatrix>& rhos) {
  double acc = 0.0;
  for (const CMatrix& rho : rhos) {
    const double dev = cx::trace(rho).real() - 1.0;
    acc += dev * dev;
  }
  return acc / rhos.size();
}

TrainingGraph::TrainingGraph(Kind kind, const qsys::SystemSpec& sys,
                             const pinn::PinnModel& model,
                             const pinn::TimeGrid& grid, const cx::CVector& x0,
                             const cx::CMatrix& u_targ,
                             std::array<double, 3> loss_weights)
    : kind_(kind), grid_(grid) {
  const int n = grid.n_steps;
  if (n < 1) throw ConfigError("training grid needs at least one step");
  const double dt = grid.dt();

  gg_ = pinn::build_grid_graph(g_, model, grid, &x0, true);

  // packed system constants
  const NodeId hd_c = cx::graph::constant_cmat(g_, sys.drift);
  std::array<NodeId, 4> hc_c;
  for (int m = 0; m < 4; ++m)
    hc_c[m] = cx::graph::constant_cmat(g_, sys.controls[m]);

  // per-step total Hamiltonians H_k (packed, affine in the control rows)
  std::vector<NodeId> h_steps(n);
  std::vector<std::array<NodeId, 4>> u_at(n);
  for (int k = 0; k < n; ++k) {
    NodeId h = hd_c;
    for (int m = 0; m < 4; ++m) {
      u_at[k][m] = g_.slice(gg_.u[m], k, 1);
      h = g_.add(h, g_.mul(u_at[k][m], hc_c[m]));
    }
    h_steps[k] = h;
  }

  // model residual over the grid
  std::array<NodeId, 8> xcomp, xdcomp;
  for (int i = 0; i < 4; ++i) {
    xcomp[i] = gg_.x_re[i];
    xcomp[4 + i] = gg_.x_im[i];
    xdcomp[i] = gg_.xdot_re[i];
    xdcomp[4 + i] = gg_.xdot_im[i];
  }
  std::vector<NodeId> residual_sq(n);
  std::vector<NodeId> trace_sq;
  if (kind == Kind::kClosed) {
    for (int k = 0; k < n; ++k) {
      const NodeId xk = g_.pack_lane(xcomp, k);
      const NodeId xdk = g_.pack_lane(xdcomp, k);
      const NodeId ih = g_.cscale(h_steps[k], 0.0, 1.0);
      const NodeId r = g_.add(xdk, g_.cmat_vec(ih, xk, 4));
      const std::pair<NodeId, NodeId> sq[1] = {{r, r}};
      residual_sq[k] = g_.sum(g_.fma_chain(sq));
    }
  } else {
    // constant Liouvillian pieces: drift+dissipator, and one per control
    const auto collapse = qsys::build_collapse_ops(sys.gamma_abs, sys.gamma_em);
    const NodeId ld_c =
        cx::graph::constant_cmat(g_, qsys::build_liouvillian(sys.drift, collapse));
    std::array<NodeId, 4> lc_c;
    for (int m = 0; m < 4; ++m)
      lc_c[m] = cx::graph::constant_cmat(
          g_, qsys::build_liouvillian(sys.controls[m], {}));

    trace_sq.resize(n);
    const NodeId one = g_.constant(1.0);
    std::vector<NodeId> l_steps(n);
    for (int k = 0; k < n; ++k) {
      NodeId lv = ld_c;
      for (int m = 0; m < 4; ++m) lv = g_.add(lv, g_.mul(u_at[k][m], lc_c[m]));
      l_steps[k] = lv;

      const NodeId xk = g_.pack_lane(xcomp, k);
      const NodeId xdk = g_.pack_lane(xdcomp, k);
      // packed column-major rho coincides with vec(rho)
      const NodeId rho = g_.couter(xk, xk, 4);
      const NodeId rho_dot =
          g_.add(g_.couter(xdk, xk, 4), g_.couter(xk, xdk, 4));
      const NodeId r = g_.sub(rho_dot, g_.cmat_vec(lv, rho, 16));
      const std::pair<NodeId, NodeId> sq[1] = {{r, r}};
      residual_sq[k] = g_.sum(g_.fma_chain(sq));

      const NodeId tr_re = g_.slice(g_.ctrace(rho, 4), 0, 1);
      trace_sq[k] = g_.square(g_.sub(tr_re, one));
    }
    h_steps = std::move(l_steps);  // channel steps exponentiate dt*L_k
  }
  l_model_ = g_.mul(g_.constant(1.0 / n),
                    g_.sum(g_.pack_lane(residual_sq, 0)));

  // final propagator / channel from the step exponentials
  if (kind == Kind::kClosed) {
    op_dim_ = 4;
    NodeId u_total = cx::graph::constant_cmat(g_, CMatrix::identity(4));
    for (int k = 0; k < n; ++k) {
      const NodeId a = g_.cscale(h_steps[k], 0.0, -dt);
      const NodeId step = cx::graph::matexp(g_, a, 4, 12, kClosedSquarings);
      u_total = g_.cmat_mul(step, u_total, 4);
    }
    final_op_ = u_total;

    // F = |tr(U_targ U^dag)|^2 / 16
    const NodeId u_re = g_.slice(final_op_, 0, 16);
    const NodeId u_im = g_.slice(final_op_, 16, 16);
    const NodeId t_re_c = g_.constant_vec(u_targ.re);
    const NodeId t_im_c = g_.constant_vec(u_targ.im);
    std::vector<double> neg_re(16);
    for (int i = 0; i < 16; ++i) neg_re[i] = -u_targ.re[i];
    const NodeId t_nre_c = g_.constant_vec(neg_re);
    const std::pair<NodeId, NodeId> re_pairs[2] = {{t_re_c, u_re},
                                                   {t_im_c, u_im}};
    const std::pair<NodeId, NodeId> im_pairs[2] = {{t_im_c, u_re},
                                                   {t_nre_c, u_im}};
    const NodeId tr_re = g_.sum(g_.fma_chain(re_pairs));
    const NodeId tr_im = g_.sum(g_.fma_chain(im_pairs));
    fidelity_ = g_.mul(g_.constant(1.0 / 16.0),
                       g_.add(g_.square(tr_re), g_.square(tr_im)));
  } else {
    op_dim_ = 16;
    NodeId e_total = cx::graph::constant_cmat(g_, CMatrix::identity(16));
    const NodeId dt_c = g_.constant(dt);
    for (int k = 0; k < n; ++k) {
      const NodeId a = g_.mul(dt_c, h_steps[k]);
      const NodeId step = cx::graph::matexp(g_, a, 16, 12, kOpenSquarings);
      e_total = g_.cmat_mul(step, e_total, 16);
    }
    final_op_ = e_total;

    // F_pro = (1/64) sum_P tr(U_targ P^dag U_targ^dag unvec(E vec(P)))
    const auto basis = qsys::pauli_basis_2q();
    NodeId acc_re = kNoNode, acc_im = kNoNode;
    for (const CMatrix& p : basis) {
      const NodeId vp = cx::graph::constant_cvec(g_, cx::vec(p));
      const NodeId evp = g_.cmat_vec(final_op_, vp, 16);
      const NodeId ev_re = g_.slice(evp, 0, 16);
      const NodeId ev_im = g_.slice(evp, 16, 16);
      const CMatrix m =
          cx::matmul(cx::matmul(u_targ, cx::adjoint(p)), cx::adjoint(u_targ));
      // tr(M unvec(v)) = sum_ij M_ij v[i*4+j] (column stacking)
      std::vector<double> cre(16), cim(16), ncim(16);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          cre[i * 4 + j] = m.re_at(i, j);
          cim[i * 4 + j] = m.im_at(i, j);
          ncim[i * 4 + j] = -m.im_at(i, j);
        }
      const NodeId cre_c = g_.constant_vec(cre);
      const NodeId cim_c = g_.constant_vec(cim);
      const NodeId ncim_c = g_.constant_vec(ncim);
      const std::pair<NodeId, NodeId> re_pairs[2] = {{cre_c, ev_re},
                                                     {ncim_c, ev_im}};
      const std::pair<NodeId, NodeId> im_pairs[2] = {{cre_c, ev_im},
                                                     {cim_c, ev_re}};
      const NodeId p_re = g_.sum(g_.fma_chain(re_pairs));
      const NodeId p_im = g_.sum(g_.fma_chain(im_pairs));
      acc_re = acc_re == kNoNode ? p_re : g_.add(acc_re, p_re);
      acc_im = acc_im == kNoNode ? p_im : g_.add(acc_im, p_im);
    }
    fidelity_ = g_.mul(g_.constant(1.0 / 64.0), acc_re);
    fid_imag_ = g_.mul(g_.constant(1.0 / 64.0), acc_im);
    l_trace_ = g_.mul(g_.constant(1.0 / n),
                      g_.sum(g_.pack_lane(trace_sq, 0)));
  }

  l_fid_ = g_.sub(g_.constant(1.0), fidelity_);

  auto weighted = [&](NodeId node, double w) {
    return w == 1.0 ? node : g_.mul(g_.constant(w), node);
  };
  l_fid_ = weighted(l_fid_, loss_weights[0]);
  l_model_ = weighted(l_model_, loss_weights[1]);
  if (kind == Kind::kOpen) {
    l_trace_ = weighted(l_trace_, loss_weights[2]);
    l_total_ = g_.add(g_.add(l_fid_, l_model_), l_trace_);
  } else {
    l_total_ = g_.add(l_fid_, l_model_);
  }
  // re-evaluate once at the final arena placement so the first recorded
  // epoch is computed with the same memory layout as every later one
  g_.refresh();
}

OpenLossBreakdown TrainingGraph::breakdown() const {
  OpenLossBreakdown b;
  b.l_model = g_.value_scalar(l_model_);
  b.l_fid = g_.value_scalar(l_fid_);
  b.l_trace = kind_ == Kind::kOpen ? g_.value_scalar(l_trace_) : 0.0;
  b.l_total = g_.value_scalar(l_total_);
  b.fidelity = g_.value_scalar(fidelity_);
  return b;
}

double TrainingGraph::fidelity_imag() const {
  return fid_imag_ == kNoNode ? 0.0 : g_.value_scalar(fid_imag_);
}

std::span<double> TrainingGraph::weight_values(int layer) {
  return g_.input_storage(gg_.weight_nodes[layer]);
}

std::span<double> TrainingGraph::bias_values(int layer) {
  return g_.input_storage(gg_.bias_nodes[layer]);
}

std::span<const double> TrainingGraph::weight_grads(int layer) const {
  return g_.adjoint(gg_.weight_nodes[layer]);
}

std::span<const double> TrainingGraph::bias_grads(int layer) const {
  return g_.adjoint(gg_.bias_nodes[layer]);
}

void TrainingGraph::load_model_weights(const pinn::PinnModel& model) {
  pinn::write_weights_to_graph(model, g_, gg_);
}

void TrainingGraph::store_model_weights(pinn::PinnModel& model) const {
  pinn::read_weights_from_graph(model, g_, gg_);
}

Controls TrainingGraph::pulses() const {
  Controls c(grid_.n_steps);
  for (int m = 0; m < 4; ++m) {
    const auto row = g_.value(gg_.u[m]);
    for (int k = 0; k < grid_.n_steps; ++k) c[k][m] = row[k];
  }
  return c;
}

std::vector<cx::CVector> TrainingGraph::states() const {
  std::vector<cx::CVector> xs(grid_.n_steps, cx::CVector(4));
  for (int i = 0; i < 4; ++i) {
    const auto re = g_.value(gg_.x_re[i]);
    const auto im = g_.value(gg_.x_im[i]);
    for (int k = 0; k < grid_.n_steps; ++k) {
      xs[k].re[i] = re[k];
      xs[k].im[i] = im[k];
    }
  }
  return xs;
}

cx::CMatrix TrainingGraph::final_operator() const {
  return cx::graph::unpack_cmat(g_.value(final_op_), op_dim_);
}

double closed_model_loss(const qsys::SystemSpec& sys,
                         const pinn::PinnModel& model,
                         const pinn::TimeGrid& grid, const cx::CVector& x0) {
  TrainingGraph tg(TrainingGraph::Kind::kClosed, sys, model, grid, x0,
                   CMatrix::identity(4));
  return tg.breakdown().l_model;
}

ClosedLossBreakdown closed_total_loss(const qsys::SystemSpec& sys,
                                      const pinn::PinnModel& model,
                                      const pinn::TimeGrid& grid,
                                      const cx::CVector& x0,
                                      const cx::CMatrix& u_targ) {
  TrainingGraph tg(TrainingGraph::Kind::kClosed, sys, model, grid, x0, u_targ);
  const OpenLossBreakdown b = tg.breakdown();
  return {b.l_model, b.l_fid, b.l_total, b.fidelity};
}

double open_model_loss(const qsys::SystemSpec& sys,
                       const pinn::PinnModel& model, const pinn::TimeGrid& grid,
                       const cx::CVector& x0) {
  TrainingGraph tg(TrainingGraph::Kind::kOpen, sys, model, grid, x0,
                   CMatrix::identity(4));
  return tg.breakdown().l_model;
}

double trace_loss(const pinn::PinnModel& model, const pinn::TimeGrid& grid,
                  const cx::CVector& x0) {
  std::vector<CMatrix> rhos;
  rhos.reserve(grid.n_steps);
  for (double t : grid.points())
    rhos.push_back(cx::outer(pinn::state(model, t, x0),
                             pinn::state(model, t, x0)));
  return trace_loss_from_states(rhos);
}

OpenLossBreakdown open_total_loss(const qsys::SystemSpec& sys,
                                  const pinn::PinnModel& model,
                                  const pinn::TimeGrid& grid,
                                  const cx::CVector& x0,
                                  const cx::CMatrix& u_targ) {
  TrainingGraph tg(TrainingGraph::Kind::kOpen, sys, model, grid, x0, u_targ);
  return tg.breakdown();
}

}  // namespace pulsepinn::losses
