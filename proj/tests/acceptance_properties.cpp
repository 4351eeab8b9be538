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

// Property acceptance suite: every check runs with zero training and prints
// one pass/fail line. Exit status is nonzero when any check fails.

#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include "pulsepinn/losses.hpp"
#include "pulsepinn/validator.hpp"

using namespace pulsepinn;
using cx::CMatrix;
using cx::CVector;
using cd = std::complex<double>;

namespace {

int g_failures = 0;

void report(const char* name, bool pass, double metric, const char* detail) {
  std::printf("[%s] %-46s %.3e %s\n", pass ? "PASS" : "FAIL", name, metric,
              detail);
  if (!pass) ++g_failures;
}

double frand(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

CMatrix random_hermitian(std::mt19937_64& rng, int d, double amp) {
  CMatrix m(d, d);
  for (auto& v : m.re) v = frand(rng, -amp, amp);
  for (auto& v : m.im) v = frand(rng, -amp, amp);
  return cx::scale(cx::add(m, cx::adjoint(m)), 0.5);
}

CMatrix random_unitary(std::mt19937_64& rng, int d) {
  return cx::matexp(cx::scale(random_hermitian(rng, d, 1.0), cd(0, -1)));
}

// --- criterion 7a: autodiff gradient/tangent vs finite differences ---------

void check_autodiff() {
  using namespace pulsepinn::tape;
  double worst_grad = 0.0, worst_tan = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::mt19937_64 seed_rng(4400 + trial);
    const int n_inputs = 2 + static_cast<int>(seed_rng() % 3);
    std::vector<double> vals(n_inputs);
    for (auto& v : vals) v = frand(seed_rng, -0.9, 0.9);
    const std::uint64_t structure_seed = seed_rng();

    std::vector<NodeId> input_ids;
    auto build = [&](DiffGraph& g, const std::vector<double>& vv) -> NodeId {
      std::mt19937_64 r(structure_seed);
      std::vector<NodeId> pool;
      input_ids.clear();
      for (double v : vv) {
        input_ids.push_back(g.input(v));
        pool.push_back(input_ids.back());
      }
      pool.push_back(g.constant(frand(r, -1.0, 1.0)));
      const int depth = 3 + static_cast<int>(r() % 8);
      for (int lvl = 0; lvl < depth; ++lvl) {
        const NodeId a = pool[r() % pool.size()];
        const NodeId b = pool[r() % pool.size()];
        const double va = g.value_scalar(a);
        const double vb = g.value_scalar(b);
        NodeId nid;
        switch (r() % 12) {
          case 0: nid = g.add(a, b); break;
          case 1: nid = g.sub(a, b); break;
          case 2: nid = g.mul(a, b); break;
          case 3: nid = std::abs(vb) > 0.2 ? g.div(a, b) : g.mul(a, b); break;
          case 4: nid = g.neg(a); break;
          case 5: nid = g.sin_(a); break;
          case 6: nid = g.cos_(a); break;
          case 7: nid = std::abs(va) < 3.0 ? g.exp_(a) : g.sin_(a); break;
          case 8: nid = va > 0.05 ? g.sqrt_(a) : g.square(a); break;
          case 9: nid = g.square(a); break;
          case 10: nid = std::abs(va) > 0.05 ? g.abs_(a) : g.neg(a); break;
          default: nid = g.tanh_(a); break;
        }
        pool.push_back(nid);
      }
      return g.add(pool.back(), g.mul(pool[pool.size() / 2], g.constant(0.25)));
    };

    DiffGraph g;
    const NodeId root = build(g, vals);
    g.backward(root);
    auto eval_at = [&](std::vector<double> vv) {
      DiffGraph h;
      return h.value_scalar(build(h, vv));
    };
    const double fd_h = 1e-6;
    std::size_t flat = 0;
    for (NodeId id : input_ids) {
      const double ad = g.adjoint(id)[0];
      auto vp = vals;
      vp[flat] += fd_h;
      const double fp = eval_at(vp);
      vp[flat] -= 2 * fd_h;
      const double fm = eval_at(vp);
      const double fd = (fp - fm) / (2 * fd_h);
      worst_grad = std::max(
          worst_grad, std::abs(ad - fd) / std::max(1e-3, std::abs(fd)));

      g.forward_tangent({id, 1.0});
      const double td = g.tangent(root)[0];
      worst_tan = std::max(worst_tan,
                           std::abs(td - fd) / std::max(1e-3, std::abs(fd)));
      ++flat;
    }
  }
  report("autodiff gradients vs finite differences", worst_grad < 1e-5,
         worst_grad, "(rel err, 100 random graphs, tol 1e-5)");
  report("autodiff tangents vs finite differences", worst_tan < 1e-5,
         worst_tan, "(rel err, tol 1e-5)");
}

// --- criterion 7b: matexp unitarity and eigendecomposition oracle ----------

void check_matexp() {
  std::mt19937_64 rng(17);
  double worst_unit = 0.0, worst_eig = 0.0;
  for (int trial = 0; trial < 25; ++trial) {
    CMatrix h = random_hermitian(rng, 4, 2.0);
    if (cx::frobenius_norm(h) > 5.0)
      h = cx::scale(h, 5.0 / cx::frobenius_norm(h));
    const CMatrix u = cx::matexp(cx::scale(h, cd(0, -1)));
    worst_unit = std::max(
        worst_unit,
        cx::frobenius_norm(cx::sub(cx::matmul(cx::adjoint(u), u),
                                   CMatrix::identity(4))));
    std::vector<double> lam;
    CMatrix v;
    cx::hermitian_eig(h, lam, v);
    CMatrix diag(4, 4);
    for (int i = 0; i < 4; ++i) diag.set(i, i, std::exp(cd(0, -lam[i])));
    const CMatrix ref = cx::matmul(cx::matmul(v, diag), cx::adjoint(v));
    worst_eig = std::max(worst_eig, cx::frobenius_norm(cx::sub(u, ref)));
  }
  report("matexp unitarity", worst_unit < 1e-9, worst_unit,
         "(Frobenius, tol 1e-9)");
  report("matexp vs eigendecomposition oracle", worst_eig < 1e-9, worst_eig,
         "(Frobenius, tol 1e-9)");
}

// --- criterion 7c: vec identity and Liouvillian commutator oracle ----------

void check_vec_liouvillian() {
  std::mt19937_64 rng(23);
  double worst_vec = 0.0, worst_comm = 0.0, worst_trace = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    CMatrix a(2, 2), x(2, 2), b(2, 2);
    for (auto* m : {&a, &x, &b}) {
      for (auto& v : m->re) v = frand(rng, -1, 1);
      for (auto& v : m->im) v = frand(rng, -1, 1);
    }
    const CVector lhs = cx::vec(cx::matmul(cx::matmul(a, x), b));
    const CVector rhs = cx::matvec(cx::kron(cx::transpose(b), a), cx::vec(x));
    double err = 0.0;
    for (int i = 0; i < 4; ++i) err += std::norm(lhs.at(i) - rhs.at(i));
    worst_vec = std::max(worst_vec, std::sqrt(err));

    const CMatrix h = random_hermitian(rng, 4, 1.0);
    CMatrix rho(4, 4);
    for (auto& v : rho.re) v = frand(rng, -1, 1);
    for (auto& v : rho.im) v = frand(rng, -1, 1);
    const CMatrix lv = qsys::build_liouvillian(h, {});
    const CMatrix got = cx::unvec(cx::matvec(lv, cx::vec(rho)), 4);
    const CMatrix comm = cx::scale(
        cx::sub(cx::matmul(h, rho), cx::matmul(rho, h)), cd(0, -1));
    worst_comm = std::max(worst_comm, cx::frobenius_norm(cx::sub(got, comm)));

    const auto collapse = qsys::build_collapse_ops(0.05, 0.02);
    const CMatrix lv2 = qsys::build_liouvillian(h, collapse);
    const CMatrix got2 = cx::unvec(cx::matvec(lv2, cx::vec(rho)), 4);
    worst_trace = std::max(worst_trace, std::abs(cx::trace(got2).real()));
  }
  report("vec identity vec(AXB)=(B^T x A)vec(X)", worst_vec < 1e-12, worst_vec,
         "(tol 1e-12)");
  report("Liouvillian commutator oracle", worst_comm < 1e-12, worst_comm,
         "(tol 1e-12)");
  report("Liouvillian trace preservation", worst_trace < 1e-12, worst_trace,
         "(tol 1e-12)");
}

// --- criterion 7d: open/closed process-fidelity reduction ------------------

void check_fidelity_reduction() {
  std::mt19937_64 rng(31);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix u = random_unitary(rng, 4);
    const CMatrix u_targ = random_unitary(rng, 4);
    const CMatrix e = cx::kron(cx::conjugate(u), u);
    const double fo = losses::open_process_fidelity(e, u_targ);
    const double fc = losses::unitary_process_fidelity(u_targ, u);
    worst = std::max(worst, std::abs(fo - fc));
  }
  report("channel fidelity reduces to unitary formula", worst < 1e-8, worst,
         "(tol 1e-8)");
}

// --- criterion 7e: drift-only propagator -----------------------------------

void check_drift_propagator() {
  const qsys::SystemSpec sys = qsys::build_system();
  pinn::TimeGrid grid;
  grid.n_steps = 200;
  grid.t_final = M_PI;
  const auto res =
      losses::propagator_product(sys, losses::Controls(200, {0, 0, 0, 0}), grid);
  const CMatrix expect = cx::scale(CMatrix::identity(4), cd(0, -1));
  const double err = cx::frobenius_norm(cx::sub(res.final_u, expect));
  report("drift-only propagator = -i I at T=pi", err < 1e-4, err,
         "(N=200, tol 1e-4)");
}

// --- criterion 7f: zero-collapse Trotter channel ----------------------------

void check_trotter_channel() {
  const qsys::SystemSpec sys = qsys::build_system();
  std::mt19937_64 rng(37);
  pinn::TimeGrid grid;
  grid.n_steps = 80;
  grid.t_final = 8.0;
  losses::Controls ctrls(80);
  for (auto& row : ctrls)
    for (auto& v : row) v = frand(rng, -1.0, 1.0);
  const CMatrix e = losses::channel_trotter(sys, ctrls, {}, grid);
  const CMatrix u = losses::propagator_product(sys, ctrls, grid).final_u;
  const double err =
      cx::frobenius_norm(cx::sub(e, cx::kron(cx::conjugate(u), u)));
  report("zero-collapse channel = conj(U) x U", err < 1e-8, err, "(tol 1e-8)");
}

// --- criterion 7g: RK4 amplitude damping -----------------------------------

void check_rk4_damping() {
  const validator::HamiltonianFn h = [](double) { return CMatrix(2, 2); };
  CMatrix c(2, 2);
  c.set(0, 1, 1.0);
  CMatrix rho0(2, 2);
  rho0.set(1, 1, 1.0);
  const auto rhos = validator::rk4_lindblad_core(h, {c}, rho0, 0.0, 2.0, 400);
  double worst = 0.0;
  for (int s = 0; s <= 400; ++s) {
    const double t = 2.0 * s / 400.0;
    worst = std::max(worst, std::abs(rhos[s].re_at(1, 1) - std::exp(-t)));
  }
  report("RK4 amplitude damping analytic check", worst < 1e-8, worst,
         "(tol 1e-8)");
}

// --- criterion 7h: per-module trace/positivity/norm invariants -------------

void check_state_invariants() {
  pinn::PinnModel model;
  model.seed = 3;
  pinn::init_weights(model);
  CVector x0(4);
  x0.set(2, 1.0);

  double worst_norm = 0.0, worst_orth = 0.0, worst_fd = 0.0;
  pinn::TimeGrid grid;  // 200 points over [0, 10)
  for (double t : grid.points()) {
    const CVector x = pinn::state(model, t, x0);
    worst_norm = std::max(worst_norm,
                          std::abs(cx::euclidean_norm(x) - 1.0));
  }
  for (double t : {0.5, 3.3, 8.4}) {
    const CVector x = pinn::state(model, t, x0);
    const CVector xd = pinn::state_time_derivative(model, t, x0);
    worst_orth = std::max(worst_orth, std::abs(cx::inner(x, xd).real()));
    const double fd_h = 1e-6;
    const CVector xp = pinn::state(model, t + fd_h, x0);
    const CVector xm = pinn::state(model, t - fd_h, x0);
    for (int i = 0; i < 4; ++i) {
      const double fd = (xp.re[i] - xm.re[i]) / (2 * fd_h);
      worst_fd = std::max(worst_fd, std::abs(xd.re[i] - fd) /
                                        std::max(1e-3, std::abs(fd)));
    }
  }
  report("state norm = 1 across the grid", worst_norm < 1e-12, worst_norm,
         "(tol 1e-12)");
  report("Re<x|x_dot> = 0 on the unit-norm curve", worst_orth < 1e-10,
         worst_orth, "(tol 1e-10)");
  report("state derivative matches finite differences", worst_fd < 1e-5,
         worst_fd, "(rel err, tol 1e-5)");

  // positivity and norms through a noisy integration
  const qsys::SystemSpec sys = qsys::build_system(0.1, 0.1);
  pinn::TimeGrid vgrid;
  vgrid.n_steps = 50;
  vgrid.t_final = 5.0;
  losses::Controls ctrls(50);
  for (int k = 0; k < 50; ++k)
    ctrls[k] = {std::sin(0.1 * k), std::cos(0.07 * k), 0.2, -0.1};
  const validator::PulseSchedule sched(ctrls, vgrid);
  const auto collapse = qsys::build_collapse_ops(0.1, 0.1);
  const auto res = validator::rk4_lindblad(sys, sched, cx::outer(x0, x0),
                                           collapse, 10);
  report("density positivity under gamma = 0.1", res.min_eigenvalue >= -1e-8,
         res.min_eigenvalue, "(min eigenvalue, tol -1e-8)");
  report("trace deviation under gamma = 0.1", res.max_trace_dev < 1e-8,
         res.max_trace_dev, "(tol 1e-8)");

  const auto pure = validator::rk4_schrodinger(qsys::build_system(), sched, x0,
                                               10);
  report("integrator norm drift", pure.max_norm_drift < 1e-8,
         pure.max_norm_drift, "(tol 1e-8)");
}

}  // namespace

int main() {
  std::printf("property acceptance suite (no training)\n");
  check_autodiff();
  check_matexp();
  check_vec_liouvillian();
  check_fidelity_reduction();
  check_drift_propagator();
  check_trotter_channel();
  check_rk4_damping();
  check_state_invariants();
  std::printf("%s (%d failures)\n", g_failures == 0 ? "ALL PASS" : "FAILURES",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}
