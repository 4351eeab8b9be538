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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "pulsepinn/validator.hpp"

using namespace pulsepinn;
using namespace pulsepinn::validator;
using cx::CMatrix;
using cx::CVector;
using cd = std::complex<double>;

namespace {

losses::Controls sampled(const pinn::TimeGrid& grid,
                         double (*f)(double, int)) {
  losses::Controls c(grid.n_steps);
  const auto pts = grid.points();
  for (int k = 0; k < grid.n_steps; ++k)
    for (int j = 0; j < 4; ++j) c[k][j] = f(pts[k], j);
  return c;
}

CVector basis_state(int idx) {
  CVector x(4);
  x.set(idx, 1.0);
  return x;
}

}  // namespace

TEST_CASE("spline basics") {
  {
    // collinear samples: the natural spline degenerates to the line
    pinn::TimeGrid grid;
    grid.n_steps = 10;
    grid.t_final = 10.0;
    const auto c = sampled(grid, [](double t, int) { return 2.0 * t - 3.0; });
    const PulseSchedule sched(c, grid);
    for (double t : {0.5, 2.5, 7.25}) {
      CHECK(sched.channel_at(0, t) == doctest::Approx(2.0 * t - 3.0).epsilon(1e-12));
    }
  }
  {
    // 3-point hand oracle: knots (0,0), (1,1), (2,0) give M = (0,-3,0) and
    // S(0.5) = 0.6875
    pinn::TimeGrid grid;
    grid.n_steps = 3;
    grid.t_final = 3.0;
    losses::Controls c(3);
    c[0] = {0, 0, 0, 0};
    c[1] = {1, 1, 1, 1};
    c[2] = {0, 0, 0, 0};
    const PulseSchedule sched(c, grid);
    CHECK(sched.channel_at(0, 0.5) == doctest::Approx(0.6875).epsilon(1e-12));
  }
  {
    // knot interpolation and endpoint clamping
    pinn::TimeGrid grid;
    grid.n_steps = 20;
    grid.t_final = 10.0;
    const auto c = sampled(grid, [](double t, int j) {
      return std::sin(t + j) * (1.0 + 0.1 * j);
    });
    const PulseSchedule sched(c, grid);
    const auto pts = grid.points();
    for (int k = 0; k < grid.n_steps; ++k)
      for (int j = 0; j < 4; ++j)
        CHECK(std::abs(sched.channel_at(j, pts[k]) - c[k][j]) < 1e-12);
    CHECK(sched.channel_at(1, -5.0) == c.front()[1]);
    CHECK(sched.channel_at(1, 99.0) == c.back()[1]);
  }
  {
    pinn::TimeGrid grid;
    grid.n_steps = 2;
    grid.t_final = 1.0;
    CHECK_THROWS_AS(PulseSchedule(losses::Controls(2), grid), TooFewSamples);
  }
}

TEST_CASE("rk4 scalar analogue x_dot = -i x") {
  // d = 1 system: H = 1, x(t) = e^{-it}
  const HamiltonianFn h = [](double) {
    CMatrix m(1, 1);
    m.set(0, 0, 1.0);
    return m;
  };
  CVector x0(1);
  x0.set(0, 1.0);
  const auto xs = rk4_schrodinger_core(h, x0, 0.0, 1.0, 100);  // h = 0.01
  const cd expect = std::exp(cd(0, -1.0));
  const cd got(xs.back().re[0], xs.back().im[0]);
  CHECK(std::abs(got - expect) < 1e-8);
}

TEST_CASE("rk4 order: halving the step cuts the error ~16x") {
  const qsys::SystemSpec sys = qsys::build_system();
  const HamiltonianFn h = [&](double) { return sys.drift; };
  const CVector x0 = basis_state(1);
  const auto ref = rk4_schrodinger_core(h, x0, 0.0, 2.0, 4096);
  auto err_at = [&](int steps) {
    const auto xs = rk4_schrodinger_core(h, x0, 0.0, 2.0, steps);
    double e = 0.0;
    for (int i = 0; i < 4; ++i) {
      e += std::norm(cd(xs.back().re[i] - ref.back().re[i],
                        xs.back().im[i] - ref.back().im[i]));
    }
    return std::sqrt(e);
  };
  const double e1 = err_at(32);
  const double e2 = err_at(64);
  CHECK(e1 / e2 > 8.0);
  CHECK(e1 / e2 < 32.0);
}

TEST_CASE("drift-only evolution reaches -i|01> at T = pi") {
  const qsys::SystemSpec sys = qsys::build_system();
  pinn::TimeGrid grid;
  grid.n_steps = 100;
  grid.t_final = M_PI;
  const PulseSchedule sched(losses::Controls(100, {0, 0, 0, 0}), grid);
  const auto res = rk4_schrodinger(sys, sched, basis_state(1), 10);
  const CVector& xf = res.states.back();
  CHECK(std::abs(xf.im[1] + 1.0) < 1e-6);
  CHECK(std::abs(xf.re[1]) < 1e-6);
  CHECK(res.max_norm_drift < 1e-8);
  // population sums stay 1
  for (const auto& p : res.populations) {
    CHECK(std::abs(p[0] + p[1] + p[2] + p[3] - 1.0) < 1e-8);
  }
}

TEST_CASE("lindblad reduces to schrodinger without collapse") {
  const qsys::SystemSpec sys = qsys::build_system();
  pinn::TimeGrid grid;
  grid.n_steps = 50;
  grid.t_final = 5.0;
  const auto c = sampled(grid, [](double t, int j) {
    return 0.4 * std::sin(t + 0.3 * j);
  });
  const PulseSchedule sched(c, grid);
  const CVector x0 = basis_state(2);
  const auto pure = rk4_schrodinger(sys, sched, x0, 10);
  const auto open = rk4_lindblad(sys, sched, cx::outer(x0, x0), {}, 10);
  const CMatrix rho_pure =
      cx::outer(pure.states.back(), pure.states.back());
  CHECK(cx::frobenius_norm(cx::sub(open.densities.back(), rho_pure)) < 1e-6);
  CHECK(open.max_trace_dev < 1e-8);
  CHECK(open.max_resym < 1e-10);
}

TEST_CASE("amplitude damping analytic check") {
  // single qubit, H = 0, gamma_em = 1: rho_ee(t) = e^{-t}
  const HamiltonianFn h = [](double) { return CMatrix(2, 2); };
  CMatrix c(2, 2);
  c.set(0, 1, 1.0);  // |g><e| at rate 1
  CMatrix rho0(2, 2);
  rho0.set(1, 1, 1.0);
  const auto rhos = rk4_lindblad_core(h, {c}, rho0, 0.0, 2.0, 400);
  for (int s = 0; s <= 400; s += 100) {
    const double t = 2.0 * s / 400.0;
    CHECK(std::abs(rhos[s].re_at(1, 1) - std::exp(-t)) < 1e-8);
  }
}

TEST_CASE("positivity through noisy evolution") {
  const qsys::SystemSpec sys = qsys::build_system(0.1, 0.1);
  pinn::TimeGrid grid;
  grid.n_steps = 40;
  grid.t_final = 4.0;
  const auto c = sampled(grid, [](double t, int j) {
    return 0.5 * std::cos(t * (j + 1));
  });
  const PulseSchedule sched(c, grid);
  const auto collapse = qsys::build_collapse_ops(0.1, 0.1);
  const auto res =
      rk4_lindblad(sys, sched, cx::outer(basis_state(2), basis_state(2)),
                   collapse, 10);
  CHECK(res.min_eigenvalue >= -1e-8);
  CHECK(res.max_trace_dev < 1e-8);
  for (const auto& p : res.populations)
    CHECK(std::abs(p[0] + p[1] + p[2] + p[3] - 1.0) < 1e-8);
}

TEST_CASE("crosscheck") {
  const qsys::SystemSpec sys = qsys::build_system();
  pinn::TimeGrid grid;
  grid.n_steps = 30;
  grid.t_final = 3.0;
  const auto ca = sampled(grid, [](double t, int j) {
    return 0.3 * std::sin(t + j);
  });
  const PulseSchedule sa(ca, grid);
  CHECK(crosscheck(sys, sa, sa, basis_state(2)) ==
        doctest::Approx(1.0).epsilon(1e-10));

  // very different pulses produce a clearly lower overlap
  const auto cb = sampled(grid, [](double t, int j) {
    return 1.5 * std::cos(2.0 * t - j);
  });
  const PulseSchedule sb(cb, grid);
  CHECK(crosscheck(sys, sa, sb, basis_state(2)) < 0.999);
}
