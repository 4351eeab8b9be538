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
#include "pulsepinn/validator.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace pulsepinn::validator {

using cx::CMatrix;
using cx::CVector;
using cd = std::complex<double>;

PulseSchedule::PulseSchedule(const losses::Controls& samples,
                             const pinn::TimeGrid& grid)
    : grid_(grid), samples_(samples) {
  const int n = static_cast<int>(samples.size());
  if (n < 3) throw TooFewSamples("cubic spline needs at least 3 samples");
  if (n != grid.n_steps)
    throw ShapeMismatch("pulse samples do not match the grid");
  knots_.resize(n);
  const double dt = grid.dt();
  for (int i = 0; i < n; ++i) knots_[i] = i * dt;

  // natural cubic spline second derivatives via the tridiagonal sweep
  for (int j = 0; j < 4; ++j) {
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) y[i] = samples[i][j];
    std::vector<double> m(n, 0.0), u(n, 0.0);
    for (int i = 1; i < n - 1; ++i) {
      const double sig = (knots_[i] - knots_[i - 1]) /
                         (knots_[i + 1] - knots_[i - 1]);
      const double p = sig * m[i - 1] + 2.0;
      m[i] = (sig - 1.0) / p;
      u[i] = (y[i + 1] - y[i]) / (knots_[i + 1] - knots_[i]) -
             (y[i] - y[i - 1]) / (knots_[i] - knots_[i - 1]);
      u[i] = (6.0 * u[i] / (knots_[i + 1] - knots_[i - 1]) - sig * u[i - 1]) / p;
    }
    m[n - 1] = 0.0;
    for (int i = n - 2; i >= 0; --i) m[i] = m[i] * m[i + 1] + u[i];
    second_[j] = std::move(m);
  }
}

double PulseSchedule::channel_at(int j, double t) const {
  const int n = static_cast<int>(knots_.size());
  if (t <= knots_.front()) return samples_.front()[j];
  if (t >= knots_.back()) return samples_.back()[j];
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const int hi = static_cast<int>(it - knots_.begin());
  const int lo = hi - 1;
  const double h = knots_[hi] - knots_[lo];
  const double a = (knots_[hi] - t) / h;
  const double b = (t - knots_[lo]) / h;
  return a * samples_[lo][j] + b * samples_[hi][j] +
         ((a * a * a - a) * second_[j][lo] + (b * b * b - b) * second_[j][hi]) *
             (h * h) / 6.0;
}

std::array<double, 4> PulseSchedule::controls_at(double t) const {
  return {channel_at(0, t), channel_at(1, t), channel_at(2, t),
          channel_at(3, t)};
}

namespace {

CVector schrodinger_rhs(const CMatrix& h, const CVector& x) {
  const CVector hx = cx::matvec(h, x);
  CVector dx(x.dim);
  for (int i = 0; i < x.dim; ++i) {
    dx.re[i] = hx.im[i];
    dx.im[i] = -hx.re[i];
  }
  return dx;
}

CVector axpy(const CVector& x, const CVector& y, double a) {
  CVector z(x.dim);
  for (int i = 0; i < x.dim; ++i) {
    z.re[i] = x.re[i] + a * y.re[i];
    z.im[i] = x.im[i] + a * y.im[i];
  }
  return z;
}

}  // namespace

std::vector<CVector> rk4_schrodinger_core(const HamiltonianFn& h_of_t,
                                          const CVector& x0, double t0,
                                          double t1, int steps) {
  if (steps < 1) throw ShapeMismatch("rk4 needs at least one step");
  std::vector<CVector> out;
  out.reserve(steps + 1);
  out.push_back(x0);
  const double h = (t1 - t0) / steps;
  CVector x = x0;
  for (int s = 0; s < steps; ++s) {
    const double t = t0 + s * h;
    const CVector k1 = schrodinger_rhs(h_of_t(t), x);
    const CVector k2 = schrodinger_rhs(h_of_t(t + 0.5 * h), axpy(x, k1, 0.5 * h));
    const CVector k3 = schrodinger_rhs(h_of_t(t + 0.5 * h), axpy(x, k2, 0.5 * h));
    const CVector k4 = schrodinger_rhs(h_of_t(t + h), axpy(x, k3, h));
    for (int i = 0; i < x.dim; ++i) {
      x.re[i] += h / 6.0 *
                 (k1.re[i] + 2 * k2.re[i] + 2 * k3.re[i] + k4.re[i]);
      x.im[i] += h / 6.0 *
                 (k1.im[i] + 2 * k2.im[i] + 2 * k3.im[i] + k4.im[i]);
    }
    out.push_back(x);
  }
  return out;
}

std::vector<CMatrix> rk4_lindblad_core(const HamiltonianFn& h_of_t,
                                       const std::vector<CMatrix>& collapse,
                                       const CMatrix& rho0, double t0,
                                       double t1, int steps,
                                       double* max_resym) {
  if (steps < 1) throw ShapeMismatch("rk4 needs at least one step");
  const int d = rho0.rows;
  auto liouvillian_at = [&](double t) {
    return qsys::build_liouvillian(h_of_t(t), collapse);
  };
  auto rhs = [&](const CMatrix& lv, const CVector& v) {
    return cx::matvec(lv, v);
  };

  std::vector<CMatrix> out;
  out.reserve(steps + 1);
  out.push_back(rho0);
  double resym = 0.0;
  const double h = (t1 - t0) / steps;
  CVector v = cx::vec(rho0);
  for (int s = 0; s < steps; ++s) {
    const double t = t0 + s * h;
    const CMatrix l1 = liouvillian_at(t);
    const CMatrix l2 = liouvillian_at(t + 0.5 * h);
    const CMatrix l4 = liouvillian_at(t + h);
    const CVector k1 = rhs(l1, v);
    const CVector k2 = rhs(l2, axpy(v, k1, 0.5 * h));
    const CVector k3 = rhs(l2, axpy(v, k2, 0.5 * h));
    const CVector k4 = rhs(l4, axpy(v, k3, h));
    for (int i = 0; i < v.dim; ++i) {
      v.re[i] += h / 6.0 *
                 (k1.re[i] + 2 * k2.re[i] + 2 * k3.re[i] + k4.re[i]);
      v.im[i] += h / 6.0 *
                 (k1.im[i] + 2 * k2.im[i] + 2 * k3.im[i] + k4.im[i]);
    }
    // re-symmetrize to suppress roundoff skew
    CMatrix rho = cx::unvec(v, d);
    const CMatrix sym = cx::scale(cx::add(rho, cx::adjoint(rho)), 0.5);
    resym = std::max(resym, cx::frobenius_norm(cx::sub(rho, sym)));
    v = cx::vec(sym);
    out.push_back(sym);
  }
  if (max_resym) *max_resym = resym;
  return out;
}

EvolutionResult rk4_schrodinger(const qsys::SystemSpec& sys,
                                const PulseSchedule& schedule,
                                const cx::CVector& x0,
                                int substeps_per_interval) {
  if (substeps_per_interval < 1)
    throw ShapeMismatch("substeps_per_interval must be >= 1");
  const pinn::TimeGrid& grid = schedule.grid();
  const auto h_of_t = [&](double t) {
    return qsys::total_hamiltonian(sys, schedule.controls_at(t));
  };
  const int total = grid.n_steps * substeps_per_interval;
  const auto xs =
      rk4_schrodinger_core(h_of_t, x0, 0.0, grid.t_final, total);

  EvolutionResult res;
  for (int k = 0; k <= grid.n_steps; ++k) {
    const CVector& x = xs[static_cast<std::size_t>(k) * substeps_per_interval];
    res.times.push_back(k * grid.dt());
    res.states.push_back(x);
    std::array<double, 4> pop{};
    for (int i = 0; i < 4; ++i)
      pop[i] = x.re[i] * x.re[i] + x.im[i] * x.im[i];
    res.populations.push_back(pop);
    res.max_norm_drift = std::max(res.max_norm_drift,
                                  std::abs(cx::euclidean_norm(x) - 1.0));
  }
  return res;
}

EvolutionResult rk4_lindblad(const qsys::SystemSpec& sys,
                             const PulseSchedule& schedule,
                             const cx::CMatrix& rho0,
                             const std::vector<cx::CMatrix>& collapse,
                             int substeps_per_interval) {
  if (substeps_per_interval < 1)
    throw ShapeMismatch("substeps_per_interval must be >= 1");
  if (rho0.rows != 4 || rho0.cols != 4)
    throw ShapeMismatch("rk4_lindblad expects a 4x4 density matrix");
  const pinn::TimeGrid& grid = schedule.grid();
  const auto h_of_t = [&](double t) {
    return qsys::total_hamiltonian(sys, schedule.controls_at(t));
  };
  const int total = grid.n_steps * substeps_per_interval;
  double resym = 0.0;
  const auto rhos = rk4_lindblad_core(h_of_t, collapse, rho0, 0.0,
                                      grid.t_final, total, &resym);

  EvolutionResult res;
  res.max_resym = resym;
  res.min_eigenvalue = 1.0;
  for (int k = 0; k <= grid.n_steps; ++k) {
    const CMatrix& rho =
        rhos[static_cast<std::size_t>(k) * substeps_per_interval];
    res.times.push_back(k * grid.dt());
    res.densities.push_back(rho);
    std::array<double, 4> pop{};
    for (int i = 0; i < 4; ++i) pop[i] = rho.re_at(i, i);
    res.populations.push_back(pop);
    res.max_trace_dev = std::max(res.max_trace_dev,
                                 std::abs(cx::trace(rho).real() - 1.0));
    std::vector<double> lam;
    CMatrix vecs;
    cx::hermitian_eig(cx::scale(cx::add(rho, cx::adjoint(rho)), 0.5), lam,
                      vecs);
    res.min_eigenvalue = std::min(res.min_eigenvalue, lam.front());
  }
  return res;
}

double crosscheck(const qsys::SystemSpec& sys, const PulseSchedule& pulses_a,
                  const PulseSchedule& pulses_b, const cx::CVector& x0,
                  int substeps_per_interval) {
  const CMatrix rho0 = cx::outer(x0, x0);
  const auto res_a =
      rk4_lindblad(sys, pulses_a, rho0, {}, substeps_per_interval);
  const auto res_b =
      rk4_lindblad(sys, pulses_b, rho0, {}, substeps_per_interval);
  return cx::uhlmann_fidelity(res_a.densities.back(), res_b.densities.back());
}

}  // namespace pulsepinn::validator
