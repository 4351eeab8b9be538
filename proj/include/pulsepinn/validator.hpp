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
#ifndef PULSEPINN_VALIDATOR_HPP
#define PULSEPINN_VALIDATOR_HPP

#include <array>
#include <functional>
#include <vector>

#include "pulsepinn/losses.hpp"
#include "pulsepinn/system.hpp"

namespace pulsepinn::validator {

// Natural cubic spline through the discrete control samples, one spline per
// channel. Evaluation clamps to the endpoint values outside the knot range.
class PulseSchedule {
 public:
  PulseSchedule(const losses::Controls& samples, const pinn::TimeGrid& grid);

  double channel_at(int j, double t) const;
  std::array<double, 4> controls_at(double t) const;

  const pinn::TimeGrid& grid() const { return grid_; }
  const losses::Controls& samples() const { return samples_; }

 private:
  pinn::TimeGrid grid_;
  losses::Controls samples_;
  std::vector<double> knots_;
  std::array<std::vector<double>, 4> second_;  // spline second derivatives
};

struct EvolutionResult {
  std::vector<double> times;
  std::vector<cx::CVector> states;      // Schrodinger runs
  std::vector<cx::CMatrix> densities;   // Lindblad runs
  std::vector<std::array<double, 4>> populations;
  double max_norm_drift = 0.0;   // | ||x|| - 1 |
  double max_trace_dev = 0.0;    // | tr rho - 1 |
  double min_eigenvalue = 0.0;   // over all recorded densities
  double max_resym = 0.0;        // Hermitian re-symmetrization magnitude
};

using HamiltonianFn = std::function<cx::CMatrix(double)>;

// Dimension-generic RK4 cores on x_dot = -i H(t) x and the vectorized
// Lindblad equation; `steps` uniform steps over [t0, t1], states recorded at
// every step boundary.
std::vector<cx::CVector> rk4_schrodinger_core(const HamiltonianFn& h_of_t,
                                              const cx::CVector& x0, double t0,
                                              double t1, int steps);
std::vector<cx::CMatrix> rk4_lindblad_core(
    const HamiltonianFn& h_of_t, const std::vector<cx::CMatrix>& collapse,
    const cx::CMatrix& rho0, double t0, double t1, int steps,
    double* max_resym = nullptr);

// Classic RK4 with spline-evaluated controls; no renormalization (norm drift
// is a quality metric). Records at the control-grid boundaries.
EvolutionResult rk4_schrodinger(const qsys::SystemSpec& sys,
                                const PulseSchedule& schedule,
                                const cx::CVector& x0,
                                int substeps_per_interval = 10);

// RK4 on the vectorized density matrix with Hermitian re-symmetrization each
// step.
EvolutionResult rk4_lindblad(const qsys::SystemSpec& sys,
                             const PulseSchedule& schedule,
                             const cx::CMatrix& rho0,
                             const std::vector<cx::CMatrix>& collapse,
                             int substeps_per_interval = 10);

// Table-style consistency check: evolve x0 under both pulse sets with the
// dissipation-free master equation and compare the final density matrices.
double crosscheck(const qsys::SystemSpec& sys, const PulseSchedule& pulses_a,
                  const PulseSchedule& pulses_b, const cx::CVector& x0,
                  int substeps_per_interval = 10);

}  // namespace pulsepinn::validator

#endif  // PULSEPINN_VALIDATOR_HPP
