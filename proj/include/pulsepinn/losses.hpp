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
#ifndef PULSEPINN_LOSSES_HPP
#define PULSEPINN_LOSSES_HPP

#include <array>
#include <memory>
#include <vector>

#include "pulsepinn/cmat.hpp"
#include "pulsepinn/pinn.hpp"
#include "pulsepinn/system.hpp"

namespace pulsepinn::losses {

using Controls = std::vector<std::array<double, 4>>;  // N x 4 samples

struct ClosedLossBreakdown {
  double l_model = 0;
  double l_fid = 0;
  double l_total = 0;
  double fidelity = 0;
};

struct OpenLossBreakdown {
  double l_model = 0;
  double l_fid = 0;
  double l_trace = 0;
  double l_total = 0;
  double fidelity = 0;
};

// --- plain-mode pieces (validation, oracles, artifacts) ---------------------

struct PropagatorResult {
  cx::CMatrix final_u;
  std::vector<cx::CMatrix> steps;  // filled when keep_steps
};

// U_0 = I, U_{k+1} = exp(-i H(t_k) dt) U_k with left-endpoint controls.
PropagatorResult propagator_product(const qsys::SystemSpec& sys,
                                    const Controls& controls,
                                    const pinn::TimeGrid& grid,
                                    bool keep_steps = false);

// E_tot = E_step(N-1)...E_step(0), E_step(k) = exp(dt L_k).
cx::CMatrix channel_trotter(const qsys::SystemSpec& sys,
                            const Controls& controls,
                            const std::vector<cx::CMatrix>& collapse,
                            const pinn::TimeGrid& grid);

// F = |tr(U_targ U^dagger)|^2 / 16 for two qubits.
double unitary_process_fidelity(const cx::CMatrix& u_targ, const cx::CMatrix& u);

// F_pro = (1/d^3) sum_P tr(U_targ P^dag U_targ^dag E(P)), d = 4, over the
// two-qubit Pauli basis. Throws NonPhysicalFidelity outside [-1e-6, 1+1e-6]
// or when the accumulated imaginary part reaches 1e-8; clamps to [0, 1].
double open_process_fidelity(const cx::CMatrix& e_tot, const cx::CMatrix& u_targ);

// rho = x x^dag and its exact time derivative via the product rule.
std::pair<cx::CMatrix, cx::CMatrix> density_and_derivative(
    const pinn::PinnModel& model, double t, const cx::CVector& x0);

// Residual losses evaluated on externally supplied trajectories; these are
// the oracle-side mirrors of the recorded losses.
double closed_model_loss_from_states(const qsys::SystemSpec& sys,
                                     const Controls& controls,
                                     const std::vector<cx::CVector>& states,
                                     const std::vector<cx::CVector>& derivs);
double open_model_loss_from_states(const qsys::SystemSpec& sys,
                                   const Controls& controls,
                                   const std::vector<cx::CMatrix>& rhos,
                                   const std::vector<cx::CMatrix>& rho_dots,
                                   const std::vector<cx::CMatrix>& collapse);
double trace_loss_from_states(const std::vector<cx::CMatrix>& rhos);

// --- recorded losses ---------------------------------------------------------

// One tape carrying the network, the ansatz and its time derivative, the
// physics residual, the stepwise propagator or Trotterized channel, and the
// fidelity - everything the optimizer differentiates.
class TrainingGraph {
 public:
  enum class Kind { kClosed, kOpen };

  TrainingGraph(Kind kind, const qsys::SystemSpec& sys,
                const pinn::PinnModel& model, const pinn::TimeGrid& grid,
                const cx::CVector& x0, const cx::CMatrix& u_targ,
                std::array<double, 3> loss_weights = {1.0, 1.0, 1.0});

  Kind kind() const { return kind_; }
  int n_steps() const { return grid_.n_steps; }

  void refresh() { g_.refresh(); }
  void backward() { g_.backward(l_total_); }

  OpenLossBreakdown breakdown() const;  // l_trace stays 0 for closed
  double fidelity_imag() const;         // open-channel consistency metric

  // parameter storage lives in the tape; Adam updates it in place
  int num_layers() const { return pinn::PinnModel::kNumLinear; }
  std::span<double> weight_values(int layer);
  std::span<double> bias_values(int layer);
  std::span<const double> weight_grads(int layer) const;
  std::span<const double> bias_grads(int layer) const;

  void load_model_weights(const pinn::PinnModel& model);
  void store_model_weights(pinn::PinnModel& model) const;

  Controls pulses() const;
  std::vector<cx::CVector> states() const;    // ansatz x(t_k)
  cx::CMatrix final_operator() const;          // U (closed) or E_tot (open)

 private:
  friend ClosedLossBreakdown closed_total(const TrainingGraph&);
  Kind kind_;
  pinn::TimeGrid grid_;
  tape::DiffGraph g_;
  pinn::GridGraph gg_;
  tape::NodeId l_model_ = tape::kNoNode;
  tape::NodeId l_fid_ = tape::kNoNode;
  tape::NodeId l_trace_ = tape::kNoNode;
  tape::NodeId l_total_ = tape::kNoNode;
  tape::NodeId fidelity_ = tape::kNoNode;
  tape::NodeId fid_imag_ = tape::kNoNode;
  tape::NodeId final_op_ = tape::kNoNode;
  int op_dim_ = 4;
};

// --- one-call loss evaluations ----------------------------------------------

double closed_model_loss(const qsys::SystemSpec& sys,
                         const pinn::PinnModel& model,
                         const pinn::TimeGrid& grid, const cx::CVector& x0);

ClosedLossBreakdown closed_total_loss(const qsys::SystemSpec& sys,
                                      const pinn::PinnModel& model,
                                      const pinn::TimeGrid& grid,
                                      const cx::CVector& x0,
                                      const cx::CMatrix& u_targ);

double open_model_loss(const qsys::SystemSpec& sys,
                       const pinn::PinnModel& model, const pinn::TimeGrid& grid,
                       const cx::CVector& x0);

double trace_loss(const pinn::PinnModel& model, const pinn::TimeGrid& grid,
                  const cx::CVector& x0);

OpenLossBreakdown open_total_loss(const qsys::SystemSpec& sys,
                                  const pinn::PinnModel& model,
                                  const pinn::TimeGrid& grid,
                                  const cx::CVector& x0,
                                  const cx::CMatrix& u_targ);

}  // namespace pulsepinn::losses

#endif  // PULSEPINN_LOSSES_HPP
