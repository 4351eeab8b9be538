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
#ifndef PULSEPINN_PINN_HPP
#define PULSEPINN_PINN_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pulsepinn/cmat.hpp"
#include "pulsepinn/tape.hpp"

namespace pulsepinn::pinn {

enum class Activation { kSin, kTanh, kRelu };
enum class InitScheme { kCustom, kDefault };

std::string to_string(Activation a);
std::string to_string(InitScheme s);
Activation activation_from_string(const std::string& s);
InitScheme init_from_string(const std::string& s);

// Input map 1->200, four hidden 200->200, linear output 200->12. The first
// eight outputs are the state (4 real + 4 imaginary), the last four are the
// control amplitudes.
struct PinnModel {
  static constexpr int kWidth = 200;
  static constexpr int kOutputs = 12;
  static constexpr int kNumLinear = 6;

  Activation activation = Activation::kSin;
  double omega0 = 1.0;
  InitScheme init = InitScheme::kCustom;
  std::uint64_t seed = 0;

  // weights[l] row-major (out x in), biases[l] length out
  std::array<std::vector<double>, kNumLinear> weights;
  std::array<std::vector<double>, kNumLinear> biases;

  static std::array<int, kNumLinear + 1> layer_dims();
  std::size_t parameter_count() const;
};

// Samples weights per the model's scheme. Custom: input layer
// U(-1/n_in, 1/n_in) with n_in=1, deeper layers U(+-sqrt(6/n_in)/omega0),
// zero biases. Default: conventional fan-in rule U(+-1/sqrt(n_in)) for
// weights and biases. Deterministic in model.seed.
void init_weights(PinnModel& model);

struct TimeGrid {
  int n_steps = 200;
  double t_final = 10.0;

  double dt() const { return t_final / n_steps; }
  std::vector<double> points() const;  // t_k = k*dt, k = 0..n_steps-1
};

// The recorded network (and optionally the normalized state ansatz and its
// exact time derivative) over a whole time grid; one tape evaluation covers
// every grid point. Node ids index into the owning DiffGraph.
struct GridGraph {
  int n = 0;
  tape::NodeId t_input = tape::kNoNode;
  std::vector<tape::NodeId> weight_nodes, bias_nodes;
  std::vector<tape::NodeId> prelinear;  // per linear layer, len width*n
  std::vector<tape::NodeId> postact;    // per activated layer, len width*n
  std::array<tape::NodeId, PinnModel::kOutputs> outputs{};  // rows, len n
  std::array<tape::NodeId, 4> u{};  // control rows (outputs 8..11)
  bool has_ansatz = false;
  std::array<tape::NodeId, 4> x_re{}, x_im{};
  std::array<tape::NodeId, 4> xdot_re{}, xdot_im{};
  tape::NodeId norm2 = tape::kNoNode;  // squared pre-normalization norm, len n
};

// Builds the network over the grid. When x0 != nullptr also builds the
// normalized ansatz x(t) = (x0 + (1-e^-t) N_x) / ||..|| and, when
// with_tangent, materializes d/dt of everything built so far as graph
// primitives (so weight gradients flow through the time derivative).
GridGraph build_grid_graph(tape::DiffGraph& g, const PinnModel& model,
                           const TimeGrid& grid, const cx::CVector* x0,
                           bool with_tangent);

void write_weights_to_graph(const PinnModel& model, tape::DiffGraph& g,
                            const GridGraph& gg);
void read_weights_from_graph(PinnModel& model, const tape::DiffGraph& g,
                             const GridGraph& gg);

struct ForwardResult {
  cx::CVector n_x;             // complex 4-vector
  std::array<double, 4> n_u;   // control amplitudes
};

ForwardResult forward(const PinnModel& model, double t);
cx::CVector state(const PinnModel& model, double t, const cx::CVector& x0);
cx::CVector state_time_derivative(const PinnModel& model, double t,
                                  const cx::CVector& x0);

struct LayerDiagnostics {
  std::vector<double> prelin_hist, postact_hist, grad_hist;  // 64 bins
  double prelin_lo = 0, prelin_hi = 0;
  double postact_lo = 0, postact_hi = 0;
  double grad_lo = 0, grad_hi = 0;
  double grad_std = 0;
  std::vector<double> spectrum;  // |DFT| over the grid, averaged over neurons
};

struct Diagnostics {
  std::vector<LayerDiagnostics> layers;  // one per linear layer
};

// Activation/gradient distributions and activation spectra of an (un)trained
// network over the grid. Gradient histograms use a probe loss equal to the
// sum of all outputs.
Diagnostics diagnostics(const PinnModel& model, const TimeGrid& grid);

std::string weights_to_json(const PinnModel& model);
PinnModel weights_from_json(const std::string& text);

}  // namespace pulsepinn::pinn

#endif  // PULSEPINN_PINN_HPP
