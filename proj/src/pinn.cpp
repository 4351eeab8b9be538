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
#include "pulsepinn/pinn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <json.hpp>

namespace pulsepinn::pinn {

using tape::DiffGraph;
using tape::kNoNode;
using tape::NodeId;

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kSin: return "sin";
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
  }
  return "?";
}

std::string to_string(InitScheme s) {
  return s == InitScheme::kCustom ? "custom" : "default";
}

Activation activation_from_string(const std::string& s) {
  if (s == "sin") return Activation::kSin;
  if (s == "tanh") return Activation::kTanh;
  if (s == "relu") return Activation::kRelu;
  throw ConfigError("unknown activation: " + s);
}

InitScheme init_from_string(const std::string& s) {
  if (s == "custom") return InitScheme::kCustom;
  if (s == "default") return InitScheme::kDefault;
  throw ConfigError("unknown init scheme: " + s);
}

std::array<int, PinnModel::kNumLinear + 1> PinnModel::layer_dims() {
  return {1, kWidth, kWidth, kWidth, kWidth, kWidth, kOutputs};
}

std::size_t PinnModel::parameter_count() const {
  std::size_t n = 0;
  for (int l = 0; l < kNumLinear; ++l) n += weights[l].size() + biases[l].size();
  return n;
}

namespace {

// mt19937_64 with an explicit uniform mapping so draws are identical on any
// platform
double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

}  // namespace

void init_weights(PinnModel& model) {
  const auto dims = PinnModel::layer_dims();
  std::mt19937_64 rng(model.seed);
  for (int l = 0; l < PinnModel::kNumLinear; ++l) {
    const int n_in = dims[l];
    const int n_out = dims[l + 1];
    model.weights[l].assign(static_cast<std::size_t>(n_out) * n_in, 0.0);
    model.biases[l].assign(n_out, 0.0);
    double bound;
    if (model.init == InitScheme::kCustom) {
      bound = l == 0 ? 1.0 / n_in : std::sqrt(6.0 / n_in) / model.omega0;
    } else {
      bound = 1.0 / std::sqrt(static_cast<double>(n_in));
    }
    for (auto& w : model.weights[l]) w = uniform(rng, -bound, bound);
    if (model.init == InitScheme::kDefault)
      for (auto& b : model.biases[l]) b = uniform(rng, -bound, bound);
  }
}

std::vector<double> TimeGrid::points() const {
  std::vector<double> t(n_steps);
  const double h = dt();
  for (int k = 0; k < n_steps; ++k) t[k] = k * h;
  return t;
}

GridGraph build_grid_graph(DiffGraph& g, const PinnModel& model,
                           const TimeGrid& grid, const cx::CVector* x0,
                           bool with_tangent) {
  if (grid.n_steps < 1) throw ConfigError("grid needs at least one point");
  const auto dims = PinnModel::layer_dims();
  const int n = grid.n_steps;
  const int w = PinnModel::kWidth;

  GridGraph gg;
  gg.n = n;
  gg.t_input = g.input_vec(grid.points());

  NodeId h = gg.t_input;  // current layer value, (dims[l] x n)
  for (int l = 0; l < PinnModel::kNumLinear; ++l) {
    if (model.weights[l].size() !=
        static_cast<std::size_t>(dims[l + 1]) * dims[l])
      throw ShapeMismatch("model weights not initialized");
    const NodeId wn = g.input_vec(model.weights[l]);
    const NodeId bn = g.input_vec(model.biases[l]);
    gg.weight_nodes.push_back(wn);
    gg.bias_nodes.push_back(bn);
    const NodeId z = g.gemm(wn, h, bn, dims[l + 1], dims[l], n);
    gg.prelinear.push_back(z);
    if (l == PinnModel::kNumLinear - 1) {
      h = z;  // linear output
      break;
    }
    NodeId act_arg = z;
    if (model.activation == Activation::kSin && l > 0 && model.omega0 != 1.0)
      act_arg = g.mul(g.constant(model.omega0), z);
    NodeId a;
    switch (model.activation) {
      case Activation::kSin: a = g.sin_(act_arg); break;
      case Activation::kTanh: a = g.tanh_(act_arg); break;
      case Activation::kRelu: a = g.relu(act_arg); break;
    }
    gg.postact.push_back(a);
    h = a;
  }
  for (int i = 0; i < PinnModel::kOutputs; ++i)
    gg.outputs[i] = g.slice(h, i * n, n);
  for (int j = 0; j < 4; ++j) gg.u[j] = gg.outputs[8 + j];

  if (x0 != nullptr) {
    if (x0->dim != 4) throw ShapeMismatch("x0 must have dimension 4");
    // envelope (1 - e^-t) vanishes at t = 0 so x(0) = x0 exactly
    const NodeId env = g.sub(g.constant(1.0), g.exp_(g.neg(gg.t_input)));
    std::array<NodeId, 4> num_re, num_im;
    std::vector<std::pair<NodeId, NodeId>> sq;
    for (int i = 0; i < 4; ++i) {
      num_re[i] = g.add(g.constant(x0->re[i]), g.mul(env, gg.outputs[i]));
      num_im[i] = g.add(g.constant(x0->im[i]), g.mul(env, gg.outputs[4 + i]));
      sq.emplace_back(num_re[i], num_re[i]);
      sq.emplace_back(num_im[i], num_im[i]);
    }
    gg.norm2 = g.fma_chain(sq);
    const NodeId nrm = g.sqrt_(gg.norm2);
    for (int i = 0; i < 4; ++i) {
      gg.x_re[i] = g.div(num_re[i], nrm);
      gg.x_im[i] = g.div(num_im[i], nrm);
    }
    gg.has_ansatz = true;
  }

  if (with_tangent) {
    const auto tmap = g.record_tangent({gg.t_input, 1.0});
    if (gg.has_ansatz) {
      for (int i = 0; i < 4; ++i) {
        gg.xdot_re[i] = tmap[gg.x_re[i]];
        gg.xdot_im[i] = tmap[gg.x_im[i]];
        if (gg.xdot_re[i] == kNoNode || gg.xdot_im[i] == kNoNode)
          throw ShapeMismatch("ansatz tangent missing");
      }
    }
  }
  return gg;
}

void write_weights_to_graph(const PinnModel& model, DiffGraph& g,
                            const GridGraph& gg) {
  for (int l = 0; l < PinnModel::kNumLinear; ++l) {
    g.set_input(gg.weight_nodes[l], model.weights[l]);
    g.set_input(gg.bias_nodes[l], model.biases[l]);
  }
}

void read_weights_from_graph(PinnModel& model, const DiffGraph& g,
                             const GridGraph& gg) {
  for (int l = 0; l < PinnModel::kNumLinear; ++l) {
    const auto wv = g.value(gg.weight_nodes[l]);
    const auto bv = g.value(gg.bias_nodes[l]);
    model.weights[l].assign(wv.begin(), wv.end());
    model.biases[l].assign(bv.begin(), bv.end());
  }
}

namespace {

GridGraph single_point(DiffGraph& g, const PinnModel& model, double t,
                       const cx::CVector* x0, bool with_tangent) {
  TimeGrid grid;
  grid.n_steps = 1;
  grid.t_final = t;  // single point at t (t_0 = 0*dt = 0... see below)
  GridGraph gg = build_grid_graph(g, model, grid, x0, with_tangent);
  // build_grid_graph places the single point at 0; move it to t
  const double tv[1] = {t};
  g.set_input(gg.t_input, tv);
  g.refresh();
  return gg;
}

}  // namespace

ForwardResult forward(const PinnModel& model, double t) {
  DiffGraph g;
  const GridGraph gg = single_point(g, model, t, nullptr, false);
  ForwardResult r;
  r.n_x = cx::CVector(4);
  for (int i = 0; i < 4; ++i) {
    r.n_x.re[i] = g.value_scalar(gg.outputs[i]);
    r.n_x.im[i] = g.value_scalar(gg.outputs[4 + i]);
    r.n_u[i] = g.value_scalar(gg.outputs[8 + i]);
  }
  return r;
}

cx::CVector state(const PinnModel& model, double t, const cx::CVector& x0) {
  const ForwardResult f = forward(model, t);
  const double env = 1.0 - std::exp(-t);
  cx::CVector num = cx::vadd(x0, cx::vscale(f.n_x, env));
  const double nrm = cx::euclidean_norm(num);
  if (nrm < 1e-12)
    throw DegenerateState("state ansatz norm below 1e-12 at t=" +
                          std::to_string(t));
  return cx::vscale(num, 1.0 / nrm);
}

cx::CVector state_time_derivative(const PinnModel& model, double t,
                                  const cx::CVector& x0) {
  {
    // same degeneracy guard as state()
    const ForwardResult f = forward(model, t);
    const double env = 1.0 - std::exp(-t);
    if (cx::euclidean_norm(cx::vadd(x0, cx::vscale(f.n_x, env))) < 1e-12)
      throw DegenerateState("state ansatz norm below 1e-12 at t=" +
                            std::to_string(t));
  }
  DiffGraph g;
  const GridGraph gg = single_point(g, model, t, &x0, true);
  cx::CVector xdot(4);
  for (int i = 0; i < 4; ++i) {
    xdot.re[i] = g.value_scalar(gg.xdot_re[i]);
    xdot.im[i] = g.value_scalar(gg.xdot_im[i]);
  }
  return xdot;
}

namespace {

constexpr int kHistBins = 64;

void fill_hist(std::span<const double> data, std::vector<double>& hist,
               double& lo, double& hi) {
  hist.assign(kHistBins, 0.0);
  if (data.empty()) return;
  lo = *std::min_element(data.begin(), data.end());
  hi = *std::max_element(data.begin(), data.end());
  if (hi <= lo) {  // point mass
    hi = lo + 1.0;
    hist[0] = static_cast<double>(data.size());
    return;
  }
  const double scale = kHistBins / (hi - lo);
  for (double v : data) {
    int b = static_cast<int>((v - lo) * scale);
    b = std::clamp(b, 0, kHistBins - 1);
    hist[b] += 1.0;
  }
}

double stddev(std::span<const double> data) {
  if (data.empty()) return 0.0;
  const double mean =
      std::accumulate(data.begin(), data.end(), 0.0) / data.size();
  double acc = 0.0;
  for (double v : data) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / data.size());
}

}  // namespace

Diagnostics diagnostics(const PinnModel& model, const TimeGrid& grid) {
  DiffGraph g;
  const GridGraph gg = build_grid_graph(g, model, grid, nullptr, false);

  // probe loss: sum of all outputs
  NodeId probe = g.sum(gg.prelinear.back());
  g.backward(probe);

  const auto dims = PinnModel::layer_dims();
  const int n = grid.n_steps;
  Diagnostics diag;
  for (int l = 0; l < PinnModel::kNumLinear; ++l) {
    LayerDiagnostics ld;
    const auto z = g.value(gg.prelinear[l]);
    fill_hist(z, ld.prelin_hist, ld.prelin_lo, ld.prelin_hi);
    const bool activated = l < PinnModel::kNumLinear - 1;
    const auto act = activated ? g.value(gg.postact[l]) : z;
    fill_hist(act, ld.postact_hist, ld.postact_lo, ld.postact_hi);
    const auto adj = g.adjoint(gg.prelinear[l]);
    fill_hist(adj, ld.grad_hist, ld.grad_lo, ld.grad_hi);
    ld.grad_std = stddev(adj);

    // |DFT| of each neuron's activation sequence along the grid, averaged
    // over neurons
    const int width = dims[l + 1];
    ld.spectrum.assign(n, 0.0);
    for (int f = 0; f < n; ++f) {
      const double wf = -2.0 * M_PI * f / n;
      double accmag = 0.0;
      for (int row = 0; row < width; ++row) {
        double re = 0.0, im = 0.0;
        const double* series = act.data() + static_cast<std::size_t>(row) * n;
        for (int k = 0; k < n; ++k) {
          re += series[k] * std::cos(wf * k);
          im += series[k] * std::sin(wf * k);
        }
        accmag += std::hypot(re, im);
      }
      ld.spectrum[f] = accmag / width;
    }
    diag.layers.push_back(std::move(ld));
  }
  return diag;
}

std::string weights_to_json(const PinnModel& model) {
  nlohmann::json j;
  j["activation"] = to_string(model.activation);
  j["omega0"] = model.omega0;
  j["init"] = to_string(model.init);
  j["seed"] = model.seed;
  const auto dims = PinnModel::layer_dims();
  nlohmann::json layers = nlohmann::json::array();
  for (int l = 0; l < PinnModel::kNumLinear; ++l) {
    nlohmann::json layer;
    layer["in"] = dims[l];
    layer["out"] = dims[l + 1];
    layer["weights"] = model.weights[l];  // row-major
    layer["bias"] = model.biases[l];
    layers.push_back(std::move(layer));
  }
  j["layers"] = std::move(layers);
  return j.dump();
}

PinnModel weights_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  PinnModel m;
  m.activation = activation_from_string(j.at("activation").get<std::string>());
  m.omega0 = j.at("omega0").get<double>();
  m.init = init_from_string(j.at("init").get<std::string>());
  m.seed = j.at("seed").get<std::uint64_t>();
  const auto dims = PinnModel::layer_dims();
  const auto& layers = j.at("layers");
  if (layers.size() != PinnModel::kNumLinear)
    throw ConfigError("weights json: wrong layer count");
  for (int l = 0; l < PinnModel::kNumLinear; ++l) {
    const auto& layer = layers[l];
    if (layer.at("in").get<int>() != dims[l] ||
        layer.at("out").get<int>() != dims[l + 1])
      throw ConfigError("weights json: layer dims mismatch");
    m.weights[l] = layer.at("weights").get<std::vector<double>>();
    m.biases[l] = layer.at("bias").get<std::vector<double>>();
    if (m.weights[l].size() != static_cast<std::size_t>(dims[l]) * dims[l + 1] ||
        m.biases[l].size() != static_cast<std::size_t>(dims[l + 1]))
      throw ConfigError("weights json: array sizes mismatch");
  }
  return m;
}

}  // namespace pulsepinn::pinn
