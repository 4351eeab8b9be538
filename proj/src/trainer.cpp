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
#include "pulsepinn/trainer.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace pulsepinn::trainer {

using artifacts::EpochRecord;
using artifacts::RunConfig;
using artifacts::TrainRecord;

AdamState::AdamState(double lr, double beta1, double beta2, double epsilon)
    : lr_(lr), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {
  if (lr <= 0.0) throw ConfigError("adam: lr must be positive");
}

void AdamState::step(std::span<std::span<double>> params,
                     std::span<const std::span<const double>> grads) {
  if (params.size() != grads.size())
    throw ShapeMismatch("adam: parameter/gradient group mismatch");
  if (m_.empty()) {
    m_.resize(params.size());
    v_.resize(params.size());
    for (std::size_t gi = 0; gi < params.size(); ++gi) {
      m_[gi].assign(params[gi].size(), 0.0);
      v_[gi].assign(params[gi].size(), 0.0);
    }
  }
  ++step_;
  const double corr1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double corr2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  for (std::size_t gi = 0; gi < params.size(); ++gi) {
    auto p = params[gi];
    const auto g = grads[gi];
    if (p.size() != g.size() || p.size() != m_[gi].size())
      throw ShapeMismatch("adam: group size mismatch");
    double* m = m_[gi].data();
    double* v = v_[gi].data();
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double gr = g[i];
      if (!std::isfinite(gr))
        throw NonFiniteGradient("non-finite gradient in group " +
                                std::to_string(gi) + " at index " +
                                std::to_string(i));
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * gr;
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * gr * gr;
      const double mhat = m[i] / corr1;
      const double vhat = v[i] / corr2;
      p[i] -= lr_ * mhat / (std::sqrt(vhat) + epsilon_);
    }
  }
}

TrainRecord train(const RunConfig& config) {
  config.validate();
  TrainRecord rec;
  rec.config = config;
  const auto t_start = std::chrono::steady_clock::now();

  const qsys::SystemSpec sys =
      qsys::build_system(config.gamma_abs, config.gamma_em);
  const qsys::GateTarget gate = qsys::gate_target(config.gate, config.theta);
  const cx::CVector x0 = config.initial_state();

  pinn::PinnModel model;
  model.activation = pinn::activation_from_string(config.activation);
  model.omega0 = config.omega0;
  model.init = pinn::init_from_string(config.init);
  model.seed = config.seed;
  pinn::init_weights(model);

  pinn::TimeGrid grid;
  grid.n_steps = config.n_steps;
  grid.t_final = config.t_final;

  const auto kind = config.lindblad() ? losses::TrainingGraph::Kind::kOpen
                                      : losses::TrainingGraph::Kind::kClosed;

  auto finish = [&](losses::TrainingGraph* tg) {
    if (tg != nullptr) {
      rec.pulses = tg->pulses();
      const auto xs = tg->states();
      rec.populations.resize(xs.size());
      for (std::size_t k = 0; k < xs.size(); ++k)
        for (int i = 0; i < 4; ++i)
          rec.populations[k][i] =
              xs[k].re[i] * xs[k].re[i] + xs[k].im[i] * xs[k].im[i];
      rec.final_operator = tg->final_operator();
      // report through the plain-mode fidelity path, which validates the
      // channel accumulator (imaginary part, [0,1] range) and cross-checks
      // the recorded value
      rec.final_fidelity =
          config.lindblad()
              ? losses::open_process_fidelity(rec.final_operator, gate.matrix)
              : losses::unitary_process_fidelity(gate.matrix,
                                                 rec.final_operator);
      tg->store_model_weights(model);
    }
    rec.model = model;
    rec.wall_clock_s = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t_start)
                           .count();
  };

  try {
    losses::TrainingGraph tg(kind, sys, model, grid, x0, gate.matrix,
                             config.loss_weights);
    AdamState adam(config.lr);

    const int layers = tg.num_layers();
    std::vector<std::span<double>> params(2 * layers);
    std::vector<std::span<const double>> grads(2 * layers);

    if (config.epochs == 0) {
      const auto b = tg.breakdown();
      rec.epochs.push_back(
          {0, b.l_total, b.l_model, b.l_fid, b.l_trace, b.fidelity});
    }
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
      const auto b = tg.breakdown();
      rec.epochs.push_back(
          {epoch, b.l_total, b.l_model, b.l_fid, b.l_trace, b.fidelity});
      tg.backward();
      for (int l = 0; l < layers; ++l) {
        params[2 * l] = tg.weight_values(l);
        params[2 * l + 1] = tg.bias_values(l);
        grads[2 * l] = tg.weight_grads(l);
        grads[2 * l + 1] = tg.bias_grads(l);
      }
      adam.step(params, grads);
      tg.refresh();
    }
    finish(&tg);
  } catch (const NonFiniteGradient& e) {
    rec.aborted = true;
    rec.abort_reason = e.what();
    finish(nullptr);
  } catch (const NonFiniteValue& e) {
    rec.aborted = true;
    rec.abort_reason = e.what();
    finish(nullptr);
  } catch (const DegenerateState& e) {
    rec.aborted = true;
    rec.abort_reason = e.what();
    finish(nullptr);
  } catch (const NonPhysicalFidelity& e) {
    rec.aborted = true;
    rec.abort_reason = e.what();
    finish(nullptr);
  }
  return rec;
}

std::vector<double> default_gamma_set() {
  return {0.0, 1e-5, 1e-3, 1e-2, 1e-1};
}

std::vector<TrainRecord> sweep(const SweepGrid& grid, int workers) {
  std::vector<RunConfig> jobs;
  for (const std::string& gate : grid.gates)
    for (double gamma : grid.gammas)
      for (double omega0 : grid.omega0s)
        for (const std::string& act : grid.activations)
          for (std::uint64_t seed : grid.seeds) {
            RunConfig c = grid.base;
            c.gate = gate;
            c.gamma_abs = gamma;
            c.gamma_em = gamma;
            c.omega0 = omega0;
            c.activation = act;
            c.seed = seed;
            jobs.push_back(std::move(c));
          }
  if (jobs.empty()) throw ConfigError("sweep: empty grid");

  std::vector<TrainRecord> records(jobs.size());
  const int n_workers = std::max(
      1, std::min<int>(workers, static_cast<int>(jobs.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        records[i] = train(jobs[i]);
      } catch (const std::exception& e) {
        records[i].config = jobs[i];
        records[i].aborted = true;
        records[i].abort_reason = e.what();
      }
    }
  };
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return records;
}

}  // namespace pulsepinn::trainer
