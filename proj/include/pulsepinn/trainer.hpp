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
#ifndef PULSEPINN_TRAINER_HPP
#define PULSEPINN_TRAINER_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "pulsepinn/artifacts.hpp"
#include "pulsepinn/losses.hpp"

namespace pulsepinn::trainer {

// Standard Adam with bias correction. Parameter groups keep their shapes;
// moments are allocated on first step.
class AdamState {
 public:
  explicit AdamState(double lr, double beta1 = 0.9, double beta2 = 0.999,
                     double epsilon = 1e-8);

  // One optimization step over all groups. Throws NonFiniteGradient when any
  // gradient entry is not finite.
  void step(std::span<std::span<double>> params,
            std::span<const std::span<const double>> grads);

  std::int64_t step_count() const { return step_; }
  double lr() const { return lr_; }

 private:
  double lr_, beta1_, beta2_, epsilon_;
  std::int64_t step_ = 0;
  std::vector<tape::AlignedVec> m_, v_;
};

// Runs the full optimization described by the config and returns the record
// (per-epoch losses, final pulses/operator/populations, final weights).
// Numerical aborts (non-finite loss or gradient, degenerate state) mark the
// record aborted instead of throwing.
artifacts::TrainRecord train(const artifacts::RunConfig& config);

struct SweepGrid {
  artifacts::RunConfig base;
  std::vector<std::string> gates;
  std::vector<double> gammas;  // symmetric gamma_abs = gamma_em
  std::vector<double> omega0s{1.0};
  std::vector<std::string> activations{"sin"};
  std::vector<std::uint64_t> seeds{0};
};

// Default decoherence sweep rates.
std::vector<double> default_gamma_set();

// Cartesian product of the grid lists; runs execute independently on up to
// `workers` threads. Individual failures land in the records as aborted rows.
std::vector<artifacts::TrainRecord> sweep(const SweepGrid& grid, int workers);

}  // namespace pulsepinn::trainer

#endif  // PULSEPINN_TRAINER_HPP
