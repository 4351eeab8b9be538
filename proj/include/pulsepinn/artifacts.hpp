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
#ifndef PULSEPINN_ARTIFACTS_HPP
#define PULSEPINN_ARTIFACTS_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pulsepinn/cmat.hpp"
#include "pulsepinn/losses.hpp"
#include "pulsepinn/pinn.hpp"

namespace pulsepinn::artifacts {

struct RunConfig {
  std::string model = "schrodinger";  // "schrodinger" | "lindblad"
  std::string gate = "cnot";
  double theta = M_PI;
  double gamma_abs = 0.0;
  double gamma_em = 0.0;
  double omega0 = 1.0;
  std::string activation = "sin";
  std::string init = "custom";
  int epochs = 5000;
  double lr = 1e-6;
  int n_steps = 200;
  double t_final = 10.0;
  std::uint64_t seed = 0;
  std::optional<cx::CVector> x0_override;
  std::array<double, 3> loss_weights = {1.0, 1.0, 1.0};
  std::string out_dir;

  void validate() const;  // throws ConfigError with the offending field name
  bool lindblad() const { return model == "lindblad"; }
  cx::CVector initial_state() const;  // override or the gate default
};

std::string config_to_json(const RunConfig& c);
RunConfig config_from_json(const std::string& text);

// Per-epoch loss records plus everything the run leaves on disk.
struct EpochRecord {
  int epoch = 0;
  double l_total = 0, l_model = 0, l_fid = 0, l_trace = 0, fidelity = 0;
};

struct TrainRecord {
  RunConfig config;
  std::vector<EpochRecord> epochs;
  losses::Controls pulses;                        // u_j(t_k), final weights
  std::vector<std::array<double, 4>> populations; // |x_i(t_k)|^2, final weights
  cx::CMatrix final_operator;                     // U (closed) or E_tot (open)
  double final_fidelity = 0.0;
  double wall_clock_s = 0.0;
  pinn::PinnModel model;
  bool aborted = false;
  std::string abort_reason;
};

// Writers for the run directory layout: config.json, loss_curve.csv,
// controls.csv, populations.csv, final_operator.json, report.json,
// weights.json.
void write_run_artifacts(const std::filesystem::path& dir,
                         const TrainRecord& record);

losses::Controls read_controls_csv(const std::filesystem::path& file,
                                   std::vector<double>* times = nullptr);
RunConfig read_config(const std::filesystem::path& dir);

// CSV cells are written with round-trip precision ("%.17g").
std::string format_double(double v);

}  // namespace pulsepinn::artifacts

#endif  // PULSEPINN_ARTIFACTS_HPP
