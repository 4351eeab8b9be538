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
#include "pulsepinn/artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pulsepinn/system.hpp"

namespace pulsepinn::artifacts {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void RunConfig::validate() const {
  if (model != "schrodinger" && model != "lindblad")
    throw ConfigError("model: must be schrodinger or lindblad, got " + model);
  try {
    qsys::gate_target(gate, theta);
  } catch (const UnknownGate& e) {
    throw ConfigError(std::string("gate: ") + e.what());
  }
  if (gamma_abs < 0.0) throw ConfigError("gamma-abs: must be >= 0");
  if (gamma_em < 0.0) throw ConfigError("gamma-em: must be >= 0");
  if (omega0 <= 0.0) throw ConfigError("omega0: must be > 0");
  pinn::activation_from_string(activation);
  pinn::init_from_string(init);
  if (epochs < 0) throw ConfigError("epochs: must be >= 0");
  if (lr <= 0.0) throw ConfigError("lr: must be > 0");
  if (n_steps < 2) throw ConfigError("n-steps: must be >= 2");
  if (t_final <= 0.0) throw ConfigError("t-final: must be > 0");
  if (x0_override) {
    if (x0_override->dim != 4)
      throw ConfigError("x0: must have four complex entries");
    if (std::abs(cx::euclidean_norm(*x0_override) - 1.0) > 1e-8)
      throw ConfigError("x0: must have unit norm");
  }
  for (double w : loss_weights)
    if (w < 0.0) throw ConfigError("loss-weights: must be >= 0");
}

cx::CVector RunConfig::initial_state() const {
  if (x0_override) return *x0_override;
  return qsys::gate_target(gate, theta).default_x0;
}

std::string config_to_json(const RunConfig& c) {
  json j;
  j["model"] = c.model;
  j["gate"] = c.gate;
  j["theta"] = c.theta;
  j["gamma_abs"] = c.gamma_abs;
  j["gamma_em"] = c.gamma_em;
  j["omega0"] = c.omega0;
  j["activation"] = c.activation;
  j["init"] = c.init;
  j["epochs"] = c.epochs;
  j["lr"] = c.lr;
  j["n_steps"] = c.n_steps;
  j["t_final"] = c.t_final;
  j["seed"] = c.seed;
  if (c.x0_override) {
    json x0 = json::array();
    for (int i = 0; i < 4; ++i)
      x0.push_back({c.x0_override->re[i], c.x0_override->im[i]});
    j["x0"] = std::move(x0);
  }
  j["loss_weights"] = c.loss_weights;
  j["out_dir"] = c.out_dir;
  return j.dump(2);
}

RunConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid json: ") + e.what());
  }
  RunConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("model", c.model);
  get("gate", c.gate);
  get("theta", c.theta);
  get("gamma_abs", c.gamma_abs);
  get("gamma_em", c.gamma_em);
  get("omega0", c.omega0);
  get("activation", c.activation);
  get("init", c.init);
  get("epochs", c.epochs);
  get("lr", c.lr);
  get("n_steps", c.n_steps);
  get("t_final", c.t_final);
  get("seed", c.seed);
  get("out_dir", c.out_dir);
  if (j.contains("loss_weights")) {
    const auto lw = j.at("loss_weights").get<std::vector<double>>();
    if (lw.size() != 3) throw ConfigError("loss_weights: expected 3 entries");
    std::copy(lw.begin(), lw.end(), c.loss_weights.begin());
  }
  if (j.contains("x0")) {
    const auto rows = j.at("x0").get<std::vector<std::vector<double>>>();
    if (rows.size() != 4) throw ConfigError("x0: expected 4 complex entries");
    cx::CVector x0(4);
    for (int i = 0; i < 4; ++i) {
      if (rows[i].size() != 2) throw ConfigError("x0: entries are [re, im]");
      x0.re[i] = rows[i][0];
      x0.im[i] = rows[i][1];
    }
    c.x0_override = std::move(x0);
  }
  return c;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MissingArtifact("cannot open for writing: " + path.string());
  out << content;
}

json cmatrix_to_json(const cx::CMatrix& m) {
  json re = json::array(), im = json::array();
  for (int r = 0; r < m.rows; ++r) {
    json rre = json::array(), rim = json::array();
    for (int c = 0; c < m.cols; ++c) {
      rre.push_back(m.re_at(r, c));
      rim.push_back(m.im_at(r, c));
    }
    re.push_back(std::move(rre));
    im.push_back(std::move(rim));
  }
  return json{{"rows", m.rows}, {"cols", m.cols}, {"re", re}, {"im", im}};
}

}  // namespace

void write_run_artifacts(const std::filesystem::path& dir,
                         const TrainRecord& record) {
  std::filesystem::create_directories(dir);
  const bool open_system = record.config.lindblad();

  write_file(dir / "config.json", config_to_json(record.config) + "\n");

  {
    std::ostringstream csv;
    csv << (open_system ? "epoch,l_total,l_model,l_fid,l_trace,fidelity"
                        : "epoch,l_total,l_model,l_fid,fidelity")
        << "\n";
    for (const EpochRecord& e : record.epochs) {
      csv << e.epoch << ',' << format_double(e.l_total) << ','
          << format_double(e.l_model) << ',' << format_double(e.l_fid);
      if (open_system) csv << ',' << format_double(e.l_trace);
      csv << ',' << format_double(e.fidelity) << "\n";
    }
    write_file(dir / "loss_curve.csv", csv.str());
  }

  const double dt = record.config.t_final / record.config.n_steps;
  {
    std::ostringstream csv;
    csv << "t,u1,u2,u3,u4\n";
    for (std::size_t k = 0; k < record.pulses.size(); ++k) {
      csv << format_double(k * dt);
      for (double u : record.pulses[k]) csv << ',' << format_double(u);
      csv << "\n";
    }
    write_file(dir / "controls.csv", csv.str());
  }
  {
    std::ostringstream csv;
    csv << "t,p00,p01,p10,p11\n";
    for (std::size_t k = 0; k < record.populations.size(); ++k) {
      csv << format_double(k * dt);
      for (double p : record.populations[k]) csv << ',' << format_double(p);
      csv << "\n";
    }
    write_file(dir / "populations.csv", csv.str());
  }
  {
    json j;
    j["kind"] = open_system ? "channel" : "unitary";
    j["operator"] = cmatrix_to_json(record.final_operator);
    write_file(dir / "final_operator.json", j.dump(2) + "\n");
  }
  {
    json j;
    j["final_fidelity"] = record.final_fidelity;
    j["wall_clock_s"] = record.wall_clock_s;
    j["status"] = record.aborted ? "aborted" : "ok";
    if (record.aborted) j["abort_reason"] = record.abort_reason;
    j["versions"] = {{"pulsepinn", "1.0.0"},
                     {"format", 1}};
    write_file(dir / "report.json", j.dump(2) + "\n");
  }
  write_file(dir / "weights.json", pinn::weights_to_json(record.model) + "\n");
}

losses::Controls read_controls_csv(const std::filesystem::path& file,
                                   std::vector<double>* times) {
  std::ifstream in(file);
  if (!in) throw MissingArtifact("missing controls file: " + file.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,u1,u2,u3,u4", 0) != 0)
    throw MissingArtifact("controls.csv has an unexpected header");
  losses::Controls controls;
  if (times) times->clear();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, 5> vals{};
    std::stringstream ss(line);
    std::string cell;
    for (int i = 0; i < 5; ++i) {
      if (!std::getline(ss, cell, ','))
        throw MissingArtifact("controls.csv row with missing columns");
      vals[i] = std::stod(cell);
    }
    if (times) times->push_back(vals[0]);
    controls.push_back({vals[1], vals[2], vals[3], vals[4]});
  }
  return controls;
}

RunConfig read_config(const std::filesystem::path& dir) {
  std::ifstream in(dir / "config.json");
  if (!in)
    throw MissingArtifact("missing config.json in " + dir.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

}  // namespace pulsepinn::artifacts
