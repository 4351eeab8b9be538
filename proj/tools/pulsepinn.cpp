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
#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "pulsepinn/trainer.hpp"
#include "pulsepinn/validator.hpp"

namespace fs = std::filesystem;
using namespace pulsepinn;
using artifacts::RunConfig;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CliConfig {
  RunConfig run;
  std::string config_file;
  std::string x0_flag;
  std::vector<double> loss_weights_flag;
};

void add_run_options(CLI::App* cmd, CliConfig& cc) {
  cmd->add_option("--config", cc.config_file, "JSON config file (flags override)");
  cmd->add_option("--model", cc.run.model, "schrodinger | lindblad");
  cmd->add_option("--gate", cc.run.gate, "cnot | swap | qft2 | hh | crz | cp");
  cmd->add_option("--theta", cc.run.theta, "gate angle for crz/cp (radians)");
  cmd->add_option("--gamma-abs", cc.run.gamma_abs, "absorption rate");
  cmd->add_option("--gamma-em", cc.run.gamma_em, "emission rate");
  cmd->add_option("--omega0", cc.run.omega0, "sin activation frequency scale");
  cmd->add_option("--activation", cc.run.activation, "sin | tanh | relu");
  cmd->add_option("--init", cc.run.init, "custom | default");
  cmd->add_option("--epochs", cc.run.epochs, "training epochs");
  cmd->add_option("--lr", cc.run.lr, "Adam learning rate");
  cmd->add_option("--n-steps", cc.run.n_steps, "time grid points");
  cmd->add_option("--t-final", cc.run.t_final, "final time");
  cmd->add_option("--seed", cc.run.seed, "RNG seed");
  cmd->add_option("--x0", cc.x0_flag,
                  "initial state as re,im,re,im,re,im,re,im");
  cmd->add_option("--loss-weights", cc.loss_weights_flag,
                  "fidelity,model,trace loss weights")
      ->expected(3);
  cmd->add_option("--out-dir", cc.run.out_dir, "run output directory");
}

RunConfig resolve_config(const CliConfig& cc, const CLI::App* cmd) {
  RunConfig c;
  if (!cc.config_file.empty()) {
    std::ifstream in(cc.config_file);
    if (!in) throw ConfigError("config: cannot open " + cc.config_file);
    std::stringstream ss;
    ss << in.rdbuf();
    c = artifacts::config_from_json(ss.str());
  }
  auto given = [&](const char* name) { return cmd->count(name) > 0; };
  if (given("--model")) c.model = cc.run.model;
  if (given("--gate")) c.gate = cc.run.gate;
  if (given("--theta")) c.theta = cc.run.theta;
  if (given("--gamma-abs")) c.gamma_abs = cc.run.gamma_abs;
  if (given("--gamma-em")) c.gamma_em = cc.run.gamma_em;
  if (given("--omega0")) c.omega0 = cc.run.omega0;
  if (given("--activation")) c.activation = cc.run.activation;
  if (given("--init")) c.init = cc.run.init;
  if (given("--epochs")) c.epochs = cc.run.epochs;
  if (given("--lr")) c.lr = cc.run.lr;
  if (given("--n-steps")) c.n_steps = cc.run.n_steps;
  if (given("--t-final")) c.t_final = cc.run.t_final;
  if (given("--seed")) c.seed = cc.run.seed;
  if (given("--out-dir")) c.out_dir = cc.run.out_dir;
  if (given("--loss-weights")) {
    for (int i = 0; i < 3; ++i) c.loss_weights[i] = cc.loss_weights_flag[i];
  }
  if (given("--x0")) {
    std::vector<double> vals;
    std::stringstream ss(cc.x0_flag);
    std::string cell;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() != 8)
      throw ConfigError("x0: expected 8 comma-separated reals (re,im pairs)");
    cx::CVector x0(4);
    for (int i = 0; i < 4; ++i) {
      x0.re[i] = vals[2 * i];
      x0.im[i] = vals[2 * i + 1];
    }
    c.x0_override = std::move(x0);
  }
  if (const char* env_seed = std::getenv("PULSEPINN_SEED")) {
    c.seed = std::stoull(env_seed);
  }
  return c;
}

int cmd_train(const CliConfig& cc, const CLI::App* cmd) {
  RunConfig c = resolve_config(cc, cmd);
  if (c.out_dir.empty()) throw ConfigError("out-dir: required for train");
  c.validate();
  const auto rec = trainer::train(c);
  artifacts::write_run_artifacts(c.out_dir, rec);
  if (rec.aborted) {
    std::cerr << "training aborted: " << rec.abort_reason << "\n";
    return kExitNumerical;
  }
  std::cout << "final fidelity " << artifacts::format_double(rec.final_fidelity)
            << " after " << rec.epochs.size() << " epochs ("
            << artifacts::format_double(rec.wall_clock_s) << " s) -> "
            << c.out_dir << "\n";
  return kExitOk;
}

double state_fidelity_vs_target(const RunConfig& c,
                                const validator::EvolutionResult& res) {
  const auto gate = qsys::gate_target(c.gate, c.theta);
  const cx::CVector target = cx::matvec(gate.matrix, c.initial_state());
  if (!res.states.empty())
    return std::norm(cx::inner(target, res.states.back()));
  // <psi|rho|psi>
  const cx::CMatrix& rho = res.densities.back();
  const cx::CVector rp = cx::matvec(rho, target);
  return cx::inner(target, rp).real();
}

int cmd_validate(const std::string& run_dir, const std::string& against,
                 int substeps) {
  const RunConfig c = artifacts::read_config(run_dir);
  const fs::path dir(run_dir);
  if (!fs::exists(dir / "controls.csv"))
    throw MissingArtifact("controls.csv not found in " + run_dir);
  const auto controls = artifacts::read_controls_csv(dir / "controls.csv");
  pinn::TimeGrid grid;
  grid.n_steps = static_cast<int>(controls.size());
  grid.t_final = c.t_final;
  const validator::PulseSchedule sched(controls, grid);
  const qsys::SystemSpec sys = qsys::build_system(c.gamma_abs, c.gamma_em);
  const cx::CVector x0 = c.initial_state();

  validator::EvolutionResult res;
  if (c.lindblad()) {
    const auto collapse = qsys::build_collapse_ops(c.gamma_abs, c.gamma_em);
    res = validator::rk4_lindblad(sys, sched, cx::outer(x0, x0), collapse,
                                  substeps);
  } else {
    res = validator::rk4_schrodinger(sys, sched, x0, substeps);
  }

  const fs::path vdir = dir / "validation";
  fs::create_directories(vdir);
  {
    std::ofstream csv(vdir / "populations.csv");
    csv << "t,p00,p01,p10,p11\n";
    for (std::size_t k = 0; k < res.times.size(); ++k) {
      csv << artifacts::format_double(res.times[k]);
      for (double p : res.populations[k])
        csv << ',' << artifacts::format_double(p);
      csv << "\n";
    }
  }
  nlohmann::json rep;
  rep["state_fidelity"] = state_fidelity_vs_target(c, res);
  rep["max_norm_drift"] = res.max_norm_drift;
  rep["max_trace_dev"] = res.max_trace_dev;
  rep["min_eigenvalue"] = res.min_eigenvalue;
  rep["max_resym"] = res.max_resym;
  rep["final_populations"] = res.populations.back();

  if (!against.empty()) {
    const RunConfig c2 = artifacts::read_config(against);
    const auto controls2 =
        artifacts::read_controls_csv(fs::path(against) / "controls.csv");
    pinn::TimeGrid grid2;
    grid2.n_steps = static_cast<int>(controls2.size());
    grid2.t_final = c2.t_final;
    const validator::PulseSchedule sched2(controls2, grid2);
    rep["crosscheck_fidelity"] =
        validator::crosscheck(sys, sched, sched2, x0, substeps);
    rep["crosscheck_against"] = against;
  }
  std::ofstream out(vdir / "report.json");
  out << rep.dump(2) << "\n";
  std::cout << "state fidelity "
            << artifacts::format_double(rep["state_fidelity"].get<double>());
  if (rep.contains("crosscheck_fidelity"))
    std::cout << ", crosscheck "
              << artifacts::format_double(
                     rep["crosscheck_fidelity"].get<double>());
  std::cout << " -> " << (vdir / "report.json").string() << "\n";
  return kExitOk;
}

int cmd_sweep(const std::string& sweep_file, int workers_flag) {
  std::ifstream in(sweep_file);
  if (!in) throw ConfigError("sweep: cannot open " + sweep_file);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("sweep: invalid json: ") + e.what());
  }

  trainer::SweepGrid grid;
  if (j.contains("base"))
    grid.base = artifacts::config_from_json(j.at("base").dump());
  if (j.contains("gates"))
    grid.gates = j.at("gates").get<std::vector<std::string>>();
  if (grid.gates.empty()) grid.gates = {grid.base.gate};
  grid.gammas = j.contains("gammas")
                    ? j.at("gammas").get<std::vector<double>>()
                    : trainer::default_gamma_set();
  if (j.contains("omega0s"))
    grid.omega0s = j.at("omega0s").get<std::vector<double>>();
  if (j.contains("activations"))
    grid.activations = j.at("activations").get<std::vector<std::string>>();
  if (j.contains("seeds"))
    grid.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();

  std::string out_dir = j.value("out_dir", std::string("sweep_out"));
  int workers = workers_flag > 0
                    ? workers_flag
                    : j.value("workers",
                              static_cast<int>(std::max(
                                  1u, std::thread::hardware_concurrency())));

  const auto records = trainer::sweep(grid, workers);

  fs::create_directories(out_dir);
  std::ofstream summary(fs::path(out_dir) / "summary.csv");
  summary << "gate,gamma,omega0,activation,seed,final_fidelity,wall_clock_s,"
             "status\n";
  int failures = 0;
  for (const auto& rec : records) {
    std::ostringstream name;
    name << "run_" << rec.config.gate << "_g"
         << artifacts::format_double(rec.config.gamma_em) << "_w"
         << artifacts::format_double(rec.config.omega0) << "_"
         << rec.config.activation << "_s" << rec.config.seed;
    auto run_cfg = rec.config;
    run_cfg.out_dir = (fs::path(out_dir) / name.str()).string();
    auto rec_out = rec;
    rec_out.config = run_cfg;
    artifacts::write_run_artifacts(run_cfg.out_dir, rec_out);
    summary << rec.config.gate << ','
            << artifacts::format_double(rec.config.gamma_em) << ','
            << artifacts::format_double(rec.config.omega0) << ','
            << rec.config.activation << ',' << rec.config.seed << ','
            << artifacts::format_double(rec.final_fidelity) << ','
            << artifacts::format_double(rec.wall_clock_s) << ','
            << (rec.aborted ? "aborted" : "ok") << "\n";
    if (rec.aborted) ++failures;
  }
  std::cout << records.size() << " runs, " << failures << " failures -> "
            << out_dir << "/summary.csv\n";
  return failures == 0 ? kExitOk : kExitNumerical;
}

int cmd_diagnose(const CliConfig& cc, const CLI::App* cmd) {
  RunConfig c = resolve_config(cc, cmd);
  if (c.out_dir.empty()) throw ConfigError("out-dir: required for diagnose");
  c.validate();

  pinn::PinnModel model;
  model.activation = pinn::activation_from_string(c.activation);
  model.omega0 = c.omega0;
  model.init = pinn::init_from_string(c.init);
  model.seed = c.seed;
  pinn::init_weights(model);
  pinn::TimeGrid grid;
  grid.n_steps = c.n_steps;
  grid.t_final = c.t_final;
  const auto diag = pinn::diagnostics(model, grid);

  fs::create_directories(c.out_dir);
  std::ofstream cfg(fs::path(c.out_dir) / "config.json");
  cfg << artifacts::config_to_json(c) << "\n";
  auto write_hist = [&](const fs::path& file, const std::vector<double>& hist,
                        double lo, double hi) {
    std::ofstream csv(file);
    csv << "bin_lo,bin_hi,count\n";
    const double bw = (hi - lo) / hist.size();
    for (std::size_t b = 0; b < hist.size(); ++b)
      csv << artifacts::format_double(lo + b * bw) << ','
          << artifacts::format_double(lo + (b + 1) * bw) << ','
          << artifacts::format_double(hist[b]) << "\n";
  };
  for (std::size_t l = 0; l < diag.layers.size(); ++l) {
    const auto& ld = diag.layers[l];
    const std::string p = "layer" + std::to_string(l);
    write_hist(fs::path(c.out_dir) / (p + "_prelinear_hist.csv"),
               ld.prelin_hist, ld.prelin_lo, ld.prelin_hi);
    write_hist(fs::path(c.out_dir) / (p + "_postact_hist.csv"),
               ld.postact_hist, ld.postact_lo, ld.postact_hi);
    write_hist(fs::path(c.out_dir) / (p + "_grad_hist.csv"), ld.grad_hist,
               ld.grad_lo, ld.grad_hi);
    std::ofstream spec(fs::path(c.out_dir) / (p + "_spectrum.csv"));
    spec << "freq_index,magnitude\n";
    for (std::size_t f = 0; f < ld.spectrum.size(); ++f)
      spec << f << ',' << artifacts::format_double(ld.spectrum[f]) << "\n";
  }
  std::cout << diag.layers.size() << " layer diagnostics -> " << c.out_dir
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physics-informed pulse synthesis for two-qubit gates"};
  app.require_subcommand(1);

  CliConfig train_cc, diag_cc;
  CLI::App* train_cmd =
      app.add_subcommand("train", "train a model and write run artifacts");
  add_run_options(train_cmd, train_cc);

  std::string validate_dir, validate_against;
  int validate_substeps = 10;
  CLI::App* validate_cmd = app.add_subcommand(
      "validate", "integrate learned pulses with spline + RK4");
  validate_cmd->add_option("run_dir", validate_dir, "run directory")
      ->required();
  validate_cmd->add_option("--against", validate_against,
                           "second run directory for the consistency check");
  validate_cmd->add_option("--substeps", validate_substeps,
                           "RK4 substeps per control interval");

  std::string sweep_file;
  int sweep_workers = 0;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "run a grid of trainings and summarize");
  sweep_cmd->add_option("--config", sweep_file, "sweep JSON config")
      ->required();
  sweep_cmd->add_option("--workers", sweep_workers,
                        "concurrent runs (default: hardware threads)");

  CLI::App* diag_cmd = app.add_subcommand(
      "diagnose", "untrained-network activation/gradient/spectrum data");
  add_run_options(diag_cmd, diag_cc);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) return cmd_train(train_cc, train_cmd);
    if (validate_cmd->parsed())
      return cmd_validate(validate_dir, validate_against, validate_substeps);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_file, sweep_workers);
    if (diag_cmd->parsed()) return cmd_diagnose(diag_cc, diag_cmd);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const MissingArtifact& e) {
    std::cerr << "missing artifact: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NonFiniteValue& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const NonFiniteGradient& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
