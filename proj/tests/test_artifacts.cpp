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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "pulsepinn/artifacts.hpp"
#include "pulsepinn/trainer.hpp"

using namespace pulsepinn;
using namespace pulsepinn::artifacts;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("pulsepinn_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config validation") {
  RunConfig c;
  c.validate();  // defaults are valid

  RunConfig bad = c;
  bad.model = "heisenberg";
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = c;
  bad.gamma_abs = -0.1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = c;
  bad.n_steps = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = c;
  bad.gate = "nope";
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = c;
  cx::CVector x0(4);
  x0.set(0, 0.5);  // not unit norm
  bad.x0_override = x0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("config json round trip") {
  RunConfig c;
  c.model = "lindblad";
  c.gate = "crz";
  c.theta = 1.25;
  c.gamma_abs = 1e-3;
  c.gamma_em = 2e-3;
  c.omega0 = 3.0;
  c.activation = "tanh";
  c.init = "default";
  c.epochs = 123;
  c.lr = 5e-5;
  c.n_steps = 64;
  c.t_final = 7.5;
  c.seed = 42;
  cx::CVector x0(4);
  x0.set(1, 1.0);
  c.x0_override = x0;
  c.loss_weights = {1.0, 0.5, 2.0};
  c.out_dir = "runs/demo";

  const RunConfig r = config_from_json(config_to_json(c));
  CHECK(r.model == c.model);
  CHECK(r.gate == c.gate);
  CHECK(r.theta == c.theta);
  CHECK(r.gamma_em == c.gamma_em);
  CHECK(r.activation == c.activation);
  CHECK(r.init == c.init);
  CHECK(r.epochs == c.epochs);
  CHECK(r.lr == c.lr);
  CHECK(r.n_steps == c.n_steps);
  CHECK(r.seed == c.seed);
  REQUIRE(r.x0_override.has_value());
  CHECK(r.x0_override->re[1] == 1.0);
  CHECK(r.loss_weights == c.loss_weights);

  CHECK_THROWS_AS(config_from_json("{"), ConfigError);
}

TEST_CASE("run artifacts and schemas") {
  TempDir tmp;
  RunConfig c;
  c.epochs = 5;
  c.n_steps = 10;
  c.lr = 1e-4;
  c.seed = 3;
  c.out_dir = (tmp.path / "run").string();
  const auto rec = trainer::train(c);
  REQUIRE(!rec.aborted);
  write_run_artifacts(c.out_dir, rec);

  for (const char* name :
       {"config.json", "loss_curve.csv", "controls.csv", "populations.csv",
        "final_operator.json", "report.json", "weights.json"}) {
    CHECK(fs::exists(fs::path(c.out_dir) / name));
  }

  // headers and row counts
  const std::string loss_csv = slurp(fs::path(c.out_dir) / "loss_curve.csv");
  CHECK(loss_csv.rfind("epoch,l_total,l_model,l_fid,fidelity\n", 0) == 0);
  CHECK(std::count(loss_csv.begin(), loss_csv.end(), '\n') == 6);  // header+5

  const std::string controls_csv = slurp(fs::path(c.out_dir) / "controls.csv");
  CHECK(controls_csv.rfind("t,u1,u2,u3,u4\n", 0) == 0);
  CHECK(std::count(controls_csv.begin(), controls_csv.end(), '\n') == 11);

  const std::string pops_csv = slurp(fs::path(c.out_dir) / "populations.csv");
  CHECK(pops_csv.rfind("t,p00,p01,p10,p11\n", 0) == 0);

  // round-trip the controls through the reader
  std::vector<double> times;
  const auto controls =
      read_controls_csv(fs::path(c.out_dir) / "controls.csv", &times);
  REQUIRE(controls.size() == rec.pulses.size());
  for (std::size_t k = 0; k < controls.size(); ++k)
    for (int j = 0; j < 4; ++j) CHECK(controls[k][j] == rec.pulses[k][j]);
  CHECK(times[1] == doctest::Approx(c.t_final / c.n_steps));

  // config echo reproduces the run configuration
  const RunConfig echoed = read_config(c.out_dir);
  CHECK(echoed.seed == c.seed);
  CHECK(echoed.epochs == c.epochs);

  // weights round trip through the json artifact
  const auto model = pinn::weights_from_json(
      slurp(fs::path(c.out_dir) / "weights.json"));
  for (int l = 0; l < pinn::PinnModel::kNumLinear; ++l)
    CHECK(model.weights[l] == rec.model.weights[l]);

  CHECK_THROWS_AS(read_controls_csv(fs::path(c.out_dir) / "missing.csv"),
                  MissingArtifact);
}

TEST_CASE("lindblad loss curve carries the trace column") {
  TempDir tmp;
  RunConfig c;
  c.model = "lindblad";
  c.epochs = 2;
  c.n_steps = 8;
  c.seed = 4;
  c.out_dir = (tmp.path / "run").string();
  const auto rec = trainer::train(c);
  write_run_artifacts(c.out_dir, rec);
  const std::string loss_csv = slurp(fs::path(c.out_dir) / "loss_curve.csv");
  CHECK(loss_csv.rfind("epoch,l_total,l_model,l_fid,l_trace,fidelity\n", 0) ==
        0);
}

TEST_CASE("byte-identical artifacts for identical seeds") {
  TempDir tmp;
  RunConfig c;
  c.epochs = 4;
  c.n_steps = 10;
  c.seed = 11;

  c.out_dir = (tmp.path / "a").string();
  write_run_artifacts(c.out_dir, trainer::train(c));
  const fs::path dir_a = c.out_dir;

  c.out_dir = (tmp.path / "b").string();
  write_run_artifacts(c.out_dir, trainer::train(c));
  const fs::path dir_b = c.out_dir;

  for (const char* name : {"loss_curve.csv", "controls.csv", "populations.csv",
                           "final_operator.json", "weights.json"}) {
    CHECK(slurp(dir_a / name) == slurp(dir_b / name));
  }
}
