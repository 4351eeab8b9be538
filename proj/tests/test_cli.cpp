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

// End-to-end checks of the command-line surface via subprocess runs.
// PULSEPINN_BIN is injected by the build.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const char* kBin = PULSEPINN_BIN;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("pulsepinn_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

int run(const std::string& args) {
  const std::string cmd = std::string(kBin) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const std::string& s) {
  return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("train writes the run directory and row counts match") {
  TempDir tmp;
  const fs::path dir = tmp.path / "run";
  const int rc = run("train --model schrodinger --gate cnot --epochs 12"
                     " --n-steps 20 --lr 1e-4 --seed 3 --out-dir " +
                     dir.string());
  REQUIRE(rc == 0);
  const std::string loss = slurp(dir / "loss_curve.csv");
  CHECK(count_lines(loss) == 13);  // header + one row per epoch
  const std::string controls = slurp(dir / "controls.csv");
  CHECK(count_lines(controls) == 21);
  for (const char* f : {"config.json", "report.json", "weights.json",
                        "populations.csv", "final_operator.json"})
    CHECK(fs::exists(dir / f));
}

TEST_CASE("train with zero epochs emits initial-state data") {
  TempDir tmp;
  const fs::path dir = tmp.path / "run0";
  REQUIRE(run("train --gate swap --epochs 0 --n-steps 16 --out-dir " +
              dir.string()) == 0);
  CHECK(count_lines(slurp(dir / "loss_curve.csv")) == 2);  // header + epoch 0
  CHECK(count_lines(slurp(dir / "controls.csv")) == 17);
}

TEST_CASE("config errors exit with code 2") {
  CHECK(run("train --gate nosuchgate --out-dir /tmp/unused_x") == 2);
  CHECK(run("train --gate cnot") == 2);  // out-dir required
  CHECK(run("train --gate cnot --gamma-abs -1 --out-dir /tmp/unused_y") == 2);
}

TEST_CASE("numerical aborts exit with code 3") {
  TempDir tmp;
  // an absurd learning rate blows the weights up within a few epochs
  const int rc = run("train --gate cnot --epochs 50 --n-steps 16 --lr 1e9"
                     " --out-dir " +
                     (tmp.path / "blowup").string());
  CHECK(rc == 3);
  // the partial record is still persisted
  CHECK(fs::exists(tmp.path / "blowup" / "report.json"));
  CHECK(slurp(tmp.path / "blowup" / "report.json").find("aborted") !=
        std::string::npos);
}

TEST_CASE("validate consumes a run and writes the validation report") {
  TempDir tmp;
  const fs::path dir = tmp.path / "run";
  REQUIRE(run("train --gate cnot --epochs 8 --n-steps 20 --lr 1e-4"
              " --out-dir " +
              dir.string()) == 0);
  REQUIRE(run("validate " + dir.string()) == 0);
  CHECK(fs::exists(dir / "validation" / "report.json"));
  const std::string pops = slurp(dir / "validation" / "populations.csv");
  CHECK(pops.rfind("t,p00,p01,p10,p11\n", 0) == 0);
  CHECK(count_lines(pops) == 22);  // header + N+1 recorded times

  // paired run enables the consistency check
  const fs::path dir2 = tmp.path / "run2";
  REQUIRE(run("train --model lindblad --gate cnot --epochs 8 --n-steps 20"
              " --lr 1e-4 --out-dir " +
              dir2.string()) == 0);
  // the coarse 20-point test grid needs finer RK4 substeps to keep the
  // integrated density PSD within the Uhlmann precondition
  REQUIRE(run("validate " + dir2.string() + " --against " + dir.string() +
              " --substeps 100") == 0);
  CHECK(slurp(dir2 / "validation" / "report.json").find(
            "crosscheck_fidelity") != std::string::npos);

  // missing artifacts are a config-level failure
  CHECK(run("validate " + (tmp.path / "nope").string()) == 2);
}

TEST_CASE("sweep produces per-run directories and a summary") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "sweep.json";
  {
    std::ofstream out(cfg);
    out << R"({
      "base": {"epochs": 2, "n_steps": 12, "lr": 1e-4, "model": "schrodinger"},
      "gates": ["cnot", "swap"],
      "gammas": [0.0],
      "seeds": [1, 2],
      "out_dir": ")"
        << (tmp.path / "sweep_out").string() << R"(",
      "workers": 1
    })";
  }
  REQUIRE(run("sweep --config " + cfg.string()) == 0);
  const std::string summary = slurp(tmp.path / "sweep_out" / "summary.csv");
  CHECK(summary.rfind(
            "gate,gamma,omega0,activation,seed,final_fidelity,wall_clock_s,"
            "status\n",
            0) == 0);
  CHECK(count_lines(summary) == 5);  // header + 2 gates x 2 seeds
  int run_dirs = 0;
  for (const auto& e : fs::directory_iterator(tmp.path / "sweep_out"))
    if (e.is_directory()) ++run_dirs;
  CHECK(run_dirs == 4);
}

TEST_CASE("diagnose writes per-layer files deterministically") {
  TempDir tmp;
  const fs::path a = tmp.path / "diag_a";
  const fs::path b = tmp.path / "diag_b";
  REQUIRE(run("diagnose --n-steps 40 --seed 0 --out-dir " + a.string()) == 0);
  REQUIRE(run("diagnose --n-steps 40 --seed 0 --out-dir " + b.string()) == 0);
  for (int l = 0; l < 6; ++l) {
    const std::string base = "layer" + std::to_string(l);
    for (const char* kind :
         {"_prelinear_hist.csv", "_postact_hist.csv", "_grad_hist.csv",
          "_spectrum.csv"}) {
      const fs::path fa = a / (base + kind);
      REQUIRE(fs::exists(fa));
      CHECK(slurp(fa) == slurp(b / (base + kind)));
    }
  }
}

TEST_CASE("PULSEPINN_SEED overrides the config seed") {
  TempDir tmp;
  const fs::path dir = tmp.path / "env_run";
  const std::string cmd =
      std::string("PULSEPINN_SEED=99 ") + kBin +
      " train --gate cnot --epochs 1 --n-steps 12 --seed 5 --out-dir " +
      dir.string() + " > /dev/null 2>&1";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  const std::string cfg = slurp(dir / "config.json");
  CHECK(cfg.find("\"seed\": 99") != std::string::npos);
}
