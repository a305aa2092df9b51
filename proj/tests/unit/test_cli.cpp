/**
 * Copyright 2026 The SVF Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "helpers.hpp"

#ifndef SVF_CLI_PATH
#error "SVF_CLI_PATH must point at the svf executable"
#endif

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
};

// Runs the CLI through the shell, capturing stdout and stderr.
Result run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" + std::string(SVF_CLI_PATH) + "' " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

// A model and schedule small enough for a few seconds of training.
const std::string kTiny =
    " --frames 4 --dim 8 --blocks 1 --epochs 2 --lr-drop-epochs 1 --B-u 2 --steps-per-epoch 3 --label-rate 0.5";

fs::path tiny_data(const fs::path& dir) {
  const fs::path data = dir / "d.svds";
  const auto r = run("gen-data --out " + q(data) + " --per-class 4 --frames 4 --seed 3");
  REQUIRE_MESSAGE(r.code == 0, r.out);
  return data;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("gen-data writes the requested dataset deterministically") {
  const auto dir = svf::testing::scratch_dir("cli_gen");
  const auto a = run("gen-data --out " + q(dir / "a.svds") + " --per-class 100 --seed 7");
  REQUIRE_MESSAGE(a.code == 0, a.out);
  CHECK(a.out.find("800") != std::string::npos);
  CHECK(a.out.find("shift-left") != std::string::npos);
  CHECK(run("gen-data --out " + q(dir / "b.svds") + " --per-class 100 --seed 7").code == 0);
  const std::string bytes = slurp(dir / "a.svds");
  CHECK(bytes == slurp(dir / "b.svds"));
  CHECK(bytes.size() == 30 + 800 * (12 + 8 * 16 * 16 * 4));

  CHECK(run("gen-data --out " + q(dir / "c.svds") + " --per-class 0").code == 2);
  CHECK(run("gen-data --out " + q(dir / "no" / "such" / "dir" / "x.svds") + " --per-class 1").code == 2);
  CHECK(run("gen-data").code == 2);

  // SVF_SEED stands in for a missing --seed.
  CHECK(run("gen-data --out " + q(dir / "e.svds") + " --per-class 100", "SVF_SEED=7").code == 0);
  CHECK(slurp(dir / "e.svds") == bytes);
}

TEST_CASE("usage and configuration errors exit with 2") {
  const auto dir = svf::testing::scratch_dir("cli_usage");
  const fs::path data = tiny_data(dir);
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  const auto unknown = run("train --data " + q(data) + " --set warp_speed=9");
  CHECK(unknown.code == 2);
  CHECK(unknown.out.find("warp_speed") != std::string::npos);
  CHECK(run("train --data " + q(data) + " --delta nope").code == 2);
  CHECK(run("train --data " + q(dir / "missing.svds") + " --epochs 1 --lr-drop-epochs ''").code == 2);
  CHECK(run("train --data " + q(data) + " --epochs 10").code == 2);  // drop epochs beyond the run
  {
    std::ofstream f(dir / "bad.json");
    f << R"({"mystery": 1})";
  }
  const auto bad_file = run("train --data " + q(data) + " --config " + q(dir / "bad.json"));
  CHECK(bad_file.code == 2);
  CHECK(bad_file.out.find("mystery") != std::string::npos);
}

TEST_CASE("train writes metrics, checkpoints and a frozen config") {
  const auto dir = svf::testing::scratch_dir("cli_train");
  const fs::path data = tiny_data(dir);
  const fs::path out = dir / "run";
  const auto r = run("train --data " + q(data) + " --out " + q(out) + kTiny);
  REQUIRE_MESSAGE(r.code == 0, r.out);
  for (const char* f : {"config.json", "metrics.jsonl", "status.json", "student.svfc", "teacher.svfc"}) {
    CHECK_MESSAGE(fs::exists(out / f), f);
  }
  const std::string metrics = slurp(out / "metrics.jsonl");
  CHECK(std::count(metrics.begin(), metrics.end(), '\n') == 2);
  for (const char* key : {"\"epoch\"", "\"loss_s\"", "\"loss_un\"", "\"loss_mix\"", "\"q_mean\"", "\"lambda_mean\"",
                          "\"lr\"", "\"val_top1\"", "\"val_top5\"", "\"wall_s\""}) {
    CHECK(metrics.find(key) != std::string::npos);
  }
  CHECK(slurp(out / "status.json").find("completed") != std::string::npos);

  // Rerunning from the frozen config reproduces the stream byte for byte.
  const fs::path again = dir / "again";
  const auto r2 = run("train --config " + q(out / "config.json") + " --out " + q(again) + " --quiet");
  REQUIRE_MESSAGE(r2.code == 0, r2.out);
  CHECK(slurp(again / "metrics.jsonl") == metrics);
  CHECK(slurp(again / "student.svfc") == slurp(out / "student.svfc"));
}

TEST_CASE("ablation switches are accepted") {
  const auto dir = svf::testing::scratch_dir("cli_switches");
  const fs::path data = tiny_data(dir);
  const std::string base = "train --quiet --data " + q(data) + kTiny;
  CHECK(run(base + " --out " + q(dir / "sup") + " --gamma1 0 --gamma2 0").code == 0);
  const std::string sup = slurp(dir / "sup" / "metrics.jsonl");
  CHECK(sup.find("\"loss_un\":0.0") != std::string::npos);
  CHECK(sup.find("\"loss_mix\":0.0") != std::string::npos);
  CHECK(run(base + " --out " + q(dir / "shared") + " --teacher shared").code == 0);
  CHECK(slurp(dir / "shared" / "student.svfc") == slurp(dir / "shared" / "teacher.svfc"));
  for (const char* m : {"frame", "rand", "tube", "mixup", "cutmix"}) {
    CAPTURE(m);
    CHECK(run(base + " --out " + q(dir / m) + " --mask " + m).code == 0);
  }
  CHECK(run(base + " --out " + q(dir / "x") + " --mask spiral").code == 2);
}

TEST_CASE("SVF_SEED overrides the config file and flags override both") {
  const auto dir = svf::testing::scratch_dir("cli_seed");
  const fs::path data = tiny_data(dir);
  {
    std::ofstream f(dir / "c.json");
    f << R"({"seed": 1})";
  }
  const std::string base = "train --quiet --data " + q(data) + kTiny + " --config " + q(dir / "c.json");
  REQUIRE(run(base + " --out " + q(dir / "env"), "SVF_SEED=5").code == 0);
  CHECK(slurp(dir / "env" / "config.json").find("\"seed\": 5") != std::string::npos);
  REQUIRE(run(base + " --out " + q(dir / "flag") + " --seed 9", "SVF_SEED=5").code == 0);
  CHECK(slurp(dir / "flag" / "config.json").find("\"seed\": 9") != std::string::npos);
  REQUIRE(run(base + " --out " + q(dir / "file")).code == 0);
  CHECK(slurp(dir / "file" / "config.json").find("\"seed\": 1") != std::string::npos);
  CHECK(run(base + " --out " + q(dir / "bad"), "SVF_SEED=abc").code == 2);
}

TEST_CASE("numerical failure exits with 3 and keeps the last good checkpoint") {
  const auto dir = svf::testing::scratch_dir("cli_numeric");
  const fs::path data = tiny_data(dir);
  const fs::path out = dir / "run";
  REQUIRE(run("train --quiet --data " + q(data) + " --out " + q(out) + kTiny).code == 0);
  const std::string good = slurp(out / "student.svfc");
  const auto r = run("train --quiet --data " + q(data) + " --out " + q(out) + kTiny + " --base-lr 1e30");
  CHECK(r.code == 3);
  CHECK(slurp(out / "student.svfc") == good);
  const std::string status = slurp(out / "status.json");
  CHECK(status.find("aborted") != std::string::npos);
  CHECK(status.find("non-finite") != std::string::npos);
  const std::string metrics = slurp(out / "metrics.jsonl");
  CHECK(metrics.find("nan") == std::string::npos);
  CHECK(metrics.find("inf") == std::string::npos);
}

TEST_CASE("eval reports the views it used") {
  const auto dir = svf::testing::scratch_dir("cli_eval");
  const fs::path data = tiny_data(dir);
  const fs::path out = dir / "run";
  REQUIRE(run("train --quiet --data " + q(data) + " --out " + q(out) + kTiny).code == 0);
  const std::string model = " --frames 4 --dim 8 --blocks 1";
  const auto one = run("eval --checkpoint " + q(out / "student.svfc") + " --dataset " + q(data) + model);
  REQUIRE_MESSAGE(one.code == 0, one.out);
  CHECK(one.out.find("views_evaluated 32") != std::string::npos);
  const auto many = run("eval --checkpoint " + q(out / "student.svfc") + " --dataset " + q(data) + model +
                        " --clips 5 --crops 3");
  REQUIRE_MESSAGE(many.code == 0, many.out);
  CHECK(many.out.find("views_per_video 5 x 3") != std::string::npos);
  CHECK(many.out.find("views_evaluated 480") != std::string::npos);

  CHECK(run("eval --checkpoint " + q(dir / "none.svfc") + " --dataset " + q(data) + model).code == 2);
  CHECK(run("eval --checkpoint " + q(out / "student.svfc") + " --dataset " + q(data) + " --frames 4 --dim 16 --blocks 1").code == 2);
  CHECK(run("eval --checkpoint " + q(out / "student.svfc") + " --dataset " + q(data)).code == 2);  // default model shape
}

TEST_CASE("ablate writes per-run rows and medians") {
  const auto dir = svf::testing::scratch_dir("cli_ablate");
  const fs::path data = tiny_data(dir);
  const std::string base = "ablate --data " + q(data) + kTiny + " --out " + q(dir / "sweep");
  const auto r = run(base + " --param delta --values 0.3,0.9 --seeds 1,2");
  REQUIRE_MESSAGE(r.code == 0, r.out);
  const std::string runs = slurp(dir / "sweep" / "runs.csv");
  CHECK(runs.rfind("param,value,seed,status,val_top1,val_top5\n", 0) == 0);
  CHECK(std::count(runs.begin(), runs.end(), '\n') == 5);
  CHECK(runs.find("delta,0.9,2,ok,") != std::string::npos);
  const std::string summary = slurp(dir / "sweep" / "summary.csv");
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 3);
  CHECK(fs::exists(dir / "sweep" / "delta-0.3" / "seed-1" / "metrics.jsonl"));

  const auto aug = run(base + "_aug --param augmentation --values none,both --seeds 1");
  CHECK_MESSAGE(aug.code == 0, aug.out);
  CHECK(run(base + " --param flux --values 1,2").code == 2);
  CHECK(run(base + " --param delta --values 0.3,abc").code == 2);
}

}  // TEST_SUITE
