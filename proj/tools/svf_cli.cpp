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

// Command-line front end over the C API: gen-data, train, eval, ablate.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "svf/svf.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

int exit_code_for(svf_status st) {
  switch (st) {
    case SVF_OK:
      return kExitOk;
    case SVF_ERR_NUMERIC:
      return kExitNumeric;
    case SVF_ERR_INTERNAL:
      return 1;
    default:
      return kExitUsage;
  }
}

// Thrown inside command handlers to leave with a given exit code.
struct Exit {
  int code;
};

void check(svf_status st, const std::string& context) {
  if (st == SVF_OK) return;
  std::cerr << "svf: " << context << ": " << svf_last_error() << "\n";
  throw Exit{exit_code_for(st)};
}

[[noreturn]] void usage_error(const std::string& msg) {
  std::cerr << "svf: " << msg << "\n";
  throw Exit{kExitUsage};
}

struct ConfigDeleter {
  void operator()(svf_config* c) const { svf_config_free(c); }
};
struct DatasetDeleter {
  void operator()(svf_dataset* d) const { svf_dataset_free(d); }
};
struct ModelDeleter {
  void operator()(svf_model* m) const { svf_model_free(m); }
};
using ConfigPtr = std::unique_ptr<svf_config, ConfigDeleter>;
using DatasetPtr = std::unique_ptr<svf_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<svf_model, ModelDeleter>;

std::string take_string(char* s) {
  std::string out(s);
  svf_string_free(s);
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Config flags shared by train, eval and ablate: --config FILE, --set k=v,
// and one --<key> option per config key, plus a few short aliases.
struct ConfigFlags {
  std::string file;
  std::vector<std::string> sets;
  std::map<std::string, std::string> values;  // key -> raw value

  void attach(CLI::App* cmd, bool out_alias = true) {
    cmd->add_option("--config", file, "JSON config file (flat keys)")->check(CLI::ExistingFile);
    cmd->add_option("--set", sets, "Override one config key, key=value (repeatable)");
    for (std::size_t i = 0; i < svf_config_key_count(); ++i) {
      const std::string key = svf_config_key_name(i);
      std::string names = "--" + key;
      std::string dashed = key;
      std::replace(dashed.begin(), dashed.end(), '_', '-');
      if (dashed != key) names += ",--" + dashed;
      if (key == "out_dir" && out_alias) names += ",--out";
      if (key == "teacher_mode") names += ",--teacher";
      if (key == "mask_strategy") names += ",--mask";
      cmd->add_option_function<std::string>(
             names, [this, key](const std::string& v) { values[key] = v; }, "Config key " + key)
          ->group("Config keys");
    }
  }

  // defaults < config file < SVF_SEED < flags
  ConfigPtr resolve() const {
    svf_config* raw = nullptr;
    check(svf_config_new(&raw), "config");
    ConfigPtr cfg(raw);
    if (!file.empty()) check(svf_config_load_file(cfg.get(), file.c_str()), "config file " + file);
    if (const char* env = std::getenv("SVF_SEED"); env != nullptr && *env != '\0') {
      check(svf_config_set(cfg.get(), "seed", env), "SVF_SEED");
    }
    for (const auto& [k, v] : values) check(svf_config_set(cfg.get(), k.c_str(), v.c_str()), "--" + k);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) usage_error("--set expects key=value, got '" + kv + "'");
      const std::string k = kv.substr(0, eq);
      check(svf_config_set(cfg.get(), k.c_str(), kv.substr(eq + 1).c_str()), "--set " + k);
    }
    return cfg;
  }
};

void print_epoch(const svf_epoch_metrics* m, void*) {
  std::printf("epoch %3d  loss_s %.4f  loss_un %.4f  loss_mix %.4f  q %.3f  lambda %.3f  lr %.2e  top1 %.2f  top5 %.2f\n",
              m->epoch, m->loss_s, m->loss_un, m->loss_mix, m->q_mean, m->lambda_mean, m->lr, m->val_top1,
              m->val_top5);
  std::fflush(stdout);
}

int cmd_gen_data(const std::string& out, int per_class, std::optional<std::uint64_t> seed_flag, int frames) {
  if (per_class < 1) usage_error("--per-class must be >= 1");
  if (frames < 1) usage_error("--frames must be >= 1");
  std::uint64_t seed = 0;
  if (const char* env = std::getenv("SVF_SEED"); env != nullptr && *env != '\0') {
    try {
      seed = std::stoull(env);
    } catch (const std::exception&) {
      usage_error(std::string("SVF_SEED is not an unsigned integer: ") + env);
    }
  }
  if (seed_flag) seed = *seed_flag;
  svf_dataset* raw = nullptr;
  check(svf_dataset_generate(static_cast<uint32_t>(per_class), seed, static_cast<uint32_t>(frames), &raw), "gen-data");
  DatasetPtr ds(raw);
  check(svf_dataset_save(ds.get(), out.c_str()), "writing " + out);
  svf_dataset_info info{};
  check(svf_dataset_info_get(ds.get(), &info), "gen-data");
  std::printf("wrote %s: %u samples, %u classes, clip %ux%ux%ux%u, seed %llu\n", out.c_str(), info.n_samples,
              info.n_classes, info.frames, info.height, info.width, info.channels,
              static_cast<unsigned long long>(info.seed));
  for (uint32_t c = 0; c < info.n_classes; ++c) {
    const char* name = svf_dataset_class_name(ds.get(), c);
    std::printf("  class %u: %s\n", c, name != nullptr ? name : "?");
  }
  return kExitOk;
}

int cmd_train(const ConfigFlags& flags, bool quiet) {
  ConfigPtr cfg = flags.resolve();
  check(svf_config_validate(cfg.get()), "config");
  svf_eval_result final_val{};
  check(svf_train(cfg.get(), quiet ? nullptr : print_epoch, nullptr, &final_val), "train");
  std::printf("final val top1 %.2f top5 %.2f (%lld videos, %lld views)\n", final_val.top1, final_val.top5,
              static_cast<long long>(final_val.videos), static_cast<long long>(final_val.views));
  return kExitOk;
}

int cmd_eval(const ConfigFlags& flags, const std::string& checkpoint, const std::string& data, int clips, int crops) {
  ConfigPtr cfg = flags.resolve();
  if (clips < 1 || crops < 1) usage_error("--clips and --crops must be >= 1");
  svf_model* mraw = nullptr;
  check(svf_model_load(cfg.get(), checkpoint.c_str(), &mraw), "loading " + checkpoint);
  ModelPtr model(mraw);
  svf_dataset* draw = nullptr;
  check(svf_dataset_load(data.c_str(), &draw), "loading " + data);
  DatasetPtr ds(draw);
  svf_eval_result r{};
  check(svf_model_evaluate(model.get(), ds.get(), clips, crops, &r), "eval");
  std::printf("top1 %.2f\ntop5 %.2f\nvideos %lld\nviews_per_video %d x %d\nviews_evaluated %lld\n", r.top1, r.top5,
              static_cast<long long>(r.videos), r.clips_per_video, r.crops_per_video,
              static_cast<long long>(r.views));
  return kExitOk;
}

// "augmentation" is a sweep over the two augmentation switches together.
const std::map<std::string, std::pair<const char*, const char*>> kAugmentationSettings = {
    {"none", {"false", "false"}},
    {"spatial-only", {"true", "false"}},
    {"temporal-only", {"false", "true"}},
    {"both", {"true", "true"}},
};

void apply_sweep_value(svf_config* cfg, const std::string& param, const std::string& value) {
  if (param == "augmentation") {
    const auto it = kAugmentationSettings.find(value);
    if (it == kAugmentationSettings.end()) {
      usage_error("augmentation value must be none, spatial-only, temporal-only or both, got '" + value + "'");
    }
    check(svf_config_set(cfg, "use_strong_spatial", it->second.first), "augmentation");
    check(svf_config_set(cfg, "use_twaug", it->second.second), "augmentation");
    return;
  }
  check(svf_config_set(cfg, param.c_str(), value.c_str()), param + "=" + value);
}

struct SweepRun {
  std::string value;
  std::string seed;
  ConfigPtr config;
  svf_status status = SVF_OK;
  std::string error;
  svf_eval_result result{};
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int cmd_ablate(const ConfigFlags& flags, const std::string& param, const std::string& values_text,
               const std::string& seeds_text, const std::string& out, int jobs) {
  if (param != "augmentation" && svf_config_has_key(param.c_str()) == 0) {
    usage_error("unknown sweep parameter '" + param + "'");
  }
  const auto values = split_list(values_text);
  const auto seeds = split_list(seeds_text);
  if (values.empty()) usage_error("--values is empty");
  if (seeds.empty()) usage_error("--seeds is empty");
  if (jobs < 1) usage_error("--jobs must be >= 1");
  ConfigPtr base = flags.resolve();

  std::vector<SweepRun> runs;
  for (const auto& value : values) {
    for (const auto& seed : seeds) {
      svf_config* raw = nullptr;
      check(svf_config_clone(base.get(), &raw), "ablate");
      SweepRun run{value, seed, ConfigPtr(raw)};
      apply_sweep_value(run.config.get(), param, value);
      check(svf_config_set(run.config.get(), "seed", seed.c_str()), "seed " + seed);
      const std::string dir = out + "/" + param + "-" + value + "/seed-" + seed;
      check(svf_config_set(run.config.get(), "out_dir", dir.c_str()), "ablate");
      check(svf_config_validate(run.config.get()), param + "=" + value);
      runs.push_back(std::move(run));
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) usage_error("cannot create " + out + ": " + ec.message());

  std::atomic<std::size_t> next{0};
  std::mutex print_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      auto& run = runs[i];
      run.status = svf_train(run.config.get(), nullptr, nullptr, &run.result);
      if (run.status != SVF_OK) run.error = svf_last_error();
      std::lock_guard<std::mutex> lock(print_mu);
      if (run.status == SVF_OK) {
        std::printf("%s=%s seed %s: val top1 %.2f\n", param.c_str(), run.value.c_str(), run.seed.c_str(),
                    run.result.top1);
      } else {
        std::printf("%s=%s seed %s: failed (%s)\n", param.c_str(), run.value.c_str(), run.seed.c_str(),
                    run.error.c_str());
      }
      std::fflush(stdout);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::ofstream csv(out + "/runs.csv");
  csv << "param,value,seed,status,val_top1,val_top5\n";
  int worst = kExitOk;
  for (const auto& run : runs) {
    csv << param << "," << run.value << "," << run.seed << ",";
    if (run.status == SVF_OK) {
      csv << "ok," << run.result.top1 << "," << run.result.top5 << "\n";
    } else {
      csv << (run.status == SVF_ERR_NUMERIC ? "aborted" : "failed") << ",,\n";
      worst = std::max(worst, exit_code_for(run.status));
    }
  }
  std::ofstream summary(out + "/summary.csv");
  summary << "param,value,runs_ok,median_val_top1,median_val_top5\n";
  std::printf("\n%-24s %8s %14s %14s\n", (param + " value").c_str(), "runs_ok", "median_top1", "median_top5");
  for (const auto& value : values) {
    std::vector<double> top1, top5;
    for (const auto& run : runs) {
      if (run.value == value && run.status == SVF_OK) {
        top1.push_back(run.result.top1);
        top5.push_back(run.result.top5);
      }
    }
    summary << param << "," << value << "," << top1.size() << ",";
    if (top1.empty()) {
      summary << ",\n";
      std::printf("%-24s %8zu %14s %14s\n", value.c_str(), top1.size(), "-", "-");
    } else {
      summary << median(top1) << "," << median(top5) << "\n";
      std::printf("%-24s %8zu %14.2f %14.2f\n", value.c_str(), top1.size(), median(top1), median(top5));
    }
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-supervised video transformer toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", svf_version());

  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic motion dataset");
  std::string gen_out;
  int per_class = 100;
  int frames = 8;
  std::optional<std::uint64_t> gen_seed;
  gen->add_option("--out", gen_out, "Output dataset file")->required();
  gen->add_option("--per-class", per_class, "Samples per class")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Generator seed (SVF_SEED when omitted, else 0)");
  gen->add_option("--frames", frames, "Frames per clip")->capture_default_str();

  auto* train = app.add_subcommand("train", "Run semi-supervised training");
  ConfigFlags train_flags;
  train_flags.attach(train);
  bool quiet = false;
  train->add_flag("--quiet", quiet, "Do not print per-epoch metrics");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  ConfigFlags eval_flags;
  eval_flags.attach(eval);
  std::string checkpoint, eval_data;
  int clips = 1, crops = 1;
  eval->add_option("--checkpoint", checkpoint, "Checkpoint file (SVFC)")->required();
  eval->add_option("--dataset", eval_data, "Dataset to evaluate on (SVDS)")->required();
  eval->add_option("--clips", clips, "Temporal clips per video")->capture_default_str();
  eval->add_option("--crops", crops, "Spatial crops per clip")->capture_default_str();

  auto* ablate = app.add_subcommand("ablate", "Sweep one parameter across seeds");
  ConfigFlags ablate_flags;
  ablate_flags.attach(ablate, false);
  std::string param, values_text, seeds_text = "1,2,3", ablate_out = "ablation";
  int jobs = 1;
  ablate->add_option("--param", param, "Config key to sweep, or 'augmentation'")->required();
  ablate->add_option("--values", values_text, "Comma-separated values")->required();
  ablate->add_option("--seeds", seeds_text, "Comma-separated seeds")->capture_default_str();
  ablate->add_option("--out", ablate_out, "Directory for runs and CSV tables")->capture_default_str();
  ablate->add_option("--jobs", jobs, "Runs executed in parallel")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) return cmd_gen_data(gen_out, per_class, gen_seed, frames);
    if (*train) return cmd_train(train_flags, quiet);
    if (*eval) return cmd_eval(eval_flags, checkpoint, eval_data, clips, crops);
    if (*ablate) return cmd_ablate(ablate_flags, param, values_text, seeds_text, ablate_out, jobs);
  } catch (const Exit& e) {
    return e.code;
  }
  return kExitUsage;
}
