// Copyright 2026 The FlowProver Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flowprover/data/theorem.hpp"
#include "flowprover/gfn/trainer.hpp"
#include "flowprover/search/best_first.hpp"

namespace flowprover::app {

inline constexpr const char* kVersion = "0.1.0";

// train.jsonl + valid.jsonl + corpus.hash
void write_corpus(const std::filesystem::path& dir, const data::CorpusSplit& split);
data::CorpusSplit read_corpus(const std::filesystem::path& dir);

enum class RunMode : std::uint8_t { Gfn, GfnOo, GfnBrOo, Sft, Ppo };
RunMode parse_run_mode(std::string_view text);
std::string_view to_string(RunMode m);

struct RunOptions {
  RunMode mode = RunMode::Gfn;
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> rm_checkpoint;
  std::filesystem::path out;
  std::uint64_t seed = 0;
  int steps = 2000;
  double lr = 1e-4;
  double clip = 0.5;
  int n_sampled = 5;
  double replay_p = 0.5;
  double temper_p = 0.666;
  bool inject_gt = true;
  int max_depth = 3;
  int valid_every = 20;
  int checkpoint_every = 100;
  int branching = 8;
  std::int64_t budget = 100;
  bool timing = false;  // real wall_ms in metrics.csv (otherwise 0)
  unsigned workers = 1;
  std::string command_line;
};

// Flat `key = value` lines of every option, in a fixed order.
std::string config_snapshot(const RunOptions& o);

struct RunSummary {
  std::int64_t steps = 0;
  std::int64_t env_calls = 0;
  std::int64_t buffer_reads = 0;
  std::int64_t skipped_updates = 0;
  int final_valid_solved = 0;
  int valid_total = 0;
  std::filesystem::path final_checkpoint;
  std::filesystem::path initial_checkpoint;
};

// Writes into `out`: manifest.json, config.txt, metrics.csv, validation.csv,
// checkpoints/step_NNNNNN.ckpt (step 0 is the untrained policy), final.ckpt
// and summary.json. Throws std::invalid_argument on unusable options.
RunSummary run_training(const RunOptions& o);

// Text of one metrics.csv row.
std::string metrics_row(const gfn::StepMetrics& m, double wall_ms);
inline constexpr const char* kMetricsHeader =
    "step,mode,loss,mean_log_r,mean_log_pf,log_z_mean,env_calls,wall_ms";

}  // namespace flowprover::app
