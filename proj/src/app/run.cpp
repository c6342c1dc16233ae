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

#include "flowprover/app/run.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "flowprover/baselines/ppo.hpp"
#include "flowprover/baselines/sft.hpp"
#include "flowprover/nn/checkpoint.hpp"
#include "flowprover/rm/reward_model.hpp"
#include "flowprover/util/hash.hpp"

namespace flowprover::app {
namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

void write_corpus(const fs::path& dir, const data::CorpusSplit& split) {
  fs::create_directories(dir);
  data::write_jsonl(dir / "train.jsonl", split.train);
  data::write_jsonl(dir / "valid.jsonl", split.valid);
  write_text(dir / "corpus.hash", data::corpus_hash(split) + "\n");
}

data::CorpusSplit read_corpus(const fs::path& dir) {
  data::CorpusSplit split;
  split.train = data::read_jsonl(dir / "train.jsonl");
  split.valid = data::read_jsonl(dir / "valid.jsonl");
  return split;
}

RunMode parse_run_mode(std::string_view text) {
  if (text == "gfn") return RunMode::Gfn;
  if (text == "gfn-oo") return RunMode::GfnOo;
  if (text == "gfn-br-oo") return RunMode::GfnBrOo;
  if (text == "sft") return RunMode::Sft;
  if (text == "ppo") return RunMode::Ppo;
  throw std::invalid_argument("unknown mode '" + std::string(text) + "'");
}

std::string_view to_string(RunMode m) {
  switch (m) {
    case RunMode::Gfn: return "gfn";
    case RunMode::GfnOo: return "gfn-oo";
    case RunMode::GfnBrOo: return "gfn-br-oo";
    case RunMode::Sft: return "sft";
    case RunMode::Ppo: return "ppo";
  }
  return "?";
}

std::string config_snapshot(const RunOptions& o) {
  std::ostringstream s;
  s << "mode = " << to_string(o.mode) << "\n"
    << "corpus = " << o.corpus.string() << "\n"
    << "rm = " << (o.rm_checkpoint ? o.rm_checkpoint->string() : "") << "\n"
    << "seed = " << o.seed << "\n"
    << "steps = " << o.steps << "\n"
    << "lr = " << num(o.lr) << "\n"
    << "clip = " << num(o.clip) << "\n"
    << "n-sampled = " << o.n_sampled << "\n"
    << "replay-p = " << num(o.replay_p) << "\n"
    << "temper-p = " << num(o.temper_p) << "\n"
    << "inject-gt = " << (o.inject_gt ? "true" : "false") << "\n"
    << "max-depth = " << o.max_depth << "\n"
    << "valid-every = " << o.valid_every << "\n"
    << "checkpoint-every = " << o.checkpoint_every << "\n"
    << "branching = " << o.branching << "\n"
    << "budget = " << o.budget << "\n";
  return s.str();
}

std::string metrics_row(const gfn::StepMetrics& m, double wall_ms) {
  const bool gfn_mode = m.mode.rfind("gfn", 0) == 0;
  const bool has_reward = m.mode != "sft";
  std::string row = std::to_string(m.step) + "," + m.mode + "," + num(m.loss) + ",";
  row += (has_reward ? num(m.mean_log_r) : "") + ",";
  row += num(m.mean_log_pf) + ",";
  row += (gfn_mode ? num(m.log_z_mean) : "") + ",";
  row += std::to_string(m.env_calls) + "," + num(wall_ms);
  return row;
}

RunSummary run_training(const RunOptions& o) {
  if (o.steps < 0) throw std::invalid_argument("--steps must be >= 0");
  if (o.valid_every <= 0 || o.checkpoint_every <= 0) {
    throw std::invalid_argument("--valid-every and --checkpoint-every must be > 0");
  }
  const bool needs_rm = o.mode == RunMode::Gfn || o.mode == RunMode::GfnOo;
  if (needs_rm && !o.rm_checkpoint) {
    throw std::invalid_argument("mode " + std::string(to_string(o.mode)) + " requires --rm");
  }

  const data::CorpusSplit corpus = read_corpus(o.corpus);
  std::optional<rm::RewardModel> rm_model;
  if (o.rm_checkpoint) {
    rm_model.emplace(rm::rm_from_checkpoint(nn::load_checkpoint(*o.rm_checkpoint)));
  }
  const rm::RewardModel* rm_ptr = rm_model ? &*rm_model : nullptr;

  fs::create_directories(o.out / "checkpoints");
  const std::string config = config_snapshot(o);
  write_text(o.out / "config.txt", config);
  {
    nlohmann::ordered_json m;
    m["command_line"] = o.command_line;
    m["config"] = config;
    m["config_hash"] = hex64(fnv1a64(config));
    m["seed"] = o.seed;
    m["corpus_hash"] = data::corpus_hash(corpus);
    m["code_version"] = kVersion;
    m["start_time"] = utc_now();
    write_text(o.out / "manifest.json", m.dump(2) + "\n");
  }

  const bool gfn_mode = o.mode == RunMode::Gfn || o.mode == RunMode::GfnOo ||
                        o.mode == RunMode::GfnBrOo;
  policy::PolicyNet net = policy::PolicyNet::random(derive_seed(o.seed, 0x1417), gfn_mode);
  baselines::ValueHead value = baselines::ValueHead::zeros();

  nn::AdamWConfig optim;
  optim.lr = o.lr;
  optim.clip_norm = o.clip;

  std::optional<gfn::GflowNetTrainer> gfn_trainer;
  std::optional<baselines::SftTrainer> sft_trainer;
  std::optional<baselines::PpoTrainer> ppo_trainer;
  if (gfn_mode) {
    gfn::TrainConfig cfg;
    cfg.optim = optim;
    cfg.total_steps = o.steps;
    cfg.n_sampled = o.n_sampled;
    cfg.replay_p = o.replay_p;
    cfg.temper_p = o.temper_p;
    cfg.inject_gt = o.inject_gt;
    cfg.max_depth = o.max_depth;
    cfg.seed = o.seed;
    cfg.mode = o.mode == RunMode::Gfn     ? gfn::TrainMode::Gfn
               : o.mode == RunMode::GfnOo ? gfn::TrainMode::GfnOo
                                          : gfn::TrainMode::GfnBrOo;
    gfn_trainer.emplace(net, rm_ptr, cfg, corpus.train);
  } else if (o.mode == RunMode::Sft) {
    sft_trainer.emplace(net, baselines::SftConfig{optim, o.seed}, corpus.train);
  } else {
    baselines::PpoConfig cfg;
    cfg.optim = optim;
    cfg.seed = o.seed;
    cfg.max_depth = o.max_depth;
    cfg.rollouts_per_theorem = o.n_sampled;
    cfg.reward.mode = rm_ptr ? gfn::RewardMode::FullRm : gfn::RewardMode::Binary;
    ppo_trainer.emplace(net, value, rm_ptr, cfg, corpus.train);
  }

  search::SearchConfig sc;
  sc.branching = o.branching;
  sc.expansion_budget = o.budget;
  sc.max_depth = o.max_depth;
  sc.encoding = policy::EncodingMode::History;

  const std::map<std::string, std::string> meta = {
      {"mode", std::string(to_string(o.mode))}, {"seed", std::to_string(o.seed)}};
  auto save = [&](const fs::path& path, std::int64_t step) {
    auto m = meta;
    m["step"] = std::to_string(step);
    nn::Checkpoint ck = policy::to_checkpoint(net, m);
    if (gfn_trainer) ck.optimizer = gfn_trainer->optimizer().state();
    if (sft_trainer) ck.optimizer = sft_trainer->optimizer().state();
    nn::save_checkpoint(path, ck);
  };

  RunSummary summary;
  summary.valid_total = static_cast<int>(corpus.valid.size());
  summary.initial_checkpoint = o.out / "checkpoints" / "step_000000.ckpt";
  save(summary.initial_checkpoint, 0);

  std::ofstream metrics(o.out / "metrics.csv", std::ios::binary);
  std::ofstream validation(o.out / "validation.csv", std::ios::binary);
  if (!metrics || !validation) throw std::runtime_error("cannot write metrics in " + o.out.string());
  metrics << kMetricsHeader << "\n";
  validation << "step,solved,total\n";

  using Clock = std::chrono::steady_clock;
  for (int s = 1; s <= o.steps; ++s) {
    const auto t0 = Clock::now();
    gfn::StepMetrics m = gfn_trainer   ? gfn_trainer->step()
                         : sft_trainer ? sft_trainer->step()
                                       : ppo_trainer->step();
    const double wall =
        o.timing ? std::chrono::duration<double, std::milli>(Clock::now() - t0).count() : 0.0;
    metrics << metrics_row(m, wall) << "\n";
    summary.env_calls += m.env_calls;
    summary.buffer_reads += m.buffer_reads;
    summary.skipped_updates += m.skipped ? 1 : 0;
    if (m.skipped) std::fprintf(stderr, "step %d: non-finite gradient, update skipped\n", s);

    if (s % o.valid_every == 0) {
      const auto rep = search::evaluate_split(net, corpus.valid, sc, o.workers);
      validation << s << "," << rep.solved << "," << rep.total << "\n";
      summary.final_valid_solved = rep.solved;
    }
    if (s % o.checkpoint_every == 0) {
      char name[32];
      std::snprintf(name, sizeof name, "step_%06d.ckpt", s);
      save(o.out / "checkpoints" / name, s);
    }
  }
  metrics.flush();
  validation.flush();
  summary.steps = o.steps;
  if (o.steps % o.valid_every != 0 || o.steps == 0) {
    summary.final_valid_solved = search::evaluate_split(net, corpus.valid, sc, o.workers).solved;
  }
  summary.final_checkpoint = o.out / "final.ckpt";
  save(summary.final_checkpoint, o.steps);
  if (ppo_trainer) {
    nn::save_checkpoint(o.out / "value.ckpt",
                        nn::Checkpoint{{{"kind", "value_head"}}, value.params, std::nullopt});
  }

  nlohmann::ordered_json j;
  j["mode"] = std::string(to_string(o.mode));
  j["steps"] = summary.steps;
  j["env_calls"] = summary.env_calls;
  j["buffer_reads"] = summary.buffer_reads;
  j["skipped_updates"] = summary.skipped_updates;
  j["final_valid_solved"] = summary.final_valid_solved;
  j["valid_total"] = summary.valid_total;
  j["end_time"] = utc_now();
  write_text(o.out / "summary.json", j.dump(2) + "\n");
  return summary;
}

}  // namespace flowprover::app
