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

// flowprover: corpus generation, training, evaluation, oracle and mining.
//
// Exit codes: 0 success, 1 oracle --assert failure, 2 usage error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flowprover/app/run.hpp"
#include "flowprover/data/theorem.hpp"
#include "flowprover/gfn/trainer.hpp"
#include "flowprover/nn/checkpoint.hpp"
#include "flowprover/oracle/oracle.hpp"
#include "flowprover/policy/policy_net.hpp"
#include "flowprover/rm/reward_model.hpp"
#include "flowprover/search/best_first.hpp"
#include "flowprover/util/parallel.hpp"
#include "flowprover/util/rng.hpp"

namespace fs = std::filesystem;
using namespace flowprover;

namespace {

constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Creates `dir` (and parents). Anything that is not a usable directory is a
// usage error.
void prepare_out_dir(const fs::path& dir) {
  if (dir.empty()) throw UsageError("--out: empty path");
  std::error_code ec;
  if (fs::exists(dir, ec) && !fs::is_directory(dir, ec)) {
    throw UsageError("--out: '" + dir.string() + "' exists and is not a directory");
  }
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw UsageError("--out: cannot create '" + dir.string() + "': " + ec.message());
  }
}

void write_or_print(const std::optional<fs::path>& path, const std::string& text) {
  if (!path) {
    std::cout << text;
    return;
  }
  std::ofstream out(*path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path->string() + "'");
  out << text;
}

std::vector<data::Theorem> corpus_split(const fs::path& corpus, const std::string& split) {
  const data::CorpusSplit c = app::read_corpus(corpus);
  if (split == "train") return c.train;
  if (split == "valid") return c.valid;
  throw UsageError("--split must be train or valid");
}

policy::PolicyNet load_policy(const fs::path& path) {
  return policy::policy_from_checkpoint(nn::load_checkpoint(path));
}

std::string joined_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

// Replaces `--config FILE` with `--key value` for every `key = value` line of
// FILE whose flag is not given explicitly. Blank values and # comments are
// skipped.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  auto it = std::find(args.begin(), args.end(), "--config");
  if (it == args.end()) return args;
  if (it + 1 == args.end()) throw UsageError("--config needs a file");
  const std::string file = *(it + 1);
  args.erase(it, it + 2);
  std::ifstream in(file);
  if (!in) throw UsageError("cannot read config '" + file + "'");
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (line.empty() || line[0] == '#' || eq == std::string::npos) continue;
    auto trim = [](std::string v) {
      const auto b = v.find_first_not_of(" \t\r");
      const auto e = v.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
    };
    const std::string flag = "--" + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty() || std::find(args.begin(), args.end(), flag) != args.end()) continue;
    args.push_back(flag);
    args.push_back(value);
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GFlowNet fine-tuning for a propositional tactic prover", "flowprover"};
  app.set_version_flag("--version", std::string(app::kVersion));
  app.require_subcommand(1);

  // datagen
  std::uint64_t dg_seed = 7;
  std::string dg_out;
  auto* datagen = app.add_subcommand("datagen", "Generate train.jsonl / valid.jsonl / corpus.hash");
  datagen->add_option("--seed", dg_seed, "Corpus seed")->capture_default_str();
  datagen->add_option("--out", dg_out, "Output directory")->required();

  // train-rm
  std::string rm_corpus, rm_out;
  rm::RmTrainConfig rm_cfg;
  rm_cfg.optim.lr = 1e-3;
  auto* train_rm = app.add_subcommand("train-rm", "Train the reward model on ground-truth pairs");
  train_rm->add_option("--corpus", rm_corpus, "Corpus directory")->required();
  train_rm->add_option("--out", rm_out, "Checkpoint file")->required();
  train_rm->add_option("--epochs", rm_cfg.epochs)->capture_default_str();
  train_rm->add_option("--batch-size", rm_cfg.batch_size)->capture_default_str();
  train_rm->add_option("--lr", rm_cfg.optim.lr)->capture_default_str();
  train_rm->add_option("--seed", rm_cfg.seed)->capture_default_str();

  // train
  app::RunOptions run;
  run.workers = default_workers();
  std::string run_mode = "gfn";
  std::string run_corpus, run_out, run_rm;
  auto* train = app.add_subcommand("train", "Train a policy (gfn, gfn-oo, gfn-br-oo, sft, ppo)");
  std::string run_config;
  train->add_option("--config", run_config, "Flat key = value file; command-line flags win");
  train->add_option("--mode", run_mode)
      ->check(CLI::IsMember({"gfn", "gfn-oo", "gfn-br-oo", "sft", "ppo"}))
      ->capture_default_str();
  train->add_option("--corpus", run_corpus, "Corpus directory")->required();
  train->add_option("--rm", run_rm, "Reward model checkpoint (required for gfn, gfn-oo)");
  train->add_option("--out", run_out, "Run directory")->required();
  train->add_option("--seed", run.seed)->capture_default_str();
  train->add_option("--steps", run.steps)->capture_default_str();
  train->add_option("--lr", run.lr)->capture_default_str();
  train->add_option("--clip", run.clip)->capture_default_str();
  train->add_option("--n-sampled", run.n_sampled)->capture_default_str();
  train->add_option("--replay-p", run.replay_p)->capture_default_str();
  train->add_option("--temper-p", run.temper_p)->capture_default_str();
  train->add_option("--inject-gt", run.inject_gt)->capture_default_str();
  train->add_option("--max-depth", run.max_depth)->capture_default_str();
  train->add_option("--valid-every", run.valid_every)->capture_default_str();
  train->add_option("--checkpoint-every", run.checkpoint_every)->capture_default_str();
  train->add_option("--branching", run.branching)->capture_default_str();
  train->add_option("--budget", run.budget)->capture_default_str();
  train->add_flag("--timing", run.timing, "Record wall-clock ms in metrics.csv");
  train->add_option("--workers", run.workers, "Validation threads")->capture_default_str();

  // train-micro
  int micro_steps = 5000;
  double micro_lr = 5e-4;
  std::uint64_t micro_seed = 3;
  std::string micro_out;
  auto* train_micro = app.add_subcommand(
      "train-micro", "TB training on the micro suite (uniform reward model, depth 2)");
  train_micro->add_option("--steps", micro_steps)->capture_default_str();
  train_micro->add_option("--lr", micro_lr)->capture_default_str();
  train_micro->add_option("--seed", micro_seed)->capture_default_str();
  train_micro->add_option("--out", micro_out, "Checkpoint file")->required();

  // eval
  std::string ev_ckpt, ev_corpus, ev_split = "valid", ev_encoding = "history", ev_out;
  search::SearchConfig ev_cfg;
  std::int64_t ev_wall_ms = -1;
  unsigned ev_workers = default_workers();
  auto* eval = app.add_subcommand("eval", "Best-first search over a split; prints a SolveReport");
  eval->add_option("--checkpoint", ev_ckpt)->required();
  eval->add_option("--corpus", ev_corpus, "Corpus directory")->required();
  eval->add_option("--split", ev_split)->check(CLI::IsMember({"train", "valid"}))->capture_default_str();
  eval->add_option("--branching", ev_cfg.branching)->capture_default_str();
  eval->add_option("--budget", ev_cfg.expansion_budget, "Expansions; negative = unlimited with --wall-ms")
      ->capture_default_str();
  eval->add_option("--wall-ms", ev_wall_ms, "Per-theorem wall-clock limit");
  eval->add_option("--encoding", ev_encoding)
      ->check(CLI::IsMember({"history", "history-less"}))
      ->capture_default_str();
  eval->add_option("--workers", ev_workers)->capture_default_str();
  eval->add_option("--out", ev_out, "Report file (default stdout)");

  // oracle
  std::string or_ckpt, or_theorems = "micro", or_rm, or_out;
  int or_depth = 0;
  bool or_assert = false;
  double or_tv = 0.05, or_log_z_tol = 0.1;
  auto* orc = app.add_subcommand("oracle", "Exact enumeration vs the policy's trajectory distribution");
  orc->add_option("--checkpoint", or_ckpt)->required();
  orc->add_option("--theorems", or_theorems, "'micro' or a theorems .jsonl file")->capture_default_str();
  orc->add_option("--rm", or_rm, "Reward model checkpoint (default: uniform)");
  orc->add_option("--depth", or_depth, "Enumeration depth (default 2 for micro, else 3)");
  orc->add_flag("--assert", or_assert, "Exit 1 unless every theorem is within tolerance");
  orc->add_option("--tv", or_tv, "TV tolerance for --assert")->capture_default_str();
  orc->add_option("--log-z-tol", or_log_z_tol, "log Z tolerance for --assert")->capture_default_str();
  orc->add_option("--out", or_out, "Report file (default stdout)");

  // mine
  std::string mn_ckpt, mn_corpus, mn_split = "train", mn_out;
  std::size_t mn_limit = 20;
  std::uint64_t mn_seed = 0;
  rm::MiningConfig mn_cfg;
  auto* mine = app.add_subcommand("mine", "Hard-negative mining from failed trajectories");
  mine->add_option("--checkpoint", mn_ckpt)->required();
  mine->add_option("--corpus", mn_corpus, "Corpus directory")->required();
  mine->add_option("--split", mn_split)->check(CLI::IsMember({"train", "valid"}))->capture_default_str();
  mine->add_option("--theorems", mn_limit, "Mine the first N theorems")->capture_default_str();
  mine->add_option("--samples", mn_cfg.n_samples)->capture_default_str();
  mine->add_option("--explore-budget", mn_cfg.explore_budget)->capture_default_str();
  mine->add_option("--seed", mn_seed)->capture_default_str();
  mine->add_option("--out", mn_out, "Output .jsonl (default stdout)");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = expand_config(std::move(args));
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  std::reverse(args.begin(), args.end());

  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*datagen) {
      prepare_out_dir(dg_out);
      const data::CorpusSplit split = data::build_corpus(dg_seed);
      app::write_corpus(dg_out, split);
      std::printf("train %zu valid %zu hash %s\n", split.train.size(), split.valid.size(),
                  data::corpus_hash(split).c_str());
      return 0;
    }

    if (*train_rm) {
      const data::CorpusSplit c = app::read_corpus(rm_corpus);
      rm::RmTrainReport report;
      const rm::RewardModel model = rm::rm_train(c.train, rm_cfg, &report);
      nn::save_checkpoint(rm_out, rm::to_checkpoint(model));
      for (std::size_t e = 0; e < report.epoch_losses.size(); ++e) {
        std::printf("epoch %zu loss %.6f acc %.4f\n", e + 1, report.epoch_losses[e],
                    report.epoch_accuracy[e]);
      }
      std::printf("valid top1 %.4f\n", rm::top1_accuracy(model, rm::gt_pairs(c.valid)));
      return 0;
    }

    if (*train) {
      run.mode = app::parse_run_mode(run_mode);
      run.corpus = run_corpus;
      run.out = run_out;
      if (!run_rm.empty()) run.rm_checkpoint = fs::path(run_rm);
      if ((run.mode == app::RunMode::Gfn || run.mode == app::RunMode::GfnOo) && !run.rm_checkpoint) {
        throw UsageError("--mode " + run_mode + " needs --rm");
      }
      run.command_line = joined_args(argc, argv);
      prepare_out_dir(run.out);
      const app::RunSummary s = app::run_training(run);
      std::printf("steps %lld env_calls %lld buffer_reads %lld skipped %lld valid %d/%d\n",
                  static_cast<long long>(s.steps), static_cast<long long>(s.env_calls),
                  static_cast<long long>(s.buffer_reads),
                  static_cast<long long>(s.skipped_updates), s.final_valid_solved, s.valid_total);
      return 0;
    }

    if (*train_micro) {
      const std::vector<data::Theorem> suite = oracle::micro_suite();
      const rm::RewardModel uniform = rm::RewardModel::uniform();
      policy::PolicyNet net =
          policy::PolicyNet::random(derive_seed(micro_seed, 0x1417), true, policy::ActionMask::micro());
      gfn::TrainConfig cfg;
      cfg.optim.lr = micro_lr;
      cfg.max_depth = oracle::micro_enumeration_config().max_depth;
      cfg.seed = micro_seed;
      gfn::GflowNetTrainer trainer(net, &uniform, cfg, suite);
      for (int i = 0; i < micro_steps; ++i) trainer.step();
      nn::save_checkpoint(micro_out, policy::to_checkpoint(net));
      return 0;
    }

    if (*eval) {
      const policy::PolicyNet net = load_policy(ev_ckpt);
      ev_cfg.encoding = ev_encoding == "history" ? policy::EncodingMode::History
                                                 : policy::EncodingMode::HistoryLess;
      if (ev_wall_ms >= 0) ev_cfg.wall_clock_ms = ev_wall_ms;
      if (ev_cfg.expansion_budget < 0 && !ev_cfg.wall_clock_ms) {
        throw UsageError("negative --budget needs --wall-ms");
      }
      const search::SolveReport report =
          search::evaluate_split(net, corpus_split(ev_corpus, ev_split), ev_cfg, ev_workers);
      write_or_print(ev_out.empty() ? std::nullopt : std::optional<fs::path>(ev_out),
                     search::to_json(report) + "\n");
      std::fprintf(stderr, "solved %d/%d\n", report.solved, report.total);
      return 0;
    }

    if (*orc) {
      const policy::PolicyNet net = load_policy(or_ckpt);
      const bool micro = or_theorems == "micro";
      const std::vector<data::Theorem> theorems =
          micro ? oracle::micro_suite() : data::read_jsonl(or_theorems);
      oracle::EnumerationConfig cfg = micro ? oracle::micro_enumeration_config()
                                            : oracle::EnumerationConfig{};
      cfg.mask = net.mask();
      if (or_depth > 0) cfg.max_depth = or_depth;
      const rm::RewardModel model = or_rm.empty()
                                        ? rm::RewardModel::uniform()
                                        : rm::rm_from_checkpoint(nn::load_checkpoint(or_rm));
      std::vector<oracle::OracleReport> reports;
      bool ok = true;
      for (const data::Theorem& thm : theorems) {
        reports.push_back(oracle::run_oracle(net, thm, cfg, &model));
        const oracle::OracleReport& r = reports.back();
        const bool z_ok = r.predicted_log_z && std::abs(*r.predicted_log_z - r.log_z) <= or_log_z_tol;
        if (!(r.tv_distance <= or_tv) || !z_ok) ok = false;
      }
      write_or_print(or_out.empty() ? std::nullopt : std::optional<fs::path>(or_out),
                     oracle::to_json(reports) + "\n");
      if (or_assert && !ok) {
        std::fprintf(stderr, "oracle: tolerance exceeded (tv %.3g, log Z %.3g)\n", or_tv,
                     or_log_z_tol);
        return 1;
      }
      return 0;
    }

    if (*mine) {
      const policy::PolicyNet net = load_policy(mn_ckpt);
      const std::vector<data::Theorem> theorems = corpus_split(mn_corpus, mn_split);
      Rng rng(mn_seed);
      std::vector<rm::LabeledTactic> rows;
      for (std::size_t i = 0; i < theorems.size() && i < mn_limit; ++i) {
        const auto got = rm::mine_hard_negatives(net, theorems[i], mn_cfg, rng);
        rows.insert(rows.end(), got.begin(), got.end());
      }
      write_or_print(mn_out.empty() ? std::nullopt : std::optional<fs::path>(mn_out),
                     rm::to_jsonl(rows));
      return 0;
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return 0;
}
