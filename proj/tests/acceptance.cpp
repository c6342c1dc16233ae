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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
//
//   flowprover_acceptance [work_dir]

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "flowprover/app/run.hpp"
#include "flowprover/baselines/ppo.hpp"
#include "flowprover/baselines/sft.hpp"
#include "flowprover/data/theorem.hpp"
#include "flowprover/gfn/trainer.hpp"
#include "flowprover/nn/checkpoint.hpp"
#include "flowprover/nn/gradcheck.hpp"
#include "flowprover/oracle/oracle.hpp"
#include "flowprover/rm/reward_model.hpp"
#include "flowprover/search/best_first.hpp"
#include "flowprover/util/parallel.hpp"

namespace fs = std::filesystem;
using namespace flowprover;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Column `name` of a metrics.csv file.
std::vector<double> csv_column(const fs::path& p, const std::string& name) {
  std::istringstream in(slurp(p));
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  {
    std::stringstream h(line);
    for (std::string cell; std::getline(h, cell, ',');) header.push_back(cell);
  }
  const auto col = std::find(header.begin(), header.end(), name) - header.begin();
  std::vector<double> out;
  while (std::getline(in, line)) {
    std::stringstream r(line);
    std::string cell;
    for (long i = 0; i <= col; ++i) std::getline(r, cell, ',');
    out.push_back(std::stod(cell));
  }
  return out;
}

void perturb(nn::ParamStore& p, std::uint64_t seed, double scale) {
  Rng rng(seed);
  for (auto& [name, t] : p.tensors())
    for (double& v : t.data) v += scale * standard_normal(rng);
}

// ---------------------------------------------------------------------------
// Shared full-scale runs (criteria 5, 6, 8, 10).

struct Workspace {
  fs::path root;
  fs::path corpus_dir;
  fs::path rm_path;
  data::CorpusSplit corpus;
  std::map<std::string, app::RunSummary> runs;
  std::map<std::string, double> run_seconds;
  int base_history_less = 0;
  int base_history = 0;
};

constexpr double kRunLr = 1e-3;
constexpr std::uint64_t kRunSeed = 1;

app::RunOptions run_options(const Workspace& w, app::RunMode mode, const fs::path& out) {
  app::RunOptions o;
  o.mode = mode;
  o.corpus = w.corpus_dir;
  if (mode == app::RunMode::Gfn || mode == app::RunMode::GfnOo) o.rm_checkpoint = w.rm_path;
  o.out = out;
  o.seed = kRunSeed;
  o.steps = 2000;
  o.lr = kRunLr;
  o.workers = default_workers();
  o.command_line = "acceptance";
  return o;
}

void prepare(Workspace& w) {
  w.corpus = data::build_corpus(7);
  w.corpus_dir = w.root / "corpus";
  fs::create_directories(w.corpus_dir);
  app::write_corpus(w.corpus_dir, w.corpus);

  rm::RmTrainConfig rcfg;
  rcfg.optim.lr = 1e-3;
  w.rm_path = w.root / "rm.ckpt";
  nn::save_checkpoint(w.rm_path, rm::to_checkpoint(rm::rm_train(w.corpus.train, rcfg)));

  for (const app::RunMode mode : {app::RunMode::Gfn, app::RunMode::GfnOo, app::RunMode::GfnBrOo,
                                  app::RunMode::Sft, app::RunMode::Ppo}) {
    const std::string name(app::to_string(mode));
    const auto t0 = Clock::now();
    w.runs[name] = app::run_training(run_options(w, mode, w.root / name));
    w.run_seconds[name] = seconds_since(t0);
  }

  // Untrained baseline: the step-0 checkpoint of the gfn run.
  const policy::PolicyNet base =
      policy::policy_from_checkpoint(nn::load_checkpoint(w.runs["gfn"].initial_checkpoint));
  search::SearchConfig sc;
  sc.encoding = policy::EncodingMode::HistoryLess;
  w.base_history_less = search::evaluate_split(base, w.corpus.valid, sc, default_workers()).solved;
  sc.encoding = policy::EncodingMode::History;
  w.base_history = search::evaluate_split(base, w.corpus.valid, sc, default_workers()).solved;
}

// ---------------------------------------------------------------------------

Verdict criterion1() {
  const auto t0 = Clock::now();
  const std::vector<data::Theorem> suite = oracle::micro_suite();
  const oracle::EnumerationConfig ecfg = oracle::micro_enumeration_config();
  const rm::RewardModel uniform = rm::RewardModel::uniform();
  policy::PolicyNet net =
      policy::PolicyNet::random(derive_seed(3, 0x1417), true, policy::ActionMask::micro());
  gfn::TrainConfig cfg;
  cfg.optim.lr = 5e-4;
  cfg.max_depth = ecfg.max_depth;
  cfg.seed = 3;
  gfn::GflowNetTrainer trainer(net, &uniform, cfg, suite);
  for (int i = 0; i < 5000; ++i) trainer.step();

  double max_tv = 0.0, max_dz = 0.0;
  bool ok = true;
  for (const data::Theorem& thm : suite) {
    const oracle::OracleReport r = oracle::run_oracle(net, thm, ecfg, &uniform);
    const double dz = std::abs(*r.predicted_log_z - r.log_z);
    max_tv = std::max(max_tv, r.tv_distance);
    max_dz = std::max(max_dz, dz);
    ok = ok && r.tv_distance <= 0.05 && dz <= 0.1;
  }
  const double secs = seconds_since(t0);
  ok = ok && secs <= 300.0;
  return {ok, "5 theorems, 5000 steps: max TV " + fmt("%.4f", max_tv) + " (<= 0.05), max |dlogZ| " +
                  fmt("%.4f", max_dz) + " (<= 0.1), " + fmt("%.1f", secs) + " s (<= 300)"};
}

Verdict criterion2() {
  const double log_z = std::log(4.0);
  const std::vector<double> res = {gfn::tb_residual(std::log(1.0), log_z, std::log(0.25)),
                                   gfn::tb_residual(std::log(3.0), log_z, std::log(0.75))};
  const double loss = gfn::tb_loss_value(res);
  oracle::ExactDist d;
  d.trajectories = {{{0}, gfn::Outcome::Proved, std::log(1.0)},
                    {{1}, gfn::Outcome::Proved, std::log(3.0)}};
  oracle::finalize(d);
  const oracle::FlowReport fr = oracle::flow_check(d, [](std::span<const int> prefix, int a) {
    return prefix.empty() ? (a == 0 ? 0.25 : a == 1 ? 0.75 : 0.0) : 0.0;
  });
  const bool ok = loss < 1e-12 && fr.max_residual == 0.0 && fr.max_terminal_error == 0.0 &&
                  std::abs(d.log_z - log_z) < 1e-15;
  return {ok, "TB loss " + fmt("%.3g", loss) + ", flow residual " + fmt("%.3g", fr.max_residual) +
                  ", terminal error " + fmt("%.3g", fr.max_terminal_error)};
}

data::Theorem theorem_of(const char* name, const char* line, std::vector<const char*> proof) {
  data::Theorem t;
  t.name = name;
  t.initial_state = env::initial_state(env::parse_goal_line(line));
  for (const char* p : proof) t.gt_proof.push_back(env::parse_tactic(p));
  return t;
}

constexpr double kFdStep = 1e-5;

Verdict criterion3() {
  const std::vector<data::Theorem> thms = {
      theorem_of("t1", "a -> a", {"intro", "exact h1"}),
      theorem_of("t2", "a, b |- a & b", {"split", "exact h1", "exact h2"}),
      theorem_of("t3", "a |- b | a", {"right", "exact h1"}),
      theorem_of("t4", "a & b |- b", {"destruct h1", "exact h2"})};
  std::map<std::string, double> err;

  {  // TB
    policy::PolicyNet net = policy::PolicyNet::random(21, true, policy::ActionMask::full(), 1.0);
    perturb(net.params(), 22, 0.05);
    const rm::RewardModel rm = rm::RewardModel::random(23);
    gfn::TrainConfig cfg;
    Rng rng(24);
    std::vector<gfn::Trajectory> trajs;
    for (int i = 0; i < 8; ++i) trajs.push_back(gfn::sample_trajectory(thms[i % 4], net, cfg, &rm, rng));
    trajs.push_back(gfn::ground_truth_trajectory(thms[2]));
    std::vector<gfn::TbItem> items;
    for (std::size_t i = 0; i < trajs.size(); ++i) items.push_back({&thms[i < 8 ? i % 4 : 2], &trajs[i]});
    nn::ParamStore g = net.params().zeros_like();
    gfn::tb_loss(net, items, &g);
    err["TB"] = nn::check_gradients(net.params(), g, [&] { return gfn::tb_loss(net, items, nullptr).loss; },
                                    kFdStep, 80).max_rel_error;
  }
  {  // SFT
    policy::PolicyNet net = policy::PolicyNet::random(31, false, policy::ActionMask::full(), 1.0);
    perturb(net.params(), 32, 0.05);
    nn::ParamStore g = net.params().zeros_like();
    baselines::sft_loss(net, thms[1], &g);
    err["SFT"] = nn::check_gradients(net.params(), g,
                                     [&] { return baselines::sft_loss(net, thms[1], nullptr); }, kFdStep, 80)
                     .max_rel_error;
  }
  {  // PPO surrogate and value MSE
    policy::PolicyNet net = policy::PolicyNet::random(41, false, policy::ActionMask::full(), 1.0);
    perturb(net.params(), 42, 0.05);
    baselines::ValueHead value = baselines::ValueHead::zeros();
    perturb(value.params, 43, 0.05);
    const rm::RewardModel uniform = rm::RewardModel::uniform();
    baselines::PpoConfig cfg;
    Rng rng(44);
    std::vector<baselines::PpoSample> samples =
        baselines::collect_rollouts(net, value, thms, cfg, &uniform, rng, nullptr);
    for (auto& s : samples) {
      s.old_log_prob += 0.6 * standard_normal(rng);
      s.advantage = standard_normal(rng);
      s.ret = standard_normal(rng);
    }
    auto loss = [&] { return baselines::ppo_loss(net, value, samples, cfg, nullptr, nullptr).loss; };

    cfg.value_coef = 0.0;
    nn::ParamStore pg = net.params().zeros_like(), vg = value.params.zeros_like();
    baselines::ppo_loss(net, value, samples, cfg, &pg, &vg);
    err["PPO surrogate"] = nn::check_gradients(net.params(), pg, loss, kFdStep, 80).max_rel_error;

    cfg.value_coef = 0.5;
    for (auto& s : samples) s.advantage = 0.0;
    pg.set_zero();
    vg.set_zero();
    baselines::ppo_loss(net, value, samples, cfg, &pg, &vg);
    const nn::GradCheckResult rv = nn::check_gradients(value.params, vg, loss, kFdStep);
    const nn::GradCheckResult rp = nn::check_gradients(net.params(), pg, loss, kFdStep, 80);
    err["value MSE"] = std::max(rv.max_rel_error, rp.max_rel_error);
  }
  bool ok = true;
  std::string detail;
  for (const auto& [name, e] : err) {
    ok = ok && e < 1e-4;
    detail += (detail.empty() ? "" : ", ") + name + " " + fmt("%.2e", e);
  }
  return {ok, "max rel. error " + detail + " (< 1e-4)"};
}

Verdict criterion4() {
  gfn::RewardSpec spec;
  const env::ProofState s = env::initial_state(env::parse_goal_line("a -> a"));
  const double proved = gfn::log_reward(s, {env::parse_tactic("intro"), env::parse_tactic("exact h1")},
                                        gfn::Outcome::Proved, spec, nullptr);
  const double l44 = gfn::error_log_reward(44.0, spec);
  const double l8 = gfn::error_log_reward(8.0, spec);
  spec.mode = gfn::RewardMode::Binary;
  const double err5 = gfn::error_log_reward(5.0, spec);
  const bool binary =
      gfn::log_reward(s, {env::parse_tactic("intro")}, gfn::Outcome::DepthExhausted, spec, nullptr) == err5 &&
      gfn::log_reward(s, {env::parse_tactic("split")}, gfn::Outcome::EnvError, spec, nullptr) == err5;
  const bool ok = proved == 0.0 && std::abs(l44 + 20.5452) <= 1e-4 && std::abs(l8 + 15.7625) <= 1e-4 && binary;
  return {ok, "Proved " + fmt("%g", proved) + ", l=44 " + fmt("%.4f", l44) + ", l=8 " + fmt("%.4f", l8) +
                  ", binary non-Proved -> error branch " + (binary ? "yes" : "no")};
}

Verdict criterion5(const Workspace& w) {
  const int gfn = w.runs.at("gfn").final_valid_solved;
  const int sft = w.runs.at("sft").final_valid_solved;
  const int base = std::max(w.base_history_less, w.base_history);
  const double secs = std::max(w.run_seconds.at("gfn"), w.run_seconds.at("sft"));
  const bool ok = gfn > base && sft > base && secs <= 1800.0;
  return {ok, "valid solved: base " + std::to_string(w.base_history_less) + " (history-less) / " +
                  std::to_string(w.base_history) + " (history), gfn " + std::to_string(gfn) + ", sft " +
                  std::to_string(sft) + " of 20; slowest run " + fmt("%.1f", secs) + " s on " +
                  std::to_string(default_workers()) + " core(s), lr " + fmt("%g", kRunLr)};
}

Verdict criterion6(const Workspace& w) {
  const auto& gfn = w.runs.at("gfn");
  const auto& oo = w.runs.at("gfn-oo");
  const auto& br = w.runs.at("gfn-br-oo");
  const double ratio = static_cast<double>(gfn.env_calls) / static_cast<double>(oo.env_calls);
  const bool ok = oo.buffer_reads == 0 && br.buffer_reads == 0 && ratio < 0.6;
  return {ok, "buffer reads gfn-oo " + std::to_string(oo.buffer_reads) + ", gfn-br-oo " +
                  std::to_string(br.buffer_reads) + "; env calls gfn " + std::to_string(gfn.env_calls) +
                  " / gfn-oo " + std::to_string(oo.env_calls) + " = " + fmt("%.3f", ratio) + " (< 0.6)"};
}

env::Formula random_formula(Rng& rng, int depth) {
  static const char* const kAtoms[] = {"a", "b", "c", "p1", "x9"};
  if (depth == 0 || uniform01(rng) < 0.3) return env::Formula::atom(kAtoms[uniform_index(rng, 5)]);
  env::Formula l = random_formula(rng, depth - 1);
  env::Formula r = random_formula(rng, depth - 1);
  switch (uniform_index(rng, 3)) {
    case 0: return env::Formula::implies(l, r);
    case 1: return env::Formula::conj(l, r);
    default: return env::Formula::disj(l, r);
  }
}

Verdict criterion7(const Workspace& w) {
  int replayed = 0, total = 0;
  for (const auto* split : {&w.corpus.train, &w.corpus.valid}) {
    for (const data::Theorem& t : *split) {
      ++total;
      replayed += env::replay(t.initial_state, t.gt_proof).is_proved() ? 1 : 0;
    }
  }
  Rng rng(7007);
  int round_trips = 0;
  for (int i = 0; i < 100000; ++i) {
    const env::Formula f = random_formula(rng, 5);
    const std::string text = env::print_formula(f);
    try {
      const env::Formula g = env::parse_formula(text);
      round_trips += (g == f && env::print_formula(g) == text) ? 1 : 0;
    } catch (const std::exception&) {
    }
  }
  int total_ok = 0;
  for (int i = 0; i < 100000; ++i) {
    env::ProofState s;
    const std::uint64_t goals = uniform_index(rng, 4);
    for (std::uint64_t g = 0; g < goals; ++g) {
      env::Goal goal{{}, random_formula(rng, 3)};
      const std::uint64_t hyps = uniform_index(rng, 11);
      for (std::uint64_t h = 0; h < hyps; ++h) goal.hyps.push_back(random_formula(rng, 2));
      s.goals.push_back(goal);
    }
    const env::Tactic t = env::tactic_from_action(static_cast<int>(uniform_index(rng, env::kNumActions)));
    try {
      const env::StepResult r = env::apply_tactic(s, t);
      total_ok += (!r.is_ok() || !r.state().complete()) ? 1 : 0;
    } catch (...) {
    }
  }
  const bool ok = total == 1020 && replayed == total && round_trips == 100000 && total_ok == 100000;
  return {ok, "GT replay " + std::to_string(replayed) + "/" + std::to_string(total) + ", parser round-trip " +
                  std::to_string(round_trips) + "/100000, apply_tactic total " + std::to_string(total_ok) +
                  "/100000"};
}

Verdict criterion8(const Workspace& w) {
  bool ok = true;
  std::string diff;
  for (const auto& [name, summary] : w.runs) {
    const app::RunMode mode = app::parse_run_mode(name);
    const fs::path again = w.root / (name + "_again");
    app::run_training(run_options(w, mode, again));
    const bool same = slurp(w.root / name / "metrics.csv") == slurp(again / "metrics.csv") &&
                      slurp(w.root / name / "validation.csv") == slurp(again / "validation.csv") &&
                      slurp(summary.final_checkpoint) == slurp(again / "final.ckpt");
    if (!same) diff += " " + name;
    ok = ok && same;
  }
  // SolveReports: same checkpoint, repeated and with a different thread count.
  const policy::PolicyNet net =
      policy::policy_from_checkpoint(nn::load_checkpoint(w.runs.at("gfn").final_checkpoint));
  const search::SearchConfig sc;
  const std::string r1 = search::to_json(search::evaluate_split(net, w.corpus.valid, sc, 1));
  const std::string r2 = search::to_json(search::evaluate_split(net, w.corpus.valid, sc, 1));
  const std::string r3 = search::to_json(search::evaluate_split(net, w.corpus.valid, sc, 4));
  const bool reports = r1 == r2 && r1 == r3;
  ok = ok && reports;
  return {ok, "metrics.csv/validation.csv/final.ckpt identical on rerun for " +
                  std::to_string(w.runs.size()) + " modes" + (diff.empty() ? "" : " (differs:" + diff + ")") +
                  "; SolveReport identical across reruns and 1/4 workers: " + (reports ? "yes" : "no")};
}

Verdict criterion9() {
  const double c1 = baselines::ppo_clip_contribution(2.0, 1.0, 0.2);
  const double c2 = baselines::ppo_clip_contribution(0.5, -1.0, 0.2);
  const double g1 = baselines::ppo_clip_ratio_grad(2.0, 1.0, 0.2);
  const double g2 = baselines::ppo_clip_ratio_grad(0.5, -1.0, 0.2);

  // Through the whole loss: a sample on the clipped branch contributes no
  // policy gradient.
  const data::Theorem thm = theorem_of("t", "a -> a", {"intro", "exact h1"});
  policy::PolicyNet net = policy::PolicyNet::random(51, false, policy::ActionMask::full(), 1.0);
  baselines::ValueHead value = baselines::ValueHead::zeros();
  baselines::PpoConfig cfg;
  cfg.value_coef = 0.0;
  baselines::PpoSample s;
  s.theorem = &thm;
  s.state = thm.initial_state;
  s.action = 0;
  const auto ev = policy::evaluate(net, policy::encode_state(thm, {}, s.state, policy::EncodingMode::History));
  s.old_log_prob = ev.log_probs[0] - std::log(2.0);  // ratio 2
  s.advantage = 1.0;
  nn::ParamStore pg = net.params().zeros_like(), vg = value.params.zeros_like();
  const baselines::PpoLoss l = baselines::ppo_loss(net, value, std::vector{s}, cfg, &pg, &vg);
  const double gnorm = std::sqrt(pg.squared_norm());

  const bool ok = std::abs(c1 - 1.2) < 1e-15 && std::abs(c2 + 0.8) < 1e-15 && g1 == 0.0 && g2 == 0.0 &&
                  gnorm == 0.0 && std::abs(l.surrogate - 1.2) < 1e-12;
  return {ok, "contribution(r=2, A=+1) " + fmt("%.4g", c1) + ", contribution(r=0.5, A=-1) " + fmt("%.4g", c2) +
                  ", clipped-branch grad " + fmt("%g", g1) + "/" + fmt("%g", g2) + ", policy grad norm " +
                  fmt("%g", gnorm)};
}

Verdict criterion10(const Workspace& w) {
  const std::vector<double> loss = csv_column(w.root / "sft" / "metrics.csv", "loss");
  constexpr std::size_t kWindow = 100;
  std::vector<double> ma;
  double acc = 0.0;
  for (std::size_t i = 0; i < loss.size(); ++i) {
    acc += loss[i];
    if (i >= kWindow) acc -= loss[i - kWindow];
    if (i + 1 >= kWindow) ma.push_back(acc / kWindow);
  }
  std::size_t rises = 0;
  double worst = 0.0;
  for (std::size_t i = 1; i < ma.size(); ++i) {
    if (ma[i] > ma[i - 1]) {
      ++rises;
      worst = std::max(worst, ma[i] - ma[i - 1]);
    }
  }
  const policy::PolicyNet net =
      policy::policy_from_checkpoint(nn::load_checkpoint(w.runs.at("sft").final_checkpoint));
  const double top1 = baselines::gt_top1_accuracy(net, w.corpus.train);
  const bool ok = rises == 0 && top1 > 0.9 && loss.size() == 2000;
  return {ok, std::to_string(loss.size()) + " steps (2 epochs): 100-step moving average rises at " +
                  std::to_string(rises) + " of " + std::to_string(ma.size() - 1) + " steps (largest +" +
                  fmt("%.3f", worst) + "), MA " + fmt("%.3f", ma.front()) + " -> " + fmt("%.3f", ma.back()) +
                  "; GT top-1 " + fmt("%.3f", top1) + " (> 0.9)"};
}

}  // namespace

int main(int argc, char** argv) {
  Workspace w;
  const bool keep = argc > 1;
  w.root = keep ? fs::path(argv[1])
                : fs::temp_directory_path() / ("flowprover_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(w.root);
  fs::create_directories(w.root);

  const auto t0 = Clock::now();
  prepare(w);
  std::printf("prepared corpus, reward model and 5 training runs in %.1f s\n", seconds_since(t0));

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"reward-proportional sampling on the micro suite", criterion1},
      {"TB optimum on the 2-leaf toy", criterion2},
      {"gradient fidelity", criterion3},
      {"reward formula values", criterion4},
      {"directional training effect", [&] { return criterion5(w); }},
      {"ablation contracts", [&] { return criterion6(w); }},
      {"environment soundness sweep", [&] { return criterion7(w); }},
      {"determinism", [&] { return criterion8(w); }},
      {"PPO clip mechanics", criterion9},
      {"SFT loss curve and accuracy", [&] { return criterion10(w); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::printf("criterion %2zu %s  %s: %s\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  if (!keep) fs::remove_all(w.root);
  return failed == 0 ? 0 : 1;
}
