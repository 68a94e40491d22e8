// Copyright 2026 The Lawforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stages.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>

#include "lawforge/analytics.hpp"
#include "lawforge/codec.hpp"
#include "lawforge/generator.hpp"
#include "lawforge/law.hpp"
#include "lawforge/reward.hpp"
#include "lawforge/sim.hpp"
#include "lawforge/weighting.hpp"

namespace lawforge::cli {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

void write_json(const fs::path& path, const json& doc) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << doc.dump(2) << "\n";
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

json path_json(const std::optional<fs::path>& p) { return p ? json(p->string()) : json(); }

void write_manifest(const RunConfig& cfg, const fs::path& out, const std::string& subcommand,
                    const json& inputs, const json& outputs) {
  json m;
  m["schema_version"] = kSchemaVersion;
  m["subcommand"] = subcommand;
  m["config_file"] = cfg.source ? json(cfg.source->string()) : json();
  m["seed"] = cfg.seed;
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  m["config"] = config_snapshot(cfg);
  write_json(out / "manifest.json", m);
}

void note(const std::string& msg) { std::cerr << "lawforge: " << msg << "\n"; }

std::string numbered(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%05zu", prefix, i);
  return buf;
}

reward::WeightedCorpus weighted_corpus(const RunConfig& cfg, const fs::path& weights) {
  auto corpus = stl::load_corpus(cfg.laws);
  const auto report = weighting::load_report(weights);
  if (!report.complete()) throw InputError("weight report '" + weights.string() + "' has unscored laws");
  return reward::WeightedCorpus(std::move(corpus), report.weights());
}

sim::RoadStructure road_of(const RunConfig& cfg, const std::string& tag) {
  return sim::load_road(cfg.roads, tag);
}

// Decodes `seq` into a runnable scenario, or nothing when it is incomplete,
// out of range or violates a constraint.
std::optional<codec::Scenario> runnable(const codec::ActionSequence& seq, const sim::RoadStructure& road) {
  try {
    auto r = codec::decode(seq, road);
    if (!r.clamped.empty()) return std::nullopt;
    codec::check_invariants(r.scenario, road);
    if (!codec::constraint_violations(r.scenario, road).empty()) return std::nullopt;
    return std::move(r.scenario);
  } catch (const InputError&) {
    return std::nullopt;
  }
}

std::vector<gen::TrainExample> training_examples(const std::vector<codec::SequenceRecord>& records,
                                                 const codec::Vocabulary& vocab) {
  std::vector<gen::TrainExample> data;
  data.reserve(records.size());
  for (const auto& r : records) {
    if (!r.sequence.reward) throw InputError("sequence '" + r.id + "' has no reward");
    data.push_back({codec::tokenize(r.sequence, vocab), *r.sequence.reward});
  }
  return data;
}

}  // namespace

void run_weigh(const RunConfig& cfg, const fs::path& out, const std::optional<fs::path>& compare) {
  const auto corpus = stl::load_corpus(cfg.laws);
  std::unique_ptr<weighting::Scorer> scorer;
  if (cfg.scorer == "table") {
    scorer = std::make_unique<weighting::RuleTableScorer>(weighting::load_score_table(cfg.table));
  } else {
    scorer = std::make_unique<weighting::RemoteScorer>(weighting::load_remote_config(*cfg.remote));
  }
  weighting::AssessOptions opts;
  opts.concurrency = cfg.scorer_concurrency;
  auto report = weighting::assess_corpus(corpus, *scorer, opts);
  if (cfg.overrides) report = weighting::apply_overrides(std::move(report), weighting::load_score_table(*cfg.overrides));
  weighting::store_report(report, out / "weights.json");
  json outputs = {{"weights", (out / "weights.json").string()}};
  if (compare) {
    const auto other = weighting::load_report(*compare);
    const auto c = weighting::consistency(report, other);
    json doc = {{"schema_version", kSchemaVersion},
                {"scorers", {report.scorer, other.scorer}},
                {"spearman", std::isfinite(c.spearman) ? json(c.spearman) : json()},
                {"mae", c.mae}};
    write_json(out / "consistency.json", doc);
    outputs["consistency"] = (out / "consistency.json").string();
  }
  write_manifest(cfg, out, "weigh",
                 {{"laws", cfg.laws.string()},
                  {"scorer", cfg.scorer},
                  {"table", cfg.scorer == "table" ? json(cfg.table.string()) : json()},
                  {"overrides", path_json(cfg.overrides)},
                  {"compare", path_json(compare)}},
                 outputs);
  if (!report.complete()) {
    throw StageError("scoring failed for " + std::to_string(report.failures.size()) + " law(s)");
  }
}

void run_encode(const RunConfig& cfg, const fs::path& scenarios, const fs::path& out, bool quantize) {
  const auto road = road_of(cfg, cfg.road);
  const auto vocab = codec::Vocabulary::build(road, cfg.vocab);
  std::vector<codec::SequenceRecord> records;
  for (const auto& s : codec::load_scenarios(scenarios)) {
    auto seq = codec::encode(s.scenario, road);
    if (quantize) seq = codec::detokenize(codec::tokenize(seq, vocab), vocab);
    records.push_back({s.id, road.tag(), std::move(seq)});
  }
  codec::store_sequences(records, out / "sequences.jsonl");
  vocab.save(out / "vocab.json");
  write_manifest(cfg, out, "encode", {{"scenarios", scenarios.string()}, {"road", cfg.road}, {"quantize", quantize}},
                 {{"sequences", (out / "sequences.jsonl").string()}, {"vocab", (out / "vocab.json").string()}});
}

void run_seed_data(const RunConfig& cfg, const fs::path& weights, const fs::path& out) {
  const auto road = road_of(cfg, cfg.road);
  const auto laws = weighted_corpus(cfg, weights);
  const auto vocab = codec::Vocabulary::build(road, cfg.vocab);
  std::mt19937_64 rng(cfg.seed);
  std::vector<codec::NamedScenario> batch;
  std::vector<codec::ActionSequence> sequences;
  std::size_t attempts = 0;
  while (batch.size() < cfg.seed_count) {
    if (++attempts > 20 * cfg.seed_count) throw StageError("seed sampler rejected too many scenarios");
    const auto s = codec::sample_scenario(rng, road, cfg.sampler);
    // Snap onto the vocabulary grid so stored tokens and simulated scenario agree.
    const auto seq = codec::detokenize(codec::tokenize(codec::encode(s, road), vocab), vocab);
    auto q = runnable(seq, road);
    if (!q) continue;
    batch.push_back({numbered("seed", batch.size()), std::move(*q)});
    sequences.push_back(seq);
  }
  note("simulating " + std::to_string(batch.size()) + " seed scenarios on " + road.tag());
  sim::BatchOptions opts;
  opts.mode = sim::TestMode::kCounting;
  opts.threads = cfg.resolved_threads();
  auto sim_cfg = cfg.sim;
  sim_cfg.seed = cfg.seed;
  const auto result = sim::test_batch(batch, road, laws, cfg.ego, sim_cfg, opts);
  std::map<std::string, double> reward_of;
  for (const auto& r : result.rewards) reward_of[r.scenario_id] = r.overall;
  std::vector<codec::SequenceRecord> records;
  std::vector<codec::NamedScenario> kept;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    auto it = reward_of.find(batch[i].id);
    if (it == reward_of.end()) continue;
    auto seq = sequences[i];
    seq.reward = it->second;
    records.push_back({batch[i].id, road.tag(), std::move(seq)});
    kept.push_back(batch[i]);
  }
  if (records.empty()) throw StageError("every seed scenario failed to simulate");
  codec::store_scenarios(kept, out / "scenarios.json");
  codec::store_sequences(records, out / "sequences.jsonl");
  reward::store_rewards(result.rewards, out / "rewards.jsonl");
  sim::store_violation_report(result, sim::TestMode::kCounting, road.tag(), out / "violations.json");
  vocab.save(out / "vocab.json");
  write_manifest(cfg, out, "seed-data",
                 {{"weights", weights.string()}, {"laws", cfg.laws.string()}, {"road", cfg.road}},
                 {{"scenarios", (out / "scenarios.json").string()},
                  {"sequences", (out / "sequences.jsonl").string()},
                  {"rewards", (out / "rewards.jsonl").string()},
                  {"violations", (out / "violations.json").string()},
                  {"vocab", (out / "vocab.json").string()},
                  {"simulation_failures", result.failures.size()}});
}

void run_train(const RunConfig& cfg, const fs::path& data_path, const fs::path& vocab_path, const fs::path& out) {
  const auto vocab = codec::Vocabulary::load(vocab_path);
  const auto records = codec::load_sequences(data_path);
  if (records.empty()) throw InputError("training data '" + data_path.string() + "' is empty");
  const auto data = training_examples(records, vocab);

  gen::ModelConfig mc = cfg.model;
  mc.vocab_size = vocab.size();
  for (const auto& ex : data) {
    if (ex.tokens.size() + 1 > mc.context) {
      throw InputError("a training sequence of " + std::to_string(ex.tokens.size()) +
                       " tokens exceeds the model context");
    }
  }

  note("training proxy on " + std::to_string(data.size()) + " sequences");
  auto pc = cfg.proxy;
  pc.seed = cfg.seed + 1;
  const auto proxy = gen::train_proxy(data, vocab.size(), pc);
  if (proxy.degenerate) note("warning: every training reward is equal; the proxy is constant");

  gen::AttentionModel model(mc, cfg.seed);
  auto tc = cfg.train;
  tc.seed = cfg.seed;
  gen::RewardFn online;
  if (tc.online_fraction > 0.0) {
    online = [p = std::make_shared<gen::ProxyEvaluator>(*proxy.model)](std::span<const int> t) {
      return p->predict(t);
    };
  }
  const auto result = gen::train_generator(model, data, tc, online, [&](std::size_t epoch, double loss) {
    if ((epoch + 1) % 10 == 0 || epoch + 1 == tc.epochs) {
      note("epoch " + std::to_string(epoch + 1) + "/" + std::to_string(tc.epochs) + " loss " + std::to_string(loss));
    }
  });

  gen::save_model(model, vocab.hash(), out / "model.ckpt");
  gen::save_proxy(*proxy.model, vocab.hash(), out / "proxy.ckpt");
  json log = {{"schema_version", kSchemaVersion},
              {"epoch_loss", result.epoch_loss},
              {"steps", result.steps},
              {"log_z", model.log_z()},
              {"proxy",
               {{"train_mre", proxy.train_mre},
                {"heldout_mre", std::isfinite(proxy.heldout_mre) ? json(proxy.heldout_mre) : json()},
                {"train_size", proxy.train_size},
                {"heldout_size", proxy.heldout_size},
                {"degenerate", proxy.degenerate}}}};
  write_json(out / "training.json", log);
  write_manifest(cfg, out, "train", {{"data", data_path.string()}, {"vocab", vocab_path.string()}},
                 {{"model", (out / "model.ckpt").string()},
                  {"proxy", (out / "proxy.ckpt").string()},
                  {"training_log", (out / "training.json").string()}});
}

void run_generate(const RunConfig& cfg, const fs::path& model_path, const fs::path& vocab_path,
                  const std::optional<fs::path>& proxy_path, const fs::path& out) {
  const auto vocab = codec::Vocabulary::load(vocab_path);
  const auto road = road_of(cfg, vocab.road());
  const auto model = gen::load_model(model_path, vocab.hash());
  if (cfg.rerank_factor > 1 && !proxy_path) throw ConfigError("reranking needs a proxy checkpoint");
  const std::size_t max_length = cfg.max_length ? cfg.max_length : model.config().context - 1;
  if (max_length >= model.config().context) throw ConfigError("generate.max_length must be below the model context");
  auto samples = gen::sample_batch(model, cfg.generate_count * cfg.rerank_factor, cfg.generate_temperature,
                                   cfg.seed, max_length);
  if (cfg.rerank_factor > 1) {
    const gen::ProxyEvaluator proxy(gen::load_proxy(*proxy_path, vocab.hash()));
    std::vector<double> score(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) score[i] = proxy.predict(samples[i].tokens);
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return score[a] > score[b]; });
    order.resize(cfg.generate_count);
    std::sort(order.begin(), order.end());
    std::vector<gen::Sample> kept;
    for (auto i : order) kept.push_back(std::move(samples[i]));
    samples = std::move(kept);
  }
  std::vector<codec::SequenceRecord> records;
  std::vector<codec::ActionSequence> seqs;
  std::vector<codec::NamedScenario> scenarios;
  std::size_t terminated = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto seq = codec::detokenize(samples[i].tokens, vocab);
    terminated += samples[i].terminated;
    const std::string id = numbered("gen", i);
    if (auto s = runnable(seq, road)) scenarios.push_back({id, std::move(*s)});
    seqs.push_back(seq);
    records.push_back({id, road.tag(), std::move(seq)});
  }
  const auto v = analytics::validity(seqs, road);
  codec::store_sequences(records, out / "sequences.jsonl");
  codec::store_scenarios(scenarios, out / "scenarios.json");
  write_json(out / "generation.json", {{"schema_version", kSchemaVersion},
                                       {"count", samples.size()},
                                       {"temperature", cfg.generate_temperature},
                                       {"terminated", terminated},
                                       {"complete", v.complete},
                                       {"satisfied", v.satisfied},
                                       {"completeness", v.completeness},
                                       {"satisfaction", v.satisfaction}});
  write_manifest(cfg, out, "generate",
                 {{"model", model_path.string()}, {"vocab", vocab_path.string()}, {"proxy", path_json(proxy_path)}},
                 {{"sequences", (out / "sequences.jsonl").string()},
                  {"scenarios", (out / "scenarios.json").string()},
                  {"summary", (out / "generation.json").string()}});
}

void run_test(const RunConfig& cfg, const fs::path& scenarios, const fs::path& weights, const fs::path& out) {
  const auto road = road_of(cfg, cfg.road);
  const auto laws = weighted_corpus(cfg, weights);
  const auto batch = codec::load_scenarios(scenarios);
  sim::BatchOptions opts;
  opts.mode = cfg.mode;
  opts.threads = cfg.resolved_threads();
  opts.keep_traces = true;
  auto sim_cfg = cfg.sim;
  sim_cfg.seed = cfg.seed;
  note("testing " + std::to_string(batch.size()) + " scenarios on " + road.tag() + " (" + mode_name(cfg.mode) + ")");
  const auto result = sim::test_batch(batch, road, laws, cfg.ego, sim_cfg, opts);
  sim::store_violation_report(result, cfg.mode, road.tag(), out / "violations.json");
  reward::store_rewards(result.rewards, out / "rewards.jsonl");
  analytics::store_trajectories(analytics::extract_trajectories(result.traces, road.tag(), cfg.report.stride),
                                out / "trajectories.json");
  write_manifest(cfg, out, "test",
                 {{"scenarios", scenarios.string()}, {"weights", weights.string()}, {"road", cfg.road},
                  {"mode", mode_name(cfg.mode)}},
                 {{"violations", (out / "violations.json").string()},
                  {"rewards", (out / "rewards.jsonl").string()},
                  {"trajectories", (out / "trajectories.json").string()}});
  if (!batch.empty() && result.failures.size() == batch.size()) {
    throw StageError("every scenario failed to simulate; first error: " + result.failures.front().error);
  }
}

void run_analyze(const RunConfig& cfg, const fs::path& sequences, const fs::path& vocab_path,
                 const std::optional<fs::path>& trajectories, const std::optional<fs::path>& violations,
                 const fs::path& out) {
  const auto vocab = codec::Vocabulary::load(vocab_path);
  const auto road = road_of(cfg, vocab.road());
  std::vector<codec::ActionSequence> seqs;
  for (auto& r : codec::load_sequences(sequences)) seqs.push_back(std::move(r.sequence));
  std::optional<analytics::TrajectorySet> traj;
  if (trajectories) traj = analytics::load_trajectories(*trajectories);
  auto opts = cfg.report;
  opts.threads = cfg.resolved_threads();
  const auto report = analytics::build_report(seqs, road, vocab, traj ? &*traj : nullptr, opts);
  analytics::store_report(report, out / "metrics.json");
  json outputs = {{"metrics", (out / "metrics.json").string()}};
  if (!report.dtw.empty()) {
    analytics::write_box_plot(report.dtw, "Pairwise DTW per NPC (" + road.tag() + ")", out / "dtw.svg");
    outputs["dtw_plot"] = (out / "dtw.svg").string();
  }
  if (violations) {
    const json doc = read_json(*violations);
    auto it = doc.find("counts");
    if (it == doc.end() || !it->is_object()) throw SchemaError("/counts", "violation report needs a counts object");
    std::map<std::string, double> bars;
    for (const auto& [law, n] : it->items()) {
      if (!n.is_number()) throw SchemaError("/counts/" + law, "expected a number");
      bars[law] = n.get<double>();
    }
    analytics::write_bar_chart(bars, "Violations per law (" + road.tag() + ")", out / "violations.svg");
    outputs["violation_plot"] = (out / "violations.svg").string();
  }
  write_manifest(cfg, out, "analyze",
                 {{"sequences", sequences.string()},
                  {"vocab", vocab_path.string()},
                  {"trajectories", path_json(trajectories)},
                  {"violations", path_json(violations)}},
                 outputs);
}

void run_pipeline(const RunConfig& cfg) {
  const fs::path root = cfg.output_dir;
  note("weigh");
  run_weigh(cfg, root / "weigh", std::nullopt);
  note("seed-data");
  run_seed_data(cfg, root / "weigh" / "weights.json", root / "seed");
  note("train");
  run_train(cfg, root / "seed" / "sequences.jsonl", root / "seed" / "vocab.json", root / "train");
  note("generate");
  run_generate(cfg, root / "train" / "model.ckpt", root / "seed" / "vocab.json", root / "train" / "proxy.ckpt",
               root / "generate");
  note("test");
  run_test(cfg, root / "generate" / "scenarios.json", root / "weigh" / "weights.json", root / "test");
  note("analyze");
  run_analyze(cfg, root / "generate" / "sequences.jsonl", root / "seed" / "vocab.json",
              root / "test" / "trajectories.json", root / "test" / "violations.json", root / "analyze");
  json stages = json::object();
  for (const char* s : {"weigh", "seed", "train", "generate", "test", "analyze"}) {
    stages[s] = (root / s / "manifest.json").string();
  }
  write_manifest(cfg, root, "pipeline", json::object(), {{"stages", stages}});
}

}  // namespace lawforge::cli
