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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "config.hpp"
#include "lawforge/error.hpp"
#include "stages.hpp"

namespace {

using lawforge::cli::fs::path;

constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;
constexpr int kExitStage = 4;

// Flags shared by every subcommand; unset flags keep the config values.
struct Common {
  std::optional<path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<std::string> road;
  std::optional<path> laws;
  path out;
};

void add_common(CLI::App* cmd, Common& c, bool road, bool laws, bool out_required = true) {
  cmd->add_option("--config", c.config, "Run configuration (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--threads", c.threads, "Worker threads (0: all cores)");
  if (road) cmd->add_option("--road", c.road, "Road structure tag (S1..S4)");
  if (laws) cmd->add_option("--laws", c.laws, "Law corpus file");
  auto* o = cmd->add_option("--out", c.out, "Output directory");
  if (out_required) o->required();
}

lawforge::cli::RunConfig resolve(const Common& c) {
  auto cfg = lawforge::cli::load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.threads) cfg.threads = *c.threads;
  if (c.road) cfg.road = *c.road;
  if (c.laws) cfg.laws = *c.laws;
  if (!c.out.empty()) cfg.output_dir = c.out;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = lawforge::cli;
  CLI::App app{"lawforge: law-guided scenario generation and testing"};
  app.require_subcommand(1);

  Common weigh_c;
  std::optional<std::string> scorer;
  std::optional<path> table, remote, overrides, compare;
  auto* weigh = app.add_subcommand("weigh", "Score laws for severity and occurrence, write risk weights");
  add_common(weigh, weigh_c, false, true);
  weigh->add_option("--scorer", scorer, "table or remote");
  weigh->add_option("--table", table, "Score table (.toml or .json)")->check(CLI::ExistingFile);
  weigh->add_option("--remote", remote, "Remote scorer settings (JSON)")->check(CLI::ExistingFile);
  weigh->add_option("--overrides", overrides, "Expert override table")->check(CLI::ExistingFile);
  weigh->add_option("--compare", compare, "Second weight report for consistency statistics")
      ->check(CLI::ExistingFile);

  Common encode_c;
  path encode_scenarios;
  bool quantize = false;
  auto* encode = app.add_subcommand("encode", "Encode scenario scripts as action sequences");
  add_common(encode, encode_c, true, false);
  encode->add_option("--scenarios", encode_scenarios, "Scenario file")->required();
  encode->add_flag("--quantize", quantize, "Snap values onto the vocabulary grid");

  Common seed_c;
  path seed_weights;
  std::optional<std::size_t> seed_count;
  auto* seed = app.add_subcommand("seed-data", "Sample, simulate and score a seed scenario corpus");
  add_common(seed, seed_c, true, true);
  seed->add_option("--weights", seed_weights, "Weight report from weigh")->required();
  seed->add_option("--count", seed_count, "Number of seed scenarios");

  Common train_c;
  path train_data, train_vocab;
  std::optional<std::size_t> epochs;
  auto* train = app.add_subcommand("train", "Train the proxy and the generator");
  add_common(train, train_c, false, false);
  train->add_option("--data", train_data, "Sequence file with rewards")->required();
  train->add_option("--vocab", train_vocab, "Vocabulary file")->required();
  train->add_option("--epochs", epochs, "Generator epochs");

  Common gen_c;
  path gen_model, gen_vocab;
  std::optional<path> gen_proxy;
  std::optional<std::size_t> gen_count, rerank;
  std::optional<double> temperature;
  auto* generate = app.add_subcommand("generate", "Sample scenarios from a trained generator");
  add_common(generate, gen_c, false, false);
  generate->add_option("--model", gen_model, "Generator checkpoint")->required();
  generate->add_option("--vocab", gen_vocab, "Vocabulary file")->required();
  generate->add_option("--proxy", gen_proxy, "Proxy checkpoint (for reranking)");
  generate->add_option("--count", gen_count, "Number of sequences");
  generate->add_option("--temperature", temperature, "Sampling temperature");
  generate->add_option("--rerank-factor", rerank, "Draw count*k samples and keep the best count by proxy");

  Common test_c;
  path test_scenarios, test_weights;
  std::optional<std::string> mode;
  auto* test = app.add_subcommand("test", "Simulate scenarios and monitor the laws");
  add_common(test, test_c, true, true);
  test->add_option("--scenarios", test_scenarios, "Scenario file")->required();
  test->add_option("--weights", test_weights, "Weight report from weigh")->required();
  test->add_option("--mode", mode, "coverage or counting");

  Common an_c;
  path an_sequences, an_vocab;
  std::optional<path> an_traj, an_viol;
  auto* analyze = app.add_subcommand("analyze", "Diversity and validity metrics with plots");
  add_common(analyze, an_c, false, false);
  analyze->add_option("--sequences", an_sequences, "Sequence file")->required();
  analyze->add_option("--vocab", an_vocab, "Vocabulary file")->required();
  analyze->add_option("--trajectories", an_traj, "Trajectory file from test");
  analyze->add_option("--violations", an_viol, "Violation report from test");

  Common pipe_c;
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage in sequence");
  add_common(pipeline, pipe_c, true, true, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return e.get_exit_code() == 0 ? app.exit(e) : (app.exit(e), kExitConfig);
  }

  try {
    if (*weigh) {
      auto cfg = resolve(weigh_c);
      if (scorer) cfg.scorer = *scorer;
      if (table) cfg.table = *table;
      if (remote) cfg.remote = *remote;
      if (overrides) cfg.overrides = *overrides;
      cfg.validate();
      cli::run_weigh(cfg, weigh_c.out, compare);
    } else if (*encode) {
      cli::run_encode(resolve(encode_c), encode_scenarios, encode_c.out, quantize);
    } else if (*seed) {
      auto cfg = resolve(seed_c);
      if (seed_count) cfg.seed_count = *seed_count;
      cfg.validate();
      cli::run_seed_data(cfg, seed_weights, seed_c.out);
    } else if (*train) {
      auto cfg = resolve(train_c);
      if (epochs) cfg.train.epochs = *epochs;
      cfg.validate();
      cli::run_train(cfg, train_data, train_vocab, train_c.out);
    } else if (*generate) {
      auto cfg = resolve(gen_c);
      if (gen_count) cfg.generate_count = *gen_count;
      if (temperature) cfg.generate_temperature = *temperature;
      if (rerank) cfg.rerank_factor = *rerank;
      cfg.validate();
      cli::run_generate(cfg, gen_model, gen_vocab, gen_proxy, gen_c.out);
    } else if (*test) {
      auto cfg = resolve(test_c);
      if (mode) cfg.mode = cli::parse_mode(*mode);
      cli::run_test(cfg, test_scenarios, test_weights, test_c.out);
    } else if (*analyze) {
      cli::run_analyze(resolve(an_c), an_sequences, an_vocab, an_traj, an_viol, an_c.out);
    } else if (*pipeline) {
      cli::run_pipeline(resolve(pipe_c));
    }
  } catch (const lawforge::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const lawforge::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const lawforge::StageError& e) {
    std::cerr << "stage failure: " << e.what() << "\n";
    return kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "stage failure: " << e.what() << "\n";
    return kExitStage;
  }
  return 0;
}
