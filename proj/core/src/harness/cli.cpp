// SPDX-License-Identifier: Apache-2.0
#include "rismarl/harness/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rismarl/harness/experiment.hpp"
#include "rismarl/harness/oracle.hpp"

namespace rismarl {

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const auto& v : split_list(s)) out.push_back(std::stoull(v));
  require(!out.empty(), "no seeds given");
  return out;
}

void print_summary(std::ostream& out, const RunSummary& s, const std::filesystem::path& dir) {
  out << std::setprecision(10) << s.algorithm << " seed " << s.seed << ": test reward " << s.final_row.test_reward
      << ", eta " << s.final_row.test_eta << " Gbit/J, SE reliability " << s.final_row.test_se_reliability
      << ", IoT reliability " << s.final_row.test_iot_reliability << " -> " << dir.string() << '\n';
}

KeyValues tiny_values() {
  KeyValues kv;
  tiny_network().to_key_values(kv);
  tiny_env().to_key_values(kv);
  return kv;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-AP multi-RIS THz MIMO-NOMA scheduling with graph-embedded value-decomposition actor-critic"};
  app.require_subcommand(1);

  std::string config, out_dir, algorithm, seeds;
  std::vector<std::string> overrides;
  int episodes = -1;

  auto common = [&](CLI::App* c) {
    c->add_option("--config,-c", config, "Key-value config file (falls back to $RISMARL_CONFIG)");
    c->add_option("--set", overrides, "Override one config key, key=value")->take_all();
    c->add_option("--seed,--seeds", seeds, "Seed or comma-separated seeds");
    c->add_option("--episodes", episodes, "Training episodes");
  };

  auto* train = app.add_subcommand("train", "Train or run one algorithm for each seed");
  common(train);
  train->add_option("--algorithm,-a", algorithm, "gevdac, central-critic, vdac, ie-vdac, no-ris-csi, no-ris-qos");
  train->add_option("--out,-o", out_dir, "Output directory");

  std::string run_dir;
  int eval_episodes = 1;
  auto* eval = app.add_subcommand("eval", "Greedy evaluation of a saved run");
  common(eval);
  eval->add_option("--run", run_dir, "Run directory holding theta.ckpt and mu.ckpt")->required();
  eval->add_option("--eval-episodes", eval_episodes, "Test episodes");

  bool tiny = false;
  int oracle_episodes = 0;
  auto* oracle = app.add_subcommand("oracle", "Exhaustive one-slot oracle against a trained GE-VDAC");
  common(oracle);
  oracle->add_flag("--tiny", tiny, "Use the built-in tiny network");
  oracle->add_option("--state-episodes", oracle_episodes, "Greedy test episodes whose states are scored");
  oracle->add_option("--out,-o", out_dir, "Output directory");

  std::string param, values, algorithms;
  auto* sweep = app.add_subcommand("sweep", "Every (value, algorithm, seed) combination");
  common(sweep);
  sweep->add_option("--param", param, "Config key to vary; K, NA and J are accepted aliases");
  sweep->add_option("--values", values, "Comma-separated parameter values");
  sweep->add_option("--algorithms", algorithms, "Comma-separated algorithms")->required();
  sweep->add_option("--out,-o", out_dir, "Output directory");

  std::string metric, input, output;
  auto* plot = app.add_subcommand("plot-data", "Tidy CSV for one figure axis");
  plot->add_option("--metric", metric, "reward-vs-step, or <ee|reliability|reward>-vs-<K|NA|J|zeta>")->required();
  plot->add_option("--input,-i", input, "Run or sweep directory")->required();
  plot->add_option("--output,-o", output, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    auto build = [&](KeyValues kv) {
      if (!algorithm.empty()) kv.set("algorithm", algorithm);
      if (episodes >= 0) kv.set("episodes", std::to_string(episodes));
      if (!seeds.empty()) kv.set("seeds", seeds);
      if (!out_dir.empty()) kv.set("output_dir", out_dir);
      return kv;
    };
    if (*train) {
      const auto cfg = ExperimentConfig::from_key_values(build(load_config_values(config, overrides)));
      require(cfg.algorithm != "oracle", "use the oracle subcommand for the oracle");
      for (auto seed : cfg.seeds) {
        const auto dir = std::filesystem::path(cfg.output_dir) / cfg.algorithm / ("seed-" + std::to_string(seed));
        print_summary(out, run_experiment(cfg, seed, dir), dir);
      }
      return 0;
    }
    if (*eval) {
      const auto cfg = ExperimentConfig::from_key_values(build(load_config_values(config, overrides)));
      const auto s = evaluate_checkpoint(cfg, cfg.seeds.front(), run_dir, eval_episodes);
      out << EpisodeSummary::csv_header() << '\n' << s.csv_row() << '\n';
      return 0;
    }
    if (*oracle) {
      KeyValues kv = tiny ? tiny_values() : KeyValues{};
      const auto file = load_config_values(config, overrides);
      for (const auto& [k, v] : file.entries()) kv.set(k, v);
      kv.set("algorithm", "oracle");
      if (oracle_episodes > 0) kv.set("oracle_episodes", std::to_string(oracle_episodes));
      const auto cfg = ExperimentConfig::from_key_values(build(kv));
      for (auto seed : cfg.seeds) {
        const auto dir = std::filesystem::path(cfg.output_dir) / "oracle" / ("seed-" + std::to_string(seed));
        const auto s = run_experiment(cfg, seed, dir);
        out << std::setprecision(10) << "oracle seed " << seed << ": oracle mean reward " << s.oracle_mean
            << ", policy mean reward " << s.policy_mean << ", ratio "
            << (s.oracle_mean != 0 ? s.policy_mean / s.oracle_mean : 0.0) << " -> " << dir.string() << '\n';
      }
      return 0;
    }
    if (*sweep) {
      const auto base = build(load_config_values(config, overrides));
      SweepSpec spec;
      spec.param = param;
      spec.values = split_list(values);
      spec.algorithms = split_list(algorithms);
      spec.seeds = seeds.empty() ? std::vector<std::uint64_t>{1} : parse_seeds(seeds);
      const std::string dir = out_dir.empty() ? "sweep" : out_dir;
      const auto rows = run_sweep(base, spec, dir);
      out << sweep_csv_header() << '\n';
      for (const auto& r : rows) out << r << '\n';
      return 0;
    }
    if (*plot) {
      if (output.empty()) {
        plot_data(metric, input, out);
      } else {
        std::ofstream f(output, std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + output);
        plot_data(metric, input, f);
      }
      return 0;
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace rismarl
