// SPDX-License-Identifier: Apache-2.0
#include "rismarl/harness/experiment.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rismarl/ad/checkpoint.hpp"
#include "rismarl/harness/baselines.hpp"
#include "rismarl/harness/oracle.hpp"

namespace rismarl {

namespace fs = std::filesystem;

const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names{"gevdac",     "central-critic", "vdac",  "ie-vdac",
                                              "no-ris-csi", "no-ris-qos",     "oracle"};
  return names;
}

bool is_learner(const std::string& a) {
  return a == "gevdac" || a == "central-critic" || a == "vdac" || a == "ie-vdac";
}

namespace {

// variant always follows `algorithm`, even if the caller edited it after parsing
LearnerConfig learner_for(const ExperimentConfig& cfg) {
  auto lc = cfg.learner;
  lc.policy.variant = is_learner(cfg.algorithm) ? parse_variant(cfg.algorithm) : Variant::GeVdac;
  return lc;
}

}  // namespace

void ExperimentConfig::validate() const {
  const auto& names = algorithm_names();
  require(std::find(names.begin(), names.end(), algorithm) != names.end(), "unknown algorithm: " + algorithm);
  require(!seeds.empty(), "at least one seed required");
  require(oracle_episodes >= 1, "oracle_episodes must be positive");
  net.validate();
  env.validate();
  learner.validate();
}

ExperimentConfig ExperimentConfig::from_key_values(const KeyValues& kv) {
  ExperimentConfig c;
  c.algorithm = kv.get_string("algorithm", c.algorithm);
  c.net = NetworkConfig::from_key_values(kv);
  c.env = EnvConfig::from_key_values(kv);
  c.learner = LearnerConfig::from_key_values(kv);
  c.learner.policy.variant = is_learner(c.algorithm) ? parse_variant(c.algorithm) : Variant::GeVdac;
  if (kv.contains("seeds")) {
    c.seeds.clear();
    for (double s : kv.get_doubles("seeds", {})) {
      require(s >= 0 && s == static_cast<double>(static_cast<std::uint64_t>(s)), "seeds must be non-negative integers");
      c.seeds.push_back(static_cast<std::uint64_t>(s));
    }
  }
  c.output_dir = kv.get_string("output_dir", c.output_dir);
  c.oracle_episodes = static_cast<int>(kv.get_int("oracle_episodes", c.oracle_episodes));
  const auto unused = kv.unused_keys();
  if (!unused.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : unused) msg += " " + k;
    throw InvalidArgument(msg);
  }
  c.validate();
  return c;
}

KeyValues ExperimentConfig::to_key_values() const {
  KeyValues kv;
  net.to_key_values(kv);
  env.to_key_values(kv);
  learner.to_key_values(kv);
  kv.set("algorithm", algorithm);
  std::string s;
  for (std::size_t i = 0; i < seeds.size(); ++i) s += (i ? "," : "") + std::to_string(seeds[i]);
  kv.set("seeds", s);
  kv.set("output_dir", output_dir);
  kv.set("oracle_episodes", std::to_string(oracle_episodes));
  return kv;
}

KeyValues load_config_values(const std::string& path, const std::vector<std::string>& overrides) {
  std::string p = path;
  if (p.empty())
    if (const char* env = std::getenv("RISMARL_CONFIG")) p = env;
  KeyValues kv = p.empty() ? KeyValues{} : KeyValues::load(p);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    require(eq != std::string::npos && eq > 0, "override must look like key=value: " + o);
    kv.set(o.substr(0, eq), o.substr(eq + 1));
  }
  return kv;
}

void apply_parameter(KeyValues& kv, const std::string& param, const std::string& value) {
  if (param == "K") {
    const auto k = std::stoll(value);
    const auto se = kv.contains("se_users_per_ap") ? kv.get_int("se_users_per_ap", 4) : NetworkConfig{}.se_users_per_ap;
    require(k > se, "K must exceed se_users_per_ap");
    kv.set("iot_users_per_ap", std::to_string(k - se));
  } else if (param == "NA") {
    kv.set("antennas", value);
  } else if (param == "J") {
    kv.set("num_ris", value);
  } else {
    kv.set(param, value);
  }
}

namespace {

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

std::string config_text(const ExperimentConfig& cfg) {
  const auto kv = cfg.to_key_values();
  std::string s;
  for (const auto& [k, v] : kv.entries()) s += k + " = " + v + "\n";
  return s;
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg, std::uint64_t seed, const fs::path& dir) {
  cfg.validate();
  fs::create_directories(dir);
  write_text(dir / "config.cfg", config_text(cfg));
  LineWriter steps(dir / "steps.jsonl");
  LineWriter curve(dir / "curve.csv");
  LineWriter episodes(dir / "episodes.csv");
  TrainerSinks sinks{&steps, &curve, &episodes, (dir / "diverged.ckpt").string()};
  RunSummary sum;
  sum.algorithm = cfg.algorithm;
  sum.seed = seed;
  std::vector<CurveRow> rows;
  nlohmann::json extra = nlohmann::json::object();
  if (is_learner(cfg.algorithm) || cfg.algorithm == "oracle") {
    Trainer trainer(cfg.net, cfg.env, learner_for(cfg), seed);
    sum.env_checksum = trainer.train_env().checksum();
    rows = trainer.train(sinks);
    ad::save_checkpoint(trainer.policy().theta(), (dir / "theta.ckpt").string());
    ad::save_checkpoint(trainer.policy().mu(), (dir / "mu.ckpt").string());
    if (cfg.algorithm == "oracle") {
      auto visited = greedy_policy_states(trainer, trainer.test_env(), cfg.oracle_episodes);
      const auto oracle = exhaustive_oracle(trainer.test_env(), visited.states);
      double policy_mean = 0;
      for (double r : visited.rewards) policy_mean += r;
      if (!visited.rewards.empty()) policy_mean /= static_cast<double>(visited.rewards.size());
      sum.oracle_mean = oracle.mean_best;
      sum.policy_mean = policy_mean;
      extra["oracle"] = {{"states", visited.states.size()},
                         {"joint_actions", oracle.actions.size()},
                         {"oracle_mean_reward", oracle.mean_best},
                         {"policy_mean_reward", policy_mean},
                         {"ratio", oracle.mean_best != 0 ? policy_mean / oracle.mean_best : 0.0}};
    }
  } else {
    const auto kind = parse_no_ris_kind(cfg.algorithm.substr(std::string("no-ris-").size()));
    sum.env_checksum = Environment(cfg.net, cfg.env, derive_seed(seed, "env/train")).checksum();
    rows = run_no_ris_benchmark(cfg.net, cfg.env, kind, cfg.learner.episodes, cfg.learner.eval_episodes, seed, sinks);
  }
  if (!rows.empty()) sum.final_row = rows.back();
  nlohmann::json j = {{"algorithm", cfg.algorithm},
                      {"seed", seed},
                      {"env_checksum", hex(sum.env_checksum)},
                      {"episode_length", cfg.env.episode_length},
                      {"episodes", cfg.learner.episodes},
                      {"final_test_reward", sum.final_row.test_reward},
                      {"final_test_eta", sum.final_row.test_eta},
                      {"final_test_se_reliability", sum.final_row.test_se_reliability},
                      {"final_test_iot_reliability", sum.final_row.test_iot_reliability},
                      {"exchange_volume", sum.final_row.exchange_volume}};
  j.update(extra);
  write_text(dir / "run.json", j.dump(2) + "\n");
  return sum;
}

EpisodeSummary evaluate_checkpoint(const ExperimentConfig& cfg, std::uint64_t seed, const fs::path& run_dir,
                                   int episodes) {
  require(is_learner(cfg.algorithm) || cfg.algorithm == "oracle", "eval needs a learner algorithm");
  require(episodes >= 1, "eval needs at least one episode");
  auto lc = learner_for(cfg);
  lc.eval_episodes = episodes;
  Trainer trainer(cfg.net, cfg.env, lc, seed);
  ad::load_checkpoint(trainer.policy().theta(), (run_dir / "theta.ckpt").string());
  ad::load_checkpoint(trainer.policy().mu(), (run_dir / "mu.ckpt").string());
  return trainer.evaluate(0);
}

std::string sweep_csv_header() {
  return "param,value,algorithm,seed,final_test_reward,test_eta,test_se_reliability,test_iot_reliability,"
         "test_mean_q,exchange_volume,env_checksum";
}

std::vector<std::string> run_sweep(const KeyValues& base, const SweepSpec& spec, const fs::path& out) {
  require(!spec.algorithms.empty() && !spec.seeds.empty(), "sweep needs algorithms and seeds");
  require(spec.param.empty() || !spec.values.empty(), "sweep parameter needs values");
  const std::vector<std::string> values = spec.param.empty() ? std::vector<std::string>{""} : spec.values;
  std::vector<std::string> rows;
  LineWriter csv(out / "sweep.csv");
  csv.write(sweep_csv_header());
  for (const auto& value : values) {
    for (const auto& alg : spec.algorithms) {
      KeyValues kv = base;
      if (!spec.param.empty()) apply_parameter(kv, spec.param, value);
      kv.set("algorithm", alg);
      const auto cfg = ExperimentConfig::from_key_values(kv);
      for (auto seed : spec.seeds) {
        fs::path dir = out;
        if (!spec.param.empty()) dir /= spec.param + "-" + value;
        dir = dir / alg / ("seed-" + std::to_string(seed));
        const auto s = run_experiment(cfg, seed, dir);
        std::ostringstream os;
        os << std::setprecision(17) << spec.param << ',' << value << ',' << alg << ',' << seed << ','
           << s.final_row.test_reward << ',' << s.final_row.test_eta << ',' << s.final_row.test_se_reliability << ','
           << s.final_row.test_iot_reliability << ',' << s.final_row.test_mean_q << ','
           << s.final_row.exchange_volume << ',' << hex(s.env_checksum);
        csv.write(os.str());
        rows.push_back(os.str());
      }
    }
  }
  return rows;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(line);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::map<std::string, std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::string line;
  std::getline(in, line);
  const auto header = split(line, ',');
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) throw std::runtime_error("malformed row in " + p.string());
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void plot_data(const std::string& metric, const fs::path& input, std::ostream& out) {
  if (metric == "reward-vs-step") {
    std::vector<fs::path> runs;
    for (const auto& e : fs::recursive_directory_iterator(input))
      if (e.is_regular_file() && e.path().filename() == "run.json") runs.push_back(e.path().parent_path());
    std::sort(runs.begin(), runs.end());
    out << "run,algorithm,seed,step,test_reward,test_eta\n";
    for (const auto& dir : runs) {
      std::ifstream jf(dir / "run.json");
      const auto j = nlohmann::json::parse(jf);
      const long long T = j.at("episode_length").get<long long>();
      const auto rel = fs::relative(dir, input).generic_string();
      for (const auto& row : read_csv(dir / "curve.csv")) {
        const long long step = (std::stoll(row.at("episode")) + 1) * T;
        out << rel << ',' << j.at("algorithm").get<std::string>() << ',' << j.at("seed").get<std::uint64_t>() << ','
            << step << ',' << row.at("test_reward") << ',' << row.at("test_eta") << '\n';
      }
    }
    return;
  }
  const auto dash = metric.find("-vs-");
  require(dash != std::string::npos, "unknown metric: " + metric);
  const auto y = metric.substr(0, dash), x = metric.substr(dash + 4);
  static const std::map<std::string, std::string> axis{{"K", "K"}, {"NA", "NA"}, {"J", "J"}, {"zeta", "zeta"}};
  require(axis.count(x) != 0, "unknown metric axis: " + x);
  require(y == "ee" || y == "reliability" || y == "reward", "unknown metric: " + y);
  std::vector<std::string> accepted{x};
  if (x == "NA") accepted.push_back("antennas");
  if (x == "J") accepted.push_back("num_ris");
  if (y == "ee")
    out << x << ",algorithm,seed,eta\n";
  else if (y == "reliability")
    out << x << ",algorithm,seed,se_reliability,iot_reliability\n";
  else
    out << x << ",algorithm,seed,test_reward\n";
  for (const auto& row : read_csv(input / "sweep.csv")) {
    if (std::find(accepted.begin(), accepted.end(), row.at("param")) == accepted.end()) continue;
    out << row.at("value") << ',' << row.at("algorithm") << ',' << row.at("seed") << ',';
    if (y == "ee")
      out << row.at("test_eta");
    else if (y == "reliability")
      out << row.at("test_se_reliability") << ',' << row.at("test_iot_reliability");
    else
      out << row.at("final_test_reward");
    out << '\n';
  }
}

}  // namespace rismarl
