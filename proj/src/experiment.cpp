#include "bayespoker/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace bayespoker {

std::string to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["game"] = c.game;
  j["canonical_suits"] = c.canonical_suits;
  j["p1_kinds"] = c.p1_kinds;
  j["p2_kind"] = c.p2_kind;
  j["trials"] = c.trials;
  j["hands"] = c.hands;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["window"] = c.window;
  j["ensemble_size"] = c.agent.ensemble_size;
  j["concentration"] = c.agent.concentration;
  j["nash_epsilon"] = c.agent.nash_epsilon;
  j["nash_max_iterations"] = c.agent.nash_max_iterations;
  j["nash_check_every"] = c.agent.nash_check_every;
  return j.dump(2);
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("experiment config: invalid JSON: ") + e.what());
  }
  ExperimentConfig c;
  try {
    c.game = j.value("game", c.game);
    c.canonical_suits = j.value("canonical_suits", c.canonical_suits);
    if (j.contains("p1_kinds")) c.p1_kinds = j.at("p1_kinds").get<std::vector<std::string>>();
    c.p2_kind = j.value("p2_kind", c.p2_kind);
    c.trials = j.value("trials", c.trials);
    c.hands = j.value("hands", c.hands);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    c.window = j.value("window", c.window);
    c.agent.ensemble_size = j.value("ensemble_size", c.agent.ensemble_size);
    c.agent.concentration = j.value("concentration", c.agent.concentration);
    c.agent.nash_epsilon = j.value("nash_epsilon", c.agent.nash_epsilon);
    c.agent.nash_max_iterations = j.value("nash_max_iterations", c.agent.nash_max_iterations);
    c.agent.nash_check_every = j.value("nash_check_every", c.agent.nash_check_every);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("experiment config: bad field: ") + e.what());
  }
  return c;
}

ExperimentConfig experiment_config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open experiment config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return experiment_config_from_json(text.str());
}

std::vector<double> winning_rate(const std::vector<double>& mean_bankroll, int window) {
  const int H = static_cast<int>(mean_bankroll.size());
  if (window < 1) throw std::invalid_argument("winning_rate: window must be at least 1");
  if (window >= H)
    throw std::invalid_argument("winning_rate: window must be smaller than the hand count");
  // m[h] = mean bankroll after h hands, with m[0] defined as 0 but the lower
  // edge clamped to h == 1 so every slope uses observed points only.
  const auto m = [&](int h) { return mean_bankroll[static_cast<std::size_t>(h - 1)]; };
  std::vector<double> rate(static_cast<std::size_t>(H));
  for (int h = 1; h <= H; ++h) {
    const int hi = std::min(H, h + window);
    const int lo = std::max(1, h - window);
    rate[static_cast<std::size_t>(h - 1)] = (m(hi) - m(lo)) / static_cast<double>(hi - lo);
  }
  return rate;
}

namespace {

// Per-kind agent options: "opti" gets one shared pre-solved profile and
// "fixed(...)" kinds get their file loaded once.
struct KindPlan {
  std::unordered_map<std::string, AgentOptions> options;

  KindPlan(std::shared_ptr<const InfosetIndex> index, const ExperimentConfig& config) {
    std::vector<std::string> kinds = config.p1_kinds;
    kinds.push_back(config.p2_kind);
    std::shared_ptr<const BehaviourStrategy> opti_profile;
    for (const std::string& kind : kinds) {
      if (options.count(kind)) continue;
      AgentOptions opt = config.agent;
      if (kind == "opti") {
        if (!opti_profile) {
          SolveOptions sopt;
          sopt.seed = derive_seed(config.seed, "opti.solve");
          sopt.max_iterations = opt.nash_max_iterations;
          sopt.check_every = opt.nash_check_every;
          opti_profile = std::make_shared<BehaviourStrategy>(
              solve_nash(index, opt.nash_epsilon, sopt).profile);
        }
        opt.profile = opti_profile;
      } else if (kind.rfind("fixed", 0) == 0) {
        // Parse and load once so worker threads never touch the filesystem.
        auto probe = make_agent(index, Seat::P1, kind, config.agent);
        auto* fixed = dynamic_cast<const FixedProfileProvider*>(probe.get());
        if (fixed && fixed->fixed_profile())
          opt.profile = std::make_shared<BehaviourStrategy>(*fixed->fixed_profile());
      }
      options.emplace(kind, std::move(opt));
    }
  }
};

TrialSeries aggregate(const std::vector<std::vector<int>>& cumulative, int hands,
                      int window) {
  const int n = static_cast<int>(cumulative.size());
  TrialSeries series;
  series.trials = n;
  series.mean_bankroll.resize(static_cast<std::size_t>(hands));
  series.stderr_.resize(static_cast<std::size_t>(hands));
  // Exact integer sums in trial order: independent of scheduling.
  std::vector<std::int64_t> s1(static_cast<std::size_t>(hands), 0);
  std::vector<std::int64_t> s2(static_cast<std::size_t>(hands), 0);
  for (int t = 0; t < n; ++t)
    for (int h = 0; h < hands; ++h) {
      const auto c = static_cast<std::int64_t>(cumulative[static_cast<std::size_t>(t)]
                                                         [static_cast<std::size_t>(h)]);
      s1[static_cast<std::size_t>(h)] += c;
      s2[static_cast<std::size_t>(h)] += c * c;
    }
  for (int h = 0; h < hands; ++h) {
    const double sum = static_cast<double>(s1[static_cast<std::size_t>(h)]);
    const double sumsq = static_cast<double>(s2[static_cast<std::size_t>(h)]);
    const double mean = sum / n;
    series.mean_bankroll[static_cast<std::size_t>(h)] = mean;
    if (n > 1) {
      const double var = std::max(0.0, (sumsq - sum * sum / n) / (n - 1));
      series.stderr_[static_cast<std::size_t>(h)] = std::sqrt(var / n);
    }
  }
  series.win_rate = winning_rate(series.mean_bankroll, window);
  return series;
}

}  // namespace

std::vector<NamedSeries> run_experiment(
    const ExperimentConfig& config,
    const std::function<void(const std::string&, int, int)>& progress) {
  if (config.trials < 1) throw std::invalid_argument("run_experiment: trials must be >= 1");
  if (config.hands < 1) throw std::invalid_argument("run_experiment: hands must be >= 1");
  if (config.p1_kinds.empty())
    throw std::invalid_argument("run_experiment: no p1 kinds configured");
  const auto index =
      InfosetIndex::build(GameSpec::by_name(config.game, config.canonical_suits));
  const KindPlan plan(index, config);

  int threads = config.threads > 0 ? config.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, config.trials));

  std::vector<NamedSeries> out;
  for (const std::string& p1_kind : config.p1_kinds) {
    std::vector<std::vector<int>> cumulative(static_cast<std::size_t>(config.trials));
    std::atomic<int> next{0};
    std::atomic<int> done{0};
    std::mutex failure_mutex;
    std::exception_ptr failure;

    const auto worker = [&] {
      try {
        auto p1 = make_agent(index, Seat::P1, p1_kind, plan.options.at(p1_kind));
        auto p2 = make_agent(index, Seat::P2, config.p2_kind,
                             plan.options.at(config.p2_kind));
        for (;;) {
          const int t = next.fetch_add(1);
          if (t >= config.trials) break;
          const std::uint64_t trial_seed = config.seed ^ static_cast<std::uint64_t>(t);
          MatchLog log = run_trial(*p1, *p2, config.hands, trial_seed);
          std::vector<int> row(static_cast<std::size_t>(config.hands));
          for (int h = 0; h < config.hands; ++h)
            row[static_cast<std::size_t>(h)] =
                static_cast<int>(log.rows[static_cast<std::size_t>(h)].p1_cumulative);
          cumulative[static_cast<std::size_t>(t)] = std::move(row);
          const int finished = done.fetch_add(1) + 1;
          if (progress) progress(p1_kind + " vs " + config.p2_kind, finished, config.trials);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    };

    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(threads));
      for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
      for (std::thread& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    out.push_back(NamedSeries{p1_kind, aggregate(cumulative, config.hands, config.window)});
  }
  return out;
}

void emit_csv(const TrialSeries& series, std::ostream& out) {
  out << "hand,mean_bankroll,stderr,win_rate\n";
  char buf[128];
  for (std::size_t h = 0; h < series.mean_bankroll.size(); ++h) {
    std::snprintf(buf, sizeof(buf), "%zu,%.12g,%.12g,%.12g\n", h + 1,
                  series.mean_bankroll[h], series.stderr_[h], series.win_rate[h]);
    out << buf;
  }
}

void emit_csv(const TrialSeries& series, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  emit_csv(series, out);
  out.close();
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  c.game = "leduc";
  c.trials = 1000;
  c.hands = 200;
  c.seed = 1;
  c.window = 10;
  if (name == "fig2") {
    c.p1_kinds = {"oracle_br", "bayes_bbr", "bayes_map", "bayes_thompson", "opti",
                  "frequentist"};
    c.p2_kind = "prior_sample";
  } else if (name == "fig4") {
    c.p1_kinds = {"bayes_bbr", "bayes_map", "bayes_thompson", "opti", "frequentist"};
    c.p2_kind = "opti";
  } else if (name == "fig6") {
    c.p1_kinds = {"bayes_bbr", "bayes_map", "bayes_thompson", "opti"};
    c.p2_kind = "frequentist";
  } else {
    throw std::invalid_argument("unknown preset '" + name + "' (try fig2, fig4, fig6)");
  }
  return c;
}

std::vector<std::string> preset_names() { return {"fig2", "fig4", "fig6"}; }

}  // namespace bayespoker
