// Tests for the experiment harness: winning-rate windows, trial aggregation,
// CSV emission, determinism across reruns and thread counts, config
// round-trips, and the named presets.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bayespoker/experiment.hpp"
#include "doctest.h"

using namespace bayespoker;

namespace {

std::string csv_string(const TrialSeries& series) {
  std::ostringstream out;
  emit_csv(series, out);
  return out.str();
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

// Fields of one CSV row, parsed back to doubles (column 0 stays a string).
std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  return fields;
}

ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.game = "kuhn";
  c.p1_kinds = {"bayes_thompson"};
  c.p2_kind = "prior_sample";
  c.trials = 8;
  c.hands = 12;
  c.seed = 97;
  c.threads = 1;
  c.window = 3;
  c.agent.ensemble_size = 8;
  return c;
}

}  // namespace

TEST_CASE("winning rate matches hand-computed slopes on a short curve") {
  // Bankroll means after hands 1..4 are 0, 1, 2, 4; window 1:
  //   h=1 uses hands 1..2 -> (1-0)/1 = 1
  //   h=2 uses hands 1..3 -> (2-0)/2 = 1
  //   h=3 uses hands 2..4 -> (4-1)/2 = 1.5
  //   h=4 uses hands 3..4 -> (4-2)/1 = 2
  const std::vector<double> rate = winning_rate({0.0, 1.0, 2.0, 4.0}, 1);
  REQUIRE(rate.size() == 4);
  CHECK(rate[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rate[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rate[2] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(rate[3] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("winning rate of a linear bankroll is the slope everywhere") {
  const int hands = 20;
  const double slope = 0.5;
  std::vector<double> mean(hands);
  for (int h = 1; h <= hands; ++h) mean[static_cast<std::size_t>(h - 1)] = slope * h;
  for (int window : {1, 3, 7, 19}) {
    const std::vector<double> rate = winning_rate(mean, window);
    REQUIRE(static_cast<int>(rate.size()) == hands);
    for (double r : rate) CHECK(r == doctest::Approx(slope).epsilon(1e-12));
  }
}

TEST_CASE("winning rate validates its window") {
  const std::vector<double> mean = {0.0, 1.0, 2.0, 3.0};
  CHECK_THROWS_AS((void)winning_rate(mean, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)winning_rate(mean, -2), std::invalid_argument);
  CHECK_THROWS_AS((void)winning_rate(mean, 4), std::invalid_argument);
  CHECK_THROWS_AS((void)winning_rate(mean, 9), std::invalid_argument);
  CHECK_NOTHROW((void)winning_rate(mean, 3));
}

TEST_CASE("csv emission uses the documented header and plain decimal values") {
  TrialSeries series;
  series.trials = 2;
  series.mean_bankroll = {1.5, 3.0};
  series.stderr_ = {0.25, 0.5};
  series.win_rate = {1.5, 1.5};
  CHECK(csv_string(series) ==
        "hand,mean_bankroll,stderr,win_rate\n"
        "1,1.5,0.25,1.5\n"
        "2,3,0.5,1.5\n");
}

TEST_CASE("csv values carry enough digits to recover the doubles") {
  TrialSeries series;
  series.trials = 3;
  series.mean_bankroll = {1.0 / 3.0, -12345.678901234567};
  series.stderr_ = {0.000123456789012, 7.0 / 11.0};
  series.win_rate = {1e-7, 2.0 / 3.0};
  const std::string text = csv_string(series);
  CHECK(text.back() == '\n');
  const std::vector<std::string> lines = split_lines(text);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "hand,mean_bankroll,stderr,win_rate");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> fields = split_fields(lines[i]);
    REQUIRE(fields.size() == 4);
    CHECK(fields[0] == std::to_string(i));
    const std::size_t h = i - 1;
    const double expect[3] = {series.mean_bankroll[h], series.stderr_[h],
                              series.win_rate[h]};
    for (int c = 0; c < 3; ++c) {
      const double parsed = std::stod(fields[static_cast<std::size_t>(c) + 1]);
      const double scale = std::max(1.0, std::abs(expect[c]));
      CHECK(std::abs(parsed - expect[c]) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("csv file overload writes the same bytes as the stream overload") {
  TrialSeries series;
  series.trials = 1;
  series.mean_bankroll = {2.0, 4.0, 9.0};
  series.stderr_ = {0.0, 0.0, 0.0};
  series.win_rate = {2.0, 3.5, 5.0};
  const std::filesystem::path path =
      std::filesystem::temp_directory_path() / "bayespoker_emit_csv_test.csv";
  emit_csv(series, path.string());
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream bytes;
  bytes << in.rdbuf();
  CHECK(bytes.str() == csv_string(series));
  std::filesystem::remove(path);
}

TEST_CASE("aggregated series matches an independent replay of every trial") {
  const ExperimentConfig config = tiny_config();
  const std::vector<NamedSeries> result = run_experiment(config);
  REQUIRE(result.size() == 1);
  CHECK(result[0].p1_kind == "bayes_thompson");
  const TrialSeries& series = result[0].series;
  CHECK(series.trials == config.trials);
  REQUIRE(static_cast<int>(series.mean_bankroll.size()) == config.hands);
  REQUIRE(static_cast<int>(series.stderr_.size()) == config.hands);
  REQUIRE(static_cast<int>(series.win_rate.size()) == config.hands);

  // Replay the same trials with freshly constructed agents and recompute the
  // statistics two-pass in extended precision.
  auto index = InfosetIndex::build(GameSpec::by_name(config.game, config.canonical_suits));
  std::vector<std::vector<long long>> cumulative;
  for (int t = 0; t < config.trials; ++t) {
    auto p1 = make_agent(index, Seat::P1, config.p1_kinds[0], config.agent);
    auto p2 = make_agent(index, Seat::P2, config.p2_kind, config.agent);
    const MatchLog log =
        run_trial(*p1, *p2, config.hands, config.seed ^ static_cast<std::uint64_t>(t));
    std::vector<long long> row;
    for (const MatchRow& r : log.rows) row.push_back(r.p1_cumulative);
    cumulative.push_back(std::move(row));
  }
  const int n = config.trials;
  for (int h = 0; h < config.hands; ++h) {
    long double sum = 0.0L;
    for (int t = 0; t < n; ++t)
      sum += static_cast<long double>(cumulative[static_cast<std::size_t>(t)]
                                                [static_cast<std::size_t>(h)]);
    const long double mean = sum / n;
    long double ss = 0.0L;
    for (int t = 0; t < n; ++t) {
      const long double d = static_cast<long double>(
                                cumulative[static_cast<std::size_t>(t)]
                                          [static_cast<std::size_t>(h)]) -
                            mean;
      ss += d * d;
    }
    const long double se = std::sqrt(ss / (n - 1) / n);
    CHECK(std::abs(series.mean_bankroll[static_cast<std::size_t>(h)] -
                   static_cast<double>(mean)) <= 1e-12);
    CHECK(std::abs(series.stderr_[static_cast<std::size_t>(h)] -
                   static_cast<double>(se)) <= 1e-9);
  }
  // The published rate column is exactly the windowed slope of the mean curve.
  const std::vector<double> rate = winning_rate(series.mean_bankroll, config.window);
  REQUIRE(rate.size() == series.win_rate.size());
  for (std::size_t h = 0; h < rate.size(); ++h) CHECK(series.win_rate[h] == rate[h]);
}

TEST_CASE("a single trial reports zero standard error at every hand") {
  ExperimentConfig config = tiny_config();
  config.trials = 1;
  config.hands = 9;
  config.window = 2;
  const std::vector<NamedSeries> result = run_experiment(config);
  REQUIRE(result.size() == 1);
  for (double se : result[0].series.stderr_) CHECK(se == 0.0);
}

TEST_CASE("raise-into-fold produces the exact unit-slope bankroll line") {
  // always_raise opens with a raise, always_fold folds: the first player
  // collects exactly the opponent's ante every hand, so the cumulative
  // bankroll is h after h hands in every trial, with no variance.
  ExperimentConfig config;
  config.game = "leduc";
  config.p1_kinds = {"always_raise"};
  config.p2_kind = "always_fold";
  config.trials = 3;
  config.hands = 15;
  config.seed = 5;
  config.threads = 1;
  config.window = 4;
  const std::vector<NamedSeries> result = run_experiment(config);
  REQUIRE(result.size() == 1);
  const TrialSeries& series = result[0].series;
  for (int h = 1; h <= config.hands; ++h)
    CHECK(series.mean_bankroll[static_cast<std::size_t>(h - 1)] ==
          static_cast<double>(h));
  for (double se : series.stderr_) CHECK(se == 0.0);
  for (double r : series.win_rate) CHECK(r == doctest::Approx(1.0).epsilon(1e-12));

  // Seats swapped: the forced opening call comes first, then raise and fold,
  // so the first player loses the same ante every hand.
  config.p1_kinds = {"always_fold"};
  config.p2_kind = "always_raise";
  const std::vector<NamedSeries> swapped = run_experiment(config);
  const TrialSeries& down = swapped[0].series;
  for (int h = 1; h <= config.hands; ++h)
    CHECK(down.mean_bankroll[static_cast<std::size_t>(h - 1)] ==
          static_cast<double>(-h));
  for (double r : down.win_rate) CHECK(r == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("reruns and different thread counts emit byte-identical csv") {
  ExperimentConfig config = tiny_config();
  config.p1_kinds = {"bayes_map", "always_call"};
  const std::vector<NamedSeries> first = run_experiment(config);
  const std::vector<NamedSeries> again = run_experiment(config);
  ExperimentConfig wide = config;
  wide.threads = 4;
  const std::vector<NamedSeries> threaded = run_experiment(wide);
  REQUIRE(first.size() == 2);
  REQUIRE(again.size() == 2);
  REQUIRE(threaded.size() == 2);
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].p1_kind == again[i].p1_kind);
    CHECK(first[i].p1_kind == threaded[i].p1_kind);
    const std::string base = csv_string(first[i].series);
    CHECK(base == csv_string(again[i].series));
    CHECK(base == csv_string(threaded[i].series));
  }
}

TEST_CASE("progress callback reports every finished trial per pairing") {
  ExperimentConfig config = tiny_config();
  config.p1_kinds = {"always_call", "always_raise"};
  config.p2_kind = "always_call";
  config.trials = 4;
  config.hands = 3;
  config.window = 1;
  std::vector<std::pair<std::string, int>> calls;
  run_experiment(config, [&](const std::string& pairing, int done, int total) {
    CHECK(total == config.trials);
    calls.emplace_back(pairing, done);
  });
  REQUIRE(calls.size() == 8);
  for (int i = 0; i < 4; ++i) {
    CHECK(calls[static_cast<std::size_t>(i)].first == "always_call vs always_call");
    CHECK(calls[static_cast<std::size_t>(i)].second == i + 1);
    CHECK(calls[static_cast<std::size_t>(i + 4)].first == "always_raise vs always_call");
    CHECK(calls[static_cast<std::size_t>(i + 4)].second == i + 1);
  }
}

TEST_CASE("experiment rejects unusable configurations") {
  ExperimentConfig config = tiny_config();
  config.trials = 0;
  CHECK_THROWS_AS((void)run_experiment(config), std::invalid_argument);
  config = tiny_config();
  config.hands = 0;
  CHECK_THROWS_AS((void)run_experiment(config), std::invalid_argument);
  config = tiny_config();
  config.p1_kinds.clear();
  CHECK_THROWS_AS((void)run_experiment(config), std::invalid_argument);
}

TEST_CASE("config json round-trips every field") {
  ExperimentConfig config;
  config.game = "kuhn";
  config.canonical_suits = false;
  config.p1_kinds = {"bayes_bbr", "opti"};
  config.p2_kind = "frequentist";
  config.trials = 17;
  config.hands = 33;
  config.seed = 123456789;
  config.threads = 2;
  config.window = 5;
  config.agent.ensemble_size = 64;
  config.agent.concentration = 1.25;
  config.agent.nash_epsilon = 0.01;
  config.agent.nash_max_iterations = 5000;
  config.agent.nash_check_every = 10;
  const ExperimentConfig back = experiment_config_from_json(to_json(config));
  CHECK(back.game == config.game);
  CHECK(back.canonical_suits == config.canonical_suits);
  CHECK(back.p1_kinds == config.p1_kinds);
  CHECK(back.p2_kind == config.p2_kind);
  CHECK(back.trials == config.trials);
  CHECK(back.hands == config.hands);
  CHECK(back.seed == config.seed);
  CHECK(back.threads == config.threads);
  CHECK(back.window == config.window);
  CHECK(back.agent.ensemble_size == config.agent.ensemble_size);
  CHECK(back.agent.concentration == config.agent.concentration);
  CHECK(back.agent.nash_epsilon == config.agent.nash_epsilon);
  CHECK(back.agent.nash_max_iterations == config.agent.nash_max_iterations);
  CHECK(back.agent.nash_check_every == config.agent.nash_check_every);
}

TEST_CASE("config json fills defaults and rejects malformed input") {
  const ExperimentConfig sparse = experiment_config_from_json("{\"trials\": 3}");
  const ExperimentConfig defaults;
  CHECK(sparse.trials == 3);
  CHECK(sparse.game == defaults.game);
  CHECK(sparse.hands == defaults.hands);
  CHECK(sparse.p1_kinds == defaults.p1_kinds);
  CHECK(sparse.agent.ensemble_size == defaults.agent.ensemble_size);
  CHECK_THROWS_AS((void)experiment_config_from_json("not json"), std::invalid_argument);
  CHECK_THROWS_AS((void)experiment_config_from_json("{\"trials\": \"many\"}"),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)experiment_config_from_file("/nonexistent/config.json"),
                  std::runtime_error);
}

TEST_CASE("presets name the standard reproduction batches") {
  CHECK(preset_names() == std::vector<std::string>{"fig2", "fig4", "fig6"});

  const ExperimentConfig fig2 = preset_config("fig2");
  CHECK(fig2.game == "leduc");
  CHECK(fig2.trials == 1000);
  CHECK(fig2.hands == 200);
  CHECK(fig2.seed == 1);
  CHECK(fig2.p1_kinds ==
        std::vector<std::string>{"oracle_br", "bayes_bbr", "bayes_map",
                                 "bayes_thompson", "opti", "frequentist"});
  CHECK(fig2.p2_kind == "prior_sample");

  const ExperimentConfig fig4 = preset_config("fig4");
  CHECK(fig4.p1_kinds ==
        std::vector<std::string>{"bayes_bbr", "bayes_map", "bayes_thompson", "opti",
                                 "frequentist"});
  CHECK(fig4.p2_kind == "opti");

  const ExperimentConfig fig6 = preset_config("fig6");
  CHECK(fig6.p1_kinds ==
        std::vector<std::string>{"bayes_bbr", "bayes_map", "bayes_thompson", "opti"});
  CHECK(fig6.p2_kind == "frequentist");

  CHECK_THROWS_AS((void)preset_config("fig9"), std::invalid_argument);
}
