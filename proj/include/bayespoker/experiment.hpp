#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "bayespoker/agents.hpp"

namespace bayespoker {

// One batch: every p1 kind plays the same p2 kind over the same trial seeds
// (common random numbers: trial seed = seed ^ trial_index, so deals and the
// p2 agent's private streams are identical across the p1 curves).
struct ExperimentConfig {
  std::string game = "leduc";
  bool canonical_suits = true;
  std::vector<std::string> p1_kinds = {"bayes_bbr"};
  std::string p2_kind = "prior_sample";
  int trials = 1000;
  int hands = 200;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
  int window = 10;  // winning-rate half-width
  AgentOptions agent;
};

std::string to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const std::string& text);
ExperimentConfig experiment_config_from_file(const std::string& path);

// Per-hand aggregates over trials; index h holds the state after hand h+1.
struct TrialSeries {
  std::vector<double> mean_bankroll;  // mean over trials of cumulative p1 net
  std::vector<double> stderr_;        // sample-stddev(n-1)/sqrt(n); 0 when trials == 1
  std::vector<double> win_rate;       // windowed bankroll slope, chips per hand
  int trials = 0;
};

struct NamedSeries {
  std::string p1_kind;
  TrialSeries series;
};

// Windowed slope of the mean-bankroll curve: with 1-based hand counts,
// rate[h] = (m[hi] - m[lo]) / (hi - lo), hi = min(H, h+window),
// lo = max(1, h-window). Throws unless 1 <= window < H.
std::vector<double> winning_rate(const std::vector<double>& mean_bankroll, int window);

// Runs every pairing. Aggregation sums exact integers in trial order, so the
// output is byte-identical for any thread count. `progress(pairing, done,
// total)` is called after every finished trial when provided.
std::vector<NamedSeries> run_experiment(
    const ExperimentConfig& config,
    const std::function<void(const std::string&, int, int)>& progress = {});

// CSV with header "hand,mean_bankroll,stderr,win_rate", one row per hand
// (1-based), values at 12 significant digits.
void emit_csv(const TrialSeries& series, std::ostream& out);
void emit_csv(const TrialSeries& series, const std::string& path);

// Named reproduction batches (fig2, fig4, fig6): the standard curve sets
// against a sampled-prior opponent, the equilibrium baseline, and the
// frequentist modeller respectively.
ExperimentConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace bayespoker
