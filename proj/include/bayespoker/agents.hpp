#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bayespoker/response.hpp"

namespace bayespoker {

struct AgentOptions {
  int ensemble_size = 1000;        // posterior sample count for bayes_* agents
  double concentration = 2.0;      // Dirichlet concentration of the prior
  double nash_epsilon = 0.005;     // certification target when solving "opti"
  int nash_max_iterations = 200000;
  int nash_check_every = 25;
  std::uint64_t solve_seed = 0;    // seed for the "opti" solve when no profile given
  // Pre-built profile for "opti"/"fixed(...)"; skips solving or file loading.
  std::shared_ptr<const BehaviourStrategy> profile;
};

// An agent whose per-trial strategy is fixed once begin_trial has run, and
// can therefore be handed to an oracle opponent.
class FixedProfileProvider {
 public:
  virtual ~FixedProfileProvider() = default;
  // Null until begin_trial has fixed the strategy for the current trial.
  virtual const BehaviourStrategy* fixed_profile() const = 0;
};

// An agent that must be told the opponent's fixed per-trial strategy before
// the first hand (the match harness does the wiring).
class OpponentAware {
 public:
  virtual ~OpponentAware() = default;
  virtual void set_opponent_profile(const BehaviourStrategy& profile) = 0;
};

// Seat-bound match participant. Lifecycle per trial:
//   begin_trial(seed)  -- reset all learned state, reseed private streams
//   per hand: begin_hand(cards), act(...) whenever to_act is this seat,
//             observe(viewpoint record) once the hand completes.
// All private randomness comes from streams derived from the trial seed and
// the seat name, so a trial is reproducible and the two seats never share
// random state.
class Agent {
 public:
  virtual ~Agent() = default;

  Seat seat() const { return seat_; }
  const InfosetIndex& index() const { return *index_; }
  std::shared_ptr<const InfosetIndex> index_ptr() const { return index_; }
  virtual std::string kind() const = 0;

  virtual void begin_trial(std::uint64_t trial_seed) = 0;
  virtual void begin_hand(std::span<const int> private_cards);
  virtual Action act(const PublicState& state, std::span<const int> private_cards) = 0;
  virtual void observe(const Observation& obs);

 protected:
  Agent(std::shared_ptr<const InfosetIndex> index, Seat seat);
  std::shared_ptr<const InfosetIndex> index_;
  Seat seat_;
};

// Plays a fixed behaviour strategy, sampling mixed rows from the per-trial
// "<seat>.act" stream.
class StrategyAgent : public Agent, public FixedProfileProvider {
 public:
  StrategyAgent(std::shared_ptr<const InfosetIndex> index, Seat seat,
                BehaviourStrategy strategy, std::string kind_name);

  std::string kind() const override { return kind_; }
  void begin_trial(std::uint64_t trial_seed) override;
  Action act(const PublicState& state, std::span<const int> private_cards) override;
  const BehaviourStrategy* fixed_profile() const override { return &strategy_; }

 private:
  BehaviourStrategy strategy_;
  std::string kind_;
  std::optional<RngStream> act_rng_;
};

// Draws a fresh strategy from the Dirichlet prior at every begin_trial
// ("<seat>.prior" stream) and plays it for the whole trial.
class PriorSampleAgent : public Agent, public FixedProfileProvider {
 public:
  PriorSampleAgent(std::shared_ptr<const InfosetIndex> index, Seat seat,
                   const AgentOptions& options);

  std::string kind() const override { return "prior_sample"; }
  void begin_trial(std::uint64_t trial_seed) override;
  Action act(const PublicState& state, std::span<const int> private_cards) override;
  const BehaviourStrategy* fixed_profile() const override {
    return strategy_.empty() ? nullptr : &strategy_;
  }

 private:
  double concentration_;
  BehaviourStrategy strategy_;
  std::optional<RngStream> act_rng_;
};

// Best-responds to the opponent's fixed per-trial strategy (upper reference
// line for the modelling agents). Requires wiring via OpponentAware.
class OracleResponseAgent : public Agent, public OpponentAware {
 public:
  OracleResponseAgent(std::shared_ptr<const InfosetIndex> index, Seat seat);

  std::string kind() const override { return "oracle_br"; }
  void begin_trial(std::uint64_t trial_seed) override;
  void set_opponent_profile(const BehaviourStrategy& profile) override;
  Action act(const PublicState& state, std::span<const int> private_cards) override;

 private:
  BestResponder responder_;
  BehaviourStrategy response_;
};

enum class BayesMode : int { BestResponse = 0, MaxPosterior = 1, Thompson = 2 };

// Posterior-driven agent: samples an ensemble from the prior per trial
// ("<seat>.ensemble"), updates importance weights after every observed hand,
// and recomputes its response at the start of every hand.
class BayesAgent : public Agent {
 public:
  BayesAgent(std::shared_ptr<const InfosetIndex> index, Seat seat, BayesMode mode,
             const AgentOptions& options);

  std::string kind() const override;
  void begin_trial(std::uint64_t trial_seed) override;
  void begin_hand(std::span<const int> private_cards) override;
  Action act(const PublicState& state, std::span<const int> private_cards) override;
  void observe(const Observation& obs) override;

  BayesMode mode() const { return mode_; }
  // Valid only after begin_trial.
  const PosteriorEnsemble& posterior() const;

 private:
  BayesMode mode_;
  int ensemble_size_;
  double concentration_;
  BestResponder responder_;
  std::shared_ptr<const StrategyEnsemble> ensemble_;
  std::optional<PosteriorEnsemble> posterior_;
  std::optional<RngStream> thompson_rng_;
  BehaviourStrategy response_;
};

// Point-estimate modeller: Laplace-smoothed opponent action frequencies keyed
// by public context, plus a Laplace-smoothed opponent-card distribution per
// completed public line (from showdowns), combined by an expectimax that
// best-responds to that single estimated model.
class FrequentistAgent : public Agent {
 public:
  FrequentistAgent(std::shared_ptr<const InfosetIndex> index, Seat seat);

  std::string kind() const override { return "frequentist"; }
  void begin_trial(std::uint64_t trial_seed) override;
  Action act(const PublicState& state, std::span<const int> private_cards) override;
  void observe(const Observation& obs) override;

 private:
  std::array<double, 3> opponent_policy(const PublicState& state) const;
  double value_of(const PublicState& state, std::span<const int> private_cards) const;

  std::unordered_map<std::string, std::array<double, 3>> action_counts_;
  std::unordered_map<std::string, std::vector<double>> shown_card_counts_;
};

// Builds an agent from a kind string: opti, prior_sample, bayes_bbr,
// bayes_map, bayes_thompson, frequentist, oracle_br, always_call,
// always_fold, always_raise, or fixed(<strategy file path>).
std::unique_ptr<Agent> make_agent(std::shared_ptr<const InfosetIndex> index, Seat seat,
                                  const std::string& kind,
                                  const AgentOptions& options = {});

struct HandResult {
  HandRecord record;
  int p1_net = 0;
};

// Deals from the shared deck stream, runs the betting, settles the pot, and
// delivers each seat's viewpoint observation. Throws std::runtime_error
// (naming the agent) if an agent returns an illegal action.
HandResult play_hand(Agent& p1, Agent& p2, RngStream& deck_rng);

struct MatchRow {
  HandRecord record;
  int p1_net = 0;
  long long p1_cumulative = 0;
};

struct MatchLog {
  std::uint64_t trial_seed = 0;
  std::string p1_kind;
  std::string p2_kind;
  std::vector<MatchRow> rows;
};

// Called after every completed hand with the 0-based hand index.
using HandHook = std::function<void(int, const HandResult&)>;

// One trial: begin_trial on both agents, oracle wiring, `hands` hands from
// the trial's "deck" stream. Throws std::invalid_argument if an
// OpponentAware agent faces an opponent without a fixed per-trial strategy.
MatchLog run_trial(Agent& p1, Agent& p2, int hands, std::uint64_t trial_seed,
                   const HandHook& after_hand = {});

// CSV with header "hand_index,p1_net,p1_cumulative".
void write_match_csv(const MatchLog& log, std::ostream& out);
void write_match_csv(const MatchLog& log, const std::string& path);

}  // namespace bayespoker
