#include "bayespoker/agents.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace bayespoker {

namespace {

Action argmax_action(const std::array<double, 3>& row) {
  int best = 0;
  for (int a = 1; a < 3; ++a)
    if (row[static_cast<std::size_t>(a)] > row[static_cast<std::size_t>(best)]) best = a;
  return static_cast<Action>(best);
}

Action sample_action(const std::array<double, 3>& row, RngStream& rng) {
  const double total = row[0] + row[1] + row[2];
  if (!(total > 0.0)) throw std::runtime_error("strategy row has no probability mass");
  double u = rng.uniform01() * total;
  for (int a = 0; a < 3; ++a) {
    u -= row[static_cast<std::size_t>(a)];
    if (u <= 0.0 && row[static_cast<std::size_t>(a)] > 0.0) return static_cast<Action>(a);
  }
  for (int a = 2; a >= 0; --a)
    if (row[static_cast<std::size_t>(a)] > 0.0) return static_cast<Action>(a);
  return Action::Call;
}

double my_terminal_value(const GameSpec& spec, const PublicState& s, Seat me,
                         int my_card, int opp_card) {
  const Seat opp = other(me);
  if (s.terminal == TerminalKind::FoldEnd)
    return s.fold_winner == me ? static_cast<double>(s.contributions[idx(opp)])
                               : -static_cast<double>(s.contributions[idx(me)]);
  const int p1c = me == Seat::P1 ? my_card : opp_card;
  const int p2c = me == Seat::P1 ? opp_card : my_card;
  const ShowdownOutcome out = showdown_value(spec, p1c, p2c, s.board);
  if (out == ShowdownOutcome::Split) return 0.0;
  const Seat winner = out == ShowdownOutcome::P1Wins ? Seat::P1 : Seat::P2;
  return winner == me ? static_cast<double>(s.contributions[idx(opp)])
                      : -static_cast<double>(s.contributions[idx(me)]);
}

std::string act_stream(Seat seat) { return to_string(seat) + ".act"; }

}  // namespace

Agent::Agent(std::shared_ptr<const InfosetIndex> index, Seat seat)
    : index_(std::move(index)), seat_(seat) {
  if (!index_) throw std::invalid_argument("Agent: null index");
}

void Agent::begin_hand(std::span<const int>) {}
void Agent::observe(const Observation&) {}

StrategyAgent::StrategyAgent(std::shared_ptr<const InfosetIndex> index, Seat seat,
                             BehaviourStrategy strategy, std::string kind_name)
    : Agent(std::move(index), seat),
      strategy_(std::move(strategy)),
      kind_(std::move(kind_name)) {
  if (strategy_.empty()) throw std::invalid_argument("StrategyAgent: empty strategy");
  if (!(strategy_.index().spec() == index_->spec()))
    throw std::invalid_argument("StrategyAgent: strategy describes a different game");
}

void StrategyAgent::begin_trial(std::uint64_t trial_seed) {
  act_rng_.emplace(derive_seed(trial_seed, act_stream(seat_)));
}

Action StrategyAgent::act(const PublicState& state, std::span<const int> private_cards) {
  if (!act_rng_) throw std::logic_error("StrategyAgent: begin_trial must run before act");
  const int row = index_->row_of(seat_, private_cards, state.board, state.history);
  return sample_action(strategy_.row(row), *act_rng_);
}

PriorSampleAgent::PriorSampleAgent(std::shared_ptr<const InfosetIndex> index, Seat seat,
                                   const AgentOptions& options)
    : Agent(std::move(index), seat), concentration_(options.concentration) {
  if (!(concentration_ > 0.0))
    throw std::invalid_argument("PriorSampleAgent: concentration must be positive");
}

void PriorSampleAgent::begin_trial(std::uint64_t trial_seed) {
  strategy_ = sample_dirichlet_strategy(
      index_, concentration_, derive_seed(trial_seed, to_string(seat_) + ".prior"));
  act_rng_.emplace(derive_seed(trial_seed, act_stream(seat_)));
}

Action PriorSampleAgent::act(const PublicState& state, std::span<const int> private_cards) {
  if (!act_rng_) throw std::logic_error("PriorSampleAgent: begin_trial must run before act");
  const int row = index_->row_of(seat_, private_cards, state.board, state.history);
  return sample_action(strategy_.row(row), *act_rng_);
}

OracleResponseAgent::OracleResponseAgent(std::shared_ptr<const InfosetIndex> index, Seat seat)
    : Agent(std::move(index), seat), responder_(index_, seat) {}

void OracleResponseAgent::begin_trial(std::uint64_t) { response_ = BehaviourStrategy(); }

void OracleResponseAgent::set_opponent_profile(const BehaviourStrategy& profile) {
  response_ = responder_.respond(WeightedOpponent::single(profile)).strategy;
}

Action OracleResponseAgent::act(const PublicState& state,
                                std::span<const int> private_cards) {
  if (response_.empty())
    throw std::logic_error("oracle_br: opponent profile was never provided");
  const int row = index_->row_of(seat_, private_cards, state.board, state.history);
  return argmax_action(response_.row(row));
}

BayesAgent::BayesAgent(std::shared_ptr<const InfosetIndex> index, Seat seat, BayesMode mode,
                       const AgentOptions& options)
    : Agent(std::move(index), seat),
      mode_(mode),
      ensemble_size_(options.ensemble_size),
      concentration_(options.concentration),
      responder_(index_, seat) {
  if (ensemble_size_ < 1)
    throw std::invalid_argument("BayesAgent: ensemble_size must be at least 1");
  if (!(concentration_ > 0.0))
    throw std::invalid_argument("BayesAgent: concentration must be positive");
}

std::string BayesAgent::kind() const {
  switch (mode_) {
    case BayesMode::BestResponse: return "bayes_bbr";
    case BayesMode::MaxPosterior: return "bayes_map";
    case BayesMode::Thompson: default: return "bayes_thompson";
  }
}

void BayesAgent::begin_trial(std::uint64_t trial_seed) {
  ensemble_ = StrategyEnsemble::sample_prior(
      index_, ensemble_size_, concentration_,
      derive_seed(trial_seed, to_string(seat_) + ".ensemble"));
  posterior_.emplace(ensemble_, other(seat_));
  thompson_rng_.emplace(derive_seed(trial_seed, to_string(seat_) + ".thompson"));
  response_ = BehaviourStrategy();
}

void BayesAgent::begin_hand(std::span<const int>) {
  if (!posterior_) throw std::logic_error("BayesAgent: begin_trial must run before begin_hand");
  switch (mode_) {
    case BayesMode::BestResponse:
      response_ = responder_.respond(WeightedOpponent::from_posterior(*posterior_)).strategy;
      break;
    case BayesMode::MaxPosterior: {
      const int j = map_index(*posterior_);
      response_ =
          responder_.respond(WeightedOpponent::single(ensemble_->strategy(j))).strategy;
      break;
    }
    case BayesMode::Thompson: {
      const int j = thompson_draw(*posterior_, *thompson_rng_);
      response_ =
          responder_.respond(WeightedOpponent::single(ensemble_->strategy(j))).strategy;
      break;
    }
  }
}

Action BayesAgent::act(const PublicState& state, std::span<const int> private_cards) {
  if (response_.empty()) throw std::logic_error("BayesAgent: begin_hand must run before act");
  const int row = index_->row_of(seat_, private_cards, state.board, state.history);
  return argmax_action(response_.row(row));
}

void BayesAgent::observe(const Observation& obs) {
  if (!posterior_) throw std::logic_error("BayesAgent: begin_trial must run before observe");
  posterior_->update(obs);
}

const PosteriorEnsemble& BayesAgent::posterior() const {
  if (!posterior_) throw std::logic_error("BayesAgent: begin_trial must run before posterior()");
  return *posterior_;
}

FrequentistAgent::FrequentistAgent(std::shared_ptr<const InfosetIndex> index, Seat seat)
    : Agent(std::move(index), seat) {
  if (index_->spec().private_cards != 1)
    throw std::invalid_argument("FrequentistAgent: only single-private-card games are supported");
}

void FrequentistAgent::begin_trial(std::uint64_t) {
  action_counts_.clear();
  shown_card_counts_.clear();
}

std::array<double, 3> FrequentistAgent::opponent_policy(const PublicState& state) const {
  const GameSpec& spec = index_->spec();
  std::array<double, 3> counts = {0.0, 0.0, 0.0};
  const auto it = action_counts_.find(public_context_key(spec, state.board, state.history));
  if (it != action_counts_.end()) counts = it->second;
  std::array<double, 3> policy = {0.0, 0.0, 0.0};
  double total = 0.0;
  for (Action a : legal_actions(spec, state)) {
    const auto i = static_cast<std::size_t>(a);
    policy[i] = counts[i] + 1.0;  // Laplace smoothing over legal actions
    total += policy[i];
  }
  for (double& p : policy) p /= total;
  return policy;
}

double FrequentistAgent::value_of(const PublicState& state,
                                  std::span<const int> private_cards) const {
  const GameSpec& spec = index_->spec();
  if (state.is_terminal()) {
    if (state.terminal == TerminalKind::FoldEnd)
      return my_terminal_value(spec, state, seat_, private_cards[0], -1);
    const auto it =
        shown_card_counts_.find(public_context_key(spec, state.board, state.history));
    double weighted = 0.0;
    double total = 0.0;
    for (int c = 0; c < static_cast<int>(spec.deck.size()); ++c) {
      if (c == private_cards[0]) continue;
      if (std::find(state.board.begin(), state.board.end(), c) != state.board.end()) continue;
      const double w =
          1.0 + (it == shown_card_counts_.end() ? 0.0 : it->second[static_cast<std::size_t>(c)]);
      weighted += w * my_terminal_value(spec, state, seat_, private_cards[0], c);
      total += w;
    }
    return weighted / total;
  }
  if (state.awaiting_reveal()) {
    std::vector<int> excluded(private_cards.begin(), private_cards.end());
    excluded.insert(excluded.end(), state.board.begin(), state.board.end());
    const auto candidates = card_combinations(spec, state.board_pending, excluded);
    double v = 0.0;
    for (const auto& reveal : candidates)
      v += value_of(reveal_board(spec, state, reveal), private_cards);
    return v / static_cast<double>(candidates.size());
  }
  if (state.to_act == seat_) {
    double best = -std::numeric_limits<double>::infinity();
    for (Action a : legal_actions(spec, state))
      best = std::max(best, value_of(apply_action(spec, state, a), private_cards));
    return best;
  }
  const std::array<double, 3> policy = opponent_policy(state);
  double v = 0.0;
  for (Action a : legal_actions(spec, state)) {
    const double pa = policy[static_cast<std::size_t>(a)];
    if (pa > 0.0) v += pa * value_of(apply_action(spec, state, a), private_cards);
  }
  return v;
}

Action FrequentistAgent::act(const PublicState& state, std::span<const int> private_cards) {
  const GameSpec& spec = index_->spec();
  double best = -std::numeric_limits<double>::infinity();
  Action pick = Action::Call;
  bool first = true;
  for (Action a : legal_actions(spec, state)) {
    const double v = value_of(apply_action(spec, state, a), private_cards);
    if (first || v > best) {
      best = v;
      pick = a;
      first = false;
    }
  }
  return pick;
}

void FrequentistAgent::observe(const Observation& obs) {
  const GameSpec& spec = index_->spec();
  const Seat opp = other(seat_);
  for (const DecisionContext& ctx : decision_contexts(spec, obs.record, opp))
    action_counts_[public_context_key(spec, ctx.board, ctx.history)]
                  [static_cast<std::size_t>(ctx.taken)] += 1.0;
  if (obs.kind == ObservationKind::Showdown) {
    auto& counts =
        shown_card_counts_[public_context_key(spec, obs.record.board, obs.record.history)];
    if (counts.empty()) counts.resize(spec.deck.size(), 0.0);
    counts[static_cast<std::size_t>(obs.record.private_cards[idx(opp)][0])] += 1.0;
  }
}

std::unique_ptr<Agent> make_agent(std::shared_ptr<const InfosetIndex> index, Seat seat,
                                  const std::string& kind, const AgentOptions& options) {
  if (!index) throw std::invalid_argument("make_agent: null index");
  if (kind == "opti") {
    std::shared_ptr<const BehaviourStrategy> profile = options.profile;
    if (!profile) {
      SolveOptions sopt;
      sopt.seed = options.solve_seed;
      sopt.max_iterations = options.nash_max_iterations;
      sopt.check_every = options.nash_check_every;
      profile = std::make_shared<BehaviourStrategy>(
          solve_nash(index, options.nash_epsilon, sopt).profile);
    }
    return std::make_unique<StrategyAgent>(index, seat, *profile, "opti");
  }
  if (kind == "prior_sample") return std::make_unique<PriorSampleAgent>(index, seat, options);
  if (kind == "bayes_bbr")
    return std::make_unique<BayesAgent>(index, seat, BayesMode::BestResponse, options);
  if (kind == "bayes_map")
    return std::make_unique<BayesAgent>(index, seat, BayesMode::MaxPosterior, options);
  if (kind == "bayes_thompson")
    return std::make_unique<BayesAgent>(index, seat, BayesMode::Thompson, options);
  if (kind == "frequentist") return std::make_unique<FrequentistAgent>(index, seat);
  if (kind == "oracle_br") return std::make_unique<OracleResponseAgent>(index, seat);
  if (kind == "always_call")
    return std::make_unique<StrategyAgent>(index, seat, always_call_strategy(index), kind);
  if (kind == "always_fold")
    return std::make_unique<StrategyAgent>(index, seat, always_fold_strategy(index), kind);
  if (kind == "always_raise")
    return std::make_unique<StrategyAgent>(index, seat, always_raise_strategy(index), kind);
  std::string path;
  if (kind.rfind("fixed(", 0) == 0 && kind.back() == ')')
    path = kind.substr(6, kind.size() - 7);
  else if (kind.rfind("fixed:", 0) == 0)
    path = kind.substr(6);
  if (!path.empty() || kind == "fixed()") {
    if (options.profile)
      return std::make_unique<StrategyAgent>(index, seat, *options.profile, kind);
    if (path.empty())
      throw std::invalid_argument("make_agent: fixed agent needs a strategy file path");
    return std::make_unique<StrategyAgent>(index, seat, load_strategy(index, path), kind);
  }
  throw std::invalid_argument("make_agent: unknown agent kind '" + kind + "'");
}

HandResult play_hand(Agent& p1, Agent& p2, RngStream& deck_rng) {
  if (p1.seat() != Seat::P1 || p2.seat() != Seat::P2)
    throw std::invalid_argument("play_hand: agents must be seated as p1 and p2");
  if (!(p1.index().spec() == p2.index().spec()))
    throw std::invalid_argument("play_hand: agents were built for different games");
  const GameSpec& spec = p1.index().spec();
  const int p = spec.private_cards;

  std::vector<int> order(spec.deck.size());
  std::iota(order.begin(), order.end(), 0);
  deck_rng.shuffle(order);

  std::vector<int> cards1(order.begin(), order.begin() + p);
  std::vector<int> cards2(order.begin() + p, order.begin() + 2 * p);
  std::sort(cards1.begin(), cards1.end());
  std::sort(cards2.begin(), cards2.end());
  std::size_t next = static_cast<std::size_t>(2 * p);

  p1.begin_hand(cards1);
  p2.begin_hand(cards2);

  PublicState s = initial_state(spec);
  while (!s.is_terminal()) {
    if (s.awaiting_reveal()) {
      std::vector<int> batch(order.begin() + static_cast<std::ptrdiff_t>(next),
                             order.begin() + static_cast<std::ptrdiff_t>(next) +
                                 s.board_pending);
      std::sort(batch.begin(), batch.end());
      next += static_cast<std::size_t>(s.board_pending);
      s = reveal_board(spec, s, batch);
      continue;
    }
    Agent& actor = s.to_act == Seat::P1 ? p1 : p2;
    const auto& cards = s.to_act == Seat::P1 ? cards1 : cards2;
    const Action a = actor.act(s, cards);
    if (!is_legal(spec, s, a))
      throw std::runtime_error("play_hand: agent '" + actor.kind() + "' (" +
                               to_string(actor.seat()) + ") returned illegal action " +
                               to_string(a) + " at history '" + s.history + "'");
    s = apply_action(spec, s, a);
  }

  HandResult result;
  result.record.private_cards = {cards1, cards2};
  result.record.board = s.board;
  result.record.history = s.history;
  result.record.terminal = s.terminal;
  result.record.fold_winner = s.fold_winner;
  result.record.decision_slots = spec.max_decisions_per_player();
  result.p1_net = payoff(spec, result.record);

  p1.observe(make_observation(result.record, Seat::P1));
  p2.observe(make_observation(result.record, Seat::P2));
  return result;
}

namespace {

void wire_oracle(Agent& aware_side, Agent& provider_side) {
  auto* aware = dynamic_cast<OpponentAware*>(&aware_side);
  if (!aware) return;
  const auto* provider = dynamic_cast<const FixedProfileProvider*>(&provider_side);
  const BehaviourStrategy* profile = provider ? provider->fixed_profile() : nullptr;
  if (!profile)
    throw std::invalid_argument("run_trial: agent '" + aware_side.kind() +
                                "' needs an opponent with a fixed per-trial strategy, but '" +
                                provider_side.kind() + "' does not provide one");
  aware->set_opponent_profile(*profile);
}

}  // namespace

MatchLog run_trial(Agent& p1, Agent& p2, int hands, std::uint64_t trial_seed,
                   const HandHook& after_hand) {
  if (hands < 0) throw std::invalid_argument("run_trial: negative hand count");
  p1.begin_trial(trial_seed);
  p2.begin_trial(trial_seed);
  wire_oracle(p1, p2);
  wire_oracle(p2, p1);

  RngStream deck = derive_stream(trial_seed, "deck");
  MatchLog log;
  log.trial_seed = trial_seed;
  log.p1_kind = p1.kind();
  log.p2_kind = p2.kind();
  log.rows.reserve(static_cast<std::size_t>(hands));
  long long cumulative = 0;
  for (int h = 0; h < hands; ++h) {
    HandResult r = play_hand(p1, p2, deck);
    cumulative += r.p1_net;
    log.rows.push_back(MatchRow{r.record, r.p1_net, cumulative});
    if (after_hand) after_hand(h, r);
  }
  return log;
}

void write_match_csv(const MatchLog& log, std::ostream& out) {
  out << "hand_index,p1_net,p1_cumulative\n";
  for (std::size_t i = 0; i < log.rows.size(); ++i)
    out << (i + 1) << ',' << log.rows[i].p1_net << ',' << log.rows[i].p1_cumulative << '\n';
}

void write_match_csv(const MatchLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_match_csv(log, out);
  out.close();
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace bayespoker
