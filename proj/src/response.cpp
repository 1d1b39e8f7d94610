#include "bayespoker/response.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace bayespoker {

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / i;
  return r;
}

bool intersects(std::span<const int> a, std::span<const int> b) {
  for (int x : a)
    for (int y : b)
      if (x == y) return true;
  return false;
}

std::vector<int> concat(std::span<const int> a, std::span<const int> b) {
  std::vector<int> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// P1 net chips at a terminal state given both private hands.
double p1_terminal_payoff(const GameSpec& spec, const PublicState& s,
                          std::span<const int> h1, std::span<const int> h2) {
  if (s.terminal == TerminalKind::FoldEnd) {
    return s.fold_winner == Seat::P1 ? static_cast<double>(s.contributions[1])
                                     : -static_cast<double>(s.contributions[0]);
  }
  ShowdownOutcome out = showdown_value(spec, h1[0], h2[0], s.board);
  if (out == ShowdownOutcome::Split) return 0.0;
  return out == ShowdownOutcome::P1Wins ? static_cast<double>(s.contributions[1])
                                        : -static_cast<double>(s.contributions[0]);
}

std::array<double, 3> uniform_over_legal(unsigned mask, int num_legal) {
  std::array<double, 3> p = {0.0, 0.0, 0.0};
  for (int a = 0; a < 3; ++a)
    if (mask & (1u << a)) p[static_cast<std::size_t>(a)] = 1.0 / num_legal;
  return p;
}

// Regret-matching+ current policy for one row.
std::array<double, 3> rm_plus_row(const std::array<double, 3>& regret, unsigned mask,
                                  int num_legal) {
  double sum = 0.0;
  for (int a = 0; a < 3; ++a)
    if (mask & (1u << a)) sum += std::max(regret[static_cast<std::size_t>(a)], 0.0);
  if (sum <= 0.0) return uniform_over_legal(mask, num_legal);
  std::array<double, 3> p = {0.0, 0.0, 0.0};
  for (int a = 0; a < 3; ++a)
    if (mask & (1u << a))
      p[static_cast<std::size_t>(a)] = std::max(regret[static_cast<std::size_t>(a)], 0.0) / sum;
  return p;
}

}  // namespace

WeightedOpponent WeightedOpponent::over_ensemble(
    std::shared_ptr<const StrategyEnsemble> ensemble, std::vector<double> weights) {
  if (!ensemble) throw std::invalid_argument("WeightedOpponent: null ensemble");
  if (static_cast<int>(weights.size()) != ensemble->size())
    throw std::invalid_argument("WeightedOpponent: weight count does not match ensemble size");
  if (weights.empty()) throw std::invalid_argument("WeightedOpponent: empty ensemble");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("WeightedOpponent: weights must be finite and non-negative");
    sum += w;
  }
  if (sum <= 0.0) throw std::invalid_argument("WeightedOpponent: weights sum to zero");
  for (double& w : weights) w /= sum;
  WeightedOpponent out;
  out.index_ = ensemble->index_ptr();
  out.ensemble_ = std::move(ensemble);
  out.weights_ = std::move(weights);
  return out;
}

WeightedOpponent WeightedOpponent::single(const BehaviourStrategy& beta) {
  if (beta.empty()) throw std::invalid_argument("WeightedOpponent: empty strategy");
  WeightedOpponent out;
  out.index_ = beta.index_ptr();
  for (Seat seat : {Seat::P1, Seat::P2}) {
    const int begin = out.index_->seat_begin(seat);
    const int end = out.index_->seat_end(seat);
    auto& packed = out.own_packed_[idx(seat)];
    packed.resize(static_cast<std::size_t>(end - begin) * 3);
    for (int r = begin; r < end; ++r)
      for (int a = 0; a < 3; ++a)
        packed[static_cast<std::size_t>(r - begin) * 3 + static_cast<std::size_t>(a)] =
            beta.prob(r, static_cast<Action>(a));
  }
  out.weights_ = {1.0};
  return out;
}

WeightedOpponent WeightedOpponent::from_posterior(const PosteriorEnsemble& posterior) {
  return over_ensemble(posterior.ensemble_ptr(), posterior.weights());
}

BestResponder::BestResponder(std::shared_ptr<const InfosetIndex> index, Seat responder)
    : index_(std::move(index)), responder_(responder) {
  if (!index_) throw std::invalid_argument("BestResponder: null index");
  const GameSpec& spec = index_->spec();
  if (spec.private_cards != 1)
    throw std::invalid_argument("BestResponder: only single-private-card games are supported");
  const auto classes = private_classes(spec);
  const double num_deals =
      static_cast<double>(card_combinations(spec, spec.private_cards, {}).size());
  for (const PrivateClass& cls : classes) {
    ClassPlan plan;
    plan.weight = cls.multiplicity / num_deals;
    const auto hands = card_combinations(spec, spec.private_cards, cls.representative);
    plan.num_hands = static_cast<int>(hands.size());
    max_hands_ = std::max(max_hands_, plan.num_hands);
    std::vector<double> chance(hands.size(), 1.0 / static_cast<double>(hands.size()));
    plan.root = build(plan, initial_state(spec), hands, cls.representative,
                      std::move(chance), 0);
    plans_.push_back(std::move(plan));
  }
}

int BestResponder::build(ClassPlan& plan, const PublicState& s,
                         const std::vector<std::vector<int>>& hands,
                         const std::vector<int>& priv, std::vector<double> chance,
                         int depth) {
  const GameSpec& spec = index_->spec();
  Node node;
  node.depth = depth;
  if (s.is_terminal()) {
    max_depth_ = std::max(max_depth_, depth);
    node.kind = s.terminal == TerminalKind::FoldEnd ? Node::FoldLeaf : Node::ShowdownLeaf;
    node.coef.resize(hands.size(), 0.0);
    for (std::size_t d = 0; d < hands.size(); ++d) {
      if (chance[d] == 0.0) continue;
      const auto& h1 = responder_ == Seat::P1 ? priv : hands[d];
      const auto& h2 = responder_ == Seat::P1 ? hands[d] : priv;
      const double v1 = p1_terminal_payoff(spec, s, h1, h2);
      node.coef[d] = chance[d] * (responder_ == Seat::P1 ? v1 : -v1);
    }
  } else if (s.awaiting_reveal()) {
    node.kind = Node::Reveal;
    const int k = s.board_pending;
    const auto candidates = card_combinations(spec, k, concat(priv, s.board));
    const int n_rem = static_cast<int>(spec.deck.size()) - 2 * spec.private_cards -
                      static_cast<int>(s.board.size());
    const double factor = 1.0 / binom(n_rem, k);
    for (const auto& reveal : candidates) {
      std::vector<double> child_chance = chance;
      for (std::size_t d = 0; d < hands.size(); ++d) {
        if (child_chance[d] == 0.0) continue;
        child_chance[d] = intersects(hands[d], reveal) ? 0.0 : child_chance[d] * factor;
      }
      const PublicState ns = reveal_board(spec, s, reveal);
      node.children.push_back(build(plan, ns, hands, priv, std::move(child_chance), depth));
    }
  } else if (s.to_act == responder_) {
    node.kind = Node::Responder;
    node.row = index_->row_of(responder_, priv, s.board, s.history);
    for (Action a : legal_actions(spec, s)) {
      node.actions.push_back(a);
      node.children.push_back(build(plan, apply_action(spec, s, a), hands, priv, chance, depth));
    }
  } else {
    node.kind = Node::Opponent;
    max_depth_ = std::max(max_depth_, depth + 1);
    const Seat opp = other(responder_);
    node.hand_rows.resize(hands.size(), -1);
    for (std::size_t d = 0; d < hands.size(); ++d)
      if (chance[d] > 0.0)
        node.hand_rows[d] = index_->row_of(opp, hands[d], s.board, s.history);
    for (Action a : legal_actions(spec, s)) {
      node.actions.push_back(a);
      node.children.push_back(
          build(plan, apply_action(spec, s, a), hands, priv, chance, depth + 1));
    }
  }
  plan.nodes.push_back(std::move(node));
  return static_cast<int>(plan.nodes.size()) - 1;
}

ResponseResult BestResponder::respond(const WeightedOpponent& opponent) const {
  if (!(opponent.index().spec() == index_->spec()))
    throw std::invalid_argument("BestResponder: opponent mixture describes a different game");
  const int N = opponent.size();
  const std::vector<double>& w = opponent.weights();
  const Seat opp_seat = other(responder_);

  ResponseResult result;
  result.strategy = uniform_strategy(index_);

  const std::size_t stride = static_cast<std::size_t>(max_hands_) * static_cast<std::size_t>(N);
  std::vector<double> scratch(static_cast<std::size_t>(max_depth_ + 1) * stride);

  struct Ev {
    const ClassPlan& plan;
    const WeightedOpponent& opp;
    Seat opp_seat;
    double* scratch;
    std::size_t stride;
    int N;
    BehaviourStrategy& strat;

    double operator()(int id, int level) const {
      const Node& nd = plan.nodes[static_cast<std::size_t>(id)];
      switch (nd.kind) {
        case Node::FoldLeaf:
        case Node::ShowdownLeaf: {
          const double* buf = scratch + static_cast<std::size_t>(level) * stride;
          double v = 0.0;
          for (std::size_t d = 0; d < nd.coef.size(); ++d) {
            if (nd.coef[d] == 0.0) continue;
            const double* row = buf + d * static_cast<std::size_t>(N);
            double s = 0.0;
            for (int j = 0; j < N; ++j) s += row[static_cast<std::size_t>(j)];
            v += nd.coef[d] * s;
          }
          return v;
        }
        case Node::Reveal: {
          double v = 0.0;
          for (int child : nd.children) v += (*this)(child, level);
          return v;
        }
        case Node::Responder: {
          double best = -std::numeric_limits<double>::infinity();
          std::size_t best_i = 0;
          for (std::size_t i = 0; i < nd.children.size(); ++i) {
            const double v = (*this)(nd.children[i], level);
            if (v > best) {
              best = v;
              best_i = i;
            }
          }
          strat.set_pure(nd.row, nd.actions[best_i]);
          return best;
        }
        case Node::Opponent:
        default: {
          const double* src = scratch + static_cast<std::size_t>(level) * stride;
          double* dst = scratch + static_cast<std::size_t>(level + 1) * stride;
          double v = 0.0;
          for (std::size_t i = 0; i < nd.children.size(); ++i) {
            const int a = static_cast<int>(nd.actions[i]);
            for (std::size_t d = 0; d < nd.hand_rows.size(); ++d) {
              double* drow = dst + d * static_cast<std::size_t>(N);
              const int r = nd.hand_rows[d];
              if (r < 0) {
                std::fill(drow, drow + N, 0.0);
                continue;
              }
              const double* srow = src + d * static_cast<std::size_t>(N);
              const double* p =
                  opp.packed_row(opp_seat, r) + static_cast<std::size_t>(a) * N;
              for (int j = 0; j < N; ++j)
                drow[static_cast<std::size_t>(j)] =
                    srow[static_cast<std::size_t>(j)] * p[static_cast<std::size_t>(j)];
            }
            v += (*this)(nd.children[i], level + 1);
          }
          return v;
        }
      }
    }
  };

  double total = 0.0;
  for (const ClassPlan& plan : plans_) {
    for (int d = 0; d < plan.num_hands; ++d)
      std::copy(w.begin(), w.end(), scratch.begin() + static_cast<std::size_t>(d) * N);
    Ev ev{plan, opponent, opp_seat, scratch.data(), stride, N, result.strategy};
    total += plan.weight * ev(plan.root, 0);
  }
  result.value = total;
  return result;
}

ResponseResult best_response(const BehaviourStrategy& beta, Seat responder) {
  if (beta.empty()) throw std::invalid_argument("best_response: empty strategy");
  BestResponder br(beta.index_ptr(), responder);
  return br.respond(WeightedOpponent::single(beta));
}

ResponseResult bayesian_best_response(const WeightedOpponent& opponent, Seat responder) {
  BestResponder br(opponent.index_ptr(), responder);
  return br.respond(opponent);
}

ResponseResult bayesian_best_response(const PosteriorEnsemble& posterior, Seat responder) {
  if (responder != other(posterior.opponent()))
    throw std::invalid_argument("bayesian_best_response: responder must face the modelled seat");
  return bayesian_best_response(WeightedOpponent::from_posterior(posterior), responder);
}

ResponseResult map_response(const PosteriorEnsemble& posterior, Seat responder) {
  if (responder != other(posterior.opponent()))
    throw std::invalid_argument("map_response: responder must face the modelled seat");
  const int j = map_index(posterior);
  BestResponder br(posterior.ensemble().index_ptr(), responder);
  return br.respond(WeightedOpponent::single(posterior.ensemble().strategy(j)));
}

ResponseResult thompson_response(const PosteriorEnsemble& posterior, Seat responder,
                                 RngStream& rng) {
  if (responder != other(posterior.opponent()))
    throw std::invalid_argument("thompson_response: responder must face the modelled seat");
  const int j = thompson_draw(posterior, rng);
  BestResponder br(posterior.ensemble().index_ptr(), responder);
  return br.respond(WeightedOpponent::single(posterior.ensemble().strategy(j)));
}

double expected_value(const BehaviourStrategy& p1, const BehaviourStrategy& p2) {
  if (p1.empty() || p2.empty()) throw std::invalid_argument("expected_value: empty strategy");
  if (!(p1.index().spec() == p2.index().spec()))
    throw std::invalid_argument("expected_value: strategies describe different games");
  const GameSpec& spec = p1.index().spec();

  struct Rec {
    const GameSpec& spec;
    const BehaviourStrategy& p1;
    const BehaviourStrategy& p2;
    std::span<const int> h1;
    std::span<const int> h2;

    double operator()(const PublicState& s) const {
      if (s.is_terminal()) return p1_terminal_payoff(spec, s, h1, h2);
      if (s.awaiting_reveal()) {
        const auto candidates =
            card_combinations(spec, s.board_pending, concat(concat(h1, h2), s.board));
        double v = 0.0;
        for (const auto& reveal : candidates) v += (*this)(reveal_board(spec, s, reveal));
        return v / static_cast<double>(candidates.size());
      }
      const Seat seat = s.to_act;
      const BehaviourStrategy& actor = seat == Seat::P1 ? p1 : p2;
      const int row = actor.index().row_of(seat, seat == Seat::P1 ? h1 : h2, s.board, s.history);
      double v = 0.0;
      for (Action a : legal_actions(spec, s)) {
        const double pa = actor.prob(row, a);
        if (pa > 0.0) v += pa * (*this)(apply_action(spec, s, a));
      }
      return v;
    }
  };

  const auto hands1 = card_combinations(spec, spec.private_cards, {});
  double total = 0.0;
  double deals = 0.0;
  for (const auto& h1 : hands1) {
    const auto hands2 = card_combinations(spec, spec.private_cards, h1);
    for (const auto& h2 : hands2) {
      Rec rec{spec, p1, p2, h1, h2};
      total += rec(initial_state(spec));
      deals += 1.0;
    }
  }
  return total / deals;
}

double exploitability(const BehaviourStrategy& p1, const BehaviourStrategy& p2) {
  if (p1.empty() || p2.empty()) throw std::invalid_argument("exploitability: empty strategy");
  if (!(p1.index().spec() == p2.index().spec()))
    throw std::invalid_argument("exploitability: strategies describe different games");
  BestResponder b1(p1.index_ptr(), Seat::P1);
  BestResponder b2(p1.index_ptr(), Seat::P2);
  return b1.respond(WeightedOpponent::single(p2)).value +
         b2.respond(WeightedOpponent::single(p1)).value;
}

double exploitability(const BehaviourStrategy& profile) {
  return exploitability(profile, profile);
}

namespace {

// Game tree compiled per ordered private deal: decision rows resolved once so
// the self-play inner loop touches no strings.
struct SolveNode {
  enum Kind : unsigned char { Leaf, Decision, Chance };
  Kind kind = Leaf;
  double payoff_p1 = 0.0;                 // Leaf
  Seat seat = Seat::P1;                   // Decision
  int row = -1;                           // Decision
  std::vector<Action> actions;            // Decision
  std::vector<int> children;              // Decision / Chance
  double chance_prob = 0.0;               // Chance: uniform over children
};

struct DealTree {
  double prob = 0.0;
  int root = -1;
  std::vector<SolveNode> nodes;
};

int compile_solve_tree(std::vector<SolveNode>& nodes, const GameSpec& spec,
                       const InfosetIndex& index, const PublicState& s,
                       std::span<const int> h1, std::span<const int> h2) {
  SolveNode node;
  if (s.is_terminal()) {
    node.kind = SolveNode::Leaf;
    node.payoff_p1 = p1_terminal_payoff(spec, s, h1, h2);
  } else if (s.awaiting_reveal()) {
    node.kind = SolveNode::Chance;
    const auto candidates =
        card_combinations(spec, s.board_pending, concat(concat(h1, h2), s.board));
    node.chance_prob = 1.0 / static_cast<double>(candidates.size());
    for (const auto& reveal : candidates)
      node.children.push_back(
          compile_solve_tree(nodes, spec, index, reveal_board(spec, s, reveal), h1, h2));
  } else {
    node.kind = SolveNode::Decision;
    node.seat = s.to_act;
    node.row = index.row_of(node.seat, node.seat == Seat::P1 ? h1 : h2, s.board, s.history);
    for (Action a : legal_actions(spec, s)) {
      node.actions.push_back(a);
      node.children.push_back(
          compile_solve_tree(nodes, spec, index, apply_action(spec, s, a), h1, h2));
    }
  }
  nodes.push_back(std::move(node));
  return static_cast<int>(nodes.size()) - 1;
}

}  // namespace

SolveResult solve_nash(std::shared_ptr<const InfosetIndex> index, double epsilon,
                       const SolveOptions& options) {
  if (!index) throw std::invalid_argument("solve_nash: null index");
  if (!(epsilon > 0.0)) throw std::invalid_argument("solve_nash: epsilon must be positive");
  if (options.max_iterations < 1)
    throw std::invalid_argument("solve_nash: max_iterations must be at least 1");
  if (options.check_every < 1)
    throw std::invalid_argument("solve_nash: check_every must be at least 1");
  const GameSpec& spec = index->spec();

  std::vector<DealTree> trees;
  const auto hands1 = card_combinations(spec, spec.private_cards, {});
  for (const auto& h1 : hands1) {
    const auto hands2 = card_combinations(spec, spec.private_cards, h1);
    for (const auto& h2 : hands2) {
      DealTree tree;
      tree.prob = 1.0 / (static_cast<double>(hands1.size()) * static_cast<double>(hands2.size()));
      tree.root = compile_solve_tree(tree.nodes, spec, *index, initial_state(spec), h1, h2);
      trees.push_back(std::move(tree));
    }
  }

  const int rows = index->num_rows();
  std::vector<std::array<double, 3>> regret(static_cast<std::size_t>(rows), {0.0, 0.0, 0.0});
  std::vector<std::array<double, 3>> strat_sum(static_cast<std::size_t>(rows), {0.0, 0.0, 0.0});
  std::vector<std::array<double, 3>> cur(static_cast<std::size_t>(rows), {0.0, 0.0, 0.0});

  // Tiny seed-keyed jitter on the initial regrets: runs with different seeds
  // take different trajectories (and may land on different equilibria) while
  // every run still certifies the same epsilon.
  RngStream jitter(derive_seed(options.seed, "solve.jitter"));
  for (int r = 0; r < rows; ++r) {
    const InfosetEntry& e = index->entry(r);
    for (int a = 0; a < 3; ++a)
      if (e.legal_mask & (1u << a))
        regret[static_cast<std::size_t>(r)][static_cast<std::size_t>(a)] =
            1e-6 * jitter.uniform01();
  }

  const auto refresh = [&] {
    for (int r = 0; r < rows; ++r) {
      const InfosetEntry& e = index->entry(r);
      cur[static_cast<std::size_t>(r)] =
          rm_plus_row(regret[static_cast<std::size_t>(r)], e.legal_mask, e.num_legal);
    }
  };

  struct Cfr {
    const std::vector<SolveNode>& nodes;
    std::vector<std::array<double, 3>>& regret;
    std::vector<std::array<double, 3>>& strat_sum;
    const std::vector<std::array<double, 3>>& cur;
    Seat u;
    double weight;  // linear-averaging weight (iteration number)

    double operator()(int id, double pi_own, double pi_cf) const {
      const SolveNode& nd = nodes[static_cast<std::size_t>(id)];
      switch (nd.kind) {
        case SolveNode::Leaf:
          return u == Seat::P1 ? nd.payoff_p1 : -nd.payoff_p1;
        case SolveNode::Chance: {
          double v = 0.0;
          for (int child : nd.children)
            v += nd.chance_prob * (*this)(child, pi_own, pi_cf * nd.chance_prob);
          return v;
        }
        case SolveNode::Decision:
        default: {
          const std::array<double, 3>& sigma = cur[static_cast<std::size_t>(nd.row)];
          if (nd.seat == u) {
            double v = 0.0;
            std::array<double, 3> va = {0.0, 0.0, 0.0};
            for (std::size_t i = 0; i < nd.actions.size(); ++i) {
              const auto a = static_cast<std::size_t>(nd.actions[i]);
              va[a] = (*this)(nd.children[i], pi_own * sigma[a], pi_cf);
              v += sigma[a] * va[a];
            }
            auto& reg = regret[static_cast<std::size_t>(nd.row)];
            auto& avg = strat_sum[static_cast<std::size_t>(nd.row)];
            for (Action action : nd.actions) {
              const auto a = static_cast<std::size_t>(action);
              reg[a] += pi_cf * (va[a] - v);
              avg[a] += weight * pi_own * sigma[a];
            }
            return v;
          }
          double v = 0.0;
          for (std::size_t i = 0; i < nd.actions.size(); ++i) {
            const auto a = static_cast<std::size_t>(nd.actions[i]);
            v += sigma[a] * (*this)(nd.children[i], pi_own, pi_cf * sigma[a]);
          }
          return v;
        }
      }
    }
  };

  const auto average_profile = [&] {
    BehaviourStrategy avg = uniform_strategy(index);
    for (int r = 0; r < rows; ++r) {
      const auto& acc = strat_sum[static_cast<std::size_t>(r)];
      const double sum = acc[0] + acc[1] + acc[2];
      if (sum > 0.0)
        avg.set_row(r, {acc[0] / sum, acc[1] / sum, acc[2] / sum});
      else {
        const InfosetEntry& e = index->entry(r);
        avg.set_row(r, uniform_over_legal(e.legal_mask, e.num_legal));
      }
    }
    return avg;
  };

  BestResponder br1(index, Seat::P1);
  BestResponder br2(index, Seat::P2);
  const auto certify = [&](const BehaviourStrategy& profile) {
    const WeightedOpponent w = WeightedOpponent::single(profile);
    return br1.respond(w).value + br2.respond(w).value;
  };

  SolveResult best;
  best.exploitability = std::numeric_limits<double>::infinity();

  for (int t = 1; t <= options.max_iterations; ++t) {
    for (Seat u : {Seat::P1, Seat::P2}) {
      refresh();
      for (const DealTree& tree : trees) {
        Cfr walker{tree.nodes, regret, strat_sum, cur, u, static_cast<double>(t)};
        walker(tree.root, 1.0, tree.prob);
      }
      const int begin = index->seat_begin(u);
      const int end = index->seat_end(u);
      for (int r = begin; r < end; ++r)
        for (auto& x : regret[static_cast<std::size_t>(r)]) x = std::max(x, 0.0);
    }
    if (t % options.check_every == 0 || t == options.max_iterations) {
      BehaviourStrategy profile = average_profile();
      const double expl = certify(profile);
      if (expl < best.exploitability) {
        best.profile = profile;
        best.exploitability = expl;
        best.iterations = t;
      }
      if (expl <= epsilon)
        return SolveResult{std::move(profile), expl, t};
    }
  }

  std::ostringstream msg;
  msg << "solve_nash: iteration budget " << options.max_iterations
      << " exhausted; best certified exploitability " << best.exploitability
      << " > target " << epsilon;
  throw SolveBudgetExhausted(msg.str(), std::move(best));
}

}  // namespace bayespoker
