#pragma once

#include <memory>
#include <vector>

#include "bayespoker/inference.hpp"
#include "bayespoker/strategy.hpp"

namespace bayespoker {

// Weighted mixture over opponent strategies: an ensemble view with one weight
// per member, or a single strategy. Exposes the packed per-seat layout used
// by the best-response inner loop.
class WeightedOpponent {
 public:
  static WeightedOpponent over_ensemble(std::shared_ptr<const StrategyEnsemble> ensemble,
                                        std::vector<double> weights);
  static WeightedOpponent single(const BehaviourStrategy& beta);
  static WeightedOpponent from_posterior(const PosteriorEnsemble& posterior);

  const InfosetIndex& index() const { return *index_; }
  std::shared_ptr<const InfosetIndex> index_ptr() const { return index_; }
  int size() const { return static_cast<int>(weights_.size()); }
  const std::vector<double>& weights() const { return weights_; }
  const double* packed_row(Seat seat, int row) const {
    if (ensemble_) return ensemble_->packed_row(seat, row);
    return own_packed_[idx(seat)].data() +
           static_cast<std::size_t>(row - index_->seat_begin(seat)) * 3;
  }

 private:
  std::shared_ptr<const InfosetIndex> index_;
  std::shared_ptr<const StrategyEnsemble> ensemble_;  // null for single
  std::array<std::vector<double>, 2> own_packed_;     // single-strategy copy
  std::vector<double> weights_;
};

struct ResponseResult {
  BehaviourStrategy strategy;  // pure and complete over the responder's rows;
                               // the other seat's rows are uniform placeholders
  double value = 0.0;          // expected chips per hand for the responder
};

// Expectimax over the responder's observation tree, compiled once per
// (game, seat): chance and opponent nodes sum, responder nodes maximize
// (ties break to the lowest action), and leaves score payoff times the
// posterior-weighted opponent reach, summed over opponent hands. The reach
// vector is per (sample, opponent hand), kept contiguous so the per-action
// update is an allocation-free multiply over samples; the mixture is never
// collapsed to its mean strategy.
class BestResponder {
 public:
  BestResponder(std::shared_ptr<const InfosetIndex> index, Seat responder);

  Seat responder() const { return responder_; }
  const InfosetIndex& index() const { return *index_; }
  ResponseResult respond(const WeightedOpponent& opponent) const;

 private:
  struct Node {
    enum Kind : unsigned char { FoldLeaf, ShowdownLeaf, Responder, Opponent, Reveal };
    Kind kind = Reveal;
    // Leaves: per-hand coefficient = deal chance * payoff (0 for dead hands).
    std::vector<double> coef;
    // Responder: infoset row plus one child per legal action.
    int row = -1;
    std::vector<Action> actions;
    std::vector<int> children;
    // Opponent: per-hand infoset row (-1 for dead hands), children as above.
    std::vector<int> hand_rows;
    int depth = 0;  // opponent decisions above this node (scratch level)
  };
  struct ClassPlan {
    double weight = 0.0;        // probability of the responder's hand class
    int num_hands = 0;          // opponent candidate hands
    int root = -1;
    std::vector<Node> nodes;
  };

  int build(ClassPlan& plan, const PublicState& state,
            const std::vector<std::vector<int>>& hands,
            const std::vector<int>& priv, std::vector<double> chance, int depth);

  std::shared_ptr<const InfosetIndex> index_;
  Seat responder_;
  std::vector<ClassPlan> plans_;
  int max_hands_ = 0;
  int max_depth_ = 0;
};

// Best response to a single fixed opponent strategy.
ResponseResult best_response(const BehaviourStrategy& beta, Seat responder);
// Bayesian best response: exact expectimax against the weighted mixture.
ResponseResult bayesian_best_response(const WeightedOpponent& opponent, Seat responder);
ResponseResult bayesian_best_response(const PosteriorEnsemble& posterior, Seat responder);
// Best response to the single highest-weight sample (ties -> lowest index).
ResponseResult map_response(const PosteriorEnsemble& posterior, Seat responder);
// Best response to one sample drawn proportionally to the weights.
ResponseResult thompson_response(const PosteriorEnsemble& posterior, Seat responder,
                                 RngStream& rng);

// Exact expected P1 chips per hand when p1 plays `p1` and p2 plays `p2`
// (full deal and action enumeration).
double expected_value(const BehaviourStrategy& p1, const BehaviourStrategy& p2);

// Sum of both seats' best-response values against the pair; >= 0, and 0 only
// at an exact equilibrium.
double exploitability(const BehaviourStrategy& p1, const BehaviourStrategy& p2);
double exploitability(const BehaviourStrategy& profile);

struct SolveOptions {
  std::uint64_t seed = 0;       // jitters initial regrets so runs differ by seed
  int max_iterations = 200000;
  int check_every = 25;         // exploitability certification cadence
};

struct SolveResult {
  BehaviourStrategy profile;    // average strategy pair (both seats)
  double exploitability = 0.0;  // certified value at return
  int iterations = 0;
};

class SolveBudgetExhausted : public std::runtime_error {
 public:
  SolveBudgetExhausted(std::string message, SolveResult best)
      : std::runtime_error(std::move(message)), best_found(std::move(best)) {}
  SolveResult best_found;
};

// Regret-matching+ self-play with linear averaging and alternating updates;
// returns as soon as the averaged pair's exploitability certifies <= epsilon.
// Throws SolveBudgetExhausted (carrying the best pair found) on cap.
SolveResult solve_nash(std::shared_ptr<const InfosetIndex> index, double epsilon,
                       const SolveOptions& options = {});

}  // namespace bayespoker
