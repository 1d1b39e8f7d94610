#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "bayespoker/strategy.hpp"

namespace bayespoker {

enum class ObservationKind : int { Showdown = 0, FoldEnd = 1 };

// One completed hand as seen by the modelling seat: the opponent's private
// cards are present exactly when the hand reached a showdown. Likelihoods
// depend only on the opponent's strategy; the modeller's own play never
// enters (its factors would cancel under posterior normalization anyway).
struct Observation {
  HandRecord record;
  Seat modeller = Seat::P1;
  ObservationKind kind = ObservationKind::Showdown;

  Seat opponent() const { return other(modeller); }
};

// Redacts the oracle record for one seat's viewpoint.
Observation make_observation(const HandRecord& oracle, Seat modeller);

// Context of one decision by `actor`: the public information available when
// the action was taken, plus the action. Used to rebuild infoset keys for
// arbitrary candidate private cards.
struct DecisionContext {
  std::vector<int> board;   // revealed before this decision
  std::string history;      // history prefix before this decision
  Action taken = Action::Call;
};
std::vector<DecisionContext> decision_contexts(const GameSpec& spec,
                                               const HandRecord& record, Seat actor);

// log P(observed opponent actions | beta, opponent cards) for a showdown
// hand, up to the deal constant (dropped; it cancels under normalization).
// -inf when beta assigns zero probability to an observed action.
double showdown_log_likelihood(const BehaviourStrategy& beta, const Observation& obs);

// log sum over all opponent private hands consistent with the modeller's
// cards and the revealed board of the per-hand action-probability product.
// Log-sum-exp accumulation; -inf only if every candidate gets zero mass.
double fold_log_likelihood(const BehaviourStrategy& beta, const Observation& obs);

// Importance-weighted posterior over a fixed ensemble of sampled strategies,
// with the prior as proposal: log-weights accumulate per-hand log-likelihoods
// and are renormalized (log-sum-exp) after every update.
class PosteriorEnsemble {
 public:
  PosteriorEnsemble(std::shared_ptr<const StrategyEnsemble> ensemble, Seat opponent);

  const StrategyEnsemble& ensemble() const { return *ensemble_; }
  std::shared_ptr<const StrategyEnsemble> ensemble_ptr() const { return ensemble_; }
  Seat opponent() const { return opponent_; }
  int size() const { return ensemble_->size(); }
  int observation_count() const { return observations_; }
  const std::vector<double>& log_weights() const { return log_weights_; }
  std::vector<double> weights() const;

  void update(const Observation& obs);
  void reset();

  // Used by load_posterior.
  void restore(std::vector<double> log_weights, int observation_count);

 private:
  std::shared_ptr<const StrategyEnsemble> ensemble_;
  Seat opponent_;
  std::vector<double> log_weights_;  // normalized: logsumexp == 0
  int observations_ = 0;
};

// Spec-named operation aliases.
void update_posterior(PosteriorEnsemble& posterior, const Observation& obs);
// 1 / sum of squared normalized weights: N when uniform, 1 when degenerate.
double effective_sample_size(const PosteriorEnsemble& posterior);
double effective_sample_size(std::span<const double> weights);
// Highest-weight sample index; ties break to the lowest index.
int map_index(const PosteriorEnsemble& posterior);
int map_index(std::span<const double> weights);
// Sample index drawn proportionally to the weights.
int thompson_draw(const PosteriorEnsemble& posterior, RngStream& rng);

struct PosteriorDiagnostics {
  double ess = 0.0;
  double max_weight = 0.0;
  int map_index = 0;
};
PosteriorDiagnostics posterior_diagnostics(const PosteriorEnsemble& posterior);

// Posterior dump: header "game=<name> canonical_suits=<0|1> samples=<N>
// opponent=<p1|p2> observations=<k>", then N "logweight <j> <w>" lines, then
// N strategy blocks ("strategy <j>" followed by rows in strategy-file form).
void save_posterior(const PosteriorEnsemble& posterior, std::ostream& out);
void save_posterior(const PosteriorEnsemble& posterior, const std::string& path);
PosteriorEnsemble load_posterior(std::shared_ptr<const InfosetIndex> index,
                                 std::istream& in);
PosteriorEnsemble load_posterior(std::shared_ptr<const InfosetIndex> index,
                                 const std::string& path);

}  // namespace bayespoker
