#include "bayespoker/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bayespoker {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}
}  // namespace

Observation make_observation(const HandRecord& oracle, Seat modeller) {
  if (oracle.hidden(modeller))
    throw std::invalid_argument("oracle record lacks the modeller's own cards");
  Observation obs;
  obs.record = oracle;
  obs.modeller = modeller;
  if (oracle.terminal == TerminalKind::Showdown) {
    obs.kind = ObservationKind::Showdown;
    if (oracle.hidden(other(modeller)))
      throw std::invalid_argument("showdown record lacks the opponent's cards");
  } else if (oracle.terminal == TerminalKind::FoldEnd) {
    obs.kind = ObservationKind::FoldEnd;
    obs.record.private_cards[idx(other(modeller))].clear();
  } else {
    throw std::invalid_argument("observation requires a completed hand");
  }
  return obs;
}

std::vector<DecisionContext> decision_contexts(const GameSpec& spec,
                                               const HandRecord& record, Seat actor) {
  std::vector<DecisionContext> out;
  PublicState s = initial_state(spec);
  std::size_t board_cursor = 0;
  auto reveal_if_pending = [&] {
    if (!s.awaiting_reveal()) return;
    const std::size_t n = static_cast<std::size_t>(s.board_pending);
    if (board_cursor + n > record.board.size())
      throw std::invalid_argument("record board does not cover required reveals");
    s = reveal_board(spec, s, std::span<const int>(record.board).subspan(board_cursor, n));
    board_cursor += n;
  };
  reveal_if_pending();
  for (char ch : record.history) {
    if (ch == '/') {
      reveal_if_pending();
      continue;
    }
    const Action a = action_from_char(ch);
    if (s.to_act == actor)
      out.push_back(DecisionContext{s.board, s.history, a});
    s = apply_action(spec, s, a);
  }
  return out;
}

namespace {

// Sum of log action probabilities over the opponent's real decisions, for a
// candidate opponent hand. Padding decisions contribute log 1 = 0.
double decisions_log_prob(const BehaviourStrategy& beta, const GameSpec& spec,
                          Seat opponent, std::span<const DecisionContext> contexts,
                          std::span<const int> candidate) {
  double sum = 0.0;
  for (const DecisionContext& ctx : contexts) {
    const int row = beta.index().row_of(
        infoset_key(spec, opponent, candidate, ctx.board, ctx.history));
    sum += std::log(beta.prob(row, ctx.taken));
  }
  return sum;
}

}  // namespace

double showdown_log_likelihood(const BehaviourStrategy& beta, const Observation& obs) {
  if (obs.kind != ObservationKind::Showdown)
    throw std::invalid_argument("showdown_log_likelihood needs a showdown observation");
  const GameSpec& spec = beta.index().spec();
  const Seat opp = obs.opponent();
  if (obs.record.hidden(opp))
    throw std::invalid_argument("showdown observation lacks opponent cards");
  const auto contexts = decision_contexts(spec, obs.record, opp);
  return decisions_log_prob(beta, spec, opp, contexts,
                            obs.record.private_cards[idx(opp)]);
}

double fold_log_likelihood(const BehaviourStrategy& beta, const Observation& obs) {
  if (obs.kind != ObservationKind::FoldEnd)
    throw std::invalid_argument("fold_log_likelihood needs a fold observation");
  const GameSpec& spec = beta.index().spec();
  const Seat opp = obs.opponent();
  const auto contexts = decision_contexts(spec, obs.record, opp);
  std::vector<int> excluded = obs.record.private_cards[idx(obs.modeller)];
  excluded.insert(excluded.end(), obs.record.board.begin(), obs.record.board.end());
  const auto candidates = card_combinations(spec, spec.private_cards, excluded);
  std::vector<double> terms;
  terms.reserve(candidates.size());
  for (const auto& cand : candidates)
    terms.push_back(decisions_log_prob(beta, spec, opp, contexts, cand));
  return log_sum_exp(terms);
}

PosteriorEnsemble::PosteriorEnsemble(std::shared_ptr<const StrategyEnsemble> ensemble,
                                     Seat opponent)
    : ensemble_(std::move(ensemble)), opponent_(opponent) {
  if (!ensemble_) throw std::invalid_argument("posterior needs an ensemble");
  reset();
}

void PosteriorEnsemble::reset() {
  const double w = -std::log(static_cast<double>(ensemble_->size()));
  log_weights_.assign(static_cast<std::size_t>(ensemble_->size()), w);
  observations_ = 0;
}

std::vector<double> PosteriorEnsemble::weights() const {
  std::vector<double> w(log_weights_.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = std::exp(log_weights_[j]);
  return w;
}

void PosteriorEnsemble::update(const Observation& obs) {
  const GameSpec& spec = ensemble_->index().spec();
  if (obs.opponent() != opponent_)
    throw std::invalid_argument("observation models the wrong seat");
  const InfosetIndex& index = ensemble_->index();
  const int n = ensemble_->size();
  const auto contexts = decision_contexts(spec, obs.record, opponent_);

  // Candidate opponent hands: the actual cards at a showdown, every
  // compatible hand otherwise.
  std::vector<std::vector<int>> candidates;
  if (obs.kind == ObservationKind::Showdown) {
    if (obs.record.hidden(opponent_))
      throw std::invalid_argument("showdown observation lacks opponent cards");
    candidates.push_back(obs.record.private_cards[idx(opponent_)]);
  } else {
    std::vector<int> excluded = obs.record.private_cards[idx(obs.modeller)];
    excluded.insert(excluded.end(), obs.record.board.begin(), obs.record.board.end());
    candidates = card_combinations(spec, spec.private_cards, excluded);
  }

  // Rows are shared across samples; resolve them once per (decision, hand).
  const std::size_t C = candidates.size();
  const std::size_t D = contexts.size();
  std::vector<int> rows(C * D);
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t d = 0; d < D; ++d)
      rows[c * D + d] = index.row_of(infoset_key(spec, opponent_, candidates[c],
                                                 contexts[d].board, contexts[d].history));

  // Per-sample log-likelihood, log-sum-exp over candidate hands.
  std::vector<double> cand_logs(C);
  for (int j = 0; j < n; ++j) {
    for (std::size_t c = 0; c < C; ++c) {
      double sum = 0.0;
      for (std::size_t d = 0; d < D; ++d) {
        const double* packed = ensemble_->packed_row(opponent_, rows[c * D + d]);
        sum += std::log(packed[static_cast<std::size_t>(contexts[d].taken) *
                                   static_cast<std::size_t>(n) +
                               static_cast<std::size_t>(j)]);
      }
      cand_logs[c] = sum;
    }
    log_weights_[static_cast<std::size_t>(j)] += log_sum_exp(cand_logs);
  }

  const double log_z = log_sum_exp(log_weights_);
  if (log_z == kNegInf)
    throw std::runtime_error(
        "posterior degenerate: every sample assigns zero likelihood");
  for (double& w : log_weights_) w -= log_z;
  ++observations_;
}

void PosteriorEnsemble::restore(std::vector<double> log_weights, int observation_count) {
  if (static_cast<int>(log_weights.size()) != ensemble_->size())
    throw std::invalid_argument("log weight count does not match ensemble");
  log_weights_ = std::move(log_weights);
  observations_ = observation_count;
}

void update_posterior(PosteriorEnsemble& posterior, const Observation& obs) {
  posterior.update(obs);
}

double effective_sample_size(std::span<const double> weights) {
  double sum = 0.0, sq = 0.0;
  for (double w : weights) {
    sum += w;
    sq += w * w;
  }
  if (sq <= 0.0) throw std::invalid_argument("effective_sample_size needs positive mass");
  return sum * sum / sq;
}

double effective_sample_size(const PosteriorEnsemble& posterior) {
  const auto w = posterior.weights();
  return effective_sample_size(std::span<const double>(w));
}

int map_index(std::span<const double> weights) {
  if (weights.empty()) throw std::invalid_argument("map_index of empty weights");
  int best = 0;
  for (int j = 1; j < static_cast<int>(weights.size()); ++j)
    if (weights[static_cast<std::size_t>(j)] > weights[static_cast<std::size_t>(best)])
      best = j;
  return best;
}

int map_index(const PosteriorEnsemble& posterior) {
  const auto& lw = posterior.log_weights();
  int best = 0;
  for (int j = 1; j < static_cast<int>(lw.size()); ++j)
    if (lw[static_cast<std::size_t>(j)] > lw[static_cast<std::size_t>(best)]) best = j;
  return best;
}

int thompson_draw(const PosteriorEnsemble& posterior, RngStream& rng) {
  const auto w = posterior.weights();
  double total = 0.0;
  for (double x : w) total += x;
  const double u = rng.uniform01() * total;
  double acc = 0.0;
  for (int j = 0; j < static_cast<int>(w.size()); ++j) {
    acc += w[static_cast<std::size_t>(j)];
    if (u < acc) return j;
  }
  return static_cast<int>(w.size()) - 1;
}

PosteriorDiagnostics posterior_diagnostics(const PosteriorEnsemble& posterior) {
  PosteriorDiagnostics d;
  const auto w = posterior.weights();
  d.ess = effective_sample_size(std::span<const double>(w));
  d.map_index = map_index(posterior);
  d.max_weight = w[static_cast<std::size_t>(d.map_index)];
  return d;
}

void save_posterior(const PosteriorEnsemble& posterior, std::ostream& out) {
  const InfosetIndex& index = posterior.ensemble().index();
  out << "game=" << index.spec().name
      << " canonical_suits=" << (index.spec().canonical_suits ? 1 : 0)
      << " samples=" << posterior.size() << " opponent=" << to_string(posterior.opponent())
      << " observations=" << posterior.observation_count() << "\n";
  char buf[48];
  for (int j = 0; j < posterior.size(); ++j) {
    std::snprintf(buf, sizeof buf, " %.17g", posterior.log_weights()[static_cast<std::size_t>(j)]);
    out << "logweight " << j << buf << "\n";
  }
  char row_buf[32 * 3 + 8];
  for (int j = 0; j < posterior.size(); ++j) {
    out << "strategy " << j << "\n";
    const BehaviourStrategy& s = posterior.ensemble().strategy(j);
    for (int r = 0; r < index.num_rows(); ++r) {
      const auto& row = s.row(r);
      std::snprintf(row_buf, sizeof row_buf, " %.17g %.17g %.17g", row[0], row[1], row[2]);
      out << index.entry(r).key << row_buf << "\n";
    }
  }
}

void save_posterior(const PosteriorEnsemble& posterior, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  save_posterior(posterior, f);
  if (!f) throw std::runtime_error("write failed: " + path);
}

PosteriorEnsemble load_posterior(std::shared_ptr<const InfosetIndex> index,
                                 std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("empty posterior file");
  std::istringstream hs(header);
  std::string game, canon, samples, opponent, observations;
  hs >> game >> canon >> samples >> opponent >> observations;
  auto field = [](const std::string& token, const std::string& name) {
    if (token.rfind(name + "=", 0) != 0)
      throw std::runtime_error("malformed posterior header field: " + token);
    return token.substr(name.size() + 1);
  };
  if (field(game, "game") != index->spec().name)
    throw std::runtime_error("posterior file is for a different game");
  if ((field(canon, "canonical_suits") == "1") != index->spec().canonical_suits)
    throw std::runtime_error("posterior canonical_suits flag does not match");
  const int n = std::stoi(field(samples, "samples"));
  const Seat opp = seat_from_string(field(opponent, "opponent"));
  const int obs_count = std::stoi(field(observations, "observations"));
  if (n <= 0) throw std::runtime_error("posterior sample count must be positive");

  std::vector<double> log_weights(static_cast<std::size_t>(n));
  std::string line;
  for (int j = 0; j < n; ++j) {
    if (!std::getline(in, line)) throw std::runtime_error("truncated posterior weights");
    std::istringstream ls(line);
    std::string tag;
    int jj;
    double w;
    if (!(ls >> tag >> jj >> w) || tag != "logweight" || jj != j)
      throw std::runtime_error("malformed posterior weight line: " + line);
    log_weights[static_cast<std::size_t>(j)] = w;
  }

  std::vector<BehaviourStrategy> strategies;
  strategies.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    if (!std::getline(in, line) || line != "strategy " + std::to_string(j))
      throw std::runtime_error("expected 'strategy " + std::to_string(j) + "' block");
    BehaviourStrategy s(index);
    for (int r = 0; r < index->num_rows(); ++r) {
      if (!std::getline(in, line)) throw std::runtime_error("truncated strategy block");
      std::istringstream ls(line);
      std::string key;
      std::array<double, 3> row{};
      if (!(ls >> key >> row[0] >> row[1] >> row[2]))
        throw std::runtime_error("malformed strategy row: " + line);
      const int rr = index->find(key);
      if (rr < 0) throw std::runtime_error("unknown infoset key: " + key);
      s.set_row(rr, row);
    }
    strategies.push_back(std::move(s));
  }
  auto ensemble = std::make_shared<const StrategyEnsemble>(index, std::move(strategies));
  PosteriorEnsemble posterior(ensemble, opp);
  posterior.restore(std::move(log_weights), obs_count);
  return posterior;
}

PosteriorEnsemble load_posterior(std::shared_ptr<const InfosetIndex> index,
                                 const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open posterior file: " + path);
  return load_posterior(std::move(index), f);
}

}  // namespace bayespoker
