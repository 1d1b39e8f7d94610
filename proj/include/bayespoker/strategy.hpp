#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "bayespoker/infoset.hpp"
#include "bayespoker/rng.hpp"

namespace bayespoker {

// Behaviour-strategy profile: one probability vector over {Fold, Call, Raise}
// per infoset of BOTH seats (rows in InfosetIndex order). Illegal actions
// carry probability zero. A profile describes how its owner would play in
// either seat; consumers read only the rows of the seat they care about.
class BehaviourStrategy {
 public:
  BehaviourStrategy() = default;
  explicit BehaviourStrategy(std::shared_ptr<const InfosetIndex> index);

  const InfosetIndex& index() const { return *index_; }
  std::shared_ptr<const InfosetIndex> index_ptr() const { return index_; }
  bool empty() const { return index_ == nullptr; }

  const std::array<double, 3>& row(int r) const {
    return rows_[static_cast<std::size_t>(r)];
  }
  std::array<double, 3>& row(int r) { return rows_[static_cast<std::size_t>(r)]; }
  double prob(int r, Action a) const {
    return rows_[static_cast<std::size_t>(r)][static_cast<std::size_t>(a)];
  }
  double prob(const std::string& key, Action a) const;
  void set_row(int r, const std::array<double, 3>& p) {
    rows_[static_cast<std::size_t>(r)] = p;
  }
  void set_pure(int r, Action a);

  bool operator==(const BehaviourStrategy& o) const { return rows_ == o.rows_; }

 private:
  std::shared_ptr<const InfosetIndex> index_;
  std::vector<std::array<double, 3>> rows_;
};

// Independent Dirichlet draw at every infoset of both seats, with the given
// concentration repeated over that infoset's legal actions (2-action infosets
// get a 2-dimensional Dirichlet). Deterministic given the stream state.
BehaviourStrategy sample_dirichlet_strategy(std::shared_ptr<const InfosetIndex> index,
                                            double concentration, RngStream& rng);
BehaviourStrategy sample_dirichlet_strategy(std::shared_ptr<const InfosetIndex> index,
                                            double concentration, std::uint64_t seed);

struct StrategyViolation {
  int row = -1;
  std::string key;
  std::string message;
};

// Every violated infoset: negative entries, mass on illegal actions, or a
// row sum off 1 beyond `tolerance`.
std::vector<StrategyViolation> validate_strategy(const BehaviourStrategy& s,
                                                 double tolerance = 1e-9);

// Named reference strategies.
BehaviourStrategy uniform_strategy(std::shared_ptr<const InfosetIndex> index);
BehaviourStrategy always_call_strategy(std::shared_ptr<const InfosetIndex> index);
// Puts 1 on Fold where legal, else 1 on Call.
BehaviourStrategy always_fold_strategy(std::shared_ptr<const InfosetIndex> index);
// Puts 1 on Raise where legal, else 1 on Call.
BehaviourStrategy always_raise_strategy(std::shared_ptr<const InfosetIndex> index);

// Text format: header "game=<name> canonical_suits=<0|1>", then one line per
// infoset in enumeration order: "<key> <p_fold> <p_call> <p_raise>" with 17
// significant digits (doubles round-trip bit-exactly).
void save_strategy(const BehaviourStrategy& s, std::ostream& out);
void save_strategy(const BehaviourStrategy& s, const std::string& path);
BehaviourStrategy load_strategy(std::shared_ptr<const InfosetIndex> index,
                                std::istream& in);
BehaviourStrategy load_strategy(std::shared_ptr<const InfosetIndex> index,
                                const std::string& path);
// Reads "game=... canonical_suits=..." from a strategy file header.
std::pair<std::string, bool> peek_strategy_header(const std::string& path);

// Fixed collection of sampled strategies with per-seat packed probability
// tables for tight inner loops: packed(seat)[(row_offset * 3 + action) * N + j]
// holds strategy j's probability, rows offset from seat_begin(seat).
class StrategyEnsemble {
 public:
  StrategyEnsemble(std::shared_ptr<const InfosetIndex> index,
                   std::vector<BehaviourStrategy> strategies);

  // n i.i.d. prior draws.
  static std::shared_ptr<const StrategyEnsemble> sample_prior(
      std::shared_ptr<const InfosetIndex> index, int n, double concentration,
      RngStream& rng);
  static std::shared_ptr<const StrategyEnsemble> sample_prior(
      std::shared_ptr<const InfosetIndex> index, int n, double concentration,
      std::uint64_t seed);

  const InfosetIndex& index() const { return *index_; }
  std::shared_ptr<const InfosetIndex> index_ptr() const { return index_; }
  int size() const { return static_cast<int>(strategies_.size()); }
  const BehaviourStrategy& strategy(int j) const {
    return strategies_[static_cast<std::size_t>(j)];
  }

  const double* packed(Seat seat) const { return packed_[idx(seat)].data(); }
  const double* packed_row(Seat seat, int row) const {
    return packed_[idx(seat)].data() +
           static_cast<std::size_t>(row - index_->seat_begin(seat)) * 3 *
               static_cast<std::size_t>(size());
  }

 private:
  std::shared_ptr<const InfosetIndex> index_;
  std::vector<BehaviourStrategy> strategies_;
  std::array<std::vector<double>, 2> packed_;
};

}  // namespace bayespoker
