#pragma once

#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bayespoker/game.hpp"

namespace bayespoker {

// Infoset keys are strings "seat|private|board|history" with cards rendered
// as <rank>.<suit>, '+' between cards, '-' for an empty group. When
// canonical_suits is set, suits are relabelled by first appearance scanning
// the sorted private cards then the board in reveal order, which collapses
// suit-isomorphic states (suits never affect hand strength here).
std::string infoset_key(const GameSpec& spec, Seat seat,
                        std::span<const int> private_cards,
                        std::span<const int> board, const std::string& history);

// Public-only variant (no private cards); used for opponent-action contexts.
std::string public_context_key(const GameSpec& spec, std::span<const int> board,
                               const std::string& history);

// All infoset keys for one seat, in a deterministic order (private-card
// classes in deck order, then depth-first over the public tree with actions
// in Fold < Call < Raise order and board cards in deck order). This order is
// the strategy-file row order.
std::vector<std::string> enumerate_infosets(const GameSpec& spec, Seat seat);

struct InfosetEntry {
  std::string key;
  Seat seat = Seat::P1;
  unsigned legal_mask = 0;  // bit i set => Action(i) legal
  int num_legal = 0;
};

// Compiled infoset table for one GameSpec: all P1 keys followed by all P2
// keys, with a key -> row lookup. Immutable after construction; safe to share
// across threads. Building it enumerates the game tree, so construct it only
// for small games.
class InfosetIndex {
 public:
  static std::shared_ptr<const InfosetIndex> build(std::shared_ptr<const GameSpec> spec);
  static std::shared_ptr<const InfosetIndex> build(const GameSpec& spec);

  const GameSpec& spec() const { return *spec_; }
  std::shared_ptr<const GameSpec> spec_ptr() const { return spec_; }

  int num_rows() const { return static_cast<int>(entries_.size()); }
  const InfosetEntry& entry(int row) const { return entries_[static_cast<std::size_t>(row)]; }
  int seat_begin(Seat s) const { return seat_begin_[idx(s)]; }
  int seat_end(Seat s) const { return seat_end_[idx(s)]; }
  int num_rows(Seat s) const { return seat_end(s) - seat_begin(s); }

  // Row for a key; -1 if absent.
  int find(const std::string& key) const;
  // Throwing variant with a diagnostic message.
  int row_of(const std::string& key) const;
  int row_of(Seat seat, std::span<const int> private_cards, std::span<const int> board,
             const std::string& history) const;

 private:
  std::shared_ptr<const GameSpec> spec_;
  std::vector<InfosetEntry> entries_;
  std::unordered_map<std::string, int> by_key_;
  std::array<int, 2> seat_begin_ = {0, 0};
  std::array<int, 2> seat_end_ = {0, 0};
};

// Distinct private-card deals for one seat, grouped by canonical key when the
// spec canonicalizes suits. Each class lists its raw member deals; the first
// member is the representative. Deterministic order.
struct PrivateClass {
  std::vector<int> representative;          // sorted card ids
  int multiplicity = 0;                     // raw deals collapsing to this class
};
std::vector<PrivateClass> private_classes(const GameSpec& spec);

// All size-k sorted combinations of the deck excluding `excluded`.
std::vector<std::vector<int>> card_combinations(const GameSpec& spec, int k,
                                                std::span<const int> excluded);

}  // namespace bayespoker
