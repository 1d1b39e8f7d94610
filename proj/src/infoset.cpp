#include "bayespoker/infoset.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace bayespoker {

namespace {

void append_cards(const GameSpec& spec, std::string& out, std::span<const int> ids,
                  const std::unordered_map<int, int>* suit_map) {
  if (ids.empty()) {
    out.push_back('-');
    return;
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out.push_back('+');
    const Card& c = spec.deck[static_cast<std::size_t>(ids[i])];
    const int suit = suit_map ? suit_map->at(c.suit) : c.suit;
    out += std::to_string(c.rank);
    out.push_back('.');
    out += std::to_string(suit);
  }
}

}  // namespace

std::string infoset_key(const GameSpec& spec, Seat seat,
                        std::span<const int> private_cards,
                        std::span<const int> board, const std::string& history) {
  std::vector<int> priv(private_cards.begin(), private_cards.end());
  std::sort(priv.begin(), priv.end(), [&](int a, int b) {
    const Card& ca = spec.deck[static_cast<std::size_t>(a)];
    const Card& cb = spec.deck[static_cast<std::size_t>(b)];
    return ca.rank != cb.rank ? ca.rank < cb.rank : ca.suit < cb.suit;
  });

  std::unordered_map<int, int> suit_map;
  const std::unordered_map<int, int>* map_ptr = nullptr;
  if (spec.canonical_suits) {
    int next = 0;
    auto visit = [&](int id) {
      const int s = spec.deck[static_cast<std::size_t>(id)].suit;
      if (!suit_map.count(s)) suit_map[s] = next++;
    };
    for (int id : priv) visit(id);
    for (int id : board) visit(id);
    map_ptr = &suit_map;
    // Relabelling can reorder equal-rank private cards; re-sort on the
    // canonical labels so equal classes render identically.
    std::sort(priv.begin(), priv.end(), [&](int a, int b) {
      const Card& ca = spec.deck[static_cast<std::size_t>(a)];
      const Card& cb = spec.deck[static_cast<std::size_t>(b)];
      const int sa = suit_map.at(ca.suit), sb = suit_map.at(cb.suit);
      return ca.rank != cb.rank ? ca.rank < cb.rank : sa < sb;
    });
  }

  std::string key = to_string(seat);
  key.push_back('|');
  append_cards(spec, key, priv, map_ptr);
  key.push_back('|');
  append_cards(spec, key, board, map_ptr);
  key.push_back('|');
  key += history;
  return key;
}

std::string public_context_key(const GameSpec& spec, std::span<const int> board,
                               const std::string& history) {
  std::unordered_map<int, int> suit_map;
  const std::unordered_map<int, int>* map_ptr = nullptr;
  if (spec.canonical_suits) {
    int next = 0;
    for (int id : board) {
      const int s = spec.deck[static_cast<std::size_t>(id)].suit;
      if (!suit_map.count(s)) suit_map[s] = next++;
    }
    map_ptr = &suit_map;
  }
  std::string key;
  append_cards(spec, key, board, map_ptr);
  key.push_back('|');
  key += history;
  return key;
}

std::vector<std::vector<int>> card_combinations(const GameSpec& spec, int k,
                                                std::span<const int> excluded) {
  std::vector<int> pool;
  for (int id = 0; id < static_cast<int>(spec.deck.size()); ++id)
    if (std::find(excluded.begin(), excluded.end(), id) == excluded.end())
      pool.push_back(id);
  std::vector<std::vector<int>> out;
  if (k > static_cast<int>(pool.size())) return out;
  std::vector<int> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (static_cast<int>(pick.size()) == k) {
      out.push_back(pick);
      return;
    }
    for (std::size_t i = start; i < pool.size(); ++i) {
      pick.push_back(pool[i]);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return out;
}

std::vector<PrivateClass> private_classes(const GameSpec& spec) {
  std::vector<PrivateClass> classes;
  std::unordered_map<std::string, std::size_t> seen;
  for (const auto& deal : card_combinations(spec, spec.private_cards, {})) {
    const std::string key = infoset_key(spec, Seat::P1, deal, {}, "");
    auto it = seen.find(key);
    if (it == seen.end()) {
      seen.emplace(key, classes.size());
      classes.push_back(PrivateClass{deal, 1});
    } else {
      ++classes[it->second].multiplicity;
    }
  }
  return classes;
}

namespace {

// Depth-first walk over all states consistent with `seat` holding `priv`
// (opponent cards unknown, so board candidates exclude only priv + board).
void walk_infosets(const GameSpec& spec, Seat seat, std::span<const int> priv,
                   const PublicState& state,
                   const std::function<void(const PublicState&)>& visit) {
  if (state.is_terminal()) return;
  if (state.awaiting_reveal()) {
    std::vector<int> excluded(priv.begin(), priv.end());
    excluded.insert(excluded.end(), state.board.begin(), state.board.end());
    for (const auto& combo : card_combinations(spec, state.board_pending, excluded))
      walk_infosets(spec, seat, priv, reveal_board(spec, state, combo), visit);
    return;
  }
  if (state.to_act == seat) visit(state);
  for (Action a : legal_actions(spec, state))
    walk_infosets(spec, seat, priv, apply_action(spec, state, a), visit);
}

}  // namespace

std::vector<std::string> enumerate_infosets(const GameSpec& spec, Seat seat) {
  std::vector<std::string> keys;
  std::unordered_map<std::string, bool> seen;
  for (const PrivateClass& cls : private_classes(spec)) {
    walk_infosets(spec, seat, cls.representative, initial_state(spec),
                  [&](const PublicState& s) {
                    std::string key = infoset_key(spec, seat, cls.representative,
                                                  s.board, s.history);
                    if (!seen.emplace(key, true).second) return;
                    keys.push_back(std::move(key));
                  });
  }
  return keys;
}

std::shared_ptr<const InfosetIndex> InfosetIndex::build(
    std::shared_ptr<const GameSpec> spec) {
  auto index = std::make_shared<InfosetIndex>();
  index->spec_ = std::move(spec);
  const GameSpec& g = *index->spec_;
  for (Seat seat : {Seat::P1, Seat::P2}) {
    index->seat_begin_[idx(seat)] = static_cast<int>(index->entries_.size());
    std::unordered_map<std::string, bool> seen;
    for (const PrivateClass& cls : private_classes(g)) {
      walk_infosets(g, seat, cls.representative, initial_state(g),
                    [&](const PublicState& s) {
                      std::string key = infoset_key(g, seat, cls.representative,
                                                    s.board, s.history);
                      if (!seen.emplace(key, true).second) return;
                      InfosetEntry e;
                      e.key = std::move(key);
                      e.seat = seat;
                      for (Action a : legal_actions(g, s)) {
                        e.legal_mask |= 1u << static_cast<int>(a);
                        ++e.num_legal;
                      }
                      index->by_key_.emplace(e.key,
                                             static_cast<int>(index->entries_.size()));
                      index->entries_.push_back(std::move(e));
                    });
    }
    index->seat_end_[idx(seat)] = static_cast<int>(index->entries_.size());
  }
  return index;
}

std::shared_ptr<const InfosetIndex> InfosetIndex::build(const GameSpec& spec) {
  return build(std::make_shared<const GameSpec>(spec));
}

int InfosetIndex::find(const std::string& key) const {
  auto it = by_key_.find(key);
  return it == by_key_.end() ? -1 : it->second;
}

int InfosetIndex::row_of(const std::string& key) const {
  const int row = find(key);
  if (row < 0) throw std::invalid_argument("unknown infoset key: " + key);
  return row;
}

int InfosetIndex::row_of(Seat seat, std::span<const int> private_cards,
                         std::span<const int> board, const std::string& history) const {
  return row_of(infoset_key(*spec_, seat, private_cards, board, history));
}

}  // namespace bayespoker
