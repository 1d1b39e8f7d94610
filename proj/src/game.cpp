#include "bayespoker/game.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace bayespoker {

std::string to_string(Seat s) { return s == Seat::P1 ? "p1" : "p2"; }

Seat seat_from_string(const std::string& s) {
  if (s == "p1" || s == "P1") return Seat::P1;
  if (s == "p2" || s == "P2") return Seat::P2;
  throw std::invalid_argument("unknown seat: " + s);
}

char action_char(Action a) {
  switch (a) {
    case Action::Fold: return 'f';
    case Action::Call: return 'c';
    case Action::Raise: return 'r';
  }
  throw std::invalid_argument("bad action");
}

Action action_from_char(char c) {
  switch (c) {
    case 'f': return Action::Fold;
    case 'c': return Action::Call;
    case 'r': return Action::Raise;
  }
  throw std::invalid_argument(std::string("bad action char: ") + c);
}

std::string to_string(Action a) {
  switch (a) {
    case Action::Fold: return "fold";
    case Action::Call: return "call";
    case Action::Raise: return "raise";
  }
  throw std::invalid_argument("bad action");
}

static std::vector<Card> make_deck(int ranks, int suits) {
  std::vector<Card> deck;
  deck.reserve(static_cast<std::size_t>(ranks) * suits);
  for (int r = 0; r < ranks; ++r)
    for (int s = 0; s < suits; ++s) deck.push_back(Card{r, s});
  return deck;
}

GameSpec GameSpec::leduc(bool canonical) {
  GameSpec g;
  g.name = "leduc";
  g.deck = make_deck(3, 2);
  g.private_cards = 1;
  g.antes = {1, 1};
  g.rounds = {RoundSpec{0, 2, 2}, RoundSpec{1, 4, 2}};
  g.canonical_suits = canonical;
  g.validate();
  return g;
}

GameSpec GameSpec::kuhn(bool canonical) {
  GameSpec g;
  g.name = "kuhn";
  g.deck = make_deck(3, 1);
  g.private_cards = 1;
  g.antes = {1, 1};
  g.rounds = {RoundSpec{0, 1, 1}};
  g.canonical_suits = canonical;
  g.validate();
  return g;
}

GameSpec GameSpec::from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  GameSpec g;
  g.name = j.value("name", std::string("custom"));
  int ranks = j.at("num_ranks").get<int>();
  int suits = j.at("num_suits").get<int>();
  g.deck = make_deck(ranks, suits);
  g.private_cards = j.value("private_cards", 1);
  if (j.contains("antes")) {
    auto a = j.at("antes");
    if (!a.is_array() || a.size() != 2)
      throw std::invalid_argument("antes must be a two-entry array");
    g.antes = {a[0].get<int>(), a[1].get<int>()};
  }
  g.canonical_suits = j.value("canonical_suits", true);
  if (!j.contains("rounds") || !j.at("rounds").is_array() || j.at("rounds").empty())
    throw std::invalid_argument("rounds must be a non-empty array");
  for (const auto& r : j.at("rounds")) {
    RoundSpec rs;
    rs.board_cards = r.value("board_cards", 0);
    rs.raise_size = r.at("raise_size").get<int>();
    rs.max_raises = r.at("max_raises").get<int>();
    g.rounds.push_back(rs);
  }
  g.validate();
  return g;
}

std::string GameSpec::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  int max_rank = 0, max_suit = 0;
  for (const Card& c : deck) {
    max_rank = std::max(max_rank, c.rank);
    max_suit = std::max(max_suit, c.suit);
  }
  j["num_ranks"] = max_rank + 1;
  j["num_suits"] = max_suit + 1;
  j["private_cards"] = private_cards;
  j["antes"] = {antes[0], antes[1]};
  j["canonical_suits"] = canonical_suits;
  j["rounds"] = nlohmann::json::array();
  for (const RoundSpec& r : rounds)
    j["rounds"].push_back({{"board_cards", r.board_cards},
                           {"raise_size", r.raise_size},
                           {"max_raises", r.max_raises}});
  return j.dump(2);
}

GameSpec GameSpec::by_name(const std::string& name_or_path, bool canonical) {
  if (name_or_path == "leduc") return leduc(canonical);
  if (name_or_path == "kuhn") return kuhn(canonical);
  throw std::invalid_argument("unknown game name: " + name_or_path);
}

int GameSpec::max_decisions_per_player() const {
  int k = 0;
  for (const RoundSpec& r : rounds) k += (r.max_raises + 2 + 1) / 2;
  return k;
}

int GameSpec::total_board_cards() const {
  int n = 0;
  for (const RoundSpec& r : rounds) n += r.board_cards;
  return n;
}

void GameSpec::validate() const {
  if (deck.size() < 2) throw std::invalid_argument("deck too small");
  std::set<std::pair<int, int>> seen;
  for (const Card& c : deck)
    if (!seen.insert({c.rank, c.suit}).second)
      throw std::invalid_argument("duplicate card in deck");
  if (private_cards < 1) throw std::invalid_argument("private_cards must be >= 1");
  if (antes[0] < 0 || antes[1] < 0) throw std::invalid_argument("negative ante");
  if (rounds.empty()) throw std::invalid_argument("no betting rounds");
  for (const RoundSpec& r : rounds) {
    if (r.board_cards < 0) throw std::invalid_argument("negative board_cards");
    if (r.raise_size <= 0) throw std::invalid_argument("raise_size must be positive");
    if (r.max_raises < 0) throw std::invalid_argument("negative max_raises");
  }
  if (2 * private_cards + total_board_cards() > static_cast<int>(deck.size()))
    throw std::invalid_argument("deck cannot cover private and board cards");
}

bool GameSpec::operator==(const GameSpec& o) const {
  if (name != o.name || private_cards != o.private_cards || antes != o.antes ||
      canonical_suits != o.canonical_suits || deck.size() != o.deck.size() ||
      rounds.size() != o.rounds.size())
    return false;
  for (std::size_t i = 0; i < deck.size(); ++i)
    if (deck[i].rank != o.deck[i].rank || deck[i].suit != o.deck[i].suit) return false;
  for (std::size_t i = 0; i < rounds.size(); ++i)
    if (rounds[i].board_cards != o.rounds[i].board_cards ||
        rounds[i].raise_size != o.rounds[i].raise_size ||
        rounds[i].max_raises != o.rounds[i].max_raises)
      return false;
  return true;
}

PublicState initial_state(const GameSpec& spec) {
  PublicState s;
  s.round = 0;
  s.contributions = spec.antes;
  s.to_act = Seat::P1;
  s.board_pending = spec.rounds[0].board_cards;
  return s;
}

static void require_decision_point(const PublicState& state) {
  if (state.is_terminal())
    throw std::invalid_argument("no actions at a terminal state");
  if (state.awaiting_reveal())
    throw std::invalid_argument("no actions while a board reveal is pending");
}

std::vector<Action> legal_actions(const GameSpec& spec, const PublicState& state) {
  require_decision_point(state);
  std::vector<Action> out;
  if (state.contributions[0] != state.contributions[1]) out.push_back(Action::Fold);
  out.push_back(Action::Call);
  if (state.raises_this_round < spec.rounds[state.round].max_raises)
    out.push_back(Action::Raise);
  return out;
}

bool is_legal(const GameSpec& spec, const PublicState& state, Action a) {
  if (state.is_terminal() || state.awaiting_reveal()) return false;
  switch (a) {
    case Action::Fold:
      return state.contributions[0] != state.contributions[1];
    case Action::Call:
      return true;
    case Action::Raise:
      return state.raises_this_round < spec.rounds[state.round].max_raises;
  }
  return false;
}

PublicState apply_action(const GameSpec& spec, const PublicState& state, Action a) {
  require_decision_point(state);
  if (!is_legal(spec, state, a))
    throw std::invalid_argument("illegal action " + to_string(a) + " at history '" +
                                state.history + "'");
  PublicState s = state;
  const Seat actor = s.to_act;
  const Seat opp = other(actor);
  s.history.push_back(action_char(a));
  switch (a) {
    case Action::Fold:
      s.terminal = TerminalKind::FoldEnd;
      s.fold_winner = opp;
      break;
    case Action::Call: {
      s.contributions[idx(actor)] = s.contributions[idx(opp)];
      const bool closes = s.round_has_action;
      if (!closes) {
        s.round_has_action = true;
        s.to_act = opp;
      } else if (s.round + 1 == static_cast<int>(spec.rounds.size())) {
        s.terminal = TerminalKind::Showdown;
      } else {
        ++s.round;
        s.history.push_back('/');
        s.raises_this_round = 0;
        s.round_has_action = false;
        s.board_pending = spec.rounds[s.round].board_cards;
        s.to_act = Seat::P1;
      }
      break;
    }
    case Action::Raise:
      s.contributions[idx(actor)] =
          s.contributions[idx(opp)] + spec.rounds[s.round].raise_size;
      ++s.raises_this_round;
      s.round_has_action = true;
      s.to_act = opp;
      break;
  }
  return s;
}

PublicState reveal_board(const GameSpec& spec, const PublicState& state,
                         std::span<const int> cards) {
  if (state.is_terminal())
    throw std::invalid_argument("cannot reveal at a terminal state");
  if (!state.awaiting_reveal())
    throw std::invalid_argument("no board reveal pending");
  if (static_cast<int>(cards.size()) != state.board_pending)
    throw std::invalid_argument("reveal must supply exactly the pending card count");
  PublicState s = state;
  for (int c : cards) {
    if (c < 0 || c >= static_cast<int>(spec.deck.size()))
      throw std::invalid_argument("card id out of range");
    if (std::find(s.board.begin(), s.board.end(), c) != s.board.end())
      throw std::invalid_argument("card revealed twice");
    s.board.push_back(c);
  }
  s.board_pending = 0;
  s.to_act = Seat::P1;
  return s;
}

ShowdownOutcome showdown_value(const GameSpec& spec, int p1_card, int p2_card,
                               std::span<const int> board) {
  if (spec.private_cards != 1)
    throw std::invalid_argument(
        "showdown ranking is defined for single-private-card games only");
  auto rank_of = [&](int id) {
    if (id < 0 || id >= static_cast<int>(spec.deck.size()))
      throw std::invalid_argument("card id out of range");
    return spec.deck[id].rank;
  };
  const int r1 = rank_of(p1_card);
  const int r2 = rank_of(p2_card);
  bool pair1 = false, pair2 = false;
  for (int b : board) {
    const int br = rank_of(b);
    pair1 = pair1 || br == r1;
    pair2 = pair2 || br == r2;
  }
  if (pair1 != pair2) return pair1 ? ShowdownOutcome::P1Wins : ShowdownOutcome::P2Wins;
  if (r1 != r2) return r1 > r2 ? ShowdownOutcome::P1Wins : ShowdownOutcome::P2Wins;
  return ShowdownOutcome::Split;
}

Action HandRecord::decision(Seat s, int i) const {
  if (i < 0 || i >= decision_slots)
    throw std::invalid_argument("decision slot out of range");
  // Walk the history, assigning actors: each round starts with P1 and
  // alternates; '/' marks a round boundary.
  int count = 0;
  Seat actor = Seat::P1;
  for (char ch : history) {
    if (ch == '/') {
      actor = Seat::P1;
      continue;
    }
    if (actor == s) {
      if (count == i) return action_from_char(ch);
      ++count;
    }
    actor = other(actor);
  }
  return Action::Fold;  // padding slot
}

int HandRecord::real_decision_count(Seat s) const {
  int count = 0;
  Seat actor = Seat::P1;
  for (char ch : history) {
    if (ch == '/') {
      actor = Seat::P1;
      continue;
    }
    if (actor == s) ++count;
    actor = other(actor);
  }
  return count;
}

bool HandRecord::operator==(const HandRecord& o) const {
  return private_cards == o.private_cards && board == o.board &&
         history == o.history && terminal == o.terminal &&
         (terminal != TerminalKind::FoldEnd || fold_winner == o.fold_winner) &&
         decision_slots == o.decision_slots;
}

PublicState replay(const GameSpec& spec, const HandRecord& record) {
  // Card coherence first: present private hands must match private_cards,
  // and no card id may appear twice across the private hands and the board.
  std::vector<int> seen;
  for (Seat st : {Seat::P1, Seat::P2}) {
    const std::vector<int>& pc = record.private_cards[idx(st)];
    if (!pc.empty() && static_cast<int>(pc.size()) != spec.private_cards)
      throw std::invalid_argument("record private hand has the wrong size");
    seen.insert(seen.end(), pc.begin(), pc.end());
  }
  seen.insert(seen.end(), record.board.begin(), record.board.end());
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i] < 0 || seen[i] >= static_cast<int>(spec.deck.size()))
      throw std::invalid_argument("record card id outside the deck");
    for (std::size_t j = i + 1; j < seen.size(); ++j)
      if (seen[i] == seen[j])
        throw std::invalid_argument("record deals the same card twice");
  }

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
    if (s.is_terminal())
      throw std::invalid_argument("actions continue past a terminal state");
    s = apply_action(spec, s, action_from_char(ch));
  }
  if (!s.is_terminal())
    throw std::invalid_argument("record does not reach a terminal state");
  if (s.terminal != record.terminal)
    throw std::invalid_argument("record terminal kind does not match replay");
  if (record.terminal == TerminalKind::FoldEnd && s.fold_winner != record.fold_winner)
    throw std::invalid_argument("record fold winner does not match replay");
  if (board_cursor != record.board.size())
    throw std::invalid_argument("record board has unrevealed cards");
  if (s.terminal == TerminalKind::Showdown &&
      (record.hidden(Seat::P1) || record.hidden(Seat::P2)))
    throw std::invalid_argument("showdown records must expose both private hands");
  return s;
}

int payoff(const GameSpec& spec, const HandRecord& record) {
  const PublicState end = replay(spec, record);
  if (end.terminal == TerminalKind::FoldEnd) {
    return end.fold_winner == Seat::P1 ? end.contributions[idx(Seat::P2)]
                                       : -end.contributions[idx(Seat::P1)];
  }
  if (record.hidden(Seat::P1) || record.hidden(Seat::P2))
    throw std::invalid_argument("showdown payoff requires both private hands");
  if (spec.private_cards != 1)
    throw std::invalid_argument("payoff showdown requires single-private-card games");
  const ShowdownOutcome o = showdown_value(spec, record.private_cards[0][0],
                                           record.private_cards[1][0], record.board);
  switch (o) {
    case ShowdownOutcome::P1Wins: return end.contributions[idx(Seat::P2)];
    case ShowdownOutcome::P2Wins: return -end.contributions[idx(Seat::P1)];
    case ShowdownOutcome::Split: return 0;
  }
  return 0;
}

}  // namespace bayespoker
