#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

// Heads-up limit poker engine for small games (Kuhn, Leduc, and custom
// variants described by a GameSpec). Betting follows standard limit rules:
// P1 acts first in every round, a fixed raise size per round, a cap on the
// number of raises per round, and a Call that is not the round's opening
// action closes the round. Folding is excluded while contributions are equal
// (it would be strictly dominated by Call).
namespace bayespoker {

enum class Seat : int { P1 = 0, P2 = 1 };

inline Seat other(Seat s) { return s == Seat::P1 ? Seat::P2 : Seat::P1; }
inline int idx(Seat s) { return static_cast<int>(s); }
std::string to_string(Seat s);
Seat seat_from_string(const std::string& s);

// Fixed total order; ties in best-response backups break toward the lowest.
enum class Action : int { Fold = 0, Call = 1, Raise = 2 };

char action_char(Action a);
Action action_from_char(char c);
std::string to_string(Action a);

struct Card {
  int rank = 0;
  int suit = 0;
};

struct RoundSpec {
  int board_cards = 0;   // public cards revealed before this round's betting
  int raise_size = 0;    // chips added on top of a match by each Raise
  int max_raises = 0;    // raise cap for the round
};

// Immutable rule description. Safe to share across threads once built.
struct GameSpec {
  std::string name = "custom";
  std::vector<Card> deck;          // card id = index into this vector
  int private_cards = 1;           // per player
  std::array<int, 2> antes = {1, 1};
  std::vector<RoundSpec> rounds;
  bool canonical_suits = true;     // collapse suit-isomorphic infosets

  // 6-card Leduc: 3 ranks x 2 suits, one private card, raises 2 then 4,
  // two-bet maximum per round, one board card before round 2.
  static GameSpec leduc(bool canonical = true);
  // Kuhn poker as 1-round limit: 3 ranks, one suit, raise 1, one-bet cap.
  static GameSpec kuhn(bool canonical = true);
  static GameSpec from_json(const std::string& json_text);
  static GameSpec by_name(const std::string& name_or_path, bool canonical = true);
  std::string to_json() const;

  // Fixed per-player decision-slot count: in one round the longest line is an
  // opening Call, every raise, then a closing action (max_raises + 2 actions),
  // with P1 on the odd slots; summing the per-round per-player maxima gives
  // the bound used to pad hand records to fixed length.
  int max_decisions_per_player() const;
  int total_board_cards() const;

  void validate() const;  // throws std::invalid_argument on malformed specs
  bool operator==(const GameSpec& o) const;
};

enum class TerminalKind : int { None = 0, FoldEnd = 1, Showdown = 2 };

// Public betting state: everything both players observe.
struct PublicState {
  int round = 0;
  std::string history;             // 'f'/'c'/'r' per action, '/' between rounds
  std::vector<int> board;          // revealed card ids, in reveal order
  std::array<int, 2> contributions = {0, 0};
  Seat to_act = Seat::P1;
  int raises_this_round = 0;
  bool round_has_action = false;   // whether this round's opening action happened
  int board_pending = 0;           // cards to reveal before the next decision
  TerminalKind terminal = TerminalKind::None;
  Seat fold_winner = Seat::P1;     // meaningful iff terminal == FoldEnd

  bool is_terminal() const { return terminal != TerminalKind::None; }
  bool awaiting_reveal() const { return board_pending > 0; }
  int pot() const { return contributions[0] + contributions[1]; }
};

PublicState initial_state(const GameSpec& spec);

// Legal actions at a decision point, in Fold < Call < Raise order.
// Throws std::invalid_argument on terminal or reveal-pending states.
std::vector<Action> legal_actions(const GameSpec& spec, const PublicState& state);
bool is_legal(const GameSpec& spec, const PublicState& state, Action a);

// Returns the successor state; throws std::invalid_argument on illegal input.
PublicState apply_action(const GameSpec& spec, const PublicState& state, Action a);

// Consumes exactly state.board_pending cards (ids must be distinct and unseen).
PublicState reveal_board(const GameSpec& spec, const PublicState& state,
                         std::span<const int> cards);

enum class ShowdownOutcome : int { P1Wins = 0, P2Wins = 1, Split = 2 };

// Single-private-card ranking: a private card pairing any board card beats
// any unpaired hand; two paired hands compare paired rank; otherwise higher
// private rank wins; equal ranks split.
ShowdownOutcome showdown_value(const GameSpec& spec, int p1_card, int p2_card,
                               std::span<const int> board);

// Completed hand, oracle view. Redacted views (for observations) leave the
// hidden seat's private_cards empty; a seat's cards may be hidden only when
// the hand ended in a fold.
struct HandRecord {
  std::array<std::vector<int>, 2> private_cards;  // [seat] card ids; empty = hidden
  std::vector<int> board;                         // revealed ids, reveal order
  std::string history;                            // as PublicState::history
  TerminalKind terminal = TerminalKind::None;
  Seat fold_winner = Seat::P1;                    // iff terminal == FoldEnd
  int decision_slots = 0;                         // spec.max_decisions_per_player()

  bool hidden(Seat s) const { return private_cards[idx(s)].empty(); }
  // Padded decision view: slot i >= the seat's real decision count reads Fold.
  // Padding decisions carry probability 1 in every likelihood.
  Action decision(Seat s, int i) const;
  int real_decision_count(Seat s) const;
  bool operator==(const HandRecord& o) const;
};

// Replays the record from the initial state, validating every step.
// Returns the terminal state. Throws std::invalid_argument on incoherence.
PublicState replay(const GameSpec& spec, const HandRecord& record);

// P1 net chips for a completed hand (P2 net is its negation). Fold: the
// folder loses their contribution. Showdown: winner takes the loser's
// contribution; split pots net zero.
int payoff(const GameSpec& spec, const HandRecord& record);

}  // namespace bayespoker
