// Strategy-table tests: Dirichlet sampling determinism and moments,
// validation, the named reference strategies, text round-trips, and the
// packed ensemble layout used by the hot loops.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "bayespoker/infoset.hpp"
#include "bayespoker/rng.hpp"
#include "bayespoker/strategy.hpp"

using namespace bayespoker;

namespace {

int find_row(const InfosetIndex& index, int num_legal, Seat seat) {
  for (int r = index.seat_begin(seat); r < index.seat_end(seat); ++r)
    if (index.entry(r).num_legal == num_legal) return r;
  FAIL("no row with the requested branching");
  return -1;
}

bool legal(const InfosetEntry& e, Action a) {
  return (e.legal_mask >> static_cast<int>(a)) & 1u;
}

}  // namespace

TEST_CASE("dirichlet sampling is reproducible and seed-sensitive") {
  auto index = InfosetIndex::build(GameSpec::leduc());
  BehaviourStrategy a = sample_dirichlet_strategy(index, 2.0, 123u);
  BehaviourStrategy b = sample_dirichlet_strategy(index, 2.0, 123u);
  BehaviourStrategy c = sample_dirichlet_strategy(index, 2.0, 124u);
  CHECK(a == b);  // bitwise row equality
  CHECK_FALSE(a == c);

  RngStream r1(9), r2(9);
  CHECK(sample_dirichlet_strategy(index, 0.7, r1) ==
        sample_dirichlet_strategy(index, 0.7, r2));
}

TEST_CASE("sampled strategies are valid distributions over legal actions") {
  for (const GameSpec& spec : {GameSpec::kuhn(), GameSpec::leduc()}) {
    auto index = InfosetIndex::build(spec);
    for (unsigned seed = 0; seed < 20; ++seed) {
      BehaviourStrategy s = sample_dirichlet_strategy(index, 1.5, seed);
      CHECK(validate_strategy(s).empty());
      for (int r = 0; r < index->num_rows(); ++r) {
        const InfosetEntry& e = index->entry(r);
        double sum = 0.0;
        for (Action a : {Action::Fold, Action::Call, Action::Raise}) {
          if (!legal(e, a)) CHECK(s.prob(r, a) == 0.0);
          CHECK(s.prob(r, a) >= 0.0);
          sum += s.prob(r, a);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("dirichlet moments match the concentration") {
  auto index = InfosetIndex::build(GameSpec::leduc());
  const int row3 = find_row(*index, 3, Seat::P2);
  const int row2 = find_row(*index, 2, Seat::P1);
  const int draws = 10000;
  RngStream rng(2024);
  double sum3[3] = {0, 0, 0};
  double sum2 = 0.0, sumsq_first3 = 0.0;
  for (int i = 0; i < draws; ++i) {
    BehaviourStrategy s = sample_dirichlet_strategy(index, 2.0, rng);
    for (int a = 0; a < 3; ++a) sum3[a] += s.row(row3)[static_cast<std::size_t>(a)];
    sumsq_first3 += s.row(row3)[0] * s.row(row3)[0];
    // Two legal actions: a symmetric two-dimensional draw.
    const InfosetEntry& e = index->entry(row2);
    double first = -1.0;
    for (Action a : {Action::Fold, Action::Call, Action::Raise})
      if (legal(e, a)) {
        first = s.prob(row2, a);
        break;
      }
    sum2 += first;
  }
  for (int a = 0; a < 3; ++a)
    CHECK(sum3[a] / draws == doctest::Approx(1.0 / 3.0).epsilon(0.05));
  CHECK(sum2 / draws == doctest::Approx(0.5).epsilon(0.04));
  // Var of one coordinate of a symmetric 3-dim draw with per-coordinate
  // concentration 2: a(a0 - a)/(a0^2 (a0 + 1)) with a = 2, a0 = 6.
  double var = sumsq_first3 / draws - (sum3[0] / draws) * (sum3[0] / draws);
  CHECK(var == doctest::Approx(2.0 * 4.0 / (36.0 * 7.0)).epsilon(0.08));
}

TEST_CASE("higher concentration pulls draws toward uniform") {
  auto index = InfosetIndex::build(GameSpec::kuhn());
  const int row = find_row(*index, 2, Seat::P1);
  auto spread = [&](double conc, unsigned seed) {
    RngStream rng(seed);
    double s = 0.0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
      BehaviourStrategy b = sample_dirichlet_strategy(index, conc, rng);
      double p = b.prob(row, Action::Call);
      s += (p - 0.5) * (p - 0.5);
    }
    return s / n;
  };
  CHECK(spread(0.5, 7) > 4.0 * spread(8.0, 7));
}

TEST_CASE("validation pinpoints malformed rows") {
  auto index = InfosetIndex::build(GameSpec::kuhn());
  BehaviourStrategy s = uniform_strategy(index);
  CHECK(validate_strategy(s).empty());

  // Mass on an illegal action.
  const int root_row = index->row_of(Seat::P1, std::vector<int>{0}, {}, "");
  CHECK_FALSE(legal(index->entry(root_row), Action::Fold));
  s.set_row(root_row, {0.5, 0.5, 0.0});
  // A negative entry elsewhere.
  const int other_row = index->row_of(Seat::P1, std::vector<int>{1}, {}, "");
  s.set_row(other_row, {0.0, 1.5, -0.5});
  // A row that does not sum to one.
  const int p2_row = find_row(*index, 2, Seat::P2);
  const InfosetEntry& e2 = index->entry(p2_row);
  std::array<double, 3> short_row = {0.0, 0.0, 0.0};
  for (Action a : {Action::Fold, Action::Call, Action::Raise})
    if (legal(e2, a)) short_row[static_cast<std::size_t>(a)] = 0.3;
  s.set_row(p2_row, short_row);

  auto violations = validate_strategy(s);
  REQUIRE(violations.size() == 3);
  std::vector<int> rows;
  for (const auto& v : violations) {
    rows.push_back(v.row);
    CHECK(v.key == index->entry(v.row).key);
    CHECK_FALSE(v.message.empty());
  }
  CHECK(std::count(rows.begin(), rows.end(), root_row) == 1);
  CHECK(std::count(rows.begin(), rows.end(), other_row) == 1);
  CHECK(std::count(rows.begin(), rows.end(), p2_row) == 1);
}

TEST_CASE("reference strategies fall back to call where their action is illegal") {
  auto index = InfosetIndex::build(GameSpec::leduc());
  BehaviourStrategy fold = always_fold_strategy(index);
  BehaviourStrategy raise = always_raise_strategy(index);
  BehaviourStrategy call = always_call_strategy(index);
  CHECK(validate_strategy(fold).empty());
  CHECK(validate_strategy(raise).empty());
  CHECK(validate_strategy(call).empty());
  for (int r = 0; r < index->num_rows(); ++r) {
    const InfosetEntry& e = index->entry(r);
    CHECK(call.prob(r, Action::Call) == 1.0);
    if (legal(e, Action::Fold)) {
      CHECK(fold.prob(r, Action::Fold) == 1.0);
    } else {
      CHECK(fold.prob(r, Action::Call) == 1.0);
    }
    if (legal(e, Action::Raise)) {
      CHECK(raise.prob(r, Action::Raise) == 1.0);
    } else {
      CHECK(raise.prob(r, Action::Call) == 1.0);
    }
  }
}

TEST_CASE("key-based probability lookup matches row access") {
  auto index = InfosetIndex::build(GameSpec::kuhn());
  BehaviourStrategy s = sample_dirichlet_strategy(index, 2.0, 5u);
  for (int r = 0; r < index->num_rows(); ++r) {
    const std::string& key = index->entry(r).key;
    for (Action a : {Action::Fold, Action::Call, Action::Raise})
      CHECK(s.prob(key, a) == s.prob(r, a));
  }
  CHECK_THROWS_AS(s.prob("no-such-key", Action::Call), std::exception);
}

TEST_CASE("set_pure writes a one-hot row") {
  auto index = InfosetIndex::build(GameSpec::kuhn());
  BehaviourStrategy s = uniform_strategy(index);
  s.set_pure(3, Action::Raise);
  CHECK(s.prob(3, Action::Raise) == 1.0);
  CHECK(s.prob(3, Action::Fold) == 0.0);
  CHECK(s.prob(3, Action::Call) == 0.0);
}

TEST_CASE("text save and load round-trips bit-exactly") {
  for (const GameSpec& spec : {GameSpec::kuhn(), GameSpec::leduc(), GameSpec::leduc(false)}) {
    auto index = InfosetIndex::build(spec);
    BehaviourStrategy s = sample_dirichlet_strategy(index, 0.8, 77u);
    std::stringstream buf;
    save_strategy(s, buf);
    BehaviourStrategy back = load_strategy(index, buf);
    CHECK(back == s);
  }
}

TEST_CASE("strategy files carry a header naming the game") {
  auto index = InfosetIndex::build(GameSpec::leduc());
  BehaviourStrategy s = uniform_strategy(index);
  const std::string path = "/tmp/bayespoker_test_strategy.txt";
  save_strategy(s, path);
  auto [name, canonical] = peek_strategy_header(path);
  CHECK(name == "leduc");
  CHECK(canonical == true);
  BehaviourStrategy back = load_strategy(index, path);
  CHECK(back == s);
  // Loading against the wrong table is rejected.
  auto kuhn_index = InfosetIndex::build(GameSpec::kuhn());
  CHECK_THROWS_AS(load_strategy(kuhn_index, path), std::exception);
}

TEST_CASE("ensemble packs probabilities sample-contiguously") {
  auto index = InfosetIndex::build(GameSpec::kuhn());
  std::vector<BehaviourStrategy> members;
  for (unsigned seed = 0; seed < 3; ++seed)
    members.push_back(sample_dirichlet_strategy(index, 2.0, seed));
  StrategyEnsemble ens(index, members);
  REQUIRE(ens.size() == 3);
  for (int j = 0; j < 3; ++j) CHECK(ens.strategy(j) == members[static_cast<std::size_t>(j)]);
  for (Seat seat : {Seat::P1, Seat::P2}) {
    for (int r = index->seat_begin(seat); r < index->seat_end(seat); ++r) {
      const double* row = ens.packed_row(seat, r);
      for (int a = 0; a < 3; ++a)
        for (int j = 0; j < 3; ++j)
          CHECK(row[a * 3 + j] ==
                members[static_cast<std::size_t>(j)].prob(r, static_cast<Action>(a)));
    }
  }
}

TEST_CASE("prior ensembles are reproducible") {
  auto index = InfosetIndex::build(GameSpec::leduc());
  auto a = StrategyEnsemble::sample_prior(index, 16, 2.0, 31u);
  auto b = StrategyEnsemble::sample_prior(index, 16, 2.0, 31u);
  auto c = StrategyEnsemble::sample_prior(index, 16, 2.0, 32u);
  REQUIRE(a->size() == 16);
  for (int j = 0; j < 16; ++j) CHECK(a->strategy(j) == b->strategy(j));
  bool any_diff = false;
  for (int j = 0; j < 16; ++j) any_diff = any_diff || !(a->strategy(j) == c->strategy(j));
  CHECK(any_diff);
  // Members are independent draws, not copies.
  CHECK_FALSE(a->strategy(0) == a->strategy(1));
}

TEST_CASE("named sub-streams decorrelate by name and reproduce by seed") {
  CHECK(derive_seed(42, "deck") == derive_seed(42, "deck"));
  CHECK(derive_seed(42, "deck") != derive_seed(42, "p1.ensemble"));
  CHECK(derive_seed(42, "deck") != derive_seed(43, "deck"));
  RngStream s1 = derive_stream(42, "deck");
  RngStream s2 = derive_stream(42, "deck");
  for (int i = 0; i < 8; ++i) CHECK(s1.next_u64() == s2.next_u64());
}
