#include "bayespoker/strategy.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bayespoker {

BehaviourStrategy::BehaviourStrategy(std::shared_ptr<const InfosetIndex> index)
    : index_(std::move(index)) {
  rows_.assign(static_cast<std::size_t>(index_->num_rows()), {0.0, 0.0, 0.0});
}

double BehaviourStrategy::prob(const std::string& key, Action a) const {
  return prob(index_->row_of(key), a);
}

void BehaviourStrategy::set_pure(int r, Action a) {
  auto& row = rows_[static_cast<std::size_t>(r)];
  row = {0.0, 0.0, 0.0};
  row[static_cast<std::size_t>(a)] = 1.0;
}

BehaviourStrategy sample_dirichlet_strategy(std::shared_ptr<const InfosetIndex> index,
                                            double concentration, RngStream& rng) {
  if (concentration <= 0.0)
    throw std::invalid_argument("concentration must be positive");
  BehaviourStrategy s(index);
  for (int r = 0; r < index->num_rows(); ++r) {
    const InfosetEntry& e = index->entry(r);
    const std::vector<double> draw = rng.dirichlet(concentration, e.num_legal);
    std::array<double, 3> row = {0.0, 0.0, 0.0};
    int k = 0;
    for (int a = 0; a < 3; ++a)
      if (e.legal_mask & (1u << a)) row[static_cast<std::size_t>(a)] = draw[static_cast<std::size_t>(k++)];
    s.set_row(r, row);
  }
  return s;
}

BehaviourStrategy sample_dirichlet_strategy(std::shared_ptr<const InfosetIndex> index,
                                            double concentration, std::uint64_t seed) {
  RngStream rng(seed);
  return sample_dirichlet_strategy(std::move(index), concentration, rng);
}

std::vector<StrategyViolation> validate_strategy(const BehaviourStrategy& s,
                                                 double tolerance) {
  std::vector<StrategyViolation> out;
  const InfosetIndex& index = s.index();
  for (int r = 0; r < index.num_rows(); ++r) {
    const InfosetEntry& e = index.entry(r);
    const auto& row = s.row(r);
    std::string why;
    double sum = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double p = row[static_cast<std::size_t>(a)];
      sum += p;
      if (p < 0.0 || !std::isfinite(p)) {
        why = "negative or non-finite probability on " + to_string(Action(a));
        break;
      }
      if (p > 0.0 && !(e.legal_mask & (1u << a))) {
        why = "probability mass on illegal action " + to_string(Action(a));
        break;
      }
    }
    if (why.empty() && std::abs(sum - 1.0) > tolerance)
      why = "row sums to " + std::to_string(sum);
    if (!why.empty()) out.push_back(StrategyViolation{r, e.key, why});
  }
  return out;
}

static BehaviourStrategy pure_preference(std::shared_ptr<const InfosetIndex> index,
                                         std::initializer_list<Action> preference) {
  BehaviourStrategy s(index);
  for (int r = 0; r < index->num_rows(); ++r) {
    const unsigned mask = index->entry(r).legal_mask;
    for (Action a : preference) {
      if (mask & (1u << static_cast<int>(a))) {
        s.set_pure(r, a);
        break;
      }
    }
  }
  return s;
}

BehaviourStrategy uniform_strategy(std::shared_ptr<const InfosetIndex> index) {
  BehaviourStrategy s(index);
  for (int r = 0; r < index->num_rows(); ++r) {
    const InfosetEntry& e = index->entry(r);
    std::array<double, 3> row = {0.0, 0.0, 0.0};
    for (int a = 0; a < 3; ++a)
      if (e.legal_mask & (1u << a)) row[static_cast<std::size_t>(a)] = 1.0 / e.num_legal;
    s.set_row(r, row);
  }
  return s;
}

BehaviourStrategy always_call_strategy(std::shared_ptr<const InfosetIndex> index) {
  return pure_preference(std::move(index), {Action::Call});
}

BehaviourStrategy always_fold_strategy(std::shared_ptr<const InfosetIndex> index) {
  return pure_preference(std::move(index), {Action::Fold, Action::Call});
}

BehaviourStrategy always_raise_strategy(std::shared_ptr<const InfosetIndex> index) {
  return pure_preference(std::move(index), {Action::Raise, Action::Call});
}

void save_strategy(const BehaviourStrategy& s, std::ostream& out) {
  const InfosetIndex& index = s.index();
  out << "game=" << index.spec().name
      << " canonical_suits=" << (index.spec().canonical_suits ? 1 : 0) << "\n";
  char buf[32 * 3 + 8];
  for (int r = 0; r < index.num_rows(); ++r) {
    const auto& row = s.row(r);
    std::snprintf(buf, sizeof buf, " %.17g %.17g %.17g", row[0], row[1], row[2]);
    out << index.entry(r).key << buf << "\n";
  }
}

void save_strategy(const BehaviourStrategy& s, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  save_strategy(s, f);
  if (!f) throw std::runtime_error("write failed: " + path);
}

BehaviourStrategy load_strategy(std::shared_ptr<const InfosetIndex> index,
                                std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("empty strategy file");
  std::istringstream hs(header);
  std::string game_field, canon_field;
  hs >> game_field >> canon_field;
  if (game_field.rfind("game=", 0) != 0 || canon_field.rfind("canonical_suits=", 0) != 0)
    throw std::runtime_error("malformed strategy header: " + header);
  const std::string game = game_field.substr(5);
  const bool canonical = canon_field.substr(16) == "1";
  if (game != index->spec().name)
    throw std::runtime_error("strategy file is for game '" + game + "', expected '" +
                             index->spec().name + "'");
  if (canonical != index->spec().canonical_suits)
    throw std::runtime_error("strategy file canonical_suits flag does not match");

  BehaviourStrategy s(index);
  std::vector<bool> filled(static_cast<std::size_t>(index->num_rows()), false);
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    std::array<double, 3> row{};
    if (!(ls >> key >> row[0] >> row[1] >> row[2]))
      throw std::runtime_error("malformed strategy row at line " + std::to_string(lineno));
    const int r = index->find(key);
    if (r < 0)
      throw std::runtime_error("unknown infoset key at line " + std::to_string(lineno) +
                               ": " + key);
    if (filled[static_cast<std::size_t>(r)])
      throw std::runtime_error("duplicate infoset key at line " + std::to_string(lineno) +
                               ": " + key);
    filled[static_cast<std::size_t>(r)] = true;
    s.set_row(r, row);
  }
  for (int r = 0; r < index->num_rows(); ++r)
    if (!filled[static_cast<std::size_t>(r)])
      throw std::runtime_error("strategy file missing infoset: " + index->entry(r).key);
  return s;
}

BehaviourStrategy load_strategy(std::shared_ptr<const InfosetIndex> index,
                                const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open strategy file: " + path);
  return load_strategy(std::move(index), f);
}

std::pair<std::string, bool> peek_strategy_header(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open strategy file: " + path);
  std::string header;
  if (!std::getline(f, header)) throw std::runtime_error("empty strategy file");
  std::istringstream hs(header);
  std::string game_field, canon_field;
  hs >> game_field >> canon_field;
  if (game_field.rfind("game=", 0) != 0 || canon_field.rfind("canonical_suits=", 0) != 0)
    throw std::runtime_error("malformed strategy header: " + header);
  return {game_field.substr(5), canon_field.substr(16) == "1"};
}

StrategyEnsemble::StrategyEnsemble(std::shared_ptr<const InfosetIndex> index,
                                   std::vector<BehaviourStrategy> strategies)
    : index_(std::move(index)), strategies_(std::move(strategies)) {
  if (strategies_.empty()) throw std::invalid_argument("empty ensemble");
  for (const BehaviourStrategy& s : strategies_)
    if (&s.index() != index_.get() && !(s.index().spec() == index_->spec()))
      throw std::invalid_argument("ensemble strategy built for a different game");
  const std::size_t n = strategies_.size();
  for (Seat seat : {Seat::P1, Seat::P2}) {
    const int begin = index_->seat_begin(seat);
    const int end = index_->seat_end(seat);
    auto& packed = packed_[idx(seat)];
    packed.assign(static_cast<std::size_t>(end - begin) * 3 * n, 0.0);
    for (int r = begin; r < end; ++r)
      for (int a = 0; a < 3; ++a) {
        double* dst = packed.data() +
                      (static_cast<std::size_t>(r - begin) * 3 + static_cast<std::size_t>(a)) * n;
        for (std::size_t j = 0; j < n; ++j) dst[j] = strategies_[j].prob(r, Action(a));
      }
  }
}

std::shared_ptr<const StrategyEnsemble> StrategyEnsemble::sample_prior(
    std::shared_ptr<const InfosetIndex> index, int n, double concentration,
    RngStream& rng) {
  if (n <= 0) throw std::invalid_argument("ensemble size must be positive");
  std::vector<BehaviourStrategy> strategies;
  strategies.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    strategies.push_back(sample_dirichlet_strategy(index, concentration, rng));
  return std::make_shared<const StrategyEnsemble>(index, std::move(strategies));
}

std::shared_ptr<const StrategyEnsemble> StrategyEnsemble::sample_prior(
    std::shared_ptr<const InfosetIndex> index, int n, double concentration,
    std::uint64_t seed) {
  RngStream rng(seed);
  return sample_prior(std::move(index), n, concentration, rng);
}

}  // namespace bayespoker
