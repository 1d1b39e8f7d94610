#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "bayespoker/experiment.hpp"

namespace py = pybind11;
using namespace bayespoker;

namespace {

Seat seat_arg(const std::string& s) { return seat_from_string(s); }

py::dict series_to_dict(const TrialSeries& s) {
  py::dict d;
  d["mean_bankroll"] = s.mean_bankroll;
  d["stderr"] = s.stderr_;
  d["win_rate"] = s.win_rate;
  d["trials"] = s.trials;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bayesian opponent modelling for small limit poker";

  m.attr("FOLD") = static_cast<int>(Action::Fold);
  m.attr("CALL") = static_cast<int>(Action::Call);
  m.attr("RAISE") = static_cast<int>(Action::Raise);

  py::class_<GameSpec>(m, "GameSpec")
      .def_static("leduc", &GameSpec::leduc, py::arg("canonical") = true)
      .def_static("kuhn", &GameSpec::kuhn, py::arg("canonical") = true)
      .def_static("by_name", &GameSpec::by_name, py::arg("name_or_path"),
                  py::arg("canonical") = true)
      .def_static("from_json", &GameSpec::from_json, py::arg("json_text"))
      .def("to_json", &GameSpec::to_json)
      .def_readonly("name", &GameSpec::name)
      .def_readonly("private_cards", &GameSpec::private_cards)
      .def_readonly("canonical_suits", &GameSpec::canonical_suits)
      .def_property_readonly(
          "deck_size", [](const GameSpec& g) { return static_cast<int>(g.deck.size()); })
      .def("__eq__", [](const GameSpec& a, const GameSpec& b) { return a == b; })
      .def("__repr__", [](const GameSpec& g) { return "<GameSpec " + g.name + ">"; });

  py::class_<InfosetIndex, std::shared_ptr<InfosetIndex>>(m, "InfosetIndex")
      .def_static("build",
                  [](const GameSpec& spec) {
                    return std::const_pointer_cast<InfosetIndex>(InfosetIndex::build(spec));
                  },
                  py::arg("spec"))
      .def_property_readonly("num_rows",
                             [](const InfosetIndex& i) { return i.num_rows(); })
      .def("key", [](const InfosetIndex& i, int row) { return i.entry(row).key; },
           py::arg("row"))
      .def("keys",
           [](const InfosetIndex& i) {
             std::vector<std::string> out;
             out.reserve(static_cast<std::size_t>(i.num_rows()));
             for (int r = 0; r < i.num_rows(); ++r) out.push_back(i.entry(r).key);
             return out;
           })
      .def("find", &InfosetIndex::find, py::arg("key"))
      .def_property_readonly("spec", [](const InfosetIndex& i) { return i.spec(); });

  py::class_<BehaviourStrategy>(m, "BehaviourStrategy")
      .def("prob",
           [](const BehaviourStrategy& s, const std::string& key, int action) {
             return s.prob(key, static_cast<Action>(action));
           },
           py::arg("key"), py::arg("action"))
      .def("__eq__", [](const BehaviourStrategy& a,
                        const BehaviourStrategy& b) { return a == b; });

  m.def("sample_strategy",
        [](std::shared_ptr<InfosetIndex> index, double concentration, std::uint64_t seed) {
          return sample_dirichlet_strategy(index, concentration, seed);
        },
        py::arg("index"), py::arg("concentration") = 2.0, py::arg("seed") = 1);
  m.def("uniform_strategy",
        [](std::shared_ptr<InfosetIndex> index) { return uniform_strategy(index); },
        py::arg("index"));
  m.def("save_strategy",
        [](const BehaviourStrategy& s, const std::string& path) { save_strategy(s, path); },
        py::arg("strategy"), py::arg("path"));
  m.def("load_strategy",
        [](std::shared_ptr<InfosetIndex> index, const std::string& path) {
          return load_strategy(index, path);
        },
        py::arg("index"), py::arg("path"));
  m.def("validate_strategy",
        [](const BehaviourStrategy& s) {
          std::vector<std::tuple<int, std::string, std::string>> out;
          for (const auto& v : validate_strategy(s)) out.emplace_back(v.row, v.key, v.message);
          return out;
        },
        py::arg("strategy"));

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("profile", &SolveResult::profile)
      .def_readonly("exploitability", &SolveResult::exploitability)
      .def_readonly("iterations", &SolveResult::iterations);

  m.def("solve",
        [](std::shared_ptr<InfosetIndex> index, double epsilon, std::uint64_t seed,
           int max_iterations, int check_every) {
          SolveOptions opt;
          opt.seed = seed;
          opt.max_iterations = max_iterations;
          opt.check_every = check_every;
          return solve_nash(index, epsilon, opt);
        },
        py::arg("index"), py::arg("epsilon") = 0.005, py::arg("seed") = 0,
        py::arg("max_iterations") = 200000, py::arg("check_every") = 25);

  py::class_<ResponseResult>(m, "ResponseResult")
      .def_readonly("strategy", &ResponseResult::strategy)
      .def_readonly("value", &ResponseResult::value);

  m.def("best_response",
        [](const BehaviourStrategy& beta, const std::string& responder) {
          return best_response(beta, seat_arg(responder));
        },
        py::arg("strategy"), py::arg("responder"));
  m.def("expected_value", &expected_value, py::arg("p1"), py::arg("p2"));
  m.def("exploitability",
        [](const BehaviourStrategy& p1, const BehaviourStrategy& p2) {
          return exploitability(p1, p2);
        },
        py::arg("p1"), py::arg("p2"));
  m.def("exploitability",
        [](const BehaviourStrategy& profile) { return exploitability(profile); },
        py::arg("profile"));

  py::class_<StrategyEnsemble, std::shared_ptr<StrategyEnsemble>>(m, "StrategyEnsemble")
      .def_static("sample_prior",
                  [](std::shared_ptr<InfosetIndex> index, int n, double concentration,
                     std::uint64_t seed) {
                    return std::const_pointer_cast<StrategyEnsemble>(
                        StrategyEnsemble::sample_prior(index, n, concentration, seed));
                  },
                  py::arg("index"), py::arg("n"), py::arg("concentration") = 2.0,
                  py::arg("seed") = 1)
      .def_property_readonly("size", [](const StrategyEnsemble& e) { return e.size(); })
      .def("strategy", &StrategyEnsemble::strategy, py::arg("j"));

  py::class_<HandRecord>(m, "HandRecord")
      .def_property_readonly("private_cards",
                             [](const HandRecord& r) { return r.private_cards; })
      .def_readonly("board", &HandRecord::board)
      .def_readonly("history", &HandRecord::history)
      .def_property_readonly("showdown",
                             [](const HandRecord& r) {
                               return r.terminal == TerminalKind::Showdown;
                             })
      .def("__repr__", [](const HandRecord& r) {
        return "<HandRecord history='" + r.history + "'>";
      });

  py::class_<Observation>(m, "Observation");
  m.def("make_observation",
        [](const HandRecord& record, const std::string& modeller) {
          return make_observation(record, seat_arg(modeller));
        },
        py::arg("record"), py::arg("modeller"));

  py::class_<PosteriorEnsemble>(m, "PosteriorEnsemble")
      .def(py::init([](std::shared_ptr<StrategyEnsemble> ensemble, const std::string& opponent) {
             return PosteriorEnsemble(std::move(ensemble), seat_arg(opponent));
           }),
           py::arg("ensemble"), py::arg("opponent"))
      .def("update", &PosteriorEnsemble::update, py::arg("observation"))
      .def("reset", &PosteriorEnsemble::reset)
      .def("weights", &PosteriorEnsemble::weights)
      .def_property_readonly("observation_count", &PosteriorEnsemble::observation_count)
      .def_property_readonly("ess",
                             [](const PosteriorEnsemble& p) {
                               return effective_sample_size(p);
                             })
      .def_property_readonly("map_index",
                             [](const PosteriorEnsemble& p) { return map_index(p); });

  m.def("bayesian_best_response",
        [](const PosteriorEnsemble& posterior) {
          return bayesian_best_response(posterior, other(posterior.opponent()));
        },
        py::arg("posterior"));
  m.def("map_response",
        [](const PosteriorEnsemble& posterior) {
          return map_response(posterior, other(posterior.opponent()));
        },
        py::arg("posterior"));
  m.def("thompson_response",
        [](const PosteriorEnsemble& posterior, std::uint64_t seed) {
          RngStream rng(seed);
          return thompson_response(posterior, other(posterior.opponent()), rng);
        },
        py::arg("posterior"), py::arg("seed") = 1);

  py::class_<MatchRow>(m, "MatchRow")
      .def_readonly("record", &MatchRow::record)
      .def_readonly("p1_net", &MatchRow::p1_net)
      .def_readonly("p1_cumulative", &MatchRow::p1_cumulative);

  py::class_<MatchLog>(m, "MatchLog")
      .def_readonly("trial_seed", &MatchLog::trial_seed)
      .def_readonly("p1_kind", &MatchLog::p1_kind)
      .def_readonly("p2_kind", &MatchLog::p2_kind)
      .def_readonly("rows", &MatchLog::rows);

  m.def("run_match",
        [](std::shared_ptr<InfosetIndex> index, const std::string& p1_kind,
           const std::string& p2_kind, int hands, std::uint64_t seed, int ensemble_size,
           double concentration, double epsilon) {
          AgentOptions options;
          options.ensemble_size = ensemble_size;
          options.concentration = concentration;
          options.nash_epsilon = epsilon;
          options.solve_seed = derive_seed(seed, "opti.solve");
          auto p1 = make_agent(index, Seat::P1, p1_kind, options);
          auto p2 = make_agent(index, Seat::P2, p2_kind, options);
          return run_trial(*p1, *p2, hands, seed);
        },
        py::arg("index"), py::arg("p1"), py::arg("p2"), py::arg("hands") = 200,
        py::arg("seed") = 1, py::arg("ensemble_size") = 1000,
        py::arg("concentration") = 2.0, py::arg("epsilon") = 0.005);

  m.def("run_experiment",
        [](const std::string& config_json) {
          const ExperimentConfig config = experiment_config_from_json(config_json);
          py::dict out;
          for (const NamedSeries& named : run_experiment(config))
            out[py::str(named.p1_kind)] = series_to_dict(named.series);
          return out;
        },
        py::arg("config_json"));
  m.def("preset_config_json",
        [](const std::string& name) { return to_json(preset_config(name)); },
        py::arg("name"));
  m.def("winning_rate", &winning_rate, py::arg("mean_bankroll"), py::arg("window") = 10);
}
