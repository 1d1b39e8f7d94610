#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bayespoker/experiment.hpp"

namespace {

using namespace bayespoker;

struct GameArgs {
  std::string game = "leduc";
  bool raw_suits = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--game", game,
                    "Game name (leduc, kuhn) or path to a game spec JSON file")
        ->capture_default_str();
    cmd->add_flag("--raw-suits", raw_suits,
                  "Keep suit identities instead of collapsing suit-isomorphic infosets");
  }
  std::shared_ptr<const InfosetIndex> build_index() const {
    return InfosetIndex::build(GameSpec::by_name(game, !raw_suits));
  }
};

std::string sanitize_for_filename(const std::string& kind) {
  std::string out;
  for (char c : kind)
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

int cmd_strategy_sample(const GameArgs& game, std::uint64_t seed, double concentration,
                        const std::string& out_path) {
  auto index = game.build_index();
  BehaviourStrategy s = sample_dirichlet_strategy(index, concentration, seed);
  save_strategy(s, out_path);
  std::cout << "wrote " << index->num_rows() << " infoset rows to " << out_path << "\n";
  return 0;
}

int cmd_strategy_validate(const GameArgs& game, const std::string& path) {
  auto index = game.build_index();
  BehaviourStrategy s = load_strategy(index, path);
  const auto violations = validate_strategy(s);
  if (violations.empty()) {
    std::cout << path << ": valid (" << index->num_rows() << " rows)\n";
    return 0;
  }
  for (const auto& v : violations)
    std::cerr << path << ": row " << v.row << " [" << v.key << "]: " << v.message << "\n";
  std::cerr << path << ": " << violations.size() << " invalid row(s)\n";
  return 1;
}

int cmd_solve(const GameArgs& game, double epsilon, std::uint64_t seed, int max_iterations,
              int check_every, const std::string& out_path) {
  auto index = game.build_index();
  SolveOptions opt;
  opt.seed = seed;
  opt.max_iterations = max_iterations;
  opt.check_every = check_every;
  try {
    SolveResult result = solve_nash(index, epsilon, opt);
    if (!out_path.empty()) save_strategy(result.profile, out_path);
    std::cout << "solved " << game.game << ": exploitability " << result.exploitability
              << " <= " << epsilon << " after " << result.iterations << " iterations";
    if (!out_path.empty()) std::cout << "; profile written to " << out_path;
    std::cout << "\n";
    return 0;
  } catch (const SolveBudgetExhausted& e) {
    if (!out_path.empty()) save_strategy(e.best_found.profile, out_path);
    std::cerr << e.what() << "\n";
    if (!out_path.empty())
      std::cerr << "best profile (exploitability " << e.best_found.exploitability
                << ") written to " << out_path << "\n";
    return 1;
  }
}

int cmd_exploitability(const GameArgs& game, const std::string& p1_path,
                       const std::string& p2_path) {
  auto index = game.build_index();
  BehaviourStrategy p1 = load_strategy(index, p1_path);
  BehaviourStrategy p2 = p2_path.empty() ? p1 : load_strategy(index, p2_path);
  BestResponder b1(index, Seat::P1), b2(index, Seat::P2);
  const double v1 = b1.respond(WeightedOpponent::single(p2)).value;
  const double v2 = b2.respond(WeightedOpponent::single(p1)).value;
  std::cout << "best response as p1: " << v1 << " chips/hand\n";
  std::cout << "best response as p2: " << v2 << " chips/hand\n";
  std::cout << "exploitability: " << v1 + v2 << "\n";
  return 0;
}

int cmd_posterior_init(const GameArgs& game, const std::string& opponent, int samples,
                       double concentration, std::uint64_t seed,
                       const std::string& out_path) {
  auto index = game.build_index();
  const Seat opp = seat_from_string(opponent);
  auto ensemble = StrategyEnsemble::sample_prior(
      index, samples, concentration, derive_seed(seed, to_string(opp) + ".ensemble"));
  PosteriorEnsemble posterior(ensemble, opp);
  save_posterior(posterior, out_path);
  std::cout << "wrote " << samples << "-sample posterior over " << opponent << " play to "
            << out_path << "\n";
  return 0;
}

int cmd_respond(const GameArgs& game, const std::string& posterior_path,
                const std::string& mode, std::uint64_t seed, const std::string& out_path) {
  auto index = game.build_index();
  PosteriorEnsemble posterior = load_posterior(index, posterior_path);
  const Seat responder = other(posterior.opponent());
  ResponseResult result;
  if (mode == "bbr") {
    result = bayesian_best_response(posterior, responder);
  } else if (mode == "map") {
    result = map_response(posterior, responder);
  } else if (mode == "thompson") {
    RngStream rng(derive_seed(seed, "respond.thompson"));
    result = thompson_response(posterior, responder, rng);
  } else {
    throw std::invalid_argument("unknown response mode '" + mode +
                                "' (expected bbr, map, or thompson)");
  }
  if (!out_path.empty()) save_strategy(result.strategy, out_path);
  std::cout << mode << " response as " << to_string(responder) << ": believed value "
            << result.value << " chips/hand";
  if (!out_path.empty()) std::cout << "; strategy written to " << out_path;
  std::cout << "\n";
  return 0;
}

struct MatchArgs {
  std::string p1_kind = "bayes_bbr";
  std::string p2_kind = "prior_sample";
  int hands = 200;
  std::uint64_t seed = 1;
  int ensemble_size = 1000;
  double concentration = 2.0;
  double epsilon = 0.005;
  std::string out_csv;
  std::string posterior_seat = "p1";
  std::string posterior_csv;
  std::string dump_posterior;
};

int cmd_match_run(const GameArgs& game, const MatchArgs& args) {
  auto index = game.build_index();
  AgentOptions options;
  options.ensemble_size = args.ensemble_size;
  options.concentration = args.concentration;
  options.nash_epsilon = args.epsilon;
  options.solve_seed = derive_seed(args.seed, "opti.solve");
  auto p1 = make_agent(index, Seat::P1, args.p1_kind, options);
  auto p2 = make_agent(index, Seat::P2, args.p2_kind, options);

  const bool want_posterior = !args.posterior_csv.empty() || !args.dump_posterior.empty();
  BayesAgent* tracked = nullptr;
  if (want_posterior) {
    Agent* target = seat_from_string(args.posterior_seat) == Seat::P1 ? p1.get() : p2.get();
    tracked = dynamic_cast<BayesAgent*>(target);
    if (!tracked)
      throw std::invalid_argument("--posterior-csv/--dump-posterior need a bayes_* agent in seat " +
                                  args.posterior_seat + " (got '" + target->kind() + "')");
  }

  std::ofstream posterior_csv;
  if (!args.posterior_csv.empty()) {
    posterior_csv.open(args.posterior_csv);
    if (!posterior_csv)
      throw std::runtime_error("cannot open '" + args.posterior_csv + "' for writing");
    posterior_csv << "hand_index,ess,max_weight,map_index\n";
  }
  HandHook hook;
  if (posterior_csv.is_open()) {
    hook = [&](int hand_index, const HandResult&) {
      const PosteriorDiagnostics d = posterior_diagnostics(tracked->posterior());
      char buf[128];
      std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%d\n", hand_index + 1, d.ess,
                    d.max_weight, d.map_index);
      posterior_csv << buf;
    };
  }

  MatchLog log = run_trial(*p1, *p2, args.hands, args.seed, hook);
  if (!args.out_csv.empty()) write_match_csv(log, args.out_csv);
  if (!args.dump_posterior.empty()) save_posterior(tracked->posterior(), args.dump_posterior);

  const long long total = log.rows.empty() ? 0 : log.rows.back().p1_cumulative;
  std::cout << log.p1_kind << " vs " << log.p2_kind << " over " << args.hands
            << " hands (trial seed " << args.seed << "): p1 net " << total << " chips ("
            << (args.hands > 0 ? static_cast<double>(total) / args.hands : 0.0)
            << " per hand)\n";
  if (!args.out_csv.empty()) std::cout << "hand log written to " << args.out_csv << "\n";
  if (!args.posterior_csv.empty())
    std::cout << "posterior diagnostics written to " << args.posterior_csv << "\n";
  if (!args.dump_posterior.empty())
    std::cout << "posterior dump written to " << args.dump_posterior << "\n";
  return 0;
}

struct ExperimentArgs {
  std::string preset;
  std::string config_path;
  std::string out_stem = "experiment";
  bool print_config = false;
  bool quiet = false;
  // Optional overrides; negative/empty = keep.
  std::vector<std::string> p1_kinds;
  std::string p2_kind;
  int trials = -1;
  int hands = -1;
  long long seed = -1;
  int threads = -1;
  int window = -1;
  int ensemble_size = -1;
  double concentration = -1.0;
  std::string game;
  bool raw_suits = false;
};

int cmd_experiment_run(const ExperimentArgs& args) {
  ExperimentConfig config;
  if (!args.preset.empty() && !args.config_path.empty())
    throw std::invalid_argument("--preset and --config are mutually exclusive");
  if (!args.preset.empty())
    config = preset_config(args.preset);
  else if (!args.config_path.empty())
    config = experiment_config_from_file(args.config_path);

  if (!args.p1_kinds.empty()) config.p1_kinds = args.p1_kinds;
  if (!args.p2_kind.empty()) config.p2_kind = args.p2_kind;
  if (args.trials >= 0) config.trials = args.trials;
  if (args.hands >= 0) config.hands = args.hands;
  if (args.seed >= 0) config.seed = static_cast<std::uint64_t>(args.seed);
  if (args.threads >= 0) config.threads = args.threads;
  if (args.window >= 0) config.window = args.window;
  if (args.ensemble_size >= 0) config.agent.ensemble_size = args.ensemble_size;
  if (args.concentration >= 0.0) config.agent.concentration = args.concentration;
  if (!args.game.empty()) config.game = args.game;
  if (args.raw_suits) config.canonical_suits = false;

  if (args.print_config) {
    std::cout << to_json(config) << "\n";
    return 0;
  }

  std::function<void(const std::string&, int, int)> progress;
  if (!args.quiet) {
    progress = [](const std::string& pairing, int done, int total) {
      const int step = std::max(1, total / 20);
      if (done % step == 0 || done == total)
        std::cerr << pairing << ": " << done << "/" << total << " trials\r"
                  << (done == total ? "\n" : "") << std::flush;
    };
  }

  const auto results = run_experiment(config, progress);
  for (const NamedSeries& named : results) {
    const std::string path = args.out_stem + "." + sanitize_for_filename(named.p1_kind) + ".csv";
    emit_csv(named.series, path);
    std::cout << named.p1_kind << " vs " << config.p2_kind << ": final mean bankroll "
              << named.series.mean_bankroll.back() << " +- " << named.series.stderr_.back()
              << " chips after " << config.hands << " hands (" << config.trials
              << " trials) -> " << path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian opponent modelling for small limit poker"};
  app.require_subcommand(1);

  // strategy sample | validate
  auto* strategy = app.add_subcommand("strategy", "Sample or validate strategy files");
  strategy->require_subcommand(1);

  auto* sample = strategy->add_subcommand("sample", "Draw one strategy from the Dirichlet prior");
  auto sample_game = std::make_shared<GameArgs>();
  auto sample_seed = std::make_shared<std::uint64_t>(1);
  auto sample_conc = std::make_shared<double>(2.0);
  auto sample_out = std::make_shared<std::string>("sampled.strat");
  sample_game->attach(sample);
  sample->add_option("--seed", *sample_seed, "Sampling seed")->capture_default_str();
  sample->add_option("--concentration", *sample_conc, "Dirichlet concentration")
      ->capture_default_str();
  sample->add_option("--out", *sample_out, "Output strategy file")->capture_default_str();

  auto* validate = strategy->add_subcommand("validate", "Check a strategy file");
  auto validate_game = std::make_shared<GameArgs>();
  auto validate_path = std::make_shared<std::string>();
  validate_game->attach(validate);
  validate->add_option("path", *validate_path, "Strategy file")->required();

  auto* solve = app.add_subcommand("solve", "Compute a certified near-equilibrium profile");
  auto solve_game = std::make_shared<GameArgs>();
  auto solve_eps = std::make_shared<double>(0.005);
  auto solve_seed = std::make_shared<std::uint64_t>(0);
  auto solve_iters = std::make_shared<int>(200000);
  auto solve_check = std::make_shared<int>(25);
  auto solve_out = std::make_shared<std::string>();
  solve_game->attach(solve);
  solve->add_option("--epsilon", *solve_eps, "Exploitability target (chips/hand)")
      ->capture_default_str();
  solve->add_option("--seed", *solve_seed, "Jitter seed (different seeds, different runs)")
      ->capture_default_str();
  solve->add_option("--max-iterations", *solve_iters, "Iteration budget")->capture_default_str();
  solve->add_option("--check-every", *solve_check, "Certification cadence")->capture_default_str();
  solve->add_option("--out", *solve_out, "Write the profile to this strategy file");

  auto* expl = app.add_subcommand("exploitability",
                                  "Sum of both seats' best-response values against a profile");
  auto expl_game = std::make_shared<GameArgs>();
  auto expl_p1 = std::make_shared<std::string>();
  auto expl_p2 = std::make_shared<std::string>();
  expl_game->attach(expl);
  expl->add_option("p1", *expl_p1, "Profile played in seat p1 (strategy file)")->required();
  expl->add_option("p2", *expl_p2, "Profile played in seat p2 (defaults to the p1 file)");

  auto* posterior = app.add_subcommand("posterior", "Posterior dump utilities");
  posterior->require_subcommand(1);
  auto* pinit = posterior->add_subcommand("init", "Write a fresh uniform-weight posterior dump");
  auto pinit_game = std::make_shared<GameArgs>();
  auto pinit_opp = std::make_shared<std::string>("p2");
  auto pinit_samples = std::make_shared<int>(1000);
  auto pinit_conc = std::make_shared<double>(2.0);
  auto pinit_seed = std::make_shared<std::uint64_t>(1);
  auto pinit_out = std::make_shared<std::string>("posterior.txt");
  pinit_game->attach(pinit);
  pinit->add_option("--opponent", *pinit_opp, "Seat being modelled (p1 or p2)")
      ->capture_default_str();
  pinit->add_option("--samples", *pinit_samples, "Ensemble size")->capture_default_str();
  pinit->add_option("--concentration", *pinit_conc, "Dirichlet concentration")
      ->capture_default_str();
  pinit->add_option("--seed", *pinit_seed, "Sampling seed")->capture_default_str();
  pinit->add_option("--out", *pinit_out, "Output dump file")->capture_default_str();

  auto* respond = app.add_subcommand("respond", "Compute a response from a posterior dump");
  auto respond_game = std::make_shared<GameArgs>();
  auto respond_posterior = std::make_shared<std::string>();
  auto respond_mode = std::make_shared<std::string>("bbr");
  auto respond_seed = std::make_shared<std::uint64_t>(1);
  auto respond_out = std::make_shared<std::string>();
  respond_game->attach(respond);
  respond->add_option("--posterior", *respond_posterior, "Posterior dump file")->required();
  respond->add_option("--mode", *respond_mode, "bbr, map, or thompson")->capture_default_str();
  respond->add_option("--seed", *respond_seed, "Draw seed for thompson mode")
      ->capture_default_str();
  respond->add_option("--out", *respond_out, "Write the response strategy here");

  auto* match = app.add_subcommand("match", "Play matches between agents");
  match->require_subcommand(1);
  auto* mrun = match->add_subcommand("run", "Run one trial of repeated hands");
  auto match_game = std::make_shared<GameArgs>();
  auto match_args = std::make_shared<MatchArgs>();
  match_game->attach(mrun);
  mrun->add_option("--p1", match_args->p1_kind,
                   "Seat p1 agent kind (opti, prior_sample, bayes_bbr, bayes_map, "
                   "bayes_thompson, frequentist, oracle_br, always_call, always_fold, "
                   "always_raise, fixed(<file>))")
      ->capture_default_str();
  mrun->add_option("--p2", match_args->p2_kind, "Seat p2 agent kind")->capture_default_str();
  mrun->add_option("--hands", match_args->hands, "Hands to play")->capture_default_str();
  mrun->add_option("--seed", match_args->seed, "Trial seed")->capture_default_str();
  mrun->add_option("--ensemble-size", match_args->ensemble_size,
                   "Posterior sample count for bayes_* agents")
      ->capture_default_str();
  mrun->add_option("--concentration", match_args->concentration, "Dirichlet concentration")
      ->capture_default_str();
  mrun->add_option("--epsilon", match_args->epsilon, "Equilibrium target for opti agents")
      ->capture_default_str();
  mrun->add_option("--out", match_args->out_csv, "Per-hand CSV log");
  mrun->add_option("--posterior-seat", match_args->posterior_seat,
                   "Which seat's posterior to track (p1 or p2)")
      ->capture_default_str();
  mrun->add_option("--posterior-csv", match_args->posterior_csv,
                   "Per-hand posterior diagnostics CSV (ess, max weight, map index)");
  mrun->add_option("--dump-posterior", match_args->dump_posterior,
                   "Write the tracked agent's final posterior dump here");

  auto* experiment = app.add_subcommand("experiment", "Multi-trial experiment batches");
  experiment->require_subcommand(1);
  auto* erun = experiment->add_subcommand("run", "Run a batch and emit per-curve CSVs");
  auto exp_args = std::make_shared<ExperimentArgs>();
  erun->add_option("--preset", exp_args->preset, "Named batch: fig2, fig4, or fig6");
  erun->add_option("--config", exp_args->config_path, "Experiment config JSON file");
  erun->add_option("--out", exp_args->out_stem, "Output stem (<stem>.<p1_kind>.csv)")
      ->capture_default_str();
  erun->add_flag("--print-config", exp_args->print_config,
                 "Print the effective config as JSON and exit");
  erun->add_flag("--quiet", exp_args->quiet, "Suppress progress output");
  erun->add_option("--p1", exp_args->p1_kinds, "Override the p1 kind list");
  erun->add_option("--p2", exp_args->p2_kind, "Override the p2 kind");
  erun->add_option("--trials", exp_args->trials, "Override trial count");
  erun->add_option("--hands", exp_args->hands, "Override hands per trial");
  erun->add_option("--seed", exp_args->seed, "Override master seed");
  erun->add_option("--threads", exp_args->threads, "Worker threads (0 = all cores)");
  erun->add_option("--window", exp_args->window, "Winning-rate window half-width");
  erun->add_option("--ensemble-size", exp_args->ensemble_size,
                   "Override posterior sample count");
  erun->add_option("--concentration", exp_args->concentration,
                   "Override Dirichlet concentration");
  erun->add_option("--game", exp_args->game, "Override the game");
  erun->add_flag("--raw-suits", exp_args->raw_suits, "Disable suit canonicalization");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sample->parsed())
      return cmd_strategy_sample(*sample_game, *sample_seed, *sample_conc, *sample_out);
    if (validate->parsed()) return cmd_strategy_validate(*validate_game, *validate_path);
    if (solve->parsed())
      return cmd_solve(*solve_game, *solve_eps, *solve_seed, *solve_iters, *solve_check,
                       *solve_out);
    if (expl->parsed()) return cmd_exploitability(*expl_game, *expl_p1, *expl_p2);
    if (pinit->parsed())
      return cmd_posterior_init(*pinit_game, *pinit_opp, *pinit_samples, *pinit_conc,
                                *pinit_seed, *pinit_out);
    if (respond->parsed())
      return cmd_respond(*respond_game, *respond_posterior, *respond_mode, *respond_seed,
                         *respond_out);
    if (mrun->parsed()) return cmd_match_run(*match_game, *match_args);
    if (erun->parsed()) return cmd_experiment_run(*exp_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "no subcommand selected\n";
  return 1;
}
