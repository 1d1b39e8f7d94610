"""End-to-end smoke tests for the Python surface of the library."""

import json
import math

import pytest

import bayespoker as bp


@pytest.fixture(scope="module")
def kuhn_index():
    return bp.InfosetIndex.build(bp.GameSpec.kuhn())


@pytest.fixture(scope="module")
def leduc_index():
    return bp.InfosetIndex.build(bp.GameSpec.leduc())


def test_game_specs_expose_shape(kuhn_index, leduc_index):
    kuhn = bp.GameSpec.kuhn()
    leduc = bp.GameSpec.leduc()
    assert kuhn.deck_size == 3
    assert leduc.deck_size == 6
    assert kuhn.private_cards == 1
    assert leduc.private_cards == 1
    assert kuhn_index.num_rows == 12
    assert leduc_index.num_rows > kuhn_index.num_rows
    # JSON round-trip preserves equality.
    assert bp.GameSpec.from_json(leduc.to_json()) == leduc


def test_strategy_sample_save_load_validate(tmp_path, leduc_index):
    strategy = bp.sample_strategy(leduc_index, concentration=2.0, seed=11)
    assert bp.validate_strategy(strategy) == []
    path = str(tmp_path / "sampled.strat")
    bp.save_strategy(strategy, path)
    loaded = bp.load_strategy(leduc_index, path)
    assert loaded == strategy
    # Row probabilities are addressable by infoset key and sum to one.
    key = leduc_index.key(0)
    total = sum(
        strategy.prob(key, action) for action in (bp.FOLD, bp.CALL, bp.RAISE)
    )
    assert math.isclose(total, 1.0, abs_tol=1e-12)


def test_solve_certifies_and_bounds_replies(kuhn_index):
    result = bp.solve(kuhn_index, epsilon=0.001)
    assert result.exploitability <= 0.001
    assert result.iterations > 0
    assert bp.exploitability(result.profile) <= 0.001
    # The certified pair's value sits within epsilon of every best reply.
    ev = bp.expected_value(result.profile, result.profile)
    br1 = bp.best_response(result.profile, "p1")
    assert ev <= br1.value + 1e-12
    assert br1.value - ev <= 0.001 + 1e-12


def test_run_match_rows_and_determinism(kuhn_index):
    log = bp.run_match(kuhn_index, "bayes_map", "prior_sample",
                       hands=20, seed=5, ensemble_size=16)
    assert log.p1_kind == "bayes_map"
    assert log.p2_kind == "prior_sample"
    assert len(log.rows) == 20
    running = 0
    for row in log.rows:
        running += row.p1_net
        assert row.p1_cumulative == running
    again = bp.run_match(kuhn_index, "bayes_map", "prior_sample",
                         hands=20, seed=5, ensemble_size=16)
    assert [r.p1_net for r in again.rows] == [r.p1_net for r in log.rows]


def test_posterior_updates_and_responses(leduc_index):
    ensemble = bp.StrategyEnsemble.sample_prior(leduc_index, 32, seed=7)
    assert ensemble.size == 32
    posterior = bp.PosteriorEnsemble(ensemble, "p2")
    assert posterior.observation_count == 0
    assert math.isclose(posterior.ess, 32.0, abs_tol=1e-9)

    log = bp.run_match(leduc_index, "always_call", "prior_sample",
                       hands=12, seed=3)
    for row in log.rows:
        posterior.update(bp.make_observation(row.record, "p1"))
    assert posterior.observation_count == 12
    weights = posterior.weights()
    assert len(weights) == 32
    assert math.isclose(sum(weights), 1.0, abs_tol=1e-9)
    assert posterior.ess < 32.0
    assert posterior.map_index == max(range(32), key=lambda j: weights[j])

    bbr = bp.bayesian_best_response(posterior)
    mapr = bp.map_response(posterior)
    thom = bp.thompson_response(posterior, seed=2)
    for result in (bbr, mapr, thom):
        assert bp.validate_strategy(result.strategy) == []
    # The mixture optimum dominates any fixed strategy measured against the
    # same posterior mixture, including the response to the single best guess.
    map_mixture_value = sum(
        w * bp.expected_value(mapr.strategy, ensemble.strategy(j))
        for j, w in enumerate(weights)
    )
    assert map_mixture_value <= bbr.value + 1e-9

    posterior.reset()
    assert posterior.observation_count == 0
    assert math.isclose(posterior.ess, 32.0, abs_tol=1e-9)


def test_run_experiment_and_winning_rate():
    config = json.loads(bp.preset_config_json("fig2"))
    assert config["game"] == "leduc"
    config.update(game="kuhn", p1_kinds=["always_raise"], p2_kind="always_fold",
                  trials=3, hands=10, threads=1, window=2, ensemble_size=8)
    out = bp.run_experiment(json.dumps(config))
    series = out["always_raise"]
    assert series["trials"] == 3
    assert series["mean_bankroll"] == [float(h) for h in range(1, 11)]
    assert all(se == 0.0 for se in series["stderr"])
    assert all(math.isclose(r, 1.0, abs_tol=1e-12) for r in series["win_rate"])

    rate = bp.winning_rate([0.0, 1.0, 2.0, 4.0], window=1)
    assert rate == pytest.approx([1.0, 1.0, 1.5, 2.0])
    with pytest.raises(Exception):
        bp.winning_rate([1.0, 2.0], window=5)
