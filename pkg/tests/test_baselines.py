"""Baseline schemes: pruned enumeration vs naive oracle, guard, static pads."""

import numpy as np
import pytest

from skymarket.audit import random_market
from skymarket.baselines import (
    EXHAUSTIVE_GUARD,
    MarketTooLargeError,
    best_assignment,
    exhaustive_optimal,
    optimal_scheme_outcome,
    static_pad_qors,
    static_wpt_round,
)
from skymarket.mechanism import BidderInfo, WindowMarket, run_auction
from skymarket.types import Bid

from conftest import naive_best_assignment
from test_mechanism import make_ugv, make_uav


def test_best_assignment_matches_naive_enumeration(rng):
    for _ in range(150):
        n_small = int(rng.integers(1, 6))
        n_large = int(rng.integers(n_small, 7))
        small = sorted(rng.uniform(0.5, 6.0, size=n_small).tolist(), reverse=True)
        large = rng.uniform(0.05, 1.0, size=n_large).tolist()
        score, assign = best_assignment(small, large)
        assert score == pytest.approx(naive_best_assignment(small, large), abs=1e-9)
        # returned pairing must reproduce the claimed score
        assert score == pytest.approx(
            sum(small[t] * large[assign[t]] for t in range(n_small)), abs=1e-12
        )
        assert len(set(assign)) == n_small


def test_exhaustive_optimal_2x2_reference():
    market = WindowMarket.from_values([4.0, 2.0], [4.0, 2.0], [0.9, 0.5])
    outcome = exhaustive_optimal(market)
    assert outcome.social_surplus == pytest.approx(4.6, abs=1e-12)  # vs anti-sorted 3.8


def test_exhaustive_optimal_1x1():
    market = WindowMarket.from_values([3.0], [3.0], [0.2])
    outcome = exhaustive_optimal(market)
    assert outcome.num_winners == 1


def test_exhaustive_optimal_equals_auction_surplus_under_truth(rng):
    for _ in range(120):
        market = random_market(rng, int(rng.integers(1, 8)), int(rng.integers(1, 8)))
        ours = run_auction(market)
        opt = exhaustive_optimal(market)
        assert opt.social_surplus >= ours.social_surplus - 1e-9
        assert opt.social_surplus == pytest.approx(ours.social_surplus, abs=1e-9)


def test_exhaustive_optimal_with_tied_valuations(rng):
    market = WindowMarket.from_values([3.0, 3.0, 1.0], [3.0, 3.0, 1.0], [0.8, 0.6])
    opt = exhaustive_optimal(market)
    ours = run_auction(market)
    assert opt.social_surplus == pytest.approx(ours.social_surplus, abs=1e-12)


def test_exhaustive_optimal_uses_valuations_not_bids():
    # shaded bids invert the bid order; the planner must still match by value
    market = WindowMarket.from_values([4.0, 2.0], [1.0, 1.9], [0.9, 0.5])
    opt = exhaustive_optimal(market)
    pairs = {(m.uav_id, m.q) for m in opt.winners}
    assert (0, 0.9) in pairs  # value 4.0 takes the best pad despite bidding 1.0
    assert opt.social_surplus == pytest.approx(0.9 * 4 + 0.5 * 2, abs=1e-12)


def test_exhaustive_optimal_size_guard():
    market = random_market(np.random.default_rng(0), 10, 10)
    with pytest.raises(MarketTooLargeError):
        exhaustive_optimal(market)
    # explicit guard override enumerates fine
    outcome = exhaustive_optimal(market, guard=10)
    assert outcome.num_winners == 10


def test_optimal_scheme_outcome_fallback_matches_enumeration(rng):
    # beyond the guard the assortative shortcut must return the same
    # outcome the enumerator produces when allowed to run
    for _ in range(20):
        market = random_market(rng, 10, int(rng.integers(10, 12)))
        via_fallback = optimal_scheme_outcome(market)  # min > 9 -> shortcut
        via_enum = exhaustive_optimal(market, guard=12)
        assert via_fallback == via_enum
    small = random_market(rng, 4, 5)
    assert optimal_scheme_outcome(small) == exhaustive_optimal(small)


def test_exhaustive_guard_constant():
    assert EXHAUSTIVE_GUARD == 9


def test_static_pad_qors_geometry():
    spot = (2500.0, 2500.0)
    assert static_pad_qors(spot, spot, 2500.0) == 1.0  # pad at the spot
    assert static_pad_qors((2500.0, 1250.0), spot, 2500.0) == pytest.approx(0.5, abs=1e-12)
    # beyond the reference distance the score saturates at the floor
    assert static_pad_qors((2500.0, 9000.0), spot, 2500.0) == 0.05


def test_static_scores_never_beat_mobile_scores(rng):
    from skymarket.valuation import qors_from_distance

    spot = (2500.0, 2500.0)
    for _ in range(100):
        d = float(rng.uniform(0.0, 2500.0))
        static_q = static_pad_qors((2500.0 + d, 2500.0), spot, 2500.0)
        mobile_q = qors_from_distance(min(d / 2.0, 2500.0), 2500.0)
        assert static_q <= mobile_q + 1e-12


def test_static_wpt_round_runs_same_mechanism():
    import dataclasses

    spot = (2500.0, 2500.0)
    bidders = [
        BidderInfo(make_uav(0), Bid(0, 1, 4.0, 0.0), 4.0),
        BidderInfo(make_uav(1), Bid(1, 1, 2.0, 0.0), 2.0),
    ]
    chargers = [
        dataclasses.replace(make_ugv(0, 0.5), position=(2500.0, 3000.0)),  # 500 m out
        dataclasses.replace(make_ugv(1, 0.5), position=(2500.0, 4500.0)),  # 2 km out
    ]
    outcome = static_wpt_round(bidders, chargers, spot, d_max=2500.0, window_id=1)
    assert outcome.num_winners == 2
    # nearer pad scores 0.8, farther 0.2; top bid takes the nearer pad
    top = outcome.winners[0]
    assert (top.uav_id, top.ugv_id) == (0, 0)
    assert top.q == pytest.approx(0.8, abs=1e-12)
    assert outcome.winners[1].q == pytest.approx(0.2, abs=1e-12)
