import json
import random
from fractions import Fraction

import pytest

from sneak.bounds import (bounds_report, directed_regular_lower, graph_communication_lower,
                          max_out_degree, node_download_lower, randomness_bounds,
                          sota_closed_form, sota_quadratic_lower, sota_superlinear_lower)
from sneak.encoding import make_params
from sneak.generators import (fixtures, gen_random_propagating, gen_regular_fringe, gen_star,
                              gen_window)
from sneak.graph import DEALER, Network
from sneak.numeric import INF, from_json, is_inf, to_json
from sneak.protocol import run_sneak

TOY = fixtures()["toy"]
TOY_P = make_params(6, 2, 2, q=7)


# -- the infinity sentinel ------------------------------------------------------

def test_inf_arithmetic_and_order():
    assert INF + Fraction(3) is INF and Fraction(3) + INF is INF
    assert INF * 2 is INF and INF / 3 is INF
    assert Fraction(10**9) < INF and INF > 5 and not INF < 5
    assert INF == INF and is_inf(INF) and not is_inf(7)
    assert max(Fraction(1), INF) is INF


def test_json_encoding_of_units():
    assert to_json(Fraction(49, 6)) == "49/6"
    assert to_json(Fraction(4)) == 4
    assert to_json(INF) == "inf"
    for x in (Fraction(49, 6), Fraction(4), INF):
        assert from_json(to_json(x)) == x


# -- per-node and graph lower bounds -------------------------------------------

def test_node_lower_examples():
    assert node_download_lower(TOY, TOY_P, 6) == 2
    assert node_download_lower(TOY, TOY_P, 1) == 1
    net = Network.from_edges(3, [(DEALER, 1), (DEALER, 2), (1, 3)])
    assert node_download_lower(net, make_params(3, 2, 2), 3) is INF


def test_toy_graph_lower():
    total, trivial = graph_communication_lower(TOY, TOY_P)
    assert total == Fraction(49, 6)
    assert total == 2 + Fraction(4, 3) + Fraction(4, 3) + Fraction(3, 2) + 2
    assert trivial == 6


def test_star_lower_is_n():
    assert graph_communication_lower(gen_star(7), make_params(7, 3, 3)) == (7, 7)


@pytest.mark.parametrize("n,k,d,hub", [(20, 2, 3, 5), (30, 3, 4, 6), (15, 1, 2, 2)])
def test_regular_fringe_lower(n, k, d, hub):
    net = gen_regular_fringe(n, d, hub, seed=n)
    p = make_params(n, k, d)
    expected = hub + (n - hub) * Fraction(d, d - k + 1)
    assert graph_communication_lower(net, p)[0] == expected


def test_directed_regular_examples():
    assert directed_regular_lower(make_params(6, 2, 2)) == 10
    # as d grows the bound falls toward n - (k - 1)
    vals = [directed_regular_lower(make_params(40, 3, d)) for d in range(3, 40)]
    assert vals == sorted(vals, reverse=True)
    assert all(v == Fraction(38 * d, d - 2) for v, d in zip(vals, range(3, 40)))
    big = directed_regular_lower(make_params(40, 3, 10**6))
    assert 38 < big < Fraction(38001, 1000)


def test_lower_never_exceeds_sneak():
    for seed in range(10):
        net = gen_random_propagating(30, 3, seed, directed=bool(seed % 2))
        p = make_params(30, 2, 3)
        sneak = run_sneak(net, p, (1, 2), random.Random(seed)).total_units
        assert graph_communication_lower(net, p)[0] <= sneak == Fraction(30 * 3, 2)


# -- baseline closed form and its floors ----------------------------------------

def test_sota_closed_form_examples():
    assert sota_closed_form(TOY, TOY_P) == 24
    assert sota_closed_form(gen_star(9), make_params(9, 4, 4)) == 9


@pytest.mark.parametrize("n", [16, 32, 64])
def test_window_beats_quadratic_floor(n):
    net = gen_window(n, 2, 2, seed=n)
    p = make_params(n, 2, 2)
    assert sota_closed_form(net, p) >= sota_quadratic_lower(n, 2) == Fraction(n * (n + 1), 8)


def test_superlinear_examples():
    assert sota_superlinear_lower(4096, 2) == 10240
    assert sota_superlinear_lower(27, 3) == 3          # n = b^3 -> n / b^2
    assert sota_superlinear_lower(125, 5) == 5
    assert sota_superlinear_lower(10, 10) == 0         # vacuous for a dense dealer
    assert sota_superlinear_lower(100, 2) == Fraction(100 * 4, 4)  # floor(log2 100) = 6
    with pytest.raises(ValueError):
        sota_superlinear_lower(10, 1)


def test_max_out_degree():
    assert max_out_degree(TOY) == 4
    assert max_out_degree(gen_star(6)) == 6


# -- randomness ---------------------------------------------------------------

def test_toy_randomness():
    r = randomness_bounds(TOY, TOY_P)
    assert r.any_lower == 1
    assert r.sneak_value == 1 and r.sneak_draw_units == 2 and r.sneak_mismatch
    assert r.sota_lower == 5
    assert r.sota_degree_lower == 4  # 4 outside nodes, |N(D)| - (k-1) = 1


@pytest.mark.parametrize("k,d", [(2, 3), (3, 4), (3, 6), (4, 6), (1, 3)])
def test_sneak_randomness_formula(k, d):
    p = make_params(10, k, d)
    r = randomness_bounds(gen_random_propagating(10, d, 0), p)
    assert r.sneak_value == Fraction((k - 1) * (2 * d - k), 2 * (d - k + 1))
    draws = (k - 1) * d - (k - 1) * (k - 2) // 2
    assert r.sneak_draw_units == Fraction(draws, d - k + 1)


def test_randomness_with_too_few_paths_is_infinite():
    net = Network.from_edges(3, [(DEALER, 1), (DEALER, 2), (1, 3)])
    r = randomness_bounds(net, make_params(3, 2, 2))
    assert r.sota_lower is INF


def test_degree_bound_infinite_when_dealer_too_thin():
    net = Network.from_edges(3, [(DEALER, 1), (1, 2), (1, 3), (2, 3)])
    assert randomness_bounds(net, make_params(3, 2, 2)).sota_degree_lower is INF
    assert randomness_bounds(gen_star(4), make_params(4, 2, 2)).sota_degree_lower == 0


# -- report -----------------------------------------------------------------------

def test_report_serializes():
    rep = bounds_report(TOY, TOY_P)
    data = json.loads(rep.to_json())
    assert data["graph_lower_sum"] == "49/6"
    assert data["sota_closed_form"] == 24
    assert data["directed_regular_lower"] == 10
    assert data["randomness_sneak_mismatch"] is True
    assert data["per_node_lower"]["6"] == 2


def test_all_entries_non_negative():
    for seed in range(5):
        net = gen_window(30, 3, 1, seed)
        rep = bounds_report(net, make_params(30, 2, 3))
        for key, val in rep.to_dict().items():
            if isinstance(val, (int, str)) and key != "randomness_sneak_mismatch":
                assert from_json(val) >= 0
