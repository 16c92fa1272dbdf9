import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from sneak.encoding import (build_master_matrix, extract_share, make_params, node_data,
                            random_secret, recover_secret, Share)
from sneak.generators import fixtures, gen_layered, gen_random_propagating
from sneak.graph import DEALER, Network, propagation_order
from sneak.protocol import (ProtocolError, RunOptions, add_participant, run_sneak,
                            run_sneak_adversarial, run_with_fallback)
from sneak.report import transcript_csv

TOY = fixtures()["toy"]
FIG9 = fixtures()["fig9"]


def toy_run(seed=0, **kw):
    p = make_params(6, 2, 2, q=7)
    return p, run_sneak(TOY, p, (1,), random.Random(seed), **kw)


def random_net(seed, n, p, directed):
    rng = random.Random(seed)
    edges = [(u, v) for u in range(n + 1) for v in range(1, n + 1)
             if u != v and (directed or u < v) and rng.random() < p]
    return Network.from_edges(n, edges, directed)


# -- toy network ---------------------------------------------------------------

def test_toy_totals():
    _, rep = toy_run()
    assert rep.total_field_elements == 12 and rep.total_units == 12
    assert rep.randomness_draws == 2
    assert rep.delivered == set(range(1, 7)) and not rep.stalled and not rep.failed


def test_toy_transcript_schedule():
    _, rep = toy_run()
    got = [(m.tick, m.src, m.dst, m.kind) for m in rep.transcript]
    dd, rl = "dealer_data", "relay"
    assert got == [(0, 0, 1, dd), (0, 0, 2, dd), (1, 1, 3, rl), (1, 2, 3, rl), (1, 2, 4, rl),
                   (2, 3, 4, rl), (2, 3, 5, rl), (3, 4, 5, rl), (3, 4, 6, rl), (4, 5, 6, rl)]
    assert transcript_csv(rep.transcript).splitlines()[:2] == [
        "tick,src,dst,payload_len,kind", "0,D,1,2,dealer_data"]


def test_toy_shares_are_polynomial_evaluations():
    # share of node i is s + i r with r the first draw
    p = make_params(6, 2, 2, q=7)
    r = random.Random(5)
    first = random.Random(5).randrange(7)
    rep = run_sneak(TOY, p, (3,), r)
    for i in range(1, 7):
        assert rep.shares[i] == ((3 + i * first) % 7,)


def test_every_node_downloads_d_elements():
    p, rep = toy_run()
    assert set(rep.per_node_download.values()) == {Fraction(2)}


def test_deterministic_replay():
    _, a = toy_run(seed=4)
    _, b = toy_run(seed=4)
    assert a.to_json() == b.to_json()
    assert transcript_csv(a.transcript) == transcript_csv(b.transcript)


def test_param_network_mismatch():
    with pytest.raises(ProtocolError):
        run_sneak(TOY, make_params(7, 2, 2, q=11), (1,), random.Random(0))


# -- scheduling ----------------------------------------------------------------

def test_earlier_queued_offer_wins():
    net = Network.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)])
    p = make_params(4, 2, 2, q=5)
    rep = run_sneak(net, p, (1,), random.Random(0))
    assert sorted(m.src for m in rep.transcript if m.dst == 4) == [1, 2]
    rep = run_sneak(net, p, (1,), random.Random(0), RunOptions(dealer_order=[3, 2, 1]))
    assert sorted(m.src for m in rep.transcript if m.dst == 4) == [2, 3]


def test_dealer_order_must_be_permutation():
    with pytest.raises(ProtocolError):
        toy_run(options=RunOptions(dealer_order=[1]))


def test_dealer_order_never_changes_node_data():
    net = gen_layered([3, 4, 4], 3)
    p = make_params(net.n, 2, 3)
    secret = random_secret(p, random.Random(1))
    reference = None
    suppliers = set()
    for perm in itertools.permutations(sorted(net.dealer_neighbors())):
        rep = run_sneak(net, p, secret, random.Random(2), RunOptions(dealer_order=perm))
        assert rep.delivered == set(net.participants)
        data = {v: nd.vector for v, nd in rep.node_data.items()}
        reference = reference or data
        assert data == reference
        suppliers.add(tuple((m.src, m.dst) for m in rep.transcript if m.kind == "relay"))
    assert len(suppliers) > 1  # the permutations really did change who supplied whom


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 9), st.integers(1, 3), st.booleans())
def test_stalled_set_matches_flood_prediction(seed, n, d, directed):
    net = random_net(seed, n, 0.45, directed)
    k = min(d, n)
    p = make_params(n, k, max(d, k))
    rep = run_sneak(net, p, random_secret(p, random.Random(seed)), random.Random(seed))
    _, stalled = propagation_order(net, p.d)
    assert rep.stalled == stalled
    assert rep.delivered == set(net.participants) - stalled
    assert not rep.failed


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(8, 40), st.integers(1, 4), st.integers(0, 2))
def test_total_download_closed_form(seed, n, k, extra):
    d = k + extra
    net = gen_random_propagating(n, d, seed)
    p = make_params(n, k, d)
    rep = run_sneak(net, p, random_secret(p, random.Random(seed)), random.Random(seed))
    assert rep.delivered == set(net.participants)
    assert rep.total_units == Fraction(n * d, d - k + 1)
    assert set(rep.per_node_elements.values()) == {d}
    assert rep.randomness_draws == p.randomness_count


def test_delivered_shares_recover_secret():
    net = gen_random_propagating(12, 4, 3)
    p = make_params(12, 3, 4)
    secret = random_secret(p, random.Random(0))
    rep = run_sneak(net, p, secret, random.Random(1))
    for ids in itertools.combinations(range(1, 13), 3):
        assert recover_secret([Share(i, rep.shares[i]) for i in ids], p) == secret


# -- active adversaries --------------------------------------------------------

def test_no_adversaries_matches_plain_run():
    p = make_params(6, 2, 2, q=7)
    a = run_sneak(TOY, p, (1,), random.Random(3))
    b = run_sneak_adversarial(TOY, p, (1,), random.Random(3), adversaries=())
    assert b.extras.pop("honest_undelivered") == []
    assert a.to_json() == b.to_json()


@pytest.mark.parametrize("corruption", ["offset", "random"])
def test_single_adversary_is_corrected(corruption):
    for seed in range(10):
        net = gen_random_propagating(20, 4, seed)
        p = make_params(20, 2, 2, t_adv=1)
        adv = random.Random(seed).choice([v for v in net.participants if net.neighbors(v)])
        rep = run_sneak_adversarial(net, p, (seed % p.q,), random.Random(seed), [adv],
                                    corruption=corruption, adversary_seed=seed)
        assert rep.extras["honest_undelivered"] == []
        assert not rep.extras["over_budget"]
        # dealer neighbours get d values, everyone else d + 2t relays
        assert rep.total_units == 4 * 2 + 16 * 4
        assert any(m.src == adv and m.kind == "relay" for m in rep.transcript)


def test_adversary_values_actually_differ():
    net = gen_random_propagating(12, 4, 0)
    p = make_params(12, 2, 2, t_adv=1)
    honest = run_sneak(net, p, (1,), random.Random(0))
    bad = run_sneak_adversarial(net, p, (1,), random.Random(0), [1])
    h = {(m.src, m.dst): m.payload for m in honest.transcript}
    b = {(m.src, m.dst): m.payload for m in bad.transcript}
    assert any(h[key] != b[key] for key in b if key[0] == 1 and key in h)


def test_two_adversaries_on_one_node_break_delivery():
    net = gen_random_propagating(16, 4, 7)
    p = make_params(16, 2, 2, t_adv=1)
    victim = 16
    advs = sorted(net.in_neighbors(victim))[:2]
    rep = run_sneak_adversarial(net, p, (2,), random.Random(0), advs)
    assert rep.extras["over_budget"]
    assert victim in rep.extras["honest_undelivered"]
    assert victim not in rep.delivered


def test_unknown_adversary_rejected():
    with pytest.raises(ProtocolError):
        run_sneak_adversarial(TOY, make_params(6, 2, 2, q=7), (1,), random.Random(0), [9])


# -- participant addition ------------------------------------------------------

def test_add_node_seven_to_toy():
    p = make_params(6, 2, 2, q=11, max_participants=10)
    M = build_master_matrix((4,), p, random.Random(0))
    f = p.field
    new = add_participant([node_data(M, 5, f), node_data(M, 6, f)], 7, p)
    assert new == node_data(M, 7, f)
    s, r = M.rows[0][0], M.rows[0][1]
    assert new.vector[0] == (s + 7 * r) % 11


def test_added_share_joins_recovery():
    p = make_params(6, 3, 4, q=11, max_participants=10)
    secret = random_secret(p, random.Random(1))
    M = build_master_matrix(secret, p, random.Random(2))
    f = p.field
    new = add_participant([node_data(M, i, f) for i in (1, 3, 4, 6)], 9, p)
    shares = [extract_share(node_data(M, i, f), p) for i in (2, 5)] + [extract_share(new, p)]
    assert recover_secret(shares, p) == secret


@pytest.mark.parametrize("ids,new_id", [((5,), 7), ((5, 5), 7), ((5, 6), 3), ((5, 6), 11),
                                        ((5, 6), 0)])
def test_add_participant_preconditions(ids, new_id):
    p = make_params(6, 2, 2, q=11, max_participants=10)
    M = build_master_matrix((4,), p, random.Random(0))
    with pytest.raises(ProtocolError):
        add_participant([node_data(M, i, p.field) for i in ids], new_id, p)


# -- fallback strategies -------------------------------------------------------

@pytest.fixture(scope="module")
def fig9_runs():
    p = make_params(10, 2, 2)
    runs = {s: run_with_fallback(FIG9, p, (5,), random.Random(1), s)
            for s in ("naive", "dealer_to_bottleneck", "local_relay")}
    return p, runs


def test_fig9_without_fallback_stalls():
    p = make_params(10, 2, 2)
    rep = run_sneak(FIG9, p, (5,), random.Random(1))
    assert rep.stalled == {8, 9, 10}
    assert rep.delivered == set(range(1, 8))


@pytest.mark.parametrize("strategy,units", [("naive", 30), ("dealer_to_bottleneck", 14),
                                            ("local_relay", 8)])
def test_fig9_fallback_costs(fig9_runs, strategy, units):
    _, runs = fig9_runs
    rep = runs[strategy]
    assert rep.delivered == set(range(1, 11))
    assert rep.extras["initial_stalled"] == [8, 9, 10]
    assert rep.extras["fallback_units"] == units
    assert rep.fallback_log


def test_fig9_fallback_chunks_are_tagged(fig9_runs):
    _, runs = fig9_runs
    for rep in runs.values():
        kinds = {m.kind for m in rep.transcript}
        assert "fallback_chunk" in kinds
        for m in rep.transcript:
            assert (m.src, m.dst) in FIG9.arcs


def test_local_relay_services_a_single_bottleneck(fig9_runs):
    _, runs = fig9_runs
    rep = runs["local_relay"]
    assert rep.extras["serviced"] == [8]
    assert rep.extras["resumed"] == [9, 10]
    assert all(entry["source"] != "D" for entry in rep.fallback_log)


def test_fallback_strategy_aliases_and_errors():
    p = make_params(10, 2, 2)
    rep = run_with_fallback(FIG9, p, (5,), random.Random(1), "local")
    assert rep.extras["strategy"] == "local_relay"
    with pytest.raises(ProtocolError):
        run_with_fallback(FIG9, p, (5,), random.Random(1), "teleport")
    with pytest.raises(ProtocolError):
        run_with_fallback(FIG9, make_params(10, 2, 2, t_adv=1), (5,), random.Random(1), "naive")


def test_fallback_is_free_when_nothing_stalls():
    p = make_params(6, 2, 2, q=7)
    for s in ("naive", "dealer", "local"):
        rep = run_with_fallback(TOY, p, (1,), random.Random(0), s)
        assert rep.extras["fallback_units"] == 0 and rep.total_units == 12


def test_unservable_nodes_reported():
    # node 3 hangs off node 2 only: no two disjoint paths from anywhere
    net = Network.from_edges(3, [(DEALER, 1), (DEALER, 2), (1, 2), (2, 3)])
    p = make_params(3, 2, 2)
    for s in ("naive", "dealer", "local"):
        rep = run_with_fallback(net, p, (1,), random.Random(0), s)
        assert rep.extras["unservable"] == [3]
        assert rep.stalled == {3}


@pytest.mark.parametrize("strategy", ["naive", "dealer", "local"])
def test_fallback_delivers_on_random_stalled_graphs(strategy):
    hits = 0
    for seed in range(30):
        net = random_net(seed, 8, 0.4, False)
        p = make_params(8, 2, 2)
        secret = (seed % p.q,)
        plain = run_sneak(net, p, secret, random.Random(seed))
        rep = run_with_fallback(net, p, secret, random.Random(seed), strategy)
        assert not rep.failed
        served = set(net.participants) - set(rep.extras["unservable"])
        if plain.stalled and not rep.extras["unservable"]:
            hits += 1
            assert rep.delivered == served
    assert hits > 3
