import random

import pytest

from sneak.encoding import make_params
from sneak.generators import fixtures, gen_cycle
from sneak.graph import Network
from sneak.oracle import (EnumerationBudgetExceeded, make_runner, verify_baseline_path_secrecy,
                          verify_collusion_resistance, verify_recovery)

# D feeds 1 and 2; nodes 3 and 4 hear from both and from each other
NET4 = Network.from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3), (1, 4), (2, 4), (3, 4)])
# D feeds 1, 2, 3; node 4 hears from all three
NET4_D3 = Network.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)])
P4 = make_params(4, 2, 2, q=5)


def test_small_instance_passes_at_k_minus_1():
    v = verify_collusion_resistance(NET4, P4, 1)
    assert v.verdict == "PASS" and v.counterexample is None
    assert v.instances == 5 and v.subsets_checked == 4


def test_budget_k_fails_with_recovering_subset():
    v = verify_collusion_resistance(NET4, P4, 2)
    assert v.verdict == "FAIL"
    cex = v.counterexample
    assert len(cex["subset"]) == 2 and cex["total_variation"] == "1"
    assert cex["secrets"][0] != cex["secrets"][1]


def test_non_propagating_topology_still_secret():
    net = gen_cycle(5)
    p = make_params(5, 2, 2, q=7)
    v = verify_collusion_resistance(net, p, 1)
    assert v.ok
    # the ring stalls, so the oracle really did look at a partial run
    rep = make_runner()(net, p, (0,), random.Random(0))
    assert rep.stalled


def test_leaky_ramp_parameters_are_caught():
    # ell = 0: a single node's data already depends on the secret
    v = verify_collusion_resistance(NET4, make_params(4, 2, 2, q=5, ell=0), 1)
    assert v.verdict == "FAIL"


def test_two_threshold_instance():
    p = make_params(4, 3, 3, q=5, ell=1)
    assert verify_collusion_resistance(NET4_D3, p, 1).ok
    assert not verify_collusion_resistance(NET4_D3, p, 2).ok
    rec = verify_recovery(NET4_D3, p)
    assert rec.ok and rec.details["exhaustive"] and rec.subsets_checked == 125 * 4


def test_toy_recovery_all_pairs():
    v = verify_recovery(fixtures()["toy"], make_params(6, 2, 2, q=7))
    assert v.ok and v.details["exhaustive"]
    # one batched run per secret value, C(6, 2) pairs each
    assert v.instances == 7 and v.subsets_checked == 7 * 15


def test_recovery_needs_k_delivered_shares():
    v = verify_recovery(NET4, make_params(4, 3, 3, q=5, ell=1))
    assert not v.ok and v.subsets_checked == 0


def test_sampled_recovery_when_enumeration_is_too_large():
    v = verify_recovery(fixtures()["toy"], make_params(6, 2, 2, q=7), max_enum=10, samples=7)
    assert v.ok and not v.details["exhaustive"] and v.instances == 7


def test_enumeration_budget_guard():
    with pytest.raises(EnumerationBudgetExceeded):
        verify_collusion_resistance(NET4, P4, 1, max_enum=100)


def test_baseline_path_secrecy():
    v = verify_baseline_path_secrecy(NET4, P4)
    assert v.ok and v.check == "baseline_path_secrecy"
    # two colluders hold two Shamir shares: the secret is exposed
    assert not verify_collusion_resistance(NET4, P4, 2, algorithm="sota").ok


def test_fallback_runs_stay_secret():
    p = make_params(10, 2, 2)
    for fb in ("dealer", "local"):
        assert verify_collusion_resistance(fixtures()["fig9"], p, 1, fallback=fb).ok


def test_verdict_serialization_and_digest_stability():
    a = verify_collusion_resistance(NET4, P4, 1)
    b = verify_collusion_resistance(NET4, P4, 1)
    assert a.digest == b.digest and len(a.digest) == 16
    d = a.to_dict()
    assert d["verdict"] == "PASS" and d["budget"] == 1 and d["counterexample"] is None
    assert {"check", "instances", "subsets_checked", "view_histogram_digest"} <= set(d)


def test_unknown_algorithm():
    with pytest.raises(ValueError):
        make_runner("magic")
