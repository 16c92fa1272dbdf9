"""Tick-based simulation of the distributed dissemination protocol.

Scheduling rules
----------------
* The dealer sends ``psi_j^T M`` to each neighbour j at tick 0.
* A message sent at tick t arrives at tick t + 1.  Arrivals are processed in
  global FIFO (send) order.
* A node that reaches its quota (d relay values, or d + 2t with active
  adversaries) during tick t recovers its node data and, still at tick t,
  offers a relay value to every neighbour in id order.  Nodes completing in
  the same tick act in completion order.
* An offer is accepted iff the receiver is not a dealer neighbour, has not
  heard from this sender, and has accepted fewer than quota offers.  Offers
  and acceptances are control traffic: counted, never metered as payload.

Fallback strategies for stalled floods are layered on the same engine;
see ``run_with_fallback``.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .baseline import plan_secure_relay, secure_transmit
from .encoding import (EncodingError, NodeData, SharingParams, build_two_threshold_matrix,
                       extract_share, node_data, recover_node_data,
                       recover_node_data_with_errors, relay_value, same_vector)
from .field import DecodeError
from .graph import DEALER, Network, disjoint_path_profile
from .report import Message, RunReport, download_counts


class ProtocolError(ValueError):
    """Invalid protocol request (bad ids, consenting set, strategy...)."""


def _corrupt_offset(value, q, rng):
    return (value + 1) % q


def _corrupt_random(value, q, rng):
    return (value + 1 + rng.randrange(q - 1)) % q


CORRUPTIONS: dict[str, Callable] = {
    "offset": _corrupt_offset,
    "random": _corrupt_random,
}

STRATEGIES = ("naive", "dealer_to_bottleneck", "local_relay")
_ALIASES = {"dealer": "dealer_to_bottleneck", "local": "local_relay"}


class _Recorder:
    """Wraps an RNG and logs every draw against its owner."""

    def __init__(self, rng, log: list):
        self.rng = rng
        self.log = log

    def randrange(self, q):
        x = self.rng.randrange(q)
        self.log.append(x)
        return x


@dataclass
class RunOptions:
    dealer_order: Sequence[int] | None = None
    adversaries: Iterable[int] = ()
    corruption: str | Callable = "offset"
    adversary_seed: int = 0


class _Flood:
    def __init__(self, net: Network, params: SharingParams, M, options: RunOptions):
        if params.q <= net.n:
            raise ProtocolError(f"field size {params.q} must exceed n = {net.n}")
        if params.n != net.n:
            raise ProtocolError(f"params.n = {params.n} but network has {net.n} participants")
        self.net, self.params, self.field, self.M = net, params, params.field, M
        self.quota = params.quota
        self.accepted = {v: 0 for v in net.participants}
        self.senders = {v: set() for v in net.participants}
        self.received = {v: [] for v in net.participants}
        self.data: dict[int, NodeData] = {}
        self.failed: set[int] = set()
        self.messages: list[Message] = []
        self.queue: deque[Message] = deque()
        self.control = 0
        self.tick = 0
        self.adversaries = frozenset(options.adversaries)
        corrupt = options.corruption
        self.corrupt = CORRUPTIONS[corrupt] if isinstance(corrupt, str) else corrupt
        self.adv_rng = random.Random(options.adversary_seed)
        self.options = options

    def send(self, msg: Message) -> None:
        self.messages.append(msg)
        self.queue.append(msg)

    def start(self) -> None:
        nd = self.net.dealer_neighbors()
        order = self.options.dealer_order
        order = sorted(nd) if order is None else list(order)
        if sorted(order) != sorted(nd):
            raise ProtocolError("dealer order must be a permutation of the dealer's neighbours")
        for v in order:
            self.send(Message(0, DEALER, v, node_data(self.M, v, self.field).vector, "dealer_data"))

    def run(self) -> None:
        while self.queue:
            t = self.queue[0].tick + 1
            ready = []
            while self.queue and self.queue[0].tick + 1 == t:
                m = self.queue.popleft()
                if m.kind == "dealer_data":
                    self.data[m.dst] = NodeData(m.dst, m.payload)
                    ready.append(m.dst)
                else:
                    self.received[m.dst].append((m.src, m.payload[0]))
                    if len(self.received[m.dst]) == self.quota:
                        ready.append(m.dst)
            self.tick = t
            for v in ready:
                if v in self.data or self._recover(v):
                    self._offer(v, t)

    def inject(self, node: int, pairs: Sequence[tuple[int, object]], tick: int) -> None:
        """Hand relay values to ``node`` outside the flood (fallback delivery)."""
        for src, val in pairs:
            self.accepted[node] += 1
            self.senders[node].add(src)
            self.received[node].append((src, val))
        self.tick = max(self.tick, tick)
        if len(self.received[node]) >= self.quota and self._recover(node):
            self._offer(node, self.tick)

    def _recover(self, v: int) -> bool:
        pairs = self.received[v][: self.quota]
        try:
            if self.params.t_adv:
                nd = recover_node_data_with_errors(pairs, self.params, v)
            else:
                nd = recover_node_data(pairs, self.params, v)
        except (DecodeError, EncodingError):
            self.failed.add(v)
            return False
        self.data[v] = nd
        return True

    def _offer(self, v: int, t: int) -> None:
        q = self.field.q
        for j in sorted(self.net.neighbors(v)):
            if j == DEALER:
                continue
            self.control += 1
            if (self.net.is_dealer_neighbor(j) or v in self.senders[j]
                    or self.accepted[j] >= self.quota):
                continue
            self.control += 1
            self.accepted[j] += 1
            self.senders[j].add(v)
            value = relay_value(self.data[v], j, self.field)
            if v in self.adversaries:
                value = self.corrupt(value, q, self.adv_rng)
            self.send(Message(t, v, j, (value,), "relay"))

    def complete_in_neighbors(self, v: int) -> int:
        return sum(1 for u in self.net.in_neighbors(v) if u != DEALER and u in self.data)

    def pending(self) -> list[int]:
        return [v for v in self.net.participants if v not in self.data and v not in self.failed]


def _setup(net, params, secret, rng, options):
    draws = {DEALER: []}
    M = build_two_threshold_matrix(secret, params, _Recorder(rng, draws[DEALER]))
    flood = _Flood(net, params, M, options or RunOptions())
    return draws, M, flood


def _report(algorithm: str, flood: _Flood, M, draws: dict, extra_shares=None,
            extras=None, log=None) -> RunReport:
    net, params = flood.net, flood.params
    truth = {v: extract_share(node_data(M, v, flood.field), params).vector
             for v in net.participants}
    shares = {v: extract_share(d, params).vector for v, d in flood.data.items()}
    shares.update(extra_shares or {})
    delivered = frozenset(v for v, s in shares.items() if same_vector(s, truth[v]))
    failed = frozenset((set(shares) | flood.failed) - delivered)
    stalled = frozenset(net.participants) - delivered - failed
    transcript = sorted(flood.messages, key=lambda m: m.tick)
    return RunReport(
        algorithm=algorithm,
        params=params.as_dict(),
        secret_length=params.secret_length,
        total_field_elements=sum(m.size for m in transcript),
        per_node_elements=download_counts(transcript, net.participants),
        randomness_draws=sum(len(v) for v in draws.values()),
        delivered=delivered,
        stalled=stalled,
        failed=failed,
        fallback_log=log or [],
        control_messages=flood.control,
        extras=extras or {},
        transcript=transcript,
        shares=shares,
        node_data=dict(flood.data),
        draws_by_owner=draws,
    )


def run_sneak(net: Network, params: SharingParams, secret: Sequence, rng,
              options: RunOptions | None = None) -> RunReport:
    """Run the flood to quiescence; the transcript is ``report.transcript``."""
    draws, M, flood = _setup(net, params, secret, rng, options)
    flood.start()
    flood.run()
    extras = {}
    if flood.adversaries:
        extras["adversaries"] = sorted(flood.adversaries)
        extras["over_budget"] = len(flood.adversaries) > params.t_adv
    rep = _report("sneak", flood, M, draws, extras=extras)
    rep.extras["master_matrix_draws"] = M.randomness_count
    return rep


def run_sneak_adversarial(net: Network, params: SharingParams, secret: Sequence, rng,
                          adversaries: Iterable[int], corruption: str | Callable = "offset",
                          adversary_seed: int = 0) -> RunReport:
    """Adversaries corrupt every relay value they send.

    Honest nodes wait for d + 2t values and decode with errors.  More than
    ``t_adv`` adversaries is allowed (the report flags it) so that failures
    beyond the design budget can be observed.
    """
    adversaries = frozenset(adversaries)
    bad = [a for a in adversaries if a not in net.participants]
    if bad:
        raise ProtocolError(f"unknown adversary ids {bad}")
    opts = RunOptions(adversaries=adversaries, corruption=corruption,
                      adversary_seed=adversary_seed)
    rep = run_sneak(net, params, secret, rng, opts)
    honest = frozenset(net.participants) - adversaries
    rep.extras["honest_undelivered"] = sorted(honest - rep.delivered)
    return rep


def add_participant(consenting: Sequence[NodeData], new_id: int, params: SharingParams,
                    existing_ids: Iterable[int] | None = None) -> NodeData:
    """New node data from d consenting nodes' relay values."""
    if len(consenting) != params.d:
        raise ProtocolError(f"need exactly {params.d} consenting nodes, got {len(consenting)}")
    ids = [c.node_id for c in consenting]
    if len(set(ids)) != len(ids):
        raise ProtocolError("consenting nodes must be distinct")
    if not 1 <= new_id < params.q:
        raise ProtocolError(f"new id {new_id} must lie in [1, {params.q})")
    taken = set(range(1, params.n + 1)) if existing_ids is None else set(existing_ids)
    if new_id in taken | set(ids):
        raise ProtocolError(f"id {new_id} already in use")
    pairs = [(c.node_id, relay_value(c, new_id, params.field)) for c in consenting]
    return recover_node_data(pairs, params, new_id)


# -- fallback strategies -----------------------------------------------------------

def run_with_fallback(net: Network, params: SharingParams, secret: Sequence, rng,
                      strategy: str, options: RunOptions | None = None) -> RunReport:
    """Flood, then service stalled nodes until none remain (or none can be served).

    naive
        The dealer sends each stalled node its share over disjoint paths.
    dealer_to_bottleneck
        The dealer supplies a bottleneck node with the relay values it is
        still missing (``psi_x^T M psi_b`` for unheard ids x), secured over
        disjoint paths; the flood then resumes.
    local_relay
        Already-served nodes send their would-be relay value to the
        bottleneck, split additively into k pieces over k disjoint paths
        that avoid the dealer.  Falls back to the dealer when fewer than k
        such paths exist.

    Bottleneck order: most served in-neighbours first, ties by id.

    ``extras["fallback_units"]`` charges the fallback transmissions plus
    the full relay download of every initially stalled node that later
    recovered through the resumed flood; relay values a serviced
    bottleneck had already received before the stall are not charged.
    """
    strategy = _ALIASES.get(strategy, strategy)
    if strategy not in STRATEGIES:
        raise ProtocolError(f"unknown fallback strategy {strategy!r}")
    if params.t_adv:
        raise ProtocolError("fallback strategies assume t_adv = 0")
    draws, M, flood = _setup(net, params, secret, rng, options)
    field, k = params.field, params.k
    flood.start()
    flood.run()
    stalled0 = frozenset(flood.pending())
    n_flood = len(flood.messages)
    dealer_rng = _Recorder(rng, draws[DEALER])

    def dealer_draw():
        return dealer_rng.randrange(field.q)

    fallback_msgs: list[Message] = []
    extra_shares = {}
    serviced, unservable = set(), set()
    log = []

    def via_dealer(b: int, payload: Sequence, what: str):
        plan = plan_secure_relay(net, params, b)
        if not plan.feasible:
            return None
        tx = secure_transmit(plan, payload, params, dealer_draw, tick=flood.tick)
        flood.messages.extend(tx.messages)
        fallback_msgs.extend(tx.messages)
        log.append({"node": b, "action": what, "source": "D", "w": plan.w,
                    "paths": [list(p) for p in plan.paths.paths],
                    "values": len(payload),
                    "elements": sum(m.size for m in tx.messages)})
        return tx

    if strategy == "naive":
        for v in sorted(stalled0):
            share = extract_share(node_data(M, v, field), params).vector
            tx = via_dealer(v, share, "share")
            if tx is None:
                unservable.add(v)
                continue
            extra_shares[v] = tx.payload
            serviced.add(v)
    else:
        while True:
            pending = [v for v in flood.pending() if v not in unservable]
            if not pending:
                break
            b = min(pending, key=lambda v: (-flood.complete_in_neighbors(v), v))
            missing = flood.quota - flood.accepted[b]
            ok = strategy == "local_relay" and _local_relay(flood, b, missing, rng, draws,
                                                            fallback_msgs, log)
            if not ok:
                ids = _virtual_senders(flood, b, missing)
                vals = [relay_value(node_data(M, x, field), b, field) for x in ids]
                tx = via_dealer(b, vals, "relay_values")
                if tx is None:
                    unservable.add(b)
                    log.append({"node": b, "action": "unservable"})
                    continue
                flood.inject(b, list(zip(ids, tx.payload)), tx.arrival_tick)
            serviced.add(b)
            flood.run()

    resumed = (stalled0 - serviced) - frozenset(flood.pending())
    resumed_elements = sum(m.size for m in flood.messages if m.dst in resumed and m.kind == "relay")
    fb_elements = sum(m.size for m in fallback_msgs)
    L = params.secret_length
    extras = {
        "strategy": strategy,
        "initial_stalled": sorted(stalled0),
        "serviced": sorted(serviced),
        "resumed": sorted(resumed),
        "unservable": sorted(unservable),
        "fallback_elements": fb_elements,
        "fallback_units": Fraction(fb_elements + resumed_elements, L),
        "post_stall_units": Fraction(sum(m.size for m in flood.messages[n_flood:]), L),
    }
    return _report("sneak+" + strategy, flood, M, draws, extra_shares, extras, log)


def _virtual_senders(flood: _Flood, b: int, missing: int) -> list[int]:
    """Ids whose relay values the dealer hands to ``b``: unheard in-neighbours first."""
    heard = flood.senders[b]
    first = sorted(u for u in flood.net.in_neighbors(b) if u != DEALER and u not in heard)
    rest = (x for x in range(1, flood.field.q) if x != b and x not in heard and x not in first)
    out = first[:missing]
    for x in rest:
        if len(out) == missing:
            break
        out.append(x)
    if len(out) < missing:
        raise ProtocolError("field too small for virtual relay ids")
    return out


def _local_relay(flood: _Flood, b: int, missing: int, rng, draws: dict,
                 fallback_msgs: list, log: list) -> bool:
    net, field, k = flood.net, flood.field, flood.params.k
    options = []
    for x in sorted(flood.data):
        if x == b or x in flood.senders[b]:
            continue
        prof = disjoint_path_profile(net, b, max_w=k, source=x, forbidden=(DEALER,))
        if len(prof) == k:
            options.append((prof[k - 1].total_length, x, prof[k - 1]))
    if len(options) < missing:
        return False
    options.sort(key=lambda o: (o[0], o[1]))
    pairs = []
    arrival = flood.tick
    for cost, x, paths in options[:missing]:
        rec = _Recorder(rng, draws.setdefault(x, []))
        value = relay_value(flood.data[x], b, field)
        masks = [rec.randrange(field.q) for _ in range(k - 1)]
        last = value
        for r in masks:
            last = (last - r) % field.q
        pieces = masks + [last]
        sent = []
        for path, piece in zip(paths.paths, pieces):
            for h in range(len(path) - 1):
                sent.append(Message(flood.tick + h, path[h], path[h + 1], (piece,),
                                    "fallback_chunk"))
            arrival = max(arrival, flood.tick + len(path) - 1)
        total = 0
        for piece in pieces:
            total = (total + piece) % field.q
        pairs.append((x, total))
        flood.messages.extend(sent)
        fallback_msgs.extend(sent)
        log.append({"node": b, "action": "local_relay", "source": x, "w": k,
                    "paths": [list(p) for p in paths.paths], "values": 1,
                    "elements": len(sent)})
    flood.inject(b, pairs, arrival)
    return True

