"""Exact finite-probability models of the real and ideal authentication rounds.

The real execution pipes a message through TAG, a hostile wire, VRFY, the
key-revealing response encoder, a hostile response wire, and the final
comparison.  The ideal execution replaces the middle with an authentic-degraded
functionality (tampering always surfaces as bottom, and only genuine accepts
can make the final bit 1) driven by a simulator that shares the key
distribution so the on-wire view matches.

Everything here is exact rational arithmetic over small finite spaces: the
output is the full joint probability table of one environment interaction
tuple (m, y, y', x', z, z', f), and distances between tables are computed
term by term.  Floats never appear.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Optional

from . import asu2
from .asu2 import AuthKey, FamilyParams, MessageBlocks
from .errors import SpaceTooLarge
from .keys import KeyDistribution, epsilon_perfectness

EXEC_GUARD = 1 << 20


class _BottomType:
    """Distinguished failure symbol, outside every message and key alphabet."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BOTTOM"


BOTTOM = _BottomType()


class JointOutcome(NamedTuple):
    m: int
    y: tuple
    y_prime: tuple
    x_prime: object  # message index or BOTTOM
    z: object        # AuthKey or BOTTOM
    z_prime: object  # AuthKey or BOTTOM
    f: int


@dataclass
class JointDistribution:
    table: dict
    world: str

    def total(self) -> Fraction:
        return sum(self.table.values(), Fraction(0))

    def distance(self, other: "JointDistribution") -> Fraction:
        keys = set(self.table) | set(other.table)
        z = Fraction(0)
        acc = Fraction(0)
        for k in keys:
            acc += abs(self.table.get(k, z) - other.table.get(k, z))
        return acc / 2

    def marginal(self, fields) -> dict:
        """Project the table onto a subset of JointOutcome field names."""
        idx = [JointOutcome._fields.index(f) for f in fields]
        out = {}
        for outcome, p in self.table.items():
            key = tuple(outcome[i] for i in idx)
            out[key] = out.get(key, Fraction(0)) + p
        return out


@dataclass
class DistinguisherStrategy:
    """Deterministic environment: message choice, pair tamper, response tamper.

    ``tamper`` maps (m, t) to (m', t'); ``resp_tamper`` maps (m, t, observed z)
    to z'.  Both must be total over their finite domains.
    """

    msg_dist: tuple
    tamper: Callable
    resp_tamper: Callable
    description: str = ""

    @classmethod
    def identity(cls, msg_space_size: int) -> "DistinguisherStrategy":
        p = Fraction(1, msg_space_size)
        return cls(
            (p,) * msg_space_size,
            lambda m, t: (m, t),
            lambda m, t, z: z,
            "identity",
        )


def _key_from_index(idx: int, params: FamilyParams) -> AuthKey:
    T = params.tag_space
    return AuthKey(idx // T, idx % T)


def _tag_table(params: FamilyParams, msg_space_size: int):
    """tags[m][key_index] for the single-block message space 0..n-1."""
    if msg_space_size > params.tag_space:
        raise SpaceTooLarge("single-block message space cannot exceed |T|")
    msgs = [MessageBlocks((v,)) for v in range(msg_space_size)]
    tags = [
        [asu2.tag(_key_from_index(k, params), msg, params) for k in range(params.key_space)]
        for msg in msgs
    ]
    return tags


def _check_guard(params: FamilyParams, msg_space_size: int):
    if params.key_space * msg_space_size * params.tag_space > EXEC_GUARD:
        raise SpaceTooLarge(
            f"|K|*|M|*|T| exceeds the exact-enumeration guard {EXEC_GUARD}"
        )


def real_exec(
    strategy: DistinguisherStrategy,
    key_dist: KeyDistribution,
    params: FamilyParams,
    msg_space_size: Optional[int] = None,
) -> JointDistribution:
    """Exact joint outcome table of the real execution."""
    n = msg_space_size or len(strategy.msg_dist)
    _check_guard(params, n)
    tags = _tag_table(params, n)
    table = {}
    for m in range(n):
        pm = strategy.msg_dist[m]
        if pm == 0:
            continue
        for kidx in range(key_dist.key_space_size):
            pk = key_dist.prob(kidx)
            if pk == 0:
                continue
            key = _key_from_index(kidx, params)
            t = tags[m][kidx]
            m2, t2 = strategy.tamper(m, t)
            accepted = tags[m2][kidx] == t2
            x2 = m2 if accepted else BOTTOM
            z = key if accepted else BOTTOM
            z2 = strategy.resp_tamper(m, t, z)
            f = 1 if z2 == key else 0
            outcome = JointOutcome(m, (m, t), (m2, t2), x2, z, z2, f)
            table[outcome] = table.get(outcome, Fraction(0)) + pm * pk
    return JointDistribution(table, "real")


def ideal_exec(
    strategy: DistinguisherStrategy,
    key_dist: KeyDistribution,
    params: FamilyParams,
    msg_space_size: Optional[int] = None,
) -> JointDistribution:
    """Exact joint outcome table of the ideal execution with its simulator.

    The simulator draws from the same key distribution and runs the real
    tagging on the wire, but authenticity decisions route through the ideal
    functionality: any pair tamper surfaces as bottom, and the final bit can
    be 1 only when the responder genuinely accepted and the response
    reached Alice unaltered.
    """
    n = msg_space_size or len(strategy.msg_dist)
    _check_guard(params, n)
    tags = _tag_table(params, n)
    table = {}
    for m in range(n):
        pm = strategy.msg_dist[m]
        if pm == 0:
            continue
        for kidx in range(key_dist.key_space_size):
            pk = key_dist.prob(kidx)
            if pk == 0:
                continue
            key = _key_from_index(kidx, params)
            t = tags[m][kidx]
            m2, t2 = strategy.tamper(m, t)
            intact = (m2, t2) == (m, t)
            x2 = m if intact else BOTTOM
            z = key if intact else BOTTOM
            z2 = strategy.resp_tamper(m, t, z)
            f = 1 if (intact and z2 == key) else 0
            outcome = JointOutcome(m, (m, t), (m2, t2), x2, z, z2, f)
            table[outcome] = table.get(outcome, Fraction(0)) + pm * pk
    return JointDistribution(table, "ideal")


def security_bound(key_dist: KeyDistribution, params: FamilyParams) -> Fraction:
    """|T|/|K| + epsilon + epsilon', the proven distinguishing-advantage cap."""
    return (
        Fraction(params.tag_space, params.key_space)
        + params.epsilon
        + epsilon_perfectness(key_dist)
    )


def exact_uc_distance(
    strategy: DistinguisherStrategy,
    key_dist: KeyDistribution,
    params: FamilyParams,
    msg_space_size: Optional[int] = None,
) -> Fraction:
    real = real_exec(strategy, key_dist, params, msg_space_size)
    ideal = ideal_exec(strategy, key_dist, params, msg_space_size)
    return real.distance(ideal)


# ---------------------------------------------------------------------------
# Maximizing over the deterministic strategy family.
# ---------------------------------------------------------------------------
#
# Every outcome tuple contains y = (m, t), so outcomes produced under
# different (m, t) cells never collide and the trace distance splits into an
# independent sum of per-cell contributions.  Maximizing each lookup-table
# cell separately therefore yields the exact maximum over the full product
# family of tamper tables, without enumerating the (|M||T|)^(|M||T|)
# combinations one by one.  Response tampering is enumerated per cell over
# {forward, replace-with-bottom} plus a constant guess at each key consistent
# with the observed pair.


@dataclass
class SearchResult:
    best_strategy: DistinguisherStrategy
    max_distance: Fraction
    bound: Fraction
    slack: Fraction
    strategy_id: str
    cells_evaluated: int

    CSV_HEADER = "params,key_dist,strategy_id,distance_num,distance_den,bound_num,bound_den,slack"

    def csv_row(self, params: FamilyParams, key_dist_desc: str) -> str:
        return (
            f"tag_bits={params.tag_bits};max_blocks={params.max_blocks},{key_dist_desc},"
            f"{self.strategy_id},{self.max_distance.numerator},{self.max_distance.denominator},"
            f"{self.bound.numerator},{self.bound.denominator},"
            f"{self.slack.numerator}/{self.slack.denominator}"
        )


def _cell_contribution(m, t, m2, t2, resp, keys_in_cell, tags, pm):
    """Half L1 difference of the real and ideal sub-tables of one (m, t) cell."""
    real = {}
    ideal = {}
    for key, kidx, pk in keys_in_cell:
        prob = pm * pk
        # real path
        accepted = tags[m2][kidx] == t2
        x2 = m2 if accepted else BOTTOM
        z = key if accepted else BOTTOM
        z2 = _apply_resp(resp, z)
        f = 1 if z2 == key else 0
        o = JointOutcome(m, (m, t), (m2, t2), x2, z, z2, f)
        real[o] = real.get(o, Fraction(0)) + prob
        # ideal path
        intact = (m2, t2) == (m, t)
        xi = m if intact else BOTTOM
        zi = key if intact else BOTTOM
        zi2 = _apply_resp(resp, zi)
        fi = 1 if (intact and zi2 == key) else 0
        oi = JointOutcome(m, (m, t), (m2, t2), xi, zi, zi2, fi)
        ideal[oi] = ideal.get(oi, Fraction(0)) + prob
    acc = Fraction(0)
    for o in set(real) | set(ideal):
        acc += abs(real.get(o, Fraction(0)) - ideal.get(o, Fraction(0)))
    return acc / 2


def _apply_resp(resp, z):
    if resp == "forward":
        return z
    if resp == "bottom":
        return BOTTOM
    return resp[1]  # ("const", key)


def max_distance_search(
    key_dist: KeyDistribution,
    params: FamilyParams,
    msg_space_size: int,
    family: str = "full",
) -> SearchResult:
    """Exact maximum distinguishing advantage over the lookup-table family.

    ``family="identity"`` restricts the search to the do-nothing strategy
    (a degenerate family used to pin the no-tampering behaviour).
    """
    _check_guard(params, msg_space_size)
    n = msg_space_size
    T = params.tag_space
    tags = _tag_table(params, n)
    bound = security_bound(key_dist, params)
    if family == "identity":
        strategy = DistinguisherStrategy.identity(n)
        dist = exact_uc_distance(strategy, key_dist, params, n)
        return SearchResult(strategy, dist, bound, bound - dist, "identity", 1)
    if family != "full":
        raise ValueError(f"unknown family {family!r}")

    # keys grouped by the tag they give each message
    by_cell = {}
    for kidx in range(key_dist.key_space_size):
        pk = key_dist.prob(kidx)
        if pk == 0:
            continue
        key = _key_from_index(kidx, params)
        for m in range(n):
            by_cell.setdefault((m, tags[m][kidx]), []).append((key, kidx, pk))

    one = Fraction(1)
    tamper_table = {}
    resp_table = {}
    per_message = [Fraction(0)] * n
    cells = 0
    for m in range(n):
        for t in range(T):
            keys_in_cell = by_cell.get((m, t), [])
            best = Fraction(-1)
            best_choice = ((m, t), "forward")
            consistent = [("const", key) for key, _, _ in keys_in_cell]
            for m2 in range(n):
                for t2 in range(T):
                    for resp in ["forward", "bottom"] + consistent:
                        cells += 1
                        c = _cell_contribution(
                            m, t, m2, t2, resp, keys_in_cell, tags, one
                        )
                        if c > best:
                            best = c
                            best_choice = ((m2, t2), resp)
            tamper_table[(m, t)] = best_choice[0]
            resp_table[(m, t)] = best_choice[1]
            per_message[m] += best

    # distance is linear in the message distribution: a point mass on the
    # best message dominates every other choice
    best_m = max(range(n), key=lambda m: per_message[m])
    msg_dist = tuple(one if m == best_m else Fraction(0) for m in range(n))
    digest = hashlib.sha256(
        repr(sorted(tamper_table.items()) + sorted(resp_table.items())).encode()
    ).hexdigest()[:12]
    strategy = DistinguisherStrategy(
        msg_dist,
        lambda m, t: tamper_table[(m, t)],
        lambda m, t, z: _apply_resp(resp_table[(m, t)], z),
        f"argmax-table-{digest}",
    )
    expected = per_message[best_m]
    actual = exact_uc_distance(strategy, key_dist, params, n)
    if actual != expected:
        raise AssertionError(
            f"cell-wise maximum {expected} disagrees with joint evaluation {actual}"
        )
    return SearchResult(strategy, actual, bound, bound - actual, strategy.description, cells)
