"""Multi-round security budgets for the two mutual-authentication schemes.

Per round, a key-exchange failure budget eps1 composes with the
authentication failure budget, and the authentication keys of round i+1
inherit the imperfection of round i's output.  Chaining the recurrences gives
closed forms:

straightforward (two one-way tags, two keys per round)
    key_perfectness[i]  = (2^(i-1) - 1) eps1 + (2^i - 2) eps
    auth_security[i]    = (2^(i-1) - 1) eps1 + (2^i - 1) eps
    round_security[i]   = (2^i - 1) eps1 + (2^(i+1) - 2) eps      (exponential)

key-revealing round (one key per round), with eps_dot = eps + |T|/|K|
    key_perfectness[i]  = (i-1)(eps1 + eps_dot)
    auth_security[i]    = (i-1) eps1 + i eps_dot
    round_security[i]   = i (eps1 + eps_dot)                       (linear)

Both tables are always computed twice, by unrolling the recurrence and from
the closed form, in exact rational arithmetic; disagreement raises.  A
nonzero first-round key imperfection can be injected, which adds a
2^(i-1)-weighted (resp. constant) homogeneous term.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

_MAX_CROSSOVER_ITER = 1 << 20


@dataclass(frozen=True)
class BudgetParams:
    eps1: float
    eps: float
    tag_space: int
    key_space: int
    rounds: int
    eps_prime_first: float = 0.0

    def __post_init__(self):
        for name in ("eps1", "eps", "eps_prime_first"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if not 2 <= self.tag_space <= self.key_space:
            raise ValueError("need key_space >= tag_space >= 2")

    @property
    def eps_dot(self) -> Fraction:
        return Fraction(self.eps) + Fraction(self.tag_space, self.key_space)


@dataclass(frozen=True)
class BudgetRow:
    round: int
    key_perfectness: object
    auth_security: object
    round_security: object
    vacuous: bool = False

    def csv_row(self, scheme: str) -> str:
        return (
            f"{scheme},{self.round},{float(self.key_perfectness)!r},"
            f"{float(self.auth_security)!r},{float(self.round_security)!r},"
            f"{str(self.vacuous).lower()}"
        )


BUDGET_CSV_HEADER = "scheme,round,key_perfectness,auth_security,round_security,vacuous"


def _rows(params: BudgetParams, recurrence, closed, exact: bool) -> List[BudgetRow]:
    rows = []
    state = None
    for i in range(1, params.rounds + 1):
        state, rec = recurrence(i, state)
        clo = closed(i)
        if rec != clo:
            raise AssertionError(
                f"recurrence {rec} and closed form {clo} disagree at round {i}"
            )
        kp, auth, sec = rec
        if not exact:
            kp, auth, sec = float(kp), float(auth), float(sec)
        vacuous = sec > 1
        rows.append(BudgetRow(i, kp, auth, sec, vacuous))
        if vacuous:
            break
    return rows


def straightforward_table(params: BudgetParams, exact: bool = False) -> List[BudgetRow]:
    """Per-round budgets when each direction burns its own one-time key."""
    e1, e = Fraction(params.eps1), Fraction(params.eps)
    c = Fraction(params.eps_prime_first)

    def recurrence(i, state):
        kp = c if i == 1 else state
        auth = e + kp
        sec = e1 + 2 * auth
        return sec, (kp, auth, sec)

    def closed(i):
        pw = 1 << (i - 1)
        kp = (pw - 1) * e1 + (2 * pw - 2) * e + pw * c
        auth = (pw - 1) * e1 + (2 * pw - 1) * e + pw * c
        sec = (2 * pw - 1) * e1 + (4 * pw - 2) * e + 2 * pw * c
        return kp, auth, sec

    return _rows(params, recurrence, closed, exact)


def awr_table(params: BudgetParams, exact: bool = False) -> List[BudgetRow]:
    """Per-round budgets for the key-revealing round: one key, linear growth."""
    e1 = Fraction(params.eps1)
    ed = params.eps_dot
    c = Fraction(params.eps_prime_first)

    def recurrence(i, state):
        kp = c if i == 1 else state
        auth = ed + kp
        sec = e1 + auth
        return sec, (kp, auth, sec)

    def closed(i):
        kp = (i - 1) * (e1 + ed) + c
        auth = (i - 1) * e1 + i * ed + c
        sec = i * (e1 + ed) + c
        return kp, auth, sec

    return _rows(params, recurrence, closed, exact)


@dataclass(frozen=True)
class CrossoverReport:
    """Largest round index keeping each scheme's budget at or under the target;
    None means the budget never grows (degenerate all-zero parameters)."""

    rounds_straightforward: Optional[int]
    rounds_awr: Optional[int]


def crossover_report(params: BudgetParams, target: float) -> CrossoverReport:
    if not 0 < target <= 1:
        raise ValueError("target must lie in (0, 1]")
    tgt = Fraction(target)
    e1, e = Fraction(params.eps1), Fraction(params.eps)
    ed = params.eps_dot
    c = Fraction(params.eps_prime_first)

    # straightforward: strictly increasing once any parameter is nonzero
    if e1 == e == c == 0:
        straight = None
    else:
        straight = 0
        i = 1
        while i <= _MAX_CROSSOVER_ITER:
            pw = 1 << (i - 1)
            sec = (2 * pw - 1) * e1 + (4 * pw - 2) * e + 2 * pw * c
            if sec > tgt:
                break
            straight = i
            i += 1

    step = e1 + ed
    if step == 0:
        awr = None if c <= tgt else 0
    else:
        awr = max(0, int((tgt - c) / step)) if tgt >= c else 0
    return CrossoverReport(straight, awr)
