"""Attack strategies and success-rate estimation.

Each estimator runs either exhaustively (exact rational rates by enumerating
the whole key space, auto-selected while |K| <= 2^16) or by seeded Monte
Carlo with a counter-based generator, in which case the returned rate carries
a binomial standard error and is accepted within four of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import asu2
from .asu2 import AuthKey, FamilyParams, MessageBlocks
from .errors import SpaceTooLarge, StrategyNotFiring
from .protocol import Response
from .rng import philox_stream

EXHAUSTIVE_KEY_LIMIT = 1 << 16
_CHUNK = 1 << 16
ACCEPT_SIGMAS = 4.0


def _identity_tag(m, t):
    return m, t


def _identity_response(r):
    return r


@dataclass
class Channel:
    """Wire model: functions the adversary applies to in-flight values."""

    tamper_tag: Callable = _identity_tag
    tamper_response: Callable = _identity_response

    @classmethod
    def identity(cls) -> "Channel":
        return cls()


@dataclass(frozen=True)
class XorSubstitution:
    """Replace (m, t) with (m xor deltas, t xor delta_tag), blockwise."""

    delta_blocks: tuple
    delta_tag: int

    def __call__(self, msg: MessageBlocks, t: int):
        d = self.delta_blocks + (0,) * (msg.block_count - len(self.delta_blocks))
        blocks = tuple(b ^ x for b, x in zip(msg.blocks, d))
        return MessageBlocks(blocks), t ^ self.delta_tag


def consistent_key_substitution(params: FamilyParams, block_delta: int = 1) -> XorSubstitution:
    """The strongest classical substitution: answer with a key consistent
    with the observed pair.

    Deterministically picking the consistent key at evaluation point a = 1
    and shifting block 1 by ``block_delta`` collapses to an XOR rule, because
    evaluation at a fixed point is linear in the message.
    """
    if not 0 < block_delta < params.tag_space:
        raise ValueError("block_delta must be a nonzero field element")
    return XorSubstitution((block_delta,), block_delta)


@dataclass(frozen=True)
class AdversaryStrategy:
    """A named attack: impersonation pair, substitution rule, or response forgery."""

    kind: str
    description: str = ""
    message: Optional[MessageBlocks] = None
    tag_value: Optional[int] = None
    rule: Optional[Callable] = None

    @classmethod
    def impersonate(cls, message: MessageBlocks, tag_value: int, description: str = ""):
        return cls("impersonate", description, message=message, tag_value=tag_value)

    @classmethod
    def substitute(cls, rule: Callable, description: str = ""):
        return cls("substitute", description, rule=rule)

    @classmethod
    def respond_forge(cls, rule: Callable, description: str = ""):
        return cls("respond_forge", description, rule=rule)


@dataclass
class RateEstimate:
    """Estimated (or exact) attack success rate, with its acceptance bound."""

    attack: str
    params_desc: str
    successes: int
    trials: int
    rate: object  # Fraction when exhaustive, float when sampled
    stderr: float
    bound: object
    passed: bool
    method: str = "exhaustive"

    CSV_HEADER = "attack,params,trials,successes,rate,stderr,bound,pass"

    def csv_row(self) -> str:
        return (
            f"{self.attack},{self.params_desc},{self.trials},{self.successes},"
            f"{float(self.rate)!r},{self.stderr!r},{float(self.bound)!r},"
            f"{str(self.passed).lower()}"
        )


def _params_desc(params: FamilyParams) -> str:
    return f"tag_bits={params.tag_bits};max_blocks={params.max_blocks}"


def _pick_method(method: str, params: FamilyParams) -> str:
    if method == "auto":
        return "exhaustive" if params.key_space <= EXHAUSTIVE_KEY_LIMIT else "sampled"
    if method not in ("exhaustive", "sampled"):
        raise ValueError(f"unknown method {method!r}")
    return method


def _stderr(rate: float, trials: int) -> float:
    return math.sqrt(max(rate * (1.0 - rate), 0.0) / trials)


def estimate_impersonation(
    params: FamilyParams,
    trials: int,
    rng_seed: int = 0,
    message: Optional[MessageBlocks] = None,
    tag_value: int = 0,
    method: str = "auto",
) -> RateEstimate:
    """Success rate of submitting a fixed forged pair with no observed traffic."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    message = message or MessageBlocks((0,))
    method = _pick_method(method, params)
    bound = Fraction(1, params.tag_space)
    if method == "exhaustive":
        T = params.tag_space
        a = np.repeat(np.arange(T, dtype=np.uint64), T)
        b = np.tile(np.arange(T, dtype=np.uint64), T)
        tags = asu2.tag_many(a, b, message, params)
        successes = int((tags == tag_value).sum())
        rate = Fraction(successes, params.key_space)
        return RateEstimate(
            "impersonation", _params_desc(params), successes, params.key_space,
            rate, 0.0, bound, rate == bound, method,
        )
    successes = 0
    done = 0
    stream = 0
    while done < trials:
        n = min(_CHUNK, trials - done)
        gen = philox_stream(rng_seed, stream)
        a = gen.integers(0, params.tag_space, size=n, dtype=np.uint64)
        b = gen.integers(0, params.tag_space, size=n, dtype=np.uint64)
        tags = asu2.tag_many(a, b, message, params)
        successes += int((tags == tag_value).sum())
        done += n
        stream += 1
    rate = successes / trials
    err = _stderr(rate, trials)
    passed = abs(rate - float(bound)) <= ACCEPT_SIGMAS * err
    return RateEstimate(
        "impersonation", _params_desc(params), successes, trials,
        rate, err, bound, passed, method,
    )


def _message_index_blocks(idx: int, params: FamilyParams) -> MessageBlocks:
    T = params.tag_space
    blocks = []
    for _ in range(params.max_blocks):
        blocks.append(idx % T)
        idx //= T
    return MessageBlocks(tuple(blocks))


def estimate_substitution(
    params: FamilyParams,
    strategy,
    trials: int,
    rng_seed: int = 0,
    method: str = "auto",
) -> RateEstimate:
    """Success rate of replacing an observed honest pair under the given rule.

    ``strategy`` is a callable (MessageBlocks, tag) -> (MessageBlocks, tag),
    e.g. an AdversaryStrategy.rule or an XorSubstitution.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rule = strategy.rule if isinstance(strategy, AdversaryStrategy) else strategy
    method = _pick_method(method, params)
    bound = params.epsilon
    M = params.tag_space ** params.max_blocks
    if method == "exhaustive":
        if params.key_space * M > asu2.ENUMERATION_GUARD:
            raise SpaceTooLarge("exhaustive substitution space exceeds the guard")
        E = asu2._eval_table(params)  # (M, K)
        T = params.tag_space
        K = params.key_space
        # resolve the rule once per (message, tag) cell, then count keys
        successes = 0
        kidx = np.arange(K)
        for midx in range(M):
            msg = _message_index_blocks(midx, params)
            row = E[midx]
            m2_for_t = np.empty(T, dtype=np.int64)
            t2_for_t = np.empty(T, dtype=np.int64)
            for t in range(T):
                m2, t2 = rule(msg, t)
                if m2.blocks == msg.blocks and t2 == t:
                    raise StrategyNotFiring("rule returned its input pair")
                m2i = 0
                for blk in reversed(m2.blocks):
                    m2i = m2i * T + blk
                m2_for_t[t] = m2i
                t2_for_t[t] = t2
            successes += int((E[m2_for_t[row], kidx] == t2_for_t[row]).sum())
        total = M * K
        rate = Fraction(successes, total)
        return RateEstimate(
            "substitution", _params_desc(params), successes, total,
            rate, 0.0, bound, rate <= bound, method,
        )
    successes = 0
    done = 0
    stream = 0
    while done < trials:
        n = min(_CHUNK, trials - done)
        gen = philox_stream(rng_seed, stream)
        a = gen.integers(0, params.tag_space, size=n, dtype=np.uint64)
        b = gen.integers(0, params.tag_space, size=n, dtype=np.uint64)
        midx = gen.integers(0, M, size=n)
        for i in range(n):
            key = AuthKey(int(a[i]), int(b[i]))
            msg = _message_index_blocks(int(midx[i]), params)
            t = asu2.tag(key, msg, params)
            m2, t2 = rule(msg, t)
            if m2.blocks == msg.blocks and t2 == t:
                raise StrategyNotFiring("rule returned its input pair")
            if asu2.tag(key, m2, params) == t2:
                successes += 1
        done += n
        stream += 1
    rate = successes / trials
    err = _stderr(rate, trials)
    passed = rate <= float(bound) + ACCEPT_SIGMAS * err
    return RateEstimate(
        "substitution", _params_desc(params), successes, trials,
        rate, err, bound, passed, method,
    )


def xor_substitution_family(params: FamilyParams):
    """The enumerated substitution family: every single-block offset at every
    position, crossed with every tag offset."""
    T = params.tag_space
    for pos in range(params.max_blocks):
        for dm in range(1, T):
            for dt in range(T):
                deltas = tuple(dm if i == pos else 0 for i in range(pos + 1))
                yield XorSubstitution(deltas, dt)


def substitution_family_sweep(params: FamilyParams):
    """Exact success rate for every rule in the enumerated family (vectorized)."""
    M = params.tag_space ** params.max_blocks
    if params.key_space * M > asu2.ENUMERATION_GUARD:
        raise SpaceTooLarge("exhaustive substitution space exceeds the guard")
    E = asu2._eval_table(params)
    T = params.tag_space
    K = params.key_space
    idx = np.arange(M)
    results = []
    for rule in xor_substitution_family(params):
        packed = 0
        for blk in reversed(rule.delta_blocks):
            packed = packed * T + blk
        perm = idx ^ packed
        successes = int((E[perm] == (E ^ np.uint8(rule.delta_tag))).sum())
        rate = Fraction(successes, M * K)
        results.append((rule, rate))
    return results


def estimate_response_forge(
    params: FamilyParams,
    trials: int,
    rng_seed: int = 0,
    strategy: str = "consistent",
    method: str = "auto",
    message: Optional[MessageBlocks] = None,
) -> RateEstimate:
    """Success rate of forging the key-reveal response without seeing it.

    ``consistent``: the forger saw (m, t) and answers with a deterministic
    member of the key set consistent with that pair; the exhaustive optimum
    is exactly |T|/|K|.  ``blind``: a fixed guess with no observation, 1/|K|.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if strategy not in ("consistent", "blind"):
        raise ValueError(f"unknown forge strategy {strategy!r}")
    message = message or MessageBlocks((0,))
    method = _pick_method(method, params)
    T, K = params.tag_space, params.key_space
    bound = Fraction(T, K) if strategy == "consistent" else Fraction(1, K)
    if method == "exhaustive":
        # the deterministic consistent member at evaluation point a = 0:
        # its offset is t minus the (vanishing) polynomial part
        zero_eval = asu2.tag(AuthKey(0, 0), message, params)
        successes = 0
        for a in range(T):
            for b in range(T):
                key = AuthKey(a, b)
                t = asu2.tag(key, message, params)
                guess = AuthKey(0, t ^ zero_eval) if strategy == "consistent" else AuthKey(0, 0)
                successes += guess == key
        rate = Fraction(successes, K)
        return RateEstimate(
            f"response-forge-{strategy}", _params_desc(params), successes, K,
            rate, 0.0, bound, rate == bound, method,
        )
    successes = 0
    done = 0
    stream = 0
    base = asu2.tag(AuthKey(0, 0), message, params)
    while done < trials:
        n = min(_CHUNK, trials - done)
        gen = philox_stream(rng_seed, stream)
        a = gen.integers(0, T, size=n, dtype=np.uint64)
        b = gen.integers(0, T, size=n, dtype=np.uint64)
        if strategy == "consistent":
            tags = asu2.tag_many(a, b, message, params)
            successes += int(((a == 0) & (b == (tags ^ np.uint64(base)))).sum())
        else:
            successes += int(((a == 0) & (b == 0)).sum())
        done += n
        stream += 1
    rate = successes / trials
    err = _stderr(rate, trials)
    passed = abs(rate - float(bound)) <= ACCEPT_SIGMAS * err
    return RateEstimate(
        f"response-forge-{strategy}", _params_desc(params), successes, trials,
        rate, err, bound, passed, method,
    )


def bernoulli_tag_flip_channel(prob: float, seed: int, stream: int = 0) -> Channel:
    """Channel flipping the lowest tag bit with the given probability."""
    gen = philox_stream(seed, stream)

    def tamper(m, t):
        return (m, t ^ 1) if gen.random() < prob else (m, t)

    return Channel(tamper_tag=tamper)


def bernoulli_response_corrupt_channel(prob: float, seed: int, stream: int = 0) -> Channel:
    """Channel replacing the response with bottom with the given probability."""
    gen = philox_stream(seed, stream)

    def tamper(r: Response) -> Response:
        return Response(None) if gen.random() < prob else r

    return Channel(tamper_response=tamper)
