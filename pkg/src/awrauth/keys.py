"""Key distributions, closeness-to-uniform, and the one-time key pool.

Distributions carry exact ``Fraction`` probabilities whenever exactness
matters (the enumeration modules insist on it) and plain floats otherwise;
all operations preserve whichever arithmetic they are given.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .asu2 import AuthKey, FamilyParams
from .errors import DimensionMismatch, ParamOutOfRange, PoolExhausted
from .rng import philox_stream

_SUM_TOL = 1e-12


@dataclass(frozen=True)
class KeyDistribution:
    """Probability distribution over key indices 0..|K|-1."""

    probs: tuple
    key_space_size: int

    def __post_init__(self):
        if len(self.probs) != self.key_space_size:
            raise DimensionMismatch("probability vector length must equal |K|")
        if any(p < 0 for p in self.probs):
            raise ValueError("probabilities must be nonnegative")
        total = sum(self.probs)
        if isinstance(total, Fraction):
            if total != 1:
                raise ValueError(f"probabilities sum to {total}, not 1")
        elif abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"probabilities sum to {total}, not 1")
        object.__setattr__(self, "probs", tuple(self.probs))

    @classmethod
    def uniform(cls, key_space_size: int) -> "KeyDistribution":
        p = Fraction(1, key_space_size)
        return cls((p,) * key_space_size, key_space_size)

    def prob(self, index: int):
        return self.probs[index]

    def save_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["key_index", "probability"])
            for i, p in enumerate(self.probs):
                w.writerow([i, repr(float(p)) if not isinstance(p, Fraction) else str(p)])

    @classmethod
    def load_csv(cls, path) -> "KeyDistribution":
        probs = {}
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                probs[int(row["key_index"])] = Fraction(row["probability"])
        n = max(probs) + 1
        return cls(tuple(probs.get(i, Fraction(0)) for i in range(n)), n)


def trace_distance(p: KeyDistribution, q: KeyDistribution):
    """Statistical distance: half the L1 difference of the two distributions."""
    if p.key_space_size != q.key_space_size:
        raise DimensionMismatch(
            f"key spaces differ: {p.key_space_size} vs {q.key_space_size}"
        )
    return sum(abs(a - b) for a, b in zip(p.probs, q.probs)) / 2


def epsilon_perfectness(p: KeyDistribution):
    """Trace distance to the uniform distribution over the same key space."""
    return trace_distance(p, KeyDistribution.uniform(p.key_space_size))


def biased_distribution(kind: str, key_space_size: int, param=None) -> KeyDistribution:
    """Test fixtures for imperfect key sources.

    ``uniform``            exact uniform (perfectness 0).
    ``point_shift``        adds ``param`` to key 0, spreads the deficit evenly
                           over the remaining keys (perfectness exactly param).
    ``leak_bits``          uniform over the first |K|/2^param keys, as if
                           ``param`` bits leaked (perfectness 1 - 2^-param).
    """
    n = key_space_size
    if kind == "uniform":
        return KeyDistribution.uniform(n)
    if kind == "point_shift":
        delta = Fraction(param)
        if not 0 <= delta <= 1 - Fraction(1, n):
            raise ParamOutOfRange("point_shift delta must be in [0, 1 - 1/|K|]")
        u = Fraction(1, n)
        rest = u - delta / (n - 1)
        return KeyDistribution((u + delta,) + (rest,) * (n - 1), n)
    if kind == "leak_bits":
        bits = int(param)
        if n & (n - 1):
            raise ParamOutOfRange("leak_bits requires a power-of-two key space")
        if not 0 <= bits <= n.bit_length() - 1:
            raise ParamOutOfRange("cannot leak more bits than the key has")
        support = n >> bits
        p = Fraction(1, support)
        return KeyDistribution((p,) * support + (Fraction(0),) * (n - support), n)
    raise ParamOutOfRange(f"unknown distribution kind {kind!r}")


@dataclass
class KeyPool:
    """Inventory of one-time keys; every handout is recorded and final."""

    available: list
    epsilon_prime_per_key: Fraction = Fraction(0)
    consumed_count: int = 0
    handout_log: list = field(default_factory=list)

    def draw(self) -> AuthKey:
        if not self.available:
            raise PoolExhausted("no keys left; abort the round")
        key = self.available.pop(0)
        self.consumed_count += 1
        self.handout_log.append(key)
        return key

    def push(self, key: AuthKey) -> None:
        """Refill with fresh key material (the key source is the caller's)."""
        self.available.append(key)

    def __len__(self) -> int:
        return len(self.available)

    @classmethod
    def from_file(cls, path, params: FamilyParams, epsilon_prime=Fraction(0)) -> "KeyPool":
        """Load concatenated fixed-width keys (a then b, big-endian each)."""
        data = Path(path).read_bytes()
        width = 2 * params.tag_bytes
        if len(data) % width:
            raise ValueError(f"key file length must be a multiple of {width} bytes")
        keys = [
            AuthKey.from_bytes(data[i : i + width], params)
            for i in range(0, len(data), width)
        ]
        return cls(keys, epsilon_prime)

    @classmethod
    def from_seed(
        cls, seed: int, count: int, params: FamilyParams, epsilon_prime=Fraction(0)
    ) -> "KeyPool":
        """Deterministic pool from the counter-based generator, stream 0."""
        gen = philox_stream(seed, 0)
        hi = params.tag_space
        vals = gen.integers(0, hi, size=2 * count, dtype="uint64")
        keys = [AuthKey(int(vals[2 * i]), int(vals[2 * i + 1])) for i in range(count)]
        return cls(keys, epsilon_prime)

    def save_file(self, path, params: FamilyParams) -> None:
        Path(path).write_bytes(b"".join(k.to_bytes(params) for k in self.available))
