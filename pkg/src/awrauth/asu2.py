"""Polynomial hashing over binary extension fields.

The tag family is ``h_(a,b)(m) = b XOR sum_i m_i * a^i`` (i = 1..L) with both
key halves and all blocks living in GF(2^tag_bits).  Two distinct messages,
viewed as coefficient vectors of length ``max_blocks`` (shorter messages are
zero-extended), disagree in a nonzero polynomial of degree at most L, so any
single observed tag constrains a second forgery to at most L consistent
evaluation points: the family is (L/|T|)-almost-strongly-universal, and the
uniform offset ``b`` makes single-tag outputs exactly uniform.

``check_asu2`` verifies both defining conditions by brute-force enumeration
over every key and every distinct message, with no reliance on the algebra
above.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numba import njit

from .errors import OverlongMessage, SpaceTooLarge

# Fixed low-weight irreducible reduction polynomials, top bit included.
# Widths 2-4 exist for in-memory exhaustive testing; serialization requires
# a multiple of 8.
REDUCTION_POLYNOMIALS = {
    2: 0b111,                       # x^2 + x + 1
    3: 0b1011,                      # x^3 + x + 1
    4: 0b10011,                     # x^4 + x + 1
    8: 0x11B,                       # x^8 + x^4 + x^3 + x + 1
    16: (1 << 16) | 0x2B,           # x^16 + x^5 + x^3 + x + 1
    32: (1 << 32) | 0x8D,           # x^32 + x^7 + x^3 + x^2 + 1
    64: (1 << 64) | 0x1B,           # x^64 + x^4 + x^3 + x + 1
    128: (1 << 128) | 0x87,         # x^128 + x^7 + x^2 + x + 1
}

# Exhaustive-check guard: |T|^2 * |M| with |M| = |T|^max_blocks.
ENUMERATION_GUARD = 1 << 24


@dataclass(frozen=True)
class FamilyParams:
    """Parameters selecting one member of the tag-family lattice.

    ``epsilon`` is derived, never supplied: max_blocks / |T|.
    """

    tag_bits: int
    max_blocks: int
    epsilon: Fraction = field(init=False)

    def __post_init__(self):
        if self.tag_bits not in REDUCTION_POLYNOMIALS:
            raise ValueError(
                f"unsupported tag_bits={self.tag_bits}; "
                f"choose one of {sorted(REDUCTION_POLYNOMIALS)}"
            )
        if self.max_blocks < 1:
            raise ValueError("max_blocks must be >= 1")
        eps = Fraction(self.max_blocks, 1 << self.tag_bits)
        if eps > 1:
            raise ValueError("max_blocks may not exceed the tag space size")
        object.__setattr__(self, "epsilon", eps)

    @property
    def tag_space(self) -> int:
        return 1 << self.tag_bits

    @property
    def key_space(self) -> int:
        return 1 << (2 * self.tag_bits)

    @property
    def reduction_poly(self) -> int:
        return REDUCTION_POLYNOMIALS[self.tag_bits]

    @property
    def tag_bytes(self) -> int:
        if self.tag_bits % 8:
            raise ValueError("serialization requires tag_bits to be a multiple of 8")
        return self.tag_bits // 8


@dataclass(frozen=True)
class AuthKey:
    """One family index: the pair (a, b), each tag_bits wide."""

    a: int
    b: int

    def to_bytes(self, params: FamilyParams) -> bytes:
        w = params.tag_bytes
        return self.a.to_bytes(w, "big") + self.b.to_bytes(w, "big")

    @classmethod
    def from_bytes(cls, data: bytes, params: FamilyParams) -> "AuthKey":
        w = params.tag_bytes
        if len(data) != 2 * w:
            raise ValueError(f"key must be exactly {2 * w} bytes")
        return cls(int.from_bytes(data[:w], "big"), int.from_bytes(data[w:], "big"))


@dataclass(frozen=True)
class MessageBlocks:
    """A message as a sequence of field elements, block 1 first.

    Shorter sequences hash identically to their zero-extension, so the
    canonical byte-string padding must (and does) end every message on a
    nonzero block.
    """

    blocks: tuple

    def __post_init__(self):
        if len(self.blocks) == 0:
            raise ValueError("a message has at least one block")
        object.__setattr__(self, "blocks", tuple(int(b) for b in self.blocks))

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    @classmethod
    def from_bytes(cls, data: bytes, params: FamilyParams) -> "MessageBlocks":
        """Canonical injective padding of a byte string.

        Layout: one header block carrying the bit length (big-endian, reduced
        to block width), then the content followed by 0x80 and zero bytes up
        to a block boundary.  The 0x80 marker lands in the final block, so
        padded messages never end in a zero block and distinct byte strings
        yield distinct coefficient vectors.
        """
        w = params.tag_bytes
        header = (8 * len(data)) & (params.tag_space - 1)
        padded = data + b"\x80"
        if len(padded) % w:
            padded += b"\x00" * (w - len(padded) % w)
        blocks = [header]
        for i in range(0, len(padded), w):
            blocks.append(int.from_bytes(padded[i : i + w], "big"))
        if len(blocks) > params.max_blocks:
            raise OverlongMessage(
                f"{len(blocks)} blocks exceed max_blocks={params.max_blocks}"
            )
        return cls(tuple(blocks))

    def to_bytes(self, params: FamilyParams) -> bytes:
        w = params.tag_bytes
        return b"".join(b.to_bytes(w, "big") for b in self.blocks)


def gf_mul(x: int, y: int, params: FamilyParams) -> int:
    """Product of x and y in GF(2^tag_bits) under the fixed reduction polynomial."""
    w = params.tag_bits
    if x >> w or y >> w or x < 0 or y < 0:
        raise ValueError("operands must fit in tag_bits bits")
    return _gf_mul_raw(x, y, w, params.reduction_poly)


def _gf_mul_raw(x: int, y: int, w: int, poly: int) -> int:
    acc = 0
    while y:
        if y & 1:
            acc ^= x
        y >>= 1
        x <<= 1
        if x >> w:
            x ^= poly
    return acc


def tag(key: AuthKey, msg: MessageBlocks, params: FamilyParams) -> int:
    """Evaluate h_(a,b)(m) = b XOR sum_i m_i a^i by Horner's rule."""
    if msg.block_count > params.max_blocks:
        raise OverlongMessage(
            f"{msg.block_count} blocks exceed max_blocks={params.max_blocks}"
        )
    w, poly = params.tag_bits, params.reduction_poly
    acc = 0
    for blk in reversed(msg.blocks):
        if blk >> w or blk < 0:
            raise ValueError("block does not fit in tag_bits bits")
        acc = _gf_mul_raw(acc ^ blk, key.a, w, poly)
    return acc ^ key.b


def failure_key(key: AuthKey, msg: MessageBlocks, t: int, params: FamilyParams) -> AuthKey:
    """A key k' != key with tag(k', msg) = t.

    Selection rule: flip the lowest bit of a, then solve for b.  Always
    succeeds for this family (|K| = |T|^2), so NoAlternativeKey is never
    raised here; it exists for degenerate families only.
    """
    a2 = key.a ^ 1
    b2 = t ^ tag(AuthKey(a2, 0), msg, params)
    return AuthKey(a2, b2)


# ---------------------------------------------------------------------------
# Exhaustive verification of the two defining conditions.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckReport:
    """Outcome of the exhaustive two-condition check."""

    condition1_exact: bool
    condition2_max: Fraction
    epsilon: Fraction
    msg_space: int
    key_space: int

    @property
    def passed(self) -> bool:
        return self.condition1_exact and self.condition2_max <= self.epsilon


def message_space(params: FamilyParams):
    """All distinct messages: coefficient vectors of length max_blocks.

    Variable-length block sequences alias under zero-extension, so the
    canonical enumeration is over full-length vectors; index digits are
    little-endian (block 1 = index mod |T|).
    """
    T = params.tag_space
    for idx in range(T ** params.max_blocks):
        blocks = []
        v = idx
        for _ in range(params.max_blocks):
            blocks.append(v % T)
            v //= T
        yield MessageBlocks(tuple(blocks))


def _mul_table(params: FamilyParams) -> np.ndarray:
    w, poly = params.tag_bits, params.reduction_poly
    T = params.tag_space
    tbl = np.zeros((T, T), dtype=np.uint8)
    for x in range(T):
        for y in range(x, T):
            v = _gf_mul_raw(x, y, w, poly)
            tbl[x, y] = v
            tbl[y, x] = v
    return tbl


def _eval_table(params: FamilyParams) -> np.ndarray:
    """E[m, k] = h_k(m) over the canonical message space; keys k = a*|T| + b."""
    T = params.tag_space
    L = params.max_blocks
    mul = _mul_table(params)
    a = np.arange(T, dtype=np.uint8)
    # digits[m, i] = block i+1 of message m
    idx = np.arange(T ** L)
    digits = np.empty((T ** L, L), dtype=np.uint8)
    for i in range(L):
        digits[:, i] = idx % T
        idx //= T
    acc = np.zeros((T ** L, T), dtype=np.uint8)  # indexed by (m, a)
    for i in range(L - 1, -1, -1):
        acc ^= digits[:, i][:, None]
        acc = mul[acc, a[None, :]]
    # expand offset b: E[m, a*T + b] = acc[m, a] ^ b
    b = np.arange(T, dtype=np.uint8)
    E = acc[:, :, None] ^ b[None, None, :]
    return E.reshape(T ** L, T * T)


@njit(cache=True)
def _max_joint_count(E, tbits):
    """Max over unordered message pairs and tag pairs of the joint key count.

    Valid as the condition-2 numerator when condition 1 holds exactly (the
    denominator |H1| is then constant and the joint count is symmetric).
    """
    M, K = E.shape
    T = 1 << tbits
    counts = np.zeros(T * T, dtype=np.uint32)
    best = 0
    for m1 in range(M):
        row1 = E[m1]
        for m2 in range(m1 + 1, M):
            row2 = E[m2]
            local = 0
            for k in range(K):
                c = (np.uint32(row1[k]) << tbits) | np.uint32(row2[k])
                counts[c] += 1
                if counts[c] > local:
                    local = counts[c]
            if local > best:
                best = local
            for k in range(K):
                counts[(np.uint32(row1[k]) << tbits) | np.uint32(row2[k])] = 0
    return best


@njit(cache=True)
def _max_ratio_general(E, dens, tbits):
    """Max of joint count / |H1| over ordered pairs, for non-uniform |H1|.

    Returns (numerator, denominator) of the extremal ratio, compared by
    cross-multiplication.
    """
    M, K = E.shape
    T = 1 << tbits
    counts = np.zeros(T * T, dtype=np.uint32)
    best_n = np.uint64(0)
    best_d = np.uint64(1)
    for m1 in range(M):
        row1 = E[m1]
        for m2 in range(M):
            if m2 == m1:
                continue
            row2 = E[m2]
            for k in range(K):
                counts[(np.uint32(row1[k]) << tbits) | np.uint32(row2[k])] += 1
            for t1 in range(T):
                d = np.uint64(dens[m1, t1])
                if d == 0:
                    continue
                for t2 in range(T):
                    n = np.uint64(counts[(t1 << tbits) | t2])
                    if n * best_d > best_n * d:
                        best_n, best_d = n, d
            for k in range(K):
                counts[(np.uint32(row1[k]) << tbits) | np.uint32(row2[k])] = 0
    return best_n, best_d


def check_asu2(params: FamilyParams) -> CheckReport:
    """Brute-force both defining conditions over the full key and message spaces."""
    T = params.tag_space
    K = params.key_space
    M = T ** params.max_blocks
    if K * M > ENUMERATION_GUARD:
        raise SpaceTooLarge(
            f"|K|*|M| = {K * M} exceeds the enumeration guard {ENUMERATION_GUARD}"
        )
    E = _eval_table(params)
    # condition 1: every (m, t) cell holds exactly |K|/|T| keys
    offs = np.arange(M, dtype=np.int64)[:, None] * T
    dens = np.bincount((E.astype(np.int64) + offs).ravel(), minlength=M * T)
    dens = dens.reshape(M, T)
    condition1 = bool((dens == K // T).all())
    if M == 1:
        # a single message has no pair to test; condition 2 is vacuous
        return CheckReport(condition1, Fraction(0), params.epsilon, M, K)
    if condition1:
        worst = int(_max_joint_count(E, params.tag_bits))
        condition2 = Fraction(worst, K // T)
    else:
        n, d = _max_ratio_general(E, dens.astype(np.uint32), params.tag_bits)
        condition2 = Fraction(int(n), int(d))
    return CheckReport(condition1, condition2, params.epsilon, M, K)


# ---------------------------------------------------------------------------
# Vectorized evaluation for the sampling estimators (widths up to 32 bits).
# ---------------------------------------------------------------------------


def tag_many(a: np.ndarray, b: np.ndarray, msg: MessageBlocks, params: FamilyParams) -> np.ndarray:
    """tag((a_i, b_i), msg) for arrays of key halves, as uint64."""
    if params.tag_bits > 32:
        raise ValueError("vectorized evaluation supports tag_bits <= 32")
    if msg.block_count > params.max_blocks:
        raise OverlongMessage(
            f"{msg.block_count} blocks exceed max_blocks={params.max_blocks}"
        )
    a = np.asarray(a, dtype=np.uint64)
    acc = np.zeros_like(a)
    for blk in reversed(msg.blocks):
        acc = _gf_mul_vec(acc ^ np.uint64(blk), a, params)
    return acc ^ np.asarray(b, dtype=np.uint64)


def _gf_mul_vec(x: np.ndarray, y: np.ndarray, params: FamilyParams) -> np.ndarray:
    """Carry-less multiply plus reduction on uint64 arrays."""
    w = params.tag_bits
    poly = np.uint64(params.reduction_poly)
    one = np.uint64(1)
    acc = np.zeros_like(x)
    for i in range(w):
        bit = (y >> np.uint64(i)) & one
        acc ^= bit * (x << np.uint64(i))
    for i in range(2 * w - 2, w - 1, -1):
        bit = (acc >> np.uint64(i)) & one
        acc ^= bit * (poly << np.uint64(i - w))
    return acc
