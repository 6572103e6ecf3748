"""Single-round mutual authentication state machines.

Two schemes are provided.  In the key-revealing round (``awr``), Alice sends
one tag over her transcript; Bob verifies it against his own transcript and
answers by disclosing the now-spent key (accept) or a failure response
(reject).  The `straightforward` comparison scheme runs one independent
tag exchange per direction and therefore consumes two keys.

A reject can travel in the clear (``plain`` mode, a bottom marker) or hidden
(``hidden`` mode): Bob reveals an alternative key consistent with the tag he
actually received, so a wire observer cannot test whether he accepted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import asu2
from .asu2 import AuthKey, FamilyParams, MessageBlocks
from .errors import InvalidState

ACCEPTED = "accepted"
REJECTED = "rejected"

REASON_COUNTERPART = "counterpart-reject"
REASON_TAMPER = "tamper"
REASON_TIMEOUT = "timeout"
REASON_TAG_MISMATCH = "tag-mismatch"


@dataclass(frozen=True)
class Response:
    """Bob's reply: a revealed key, or None for the bottom marker (plain mode)."""

    key: Optional[AuthKey]

    @property
    def is_bottom(self) -> bool:
        return self.key is None

    def serialize(self, params: FamilyParams) -> bytes:
        """Bottom is the empty payload; a key is its fixed-width encoding.

        Hidden mode never produces bottom, so its payloads are constant-length
        by construction.
        """
        return b"" if self.key is None else self.key.to_bytes(params)

    @classmethod
    def parse(cls, payload: bytes, params: FamilyParams) -> "Response":
        if payload == b"":
            return cls(None)
        return cls(AuthKey.from_bytes(payload, params))


@dataclass(frozen=True)
class FinalVerdict:
    verdict: str
    reason: Optional[str] = None


@dataclass
class AliceSession:
    """Initiator side: Init -> TagSent -> Accepted/Rejected."""

    params: FamilyParams
    key: AuthKey
    transcript: MessageBlocks
    state: str = "init"
    result: Optional[FinalVerdict] = None

    def send_tag(self) -> int:
        if self.state != "init":
            raise InvalidState(f"send_tag in state {self.state!r}")
        t = asu2.tag(self.key, self.transcript, self.params)
        self.state = "tag-sent"
        return t

    def receive_response(self, r: Response) -> FinalVerdict:
        if self.state != "tag-sent":
            raise InvalidState(f"receive_response in state {self.state!r}")
        if r.key == self.key:
            self.result = FinalVerdict(ACCEPTED)
        elif r.is_bottom:
            self.result = FinalVerdict(REJECTED, REASON_COUNTERPART)
        else:
            # any value other than the key or bottom is a failure
            self.result = FinalVerdict(REJECTED, REASON_TAMPER)
        self.state = self.result.verdict
        return self.result


@dataclass
class BobSession:
    """Responder side: Init -> Responded -> Done; verdict fixed on tag receipt."""

    params: FamilyParams
    key: AuthKey
    transcript: MessageBlocks
    state: str = "init"
    verdict: str = "pending"

    def receive_tag(self, t_received: int, mode: str = "plain") -> Response:
        if self.state != "init":
            raise InvalidState(f"receive_tag in state {self.state!r}")
        if mode not in ("plain", "hidden"):
            raise ValueError(f"unknown mode {mode!r}")
        expected = asu2.tag(self.key, self.transcript, self.params)
        if t_received == expected:
            self.verdict = ACCEPTED
            response = Response(self.key)
        else:
            self.verdict = REJECTED
            if mode == "hidden":
                # consistent with the tag Bob received, so it cannot be tested
                response = Response(
                    asu2.failure_key(self.key, self.transcript, t_received, self.params)
                )
            else:
                response = Response(None)
        self.state = "responded"
        return response

    def finish(self) -> None:
        if self.state != "responded":
            raise InvalidState(f"finish in state {self.state!r}")
        self.state = "done"


ROUND_CSV_HEADER = "round_index,scheme,mode,alice_verdict,bob_verdict,reason,keys_consumed"


@dataclass
class RoundOutcome:
    alice_verdict: str
    bob_verdict: str
    reason: Optional[str]
    keys_consumed: int
    scheme: str = "awr"
    mode: str = "plain"
    round_index: int = 0

    @property
    def both_accepted(self) -> bool:
        return self.alice_verdict == ACCEPTED and self.bob_verdict == ACCEPTED

    def csv_row(self) -> str:
        return (
            f"{self.round_index},{self.scheme},{self.mode},{self.alice_verdict},"
            f"{self.bob_verdict},{self.reason or ''},{self.keys_consumed}"
        )


def run_round(
    alice_transcript: MessageBlocks,
    bob_transcript: MessageBlocks,
    pool,
    channel,
    mode: str = "plain",
    scheme: str = "awr",
    params: FamilyParams = None,
    round_index: int = 0,
) -> RoundOutcome:
    """Run one in-process authentication round through a (possibly hostile) channel."""
    if params is None:
        raise ValueError("params is required")
    if scheme == "awr":
        key = pool.draw()
        alice = AliceSession(params, key, alice_transcript)
        bob = BobSession(params, key, bob_transcript)
        t = alice.send_tag()
        _, t_wire = channel.tamper_tag(alice_transcript, t)
        response = bob.receive_tag(t_wire, mode)
        r_wire = channel.tamper_response(response)
        final = alice.receive_response(r_wire)
        bob.finish()
        return RoundOutcome(
            final.verdict, bob.verdict, final.reason, 1, scheme, mode, round_index
        )
    if scheme == "straightforward":
        k1 = pool.draw()
        k2 = pool.draw()
        t_ab = asu2.tag(k1, alice_transcript, params)
        _, t_ab_wire = channel.tamper_tag(alice_transcript, t_ab)
        bob_ok = t_ab_wire == asu2.tag(k1, bob_transcript, params)
        t_ba = asu2.tag(k2, bob_transcript, params)
        _, t_ba_wire = channel.tamper_tag(bob_transcript, t_ba)
        alice_ok = t_ba_wire == asu2.tag(k2, alice_transcript, params)
        reason = None if (alice_ok and bob_ok) else REASON_TAG_MISMATCH
        return RoundOutcome(
            ACCEPTED if alice_ok else REJECTED,
            ACCEPTED if bob_ok else REJECTED,
            reason,
            2,
            scheme,
            mode,
            round_index,
        )
    raise ValueError(f"unknown scheme {scheme!r}")
