"""Round state machines: completeness, tampering, hidden rejects, key budget."""

import random

import pytest

from awrauth import asu2
from awrauth.adversary import Channel
from awrauth.asu2 import AuthKey, FamilyParams, MessageBlocks
from awrauth.errors import InvalidState, PoolExhausted
from awrauth.keys import KeyPool
from awrauth.protocol import (
    ACCEPTED,
    REJECTED,
    REASON_COUNTERPART,
    REASON_TAMPER,
    AliceSession,
    BobSession,
    Response,
    run_round,
)

P8 = FamilyParams(tag_bits=8, max_blocks=16)
P4 = FamilyParams(tag_bits=4, max_blocks=3)


def fresh_pool(n=4, params=P8, seed=1):
    return KeyPool.from_seed(seed, n, params)


def transcript(data=b"hello world", params=P8):
    return MessageBlocks.from_bytes(data, params)


def test_alice_tag_delegates_to_family():
    key = AuthKey(0x21, 0x7E)
    m = transcript()
    s = AliceSession(P8, key, m)
    assert s.send_tag() == asu2.tag(key, m, P8)
    assert s.state == "tag-sent"


def test_same_key_same_transcript_same_tag():
    key = AuthKey(0x11, 0x22)
    t1 = AliceSession(P8, key, transcript()).send_tag()
    t2 = AliceSession(P8, key, transcript()).send_tag()
    assert t1 == t2


def test_honest_exchange_both_modes():
    for mode in ("plain", "hidden"):
        key = AuthKey(0x5A, 0x3C)
        alice = AliceSession(P8, key, transcript())
        bob = BobSession(P8, key, transcript())
        t = alice.send_tag()
        r = bob.receive_tag(t, mode)
        assert bob.verdict == ACCEPTED
        assert r.key == key
        final = alice.receive_response(r)
        assert final.verdict == ACCEPTED and final.reason is None


def test_bob_rejects_any_tag_bit_flip():
    key = AuthKey(0x5A, 0x3C)
    bob = BobSession(P8, key, transcript())
    honest = asu2.tag(key, transcript(), P8)
    r = bob.receive_tag(honest ^ 1, "plain")
    assert bob.verdict == REJECTED
    assert r.is_bottom


def test_hidden_reject_key_verifies_received_tag():
    key = AuthKey(0x5A, 0x3C)
    m = transcript()
    honest = asu2.tag(key, m, P8)
    bob = BobSession(P8, key, m)
    r = bob.receive_tag(honest ^ 0x40, "hidden")
    assert bob.verdict == REJECTED
    assert r.key is not None and r.key != key
    assert asu2.tag(r.key, m, P8) == honest ^ 0x40


def test_hidden_reject_exhaustive_small_field():
    m = MessageBlocks((0x3, 0xA))
    for a in range(16):
        for b in range(16):
            key = AuthKey(a, b)
            honest = asu2.tag(key, m, P4)
            for received in range(16):
                if received == honest:
                    continue
                bob = BobSession(P4, key, m)
                r = bob.receive_tag(received, "hidden")
                assert r.key != key
                assert asu2.tag(r.key, m, P4) == received


def test_hidden_response_length_constant():
    key = AuthKey(0x5A, 0x3C)
    m = transcript()
    honest = asu2.tag(key, m, P8)
    accept = BobSession(P8, key, m).receive_tag(honest, "hidden")
    reject = BobSession(P8, key, m).receive_tag(honest ^ 2, "hidden")
    assert len(accept.serialize(P8)) == len(reject.serialize(P8)) == 2


def test_alice_response_verdicts_and_reasons():
    key = AuthKey(0x10, 0x20)

    def alice():
        s = AliceSession(P8, key, transcript())
        s.send_tag()
        return s

    assert alice().receive_response(Response(key)).verdict == ACCEPTED
    got = alice().receive_response(Response(None))
    assert (got.verdict, got.reason) == (REJECTED, REASON_COUNTERPART)
    got = alice().receive_response(Response(AuthKey(0x10, 0x21)))
    assert (got.verdict, got.reason) == (REJECTED, REASON_TAMPER)


def test_response_serialize_parse_roundtrip():
    assert Response.parse(Response(None).serialize(P8), P8).is_bottom
    r = Response(AuthKey(0xAB, 0xCD))
    assert Response.parse(r.serialize(P8), P8) == r


def test_state_machine_rejects_out_of_order_calls():
    key = AuthKey(1, 2)
    alice = AliceSession(P8, key, transcript())
    with pytest.raises(InvalidState):
        alice.receive_response(Response(key))
    assert alice.state == "init"
    alice.send_tag()
    with pytest.raises(InvalidState):
        alice.send_tag()
    assert alice.state == "tag-sent"
    bob = BobSession(P8, key, transcript())
    with pytest.raises(InvalidState):
        bob.finish()
    bob.receive_tag(0, "plain")
    with pytest.raises(InvalidState):
        bob.receive_tag(0, "plain")
    assert bob.state == "responded"


def test_state_machine_random_call_sequences_never_corrupt():
    rng = random.Random(42)
    key = AuthKey(3, 4)
    for _ in range(200):
        alice = AliceSession(P8, key, transcript())
        bob = BobSession(P8, key, transcript())
        for _ in range(6):
            op = rng.choice(["tag", "resp", "recv", "finish"])
            before = (alice.state, bob.state)
            try:
                if op == "tag":
                    alice.send_tag()
                elif op == "resp":
                    alice.receive_response(Response(key))
                elif op == "recv":
                    bob.receive_tag(0, "plain")
                else:
                    bob.finish()
            except InvalidState:
                assert (alice.state, bob.state) == before
        assert alice.state in ("init", "tag-sent", "accepted", "rejected")
        assert bob.state in ("init", "responded", "done")


def test_run_round_honest_awr():
    pool = fresh_pool()
    out = run_round(transcript(), transcript(), pool, Channel.identity(),
                    mode="plain", scheme="awr", params=P8)
    assert out.both_accepted and out.keys_consumed == 1
    assert pool.consumed_count == 1


def test_run_round_honest_straightforward():
    pool = fresh_pool()
    out = run_round(transcript(), transcript(), pool, Channel.identity(),
                    mode="plain", scheme="straightforward", params=P8)
    assert out.both_accepted and out.keys_consumed == 2
    assert pool.consumed_count == 2


def test_run_round_completeness_random_fixtures():
    rng = random.Random(5)
    for scheme, mode in [("awr", "plain"), ("awr", "hidden"),
                         ("straightforward", "plain"), ("straightforward", "hidden")]:
        for _ in range(20):
            data = rng.randbytes(rng.randrange(0, 13))
            pool = fresh_pool(seed=rng.randrange(1 << 30))
            out = run_round(transcript(data), transcript(data), pool,
                            Channel.identity(), mode=mode, scheme=scheme, params=P8)
            assert out.both_accepted
            assert out.keys_consumed == (1 if scheme == "awr" else 2)


def test_run_round_transcript_mismatch_awr_plain():
    pool = fresh_pool()
    out = run_round(transcript(b"abc"), transcript(b"abd"), pool,
                    Channel.identity(), mode="plain", scheme="awr", params=P8)
    assert out.alice_verdict == REJECTED and out.bob_verdict == REJECTED
    assert out.reason == REASON_COUNTERPART
    assert out.keys_consumed == 1


def test_run_round_transcript_mismatch_hidden_reads_as_tamper():
    pool = fresh_pool()
    out = run_round(transcript(b"abc"), transcript(b"abd"), pool,
                    Channel.identity(), mode="hidden", scheme="awr", params=P8)
    assert out.alice_verdict == REJECTED and out.bob_verdict == REJECTED
    assert out.reason == REASON_TAMPER


def test_run_round_keys_consumed_even_when_rejected():
    pool = fresh_pool()
    run_round(transcript(b"x"), transcript(b"y"), pool, Channel.identity(),
              mode="plain", scheme="straightforward", params=P8)
    assert pool.consumed_count == 2


def test_run_round_pool_exhaustion():
    pool = KeyPool([])
    with pytest.raises(PoolExhausted):
        run_round(transcript(), transcript(), pool, Channel.identity(),
                  mode="plain", scheme="awr", params=P8)


def test_no_key_reuse_across_rounds():
    pool = fresh_pool(n=40)
    for _ in range(20):
        run_round(transcript(), transcript(), pool, Channel.identity(),
                  mode="plain", scheme="awr", params=P8)
    log = pool.handout_log
    assert len(log) == 20 and len(set(log)) == 20


def test_tag_tamper_channel_rejects():
    flip = Channel(tamper_tag=lambda m, t: (m, t ^ 1))
    pool = fresh_pool()
    out = run_round(transcript(), transcript(), pool, flip,
                    mode="plain", scheme="awr", params=P8)
    assert out.alice_verdict == REJECTED and out.bob_verdict == REJECTED


def test_response_tamper_channel_rejects_alice_only():
    steal = Channel(tamper_response=lambda r: Response(AuthKey(0, 0)))
    pool = fresh_pool()
    out = run_round(transcript(), transcript(), pool, steal,
                    mode="plain", scheme="awr", params=P8)
    assert out.bob_verdict == ACCEPTED
    assert out.alice_verdict == REJECTED and out.reason == REASON_TAMPER


def test_csv_row_shape():
    pool = fresh_pool()
    out = run_round(transcript(), transcript(), pool, Channel.identity(),
                    mode="plain", scheme="awr", params=P8, round_index=7)
    row = out.csv_row()
    assert row.split(",") == ["7", "awr", "plain", "accepted", "accepted", "", "1"]
