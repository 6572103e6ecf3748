"""Closed forms vs recurrences for the multi-round budget tables."""

import random
from fractions import Fraction

import pytest

from awrauth.budget import (
    BudgetParams,
    awr_table,
    crossover_report,
    straightforward_table,
)


def mk(eps1, eps, rounds=8, **kw):
    return BudgetParams(eps1=eps1, eps=eps, tag_space=2**32, key_space=2**64,
                        rounds=rounds, **kw)


def test_first_round_values():
    p = mk(1e-10, 1e-12)
    s = straightforward_table(p, exact=True)
    assert s[0].key_perfectness == 0
    assert s[0].auth_security == Fraction(1e-12)
    assert s[0].round_security == Fraction(1e-10) + 2 * Fraction(1e-12)
    a = awr_table(p, exact=True)
    assert a[0].key_perfectness == 0
    assert a[0].round_security == Fraction(1e-10) + p.eps_dot


def test_round_two_closed_form_substitution():
    p = mk(1e-10, 1e-12)
    s = straightforward_table(p, exact=True)
    assert s[1].round_security == 3 * Fraction(1e-10) + 6 * Fraction(1e-12)


def test_awr_linear_growth_exact():
    p = mk(1e-10, 1e-12, rounds=100)
    rows = awr_table(p, exact=True)
    step = Fraction(1e-10) + p.eps_dot
    assert rows[99].round_security == 100 * step
    diffs = {rows[i + 1].round_security - rows[i].round_security for i in range(99)}
    assert diffs == {step}


def test_awr_over_i_exactly_constant_in_rational_mode():
    p = mk(2e-9, 3e-11, rounds=64)
    rows = awr_table(p, exact=True)
    values = {row.round_security / row.round for row in rows}
    assert len(values) == 1


def test_straightforward_first_difference_identity():
    p = mk(7e-9, 2e-10, rounds=30)
    rows = straightforward_table(p, exact=True)
    want = Fraction(7e-9) + 2 * Fraction(2e-10)
    for i in range(len(rows) - 1):
        assert rows[i + 1].round_security - 2 * rows[i].round_security == want


def test_closed_form_recurrence_agree_random_params():
    rng = random.Random(123)
    for _ in range(100):
        eps1 = rng.random() * 1e-6
        eps = rng.random() * 1e-8
        p = mk(eps1, eps, rounds=64)
        # table builders raise if the two evaluations ever disagree
        straightforward_table(p, exact=True)
        awr_table(p, exact=True)


def test_monotone_growth():
    p = mk(1e-9, 1e-9, rounds=20)
    for rows in (straightforward_table(p, exact=True), awr_table(p, exact=True)):
        for a, b in zip(rows, rows[1:]):
            assert b.round_security > a.round_security
            assert b.key_perfectness >= a.key_perfectness


def test_growth_classes():
    p = mk(1e-10, 1e-12, rounds=50)
    srows = straightforward_table(p, exact=True)
    ratios = [srows[i].round_security / Fraction(2 ** srows[i].round)
              for i in range(len(srows))]
    # eps_tilde / 2^i converges: consecutive gaps shrink monotonically
    gaps = [abs(ratios[i + 1] - ratios[i]) for i in range(len(ratios) - 1)]
    assert all(g2 < g1 for g1, g2 in zip(gaps, gaps[1:]))
    arows = awr_table(p, exact=True)
    assert len({row.round_security / row.round for row in arows}) == 1


def test_vacuous_cutoff():
    p = mk(0.2, 0.01, rounds=50)
    rows = straightforward_table(p)
    assert rows[-1].vacuous and rows[-1].round_security > 1
    assert all(not r.vacuous for r in rows[:-1])
    assert len(rows) < 50


def test_eps_prime_first_override():
    c = 1e-6
    p = mk(1e-10, 1e-12, rounds=5, eps_prime_first=c)
    s = straightforward_table(p, exact=True)
    assert s[0].key_perfectness == Fraction(c)
    base = straightforward_table(mk(1e-10, 1e-12, rounds=5), exact=True)
    # homogeneous term doubles per round
    for i in range(5):
        assert s[i].round_security - base[i].round_security == 2 ** (i + 1) * Fraction(c)
    a = awr_table(p, exact=True)
    abase = awr_table(mk(1e-10, 1e-12, rounds=5), exact=True)
    for i in range(5):
        assert a[i].round_security - abase[i].round_security == Fraction(c)


def test_float_mode_tracks_rational_oracle():
    p = mk(1e-10, 1e-12, rounds=40)
    for make in (straightforward_table, awr_table):
        f = make(p, exact=False)
        r = make(p, exact=True)
        for fr, rr in zip(f, r):
            assert fr.round_security == pytest.approx(float(rr.round_security), rel=1e-12)


def test_awr_linear_beats_exponential():
    # pick eps at least |T|/|K| so the key-reveal exposure stays below eps
    p = mk(1e-10, 1e-9, rounds=64)
    assert Fraction(p.tag_space, p.key_space) <= Fraction(p.eps)
    srows = straightforward_table(p, exact=True)
    arows = awr_table(p, exact=True)
    for s, a in zip(srows[1:], arows[1:]):
        assert a.round_security < s.round_security


def test_crossover_report():
    p = mk(1e-10, 1e-12, rounds=8)
    rep = crossover_report(p, 1e-6)
    assert rep.rounds_awr == int(Fraction(1e-6) / (Fraction(1e-10) + p.eps_dot))
    # straightforward: exponential growth crosses far earlier
    assert 0 < rep.rounds_straightforward < rep.rounds_awr
    sec = straightforward_table(
        mk(1e-10, 1e-12, rounds=rep.rounds_straightforward + 1), exact=True
    )
    assert sec[rep.rounds_straightforward - 1].round_security <= Fraction(1e-6)
    assert sec[rep.rounds_straightforward].round_security > Fraction(1e-6)


def test_crossover_target_below_first_round():
    p = mk(1e-3, 1e-3, rounds=4)
    rep = crossover_report(p, 1e-6)
    assert rep.rounds_straightforward == 0
    assert rep.rounds_awr == 0


def test_crossover_awr_dominates_for_equal_params():
    rng = random.Random(77)
    for _ in range(25):
        eps1 = rng.random() * 1e-8
        eps = rng.random() * 1e-9
        p = mk(eps1, eps, rounds=4)
        rep = crossover_report(p, 1e-4)
        assert rep.rounds_awr >= rep.rounds_straightforward


def test_degenerate_zero_growth():
    p = BudgetParams(eps1=0.0, eps=0.0, tag_space=2, key_space=4, rounds=3)
    # eps_dot = |T|/|K| stays positive, so growth never vanishes here
    rep = crossover_report(p, 0.9)
    assert rep.rounds_straightforward is None  # tags are free, keys are not
    assert rep.rounds_awr == int(Fraction(0.9) / Fraction(1, 2))


def test_params_validation():
    with pytest.raises(ValueError):
        BudgetParams(eps1=-0.1, eps=0, tag_space=4, key_space=16, rounds=1)
    with pytest.raises(ValueError):
        BudgetParams(eps1=0, eps=0, tag_space=16, key_space=4, rounds=1)
    with pytest.raises(ValueError):
        BudgetParams(eps1=0, eps=0, tag_space=4, key_space=16, rounds=0)
    with pytest.raises(ValueError):
        crossover_report(mk(0, 0), 0.0)


def test_csv_row_format():
    p = mk(1e-10, 1e-12, rounds=2)
    row = awr_table(p)[0].csv_row("awr")
    fields = row.split(",")
    assert fields[0] == "awr" and fields[1] == "1" and fields[5] == "false"
