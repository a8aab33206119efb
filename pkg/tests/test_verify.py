"""The property suite itself, plus frozen counterexamples to the three
literal statements the suite reports as violated."""

from __future__ import annotations

from fractions import Fraction

from decaylaw.relations import oracle_for
from decaylaw.structures import Structure
from decaylaw.verify import PROPERTIES, Tally, random_instance, report, run_verify, summary_line

LITERAL = ("split_sum_literal", "xi_strict_drop", "successor_i_descends_literal")


def test_split_sum_literal_counterexample():
    # A = {}, B = one edge, discrete tag, every core a single vertex
    K = oracle_for(Structure(2, [(1, 2)])).K
    whole = K.weight(0, K.full, (1, 2))
    parts = K.weight(0, 1, (1,)) + K.weight(0, 2, (2,))
    assert whole == Fraction(13, 10) and parts == 2
    assert not whole >= parts  # the literal superadditive form fails
    assert whole <= parts      # the bound actually used downstream holds


def test_xi_strict_drop_counterexamples():
    O = oracle_for(Structure(4, [(1, 3), (1, 4), (2, 4), (3, 4)]))
    K = O.K
    A, Y1, Y2 = K.mask({2}), K.mask({2, 4}), K.full
    assert O.is_s(A, Y1) and O.is_s(A, Y2) and O.is_i(Y1, Y2)
    assert K.xi_value(A, Y1) == K.xi_value(A, Y2) == Fraction(3, 10)

    O = oracle_for(Structure(4, [(1, 2), (1, 3), (1, 4), (3, 4)]))
    K = O.K
    Y1, Y2 = K.mask({1}), K.mask({1, 3, 4})
    assert O.is_s(0, Y1) and O.is_s(0, Y2) and O.is_i(Y1, Y2)
    assert K.xi_value(0, Y1) == K.xi_value(0, Y2) == 1


def test_successor_descent_counterexample():
    # vertex 2 is S-isolated and outside B, so scl(B, C) != C
    O = oracle_for(Structure(4, [(1, 2), (2, 3), (2, 4), (3, 4)], [(1, 4)]))
    K = O.K
    A, B, C = K.mask({1, 4}), K.mask({1, 3, 4}), K.full
    assert O.le_star(A, C) and O.is_i(A, C)
    assert O.le_star_star(B, C)
    assert not O.is_i(A, B)
    assert K.scl(B, C) != C


def test_instances_are_deterministic_and_bounded():
    for idx in range(40):
        S, base = random_instance(7, idx)
        assert (S, base) == random_instance(7, idx)
        assert len(base) <= 3 and S.size - len(base) <= 5
        assert (S.succ is not None) == (idx % 2 == 1)


def test_corrected_properties_hold():
    tally = run_verify(60, seed=5)
    bad = [v for v in tally.violations if v["property"] not in LITERAL]
    assert bad == []
    for name in PROPERTIES:
        if name not in ("successor_i_descends", "successor_i_descends_literal", "pr_singleton_i"):
            assert tally.checks.get(name, 0) > 0, name


def test_report_and_summary():
    tally = Tally()
    tally.check("additivity", True, 0)
    tally.check("additivity", False, 1, C=3)
    assert summary_line(tally) == "1 violations / 2 checks"
    out = report(tally, 2, 0, 5, "7/10")
    assert out["schema"] == 1 and out["violation_count"] == 1
    assert out["violations"] == [{"property": "additivity", "instance": 1, "C": 3}]


def test_jobs_do_not_change_result():
    a = run_verify(12, seed=2, jobs=1)
    b = run_verify(12, seed=2, jobs=2)
    assert dict(a.checks) == dict(b.checks) and a.violations == b.violations
