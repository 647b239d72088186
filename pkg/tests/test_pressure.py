import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from shiftpress.errors import (
    BudgetExceededError,
    InconsistentBracketError,
    InputError,
)
from shiftpress.potentials import ZeroPotential, make_reciprocal_run, partial_sum
from shiftpress.pressure import (
    anchor_sequence,
    partition_function,
    partition_table,
    pressure_bracket,
)
from shiftpress.subshifts import (
    enumerate_language,
    make_bounded_density,
    make_full_shift,
    make_golden_mean,
    make_sparse_sturmian,
    make_sturmian_factors,
)

LOG_PHI = math.log((1 + math.sqrt(5)) / 2)


def h_lin(k):
    return k + 1


# ---------------------------------------------------------------------------
# partition rows
# ---------------------------------------------------------------------------


def test_full_shift_zero_potential_is_n_log2():
    fs = make_full_shift(2)
    for n in range(1, 13):
        row = partition_function(fs, ZeroPotential(), n)
        assert row.count == 2**n
        assert row.lnz_lo == row.lnz_hi == math.log(2**n)


def test_golden_counts_follow_the_recurrence():
    gm = make_golden_mean()
    for n in range(1, 15):
        row = partition_function(gm, ZeroPotential(), n)
        assert row.count == oracles.fib(n + 2)
        assert row.lnz_hi == math.log(oracles.fib(n + 2))
    assert partition_function(gm, ZeroPotential(), 24).count == 121393


def test_prefix_restriction_splits_the_sum():
    gm = make_golden_mean()
    pot = make_reciprocal_run(h_lin)
    whole = partition_function(gm, pot, 6)
    parts = [partition_function(gm, pot, 6, prefix=(s,)) for s in (0, 1)]
    assert sum(p.count for p in parts) == whole.count
    merged_hi = math.log(sum(math.exp(p.lnz_hi) for p in parts))
    merged_lo = math.log(sum(math.exp(p.lnz_lo) for p in parts))
    assert merged_hi == pytest.approx(whole.lnz_hi, abs=1e-9)
    assert merged_lo == pytest.approx(whole.lnz_lo, abs=1e-9)


def test_partition_encloses_concrete_point_oracle():
    """Padded concrete configurations give an exact sum inside the enclosure."""
    gm = make_golden_mean()
    pot = make_reciprocal_run(h_lin)

    def point_phi(w, i):
        x, off = oracles.pad_word(w, len(w) + 4)
        return oracles.phi_run(x, off + i, h_lin)

    for n in (3, 5, 7):
        words = enumerate_language(gm, n)
        row = partition_function(gm, pot, n)
        exact = oracles.brute_partition(words, point_phi)
        assert row.lnz_lo - 1e-9 <= exact <= row.lnz_hi + 1e-9


def test_partition_rejects_bad_length_and_budget():
    gm = make_golden_mean()
    with pytest.raises(InputError):
        partition_function(gm, ZeroPotential(), 0)
    with pytest.raises(BudgetExceededError):
        partition_function(gm, make_reciprocal_run(h_lin), 12, budget=2)


@settings(deadline=None, max_examples=40)
@given(
    st.integers(min_value=1, max_value=7),
    st.integers(min_value=1, max_value=7),
)
def test_log_partition_is_submultiplicative(m, n):
    gm = make_golden_mean()
    pot = make_reciprocal_run(h_lin)
    t = partition_table(gm, pot, 14)
    assert t.row(m + n).lnz_hi <= t.row(m).lnz_hi + t.row(n).lnz_hi + 1e-9


# ---------------------------------------------------------------------------
# pressure brackets
# ---------------------------------------------------------------------------


def test_golden_bracket_matches_closed_form_oracle():
    gm = make_golden_mean()
    t = partition_table(gm, ZeroPotential(), 24)
    br = pressure_bracket(gm, ZeroPotential(), t)
    # zero potential, declared gap 1: both bounds have closed forms
    want_hi = min(math.log(oracles.fib(m + 2)) / m for m in range(1, 25))
    want_lo = max(math.log(oracles.fib(n + 2)) / (n + 1) for n in range(1, 25))
    assert br.best_hi == pytest.approx(want_hi, abs=1e-12)
    assert br.best_lo == pytest.approx(want_lo, abs=1e-12)
    assert br.best_lo <= LOG_PHI <= br.best_hi
    assert br.width < 0.02
    assert not br.upper_bound_only
    his = [r.hi for r in br.rows]
    assert his == sorted(his, reverse=True)  # running minimum


def test_bounded_density_bracket_contains_the_golden_pressure():
    bd = make_bounded_density(1, [math.ceil(n / 2) for n in range(1, 33)])
    t = partition_table(bd, ZeroPotential(), 16)
    br = pressure_bracket(bd, ZeroPotential(), t)
    assert not br.upper_bound_only
    assert br.best_lo <= LOG_PHI <= br.best_hi


def test_transitivity_mode_gives_upper_bound_only():
    fs = make_sturmian_factors(8, 21, 2)
    sp = make_sparse_sturmian(fs, (4, 12))
    t = partition_table(sp, ZeroPotential(), 8)
    br = pressure_bracket(sp, ZeroPotential(), t)
    assert br.upper_bound_only
    assert br.best_lo == -math.inf
    assert all(r.lo == -math.inf for r in br.rows)
    assert br.best_hi <= math.log(2)


def test_unsound_declared_gap_is_caught():
    from shiftpress.subshifts import make_sft

    liar = make_sft(2, [(1, 1)], declared_gap=0)
    t = partition_table(liar, ZeroPotential(), 12)
    with pytest.raises(InconsistentBracketError) as ei:
        pressure_bracket(liar, ZeroPotential(), t)
    assert ei.value.best_lo > ei.value.best_hi


def test_explicit_g_table_too_short_is_an_input_error():
    gm = make_golden_mean()
    t = partition_table(gm, ZeroPotential(), 6)
    with pytest.raises(InputError):
        pressure_bracket(gm, ZeroPotential(), t, g=[0.0, 0.0])


# ---------------------------------------------------------------------------
# anchors
# ---------------------------------------------------------------------------


def test_anchor_sequence_frozen_values():
    eps = (0.5, 0.4, 0.35)
    seq = anchor_sequence(lambda n: 1.0, lambda n: 0.0, 24, eps)
    assert seq.indices == (8, 13, 18)
    assert seq.complete
    # independent form: with f + g = 1 the threshold is ceil(e^(1/eps))
    prev = 0
    for e, n in zip(eps, seq.indices):
        want = max(math.ceil(math.exp(1 / e)), prev + 1)
        assert n == want
        prev = n
    for e, s in zip(eps, seq.scores):
        assert s <= e


def test_anchor_sequence_incomplete_at_short_horizon():
    seq = anchor_sequence(lambda n: 1.0, lambda n: 0.0, 10, (0.5, 0.4))
    assert seq.indices == (8,)
    assert not seq.complete


def test_anchor_sequence_validation():
    with pytest.raises(InputError):
        anchor_sequence(lambda n: 1.0, lambda n: 0.0, 24, ())
    with pytest.raises(InputError):
        anchor_sequence(lambda n: 1.0, lambda n: 0.0, 24, (0.4, 0.5))
    with pytest.raises(InputError):
        anchor_sequence(lambda n: 1.0, lambda n: 0.0, 24, (0.5, -0.1))
    with pytest.raises(InputError):
        anchor_sequence(lambda n: 1.0, lambda n: 0.0, 2, (0.5,))


def test_table_row_bounds_checked():
    gm = make_golden_mean()
    t = partition_table(gm, ZeroPotential(), 6)
    assert t.horizon == 6
    with pytest.raises(InputError):
        t.row(0)
    with pytest.raises(InputError):
        t.row(7)
