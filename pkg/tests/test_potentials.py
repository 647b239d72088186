import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from shiftpress.errors import ConstructionError, InputError
from shiftpress.potentials import (
    Interval,
    LocallyConstantPotential,
    ZeroPotential,
    growth_class,
    make_reciprocal_run,
    make_run_levels,
    partial_sum,
    variation_profile,
    variation_sum_bounds,
)
from shiftpress.subshifts import make_full_shift, make_golden_mean


def h_lin(k):
    return k + 1


def h_sq(k):
    return (k + 1) ** 2


# ---------------------------------------------------------------------------
# interval arithmetic
# ---------------------------------------------------------------------------


def test_interval_add_exact_stays_tight():
    a = Interval(0.5, 0.5)
    b = Interval(0.25, 0.75)
    s = a + b
    assert (s.lo, s.hi) == (0.75, 1.25)


@given(
    st.lists(
        st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), min_size=1, max_size=30
    )
)
def test_interval_sum_encloses_exact_rational_sum(xs):
    total = Interval(0.0, 0.0)
    for x in xs:
        total = total + Interval(x, x)
    exact = sum(Fraction(x) for x in xs)
    assert Fraction(total.lo) <= exact <= Fraction(total.hi)


# ---------------------------------------------------------------------------
# reciprocal run weights
# ---------------------------------------------------------------------------


def test_run_eval_immediate_break_is_exact():
    pot = make_reciprocal_run(h_lin)
    iv = pot.eval((0, 1), 0)
    assert (iv.lo, iv.hi) == (1.0, 1.0)
    assert (partial_sum(pot, (0, 1)).lo, partial_sum(pot, (0, 1)).hi) == (2.0, 2.0)


def test_run_eval_center_of_00100():
    pot = make_reciprocal_run(h_lin)
    iv = pot.eval((0, 0, 1, 0, 0), 2)
    assert (iv.lo, iv.hi) == (1.0, 1.0)


def test_run_eval_no_visible_break_hulls_the_tail():
    pot = make_reciprocal_run(h_lin)
    iv = pot.eval((0, 0, 0, 0, 0), 2)
    assert (iv.lo, iv.hi) == (0.0, 1.0 / 3.0)


def test_run_eval_asymmetric_visibility():
    pot = make_reciprocal_run(h_lin)
    # break at distance 2, one-sided visibility 1: still determined
    iv = pot.eval((0, 0, 0, 1), 1)
    assert (iv.lo, iv.hi) == (0.5, 0.5)
    # break at distance 3, visibility 1: levels 1..2 possible
    iv = pot.eval((0, 0, 0, 0, 1), 1)
    assert (iv.lo, iv.hi) == (1.0 / 3.0, 0.5)


def test_run_divergence_flags():
    assert make_reciprocal_run(h_lin).sum_diverges
    assert not make_reciprocal_run(h_sq).sum_diverges


def test_run_rejects_bad_height():
    with pytest.raises(ConstructionError):
        make_reciprocal_run(lambda k: 1.0 if k == 0 else 0.5)  # decreasing
    with pytest.raises(ConstructionError):
        make_reciprocal_run(lambda k: float(k))  # h(0) = 0


@pytest.mark.parametrize("h", [h_lin, h_sq])
def test_variation_equals_reciprocal_height_exactly(h):
    pot = make_reciprocal_run(h)
    prof = variation_profile(pot, make_full_shift(2), 10)
    for n in range(11):
        assert prof.var[n] == 1.0 / h(n)


def test_variation_sum_table():
    pot = make_reciprocal_run(h_lin)
    prof = variation_profile(pot, make_full_shift(2), 4)
    assert prof.g_at(4) == pytest.approx(2 * (1 + 1 / 2 + 1 / 3), abs=1e-15)
    assert prof.g_at(0) == 2.0
    assert variation_sum_bounds([1.0, 0.5])[3] == 3.0


# ---------------------------------------------------------------------------
# locally constant tables
# ---------------------------------------------------------------------------


def test_locally_constant_interior_lookup():
    pot = LocallyConstantPotential(1, {(0, 1, 0): 1.0}, 2)
    iv = pot.eval((0, 1, 0), 1)
    assert (iv.lo, iv.hi) == (1.0, 1.0)
    iv = pot.eval((1, 1, 1), 1)
    assert (iv.lo, iv.hi) == (0.0, 0.0)


def test_locally_constant_edge_hull_matches_completions():
    pot = LocallyConstantPotential(1, {(0, 1, 0): 1.0}, 2)
    # site 0 of '10': completions (s,1,0) give 1.0 and 0.0
    iv = pot.eval((1, 0), 0)
    assert (iv.lo, iv.hi) == (0.0, 1.0)
    iv = pot.eval((0, 1), 0)
    assert (iv.lo, iv.hi) == (0.0, 0.0)


def test_locally_constant_total_table_required_without_default():
    with pytest.raises(ConstructionError):
        LocallyConstantPotential(0, {(0,): 1.0}, 2, default=None)
    pot = LocallyConstantPotential(0, {(0,): 1.0, (1,): 2.0}, 2, default=None)
    assert pot.bounds.lo == 1.0 and pot.bounds.hi == 2.0


def test_zero_potential_flag():
    z = ZeroPotential()
    assert z.is_constant_zero
    iv = partial_sum(z, (0, 1, 0))
    assert (iv.lo, iv.hi) == (0.0, 0.0)


@settings(deadline=None, max_examples=80)
@given(st.integers(min_value=1, max_value=8), st.data())
def test_partial_sum_encloses_concrete_point_values(n, data):
    """A concrete admissible extension's exact sum lies in the enclosure."""
    fs = make_full_shift(2)
    pot = make_reciprocal_run(h_lin)
    w = tuple(data.draw(st.integers(min_value=0, max_value=1)) for _ in range(n))
    iv = partial_sum(pot, w)
    x, off = oracles.pad_word(w, n + 4)
    exact = math.fsum(oracles.phi_run(x, off + i, h_lin) for i in range(n))
    assert iv.lo - 1e-12 <= exact <= iv.hi + 1e-12


# ---------------------------------------------------------------------------
# run level tables and growth classes
# ---------------------------------------------------------------------------


def test_run_levels_eval():
    pot = make_run_levels([2.0, 1.0], 0.5)
    iv = pot.eval((0, 0, 1), 1)
    assert (iv.lo, iv.hi) == (2.0, 2.0)
    iv = pot.eval((0, 0, 0), 1)  # level >= 1: table tail plus the limit
    assert (iv.lo, iv.hi) == (0.5, 1.0)


def test_growth_classes():
    n = 1025
    bounded = [3.0 * (1 - 0.5**k) for k in range(n)]
    assert growth_class(bounded).klass == "bounded"
    loglin = [0.0] + [2.5 * math.log(k) for k in range(1, n)]
    rep = growth_class(loglin)
    assert rep.klass == "log_linear"
    assert rep.c == pytest.approx(2.5, rel=1e-6)
    sublog = [0.0] + [math.sqrt(math.log(k + 1)) for k in range(1, n)]
    assert growth_class(sublog).klass == "sublog"
    superlog = [float(k) ** 0.8 for k in range(n)]
    assert growth_class(superlog).klass == "superlog"


def test_growth_class_needs_a_horizon():
    with pytest.raises(InputError):
        growth_class([0.0, 1.0, 2.0])


def test_variation_on_golden_mean_skips_forbidden_blocks():
    pot = make_reciprocal_run(h_lin)
    gm = make_golden_mean()
    prof = variation_profile(pot, gm, 6)
    for n in range(7):
        assert prof.var[n] == 1.0 / h_lin(n)  # all-zero blocks still admissible
