import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from magnon_qi.converter import (
    ConverterCoefficients,
    commutator_defects,
    cooperativity_drift_matrix,
    drift_matrix,
    is_stable,
    matrix_is_stable,
    max_commutator_defect,
    max_real_eigenvalue,
    output_coefficients,
    output_coefficients_resonant,
)
from magnon_qi.errors import DomainError, UnstableRegimeError
from magnon_qi.system_params import TWO_PI, Cooperativities, SystemParams

KAPPA = TWO_PI * 1e6
KAPPAS = (4.05e8, KAPPA, KAPPA)
MARGINAL_BAND = 1e-6


def test_decoupled_drift_matrix_is_diagonal():
    m = drift_matrix(3.0, 5.0, 2.0, 0.0, 0.0)
    np.testing.assert_array_equal(m, np.diag([-2.0, -2.0, -3.0, -3.0, -5.0, -5.0]))


def test_stability_examples():
    assert matrix_is_stable(cooperativity_drift_matrix(Cooperativities(0.054, 400), (KAPPA,) * 3))
    assert not matrix_is_stable(cooperativity_drift_matrix(Cooperativities(3.0, 1.0), (KAPPA,) * 3))
    assert matrix_is_stable(drift_matrix(KAPPA, KAPPA, KAPPA, 0.0, 0.0))
    assert is_stable(SystemParams())
    assert not is_stable(SystemParams(), g_ma_enhanced=math.sqrt(1700 * 4.05e8 * KAPPA))


def test_resonant_closed_forms():
    assert output_coefficients_resonant(Cooperativities(0, 0)).as_tuple() == (1, 1, 0, 0, 0)
    c = output_coefficients_resonant(Cooperativities(1, 1))
    assert c.as_tuple() == (3, -1, 2, 2j, 2j)
    c = output_coefficients_resonant(Cooperativities(0.054, 400))
    assert c.b.real == pytest.approx(0.023183, abs=1e-6)
    # (1 - 400.054) / 400.946; the commutator identity pins the same value
    assert c.a_b.real == pytest.approx(-399.054 / 400.946, rel=1e-14)
    assert c.a_b.real == pytest.approx(-0.995281, abs=1e-6)
    with pytest.raises(UnstableRegimeError):
        output_coefficients_resonant(Cooperativities(2.0, 1.0))


@given(st.floats(0, 50), st.floats(0, 2000))
def test_general_coefficients_reduce_at_zero_frequency(la, lb):
    if 1 + lb - la <= 1e-3:
        return
    coop = Cooperativities(la, lb)
    general = np.array(output_coefficients(coop, KAPPAS, 0.0).as_tuple())
    closed = np.array(output_coefficients_resonant(coop).as_tuple())
    np.testing.assert_allclose(general, closed, rtol=1e-12, atol=1e-12)


def test_commutators_at_magnon_linewidth():
    c = output_coefficients(Cooperativities(0.054, 400), KAPPAS, KAPPA)
    assert max_commutator_defect(c) <= 1e-9


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 100), st.floats(0, 2000), st.floats(-50, 50))
def test_commutators_preserved(la, lb, w):
    if 1 + lb - la <= 1e-3:
        return
    c = output_coefficients(Cooperativities(la, lb), KAPPAS, w * KAPPA)
    assert max_commutator_defect(c) <= 1e-9


def test_commutator_defect_examples():
    assert commutator_defects(output_coefficients_resonant(Cooperativities(0, 0))) == (0.0, 0.0, 0j)
    c = output_coefficients_resonant(Cooperativities(0.5, 3.0))
    bumped = ConverterCoefficients(c.a_a, c.a_b, c.b + 0.1, c.c_a, c.c_b)
    assert commutator_defects(bumped)[0] < 0


def test_gain_diverges_near_instability():
    la = 10.0
    lb = la - 1 + 1e-6
    assert abs(output_coefficients_resonant(Cooperativities(la, lb)).b) > 1e3


def test_zero_damping_rejected():
    with pytest.raises(DomainError):
        output_coefficients(Cooperativities(0.1, 1.0), (0.0, KAPPA, KAPPA), 0.0)


@settings(max_examples=150, deadline=None)
@given(st.floats(0, 10), st.floats(0, 10), st.sampled_from([(3.0, 2.0, 1.0), (1.0, 1.0, 1.0), (64.0, 1.0, 1.0)]))
def test_routh_hurwitz_matches_eigenvalues(la, lb, ratios):
    m = cooperativity_drift_matrix(Cooperativities(la, lb), tuple(r * KAPPA for r in ratios))
    max_re = max_real_eigenvalue(m)
    if abs(max_re) < MARGINAL_BAND * KAPPA:
        return  # too close to the axis for either route to resolve
    verdict = matrix_is_stable(m)
    assert verdict == (max_re < 0)
    if 1 + lb - la <= 0:
        assert not verdict


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 10), st.floats(0, 10), st.floats(0.2, 5.0))
def test_denominator_decides_stability_for_matched_dampings(la, lb, ratio):
    d = 1 + lb - la
    if abs(d) < 1e-6:
        return
    m = cooperativity_drift_matrix(Cooperativities(la, lb), (KAPPA, KAPPA, ratio * KAPPA))
    assert matrix_is_stable(m) == (d > 0)


def test_hybridized_modes_go_unstable_before_the_denominator_closes():
    # kappa_a >> kappa_m = kappa_b: the strongly coupled magnon-microwave pair
    # gains net amplification once Lambda_a exceeds about 1 + kappa_b / kappa_m
    kappas = SystemParams().kappas
    assert matrix_is_stable(cooperativity_drift_matrix(Cooperativities(1.8, 4.0), kappas))
    assert not matrix_is_stable(cooperativity_drift_matrix(Cooperativities(2.2, 4.0), kappas))
