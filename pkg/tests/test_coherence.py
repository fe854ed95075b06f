"""The correlation measure: values, distance form, extremes, and robustness."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from sympcoh import (
    CovMat,
    GaussianState,
    active_gate_counterexample,
    apply,
    apply_loss,
    block_orthogonal,
    closest_free_cm,
    coherence_report,
    compose,
    displacement,
    haar_orthogonal,
    is_free,
    is_valid,
    is_pure,
    max_symplectic_coherence,
    mix_states,
    mixed_msc_check,
    msc_canonical,
    msc_from_spec,
    msc_membership_conditions,
    msc_spec,
    msc_squeezing,
    numeric_max_search,
    partial_trace,
    perturbation_bound,
    phase_shifter,
    squeezer,
    symplectic_coherence,
    tensor_states,
    trace_distance_cov_bound,
    vacuum_state,
)
from sympcoh.coherence import MscSpec
from conftest import random_free_cov, random_valid_cov

TOL = 1e-9
EXACT = 1e-12


def rotated_squeezed(r: float, theta: float) -> GaussianState:
    gate = compose(phase_shifter(1, 1, theta), squeezer(1, 1, r))
    return apply(gate, vacuum_state(1))


def test_vacuum_has_zero_coherence():
    assert symplectic_coherence(vacuum_state(3).cov) == 0.0


def test_single_mode_closed_form_value():
    state = rotated_squeezed(0.5, np.pi / 4)
    assert symplectic_coherence(state.cov) == pytest.approx(np.sinh(1.0) ** 2, abs=EXACT)


def test_tensor_with_vacuum_preserves_value():
    state = rotated_squeezed(0.5, np.pi / 4)
    extended = tensor_states(state, vacuum_state(1))
    assert symplectic_coherence(extended.cov) == pytest.approx(
        np.sinh(1.0) ** 2, abs=EXACT
    )


def test_additivity_under_tensor(rng):
    for _ in range(10):
        a = random_valid_cov(rng, 2)
        b = random_valid_cov(rng, 1)
        joint = tensor_states(GaussianState(a), GaussianState(b))
        assert symplectic_coherence(joint.cov) == pytest.approx(
            symplectic_coherence(a) + symplectic_coherence(b), abs=TOL
        )


def test_closest_free_of_free_input_is_itself(rng):
    cov = random_free_cov(rng, 2)
    assert_allclose(closest_free_cm(cov).matrix, cov.matrix, atol=0)


def test_closest_free_of_rotated_squeezed():
    state = rotated_squeezed(0.5, np.pi / 4)
    free = closest_free_cm(state.cov)
    assert_allclose(free.matrix, np.diag([np.cosh(1.0), np.cosh(1.0)]), atol=EXACT)
    report = coherence_report(state.cov)
    assert report.hs_distance_sq_to_free == pytest.approx(2 * np.sinh(1.0) ** 2, abs=TOL)


def test_closest_free_is_always_valid(rng):
    for _ in range(100):
        cov = random_valid_cov(rng, int(rng.integers(1, 4)))
        assert is_valid(closest_free_cm(cov))


def test_distance_interpretation(rng):
    for _ in range(100):
        cov = random_valid_cov(rng, int(rng.integers(1, 4)))
        report = coherence_report(cov)
        assert report.hs_distance_sq_to_free == pytest.approx(
            2 * report.coherence, abs=TOL
        )


def test_distance_to_arbitrary_free_never_smaller(rng):
    for _ in range(100):
        m = int(rng.integers(1, 4))
        cov = random_valid_cov(rng, m)
        free = random_free_cov(rng, m)
        dist_sq = 0.5 * float(np.sum((cov.matrix - free.matrix) ** 2))
        assert dist_sq >= symplectic_coherence(cov) - TOL


def test_is_free_cases():
    assert is_free(vacuum_state(2).cov)
    assert is_free(rotated_squeezed(0.5, 0.0).cov)
    assert not is_free(msc_canonical(6, 1).cov)


def test_faithfulness_exact():
    free = CovMat(np.diag([2.0, 3.0, 1.0, 0.7]))
    assert is_free(free, tol=0.0)
    assert symplectic_coherence(free) == 0.0


@pytest.mark.parametrize("E, m, expected", [(2, 1, 0.0), (6, 1, 8.0), (10, 2, 15.0)])
def test_max_value_formula(E, m, expected):
    assert max_symplectic_coherence(E, m) == pytest.approx(expected, abs=EXACT)


def test_max_value_domain_error():
    with pytest.raises(ValueError):
        max_symplectic_coherence(3.0, 2)


@pytest.mark.parametrize("m", [1, 2, 4])
@pytest.mark.parametrize("extra", [0.0, 1.0, 10.0])
def test_canonical_state_saturates_maximum(m, extra):
    E = 2 * m + extra
    state = msc_canonical(E, m)
    assert is_pure(state.cov)
    assert state.cov.trace == pytest.approx(E, abs=TOL)
    assert symplectic_coherence(state.cov) == pytest.approx(
        max_symplectic_coherence(E, m), abs=TOL
    )


def test_canonical_state_at_minimum_trace_is_vacuum():
    assert_allclose(msc_canonical(4, 2).cov.matrix, np.eye(4), atol=EXACT)


def test_canonical_state_rejects_small_trace():
    with pytest.raises(ValueError):
        msc_canonical(1.9, 1)


def test_squeezing_solves_trace_equation():
    r = msc_squeezing(6.0, 1)
    assert np.exp(2 * r) + np.exp(-2 * r) == pytest.approx(6.0, abs=EXACT)
    r2 = msc_squeezing(10.0, 2)
    assert np.exp(2 * r2) + np.exp(-2 * r2) == pytest.approx(8.0, abs=EXACT)


def test_spec_builder_reproduces_canonical_state():
    for E, m in [(6.0, 1), (9.0, 3)]:
        spec = msc_spec(E, m)
        built = msc_from_spec(spec)
        assert_allclose(built.cov.matrix, msc_canonical(E, m).cov.matrix, atol=TOL)
        report = msc_membership_conditions(spec.o_inner, spec.theta)
        assert report.is_member


def test_membership_single_mode():
    assert msc_membership_conditions(np.eye(1), [np.pi / 4]).is_member
    report = msc_membership_conditions(np.eye(1), [0.0])
    assert not report.is_member
    assert report.max_residual == pytest.approx(1.0, abs=EXACT)


def test_membership_rejects_non_orthogonal():
    with pytest.raises(ValueError):
        msc_membership_conditions(np.array([[1.0, 1.0], [0.0, 1.0]]), [0.0, 0.0])


def test_membership_two_mode_equal_angles_attains_maximum():
    # Oracle: build the state for theta=(pi/4, pi/4), O=I at trace E and
    # compare its coherence against the closed-form maximum directly.
    E, m = 8.0, 2
    theta = np.array([np.pi / 4, np.pi / 4])
    report = msc_membership_conditions(np.eye(m), theta)
    spec = MscSpec(
        E=E, m=m, r=msc_squeezing(E, m), theta=theta, o_inner=np.eye(m), o_outer=np.eye(m)
    )
    built = msc_from_spec(spec)
    attained = symplectic_coherence(built.cov)
    assert built.cov.trace == pytest.approx(E, abs=TOL)
    assert attained == pytest.approx(max_symplectic_coherence(E, m), abs=TOL)
    assert report.is_member


def test_membership_verdict_matches_attained_coherence(rng):
    # Both directions on a two-mode sweep: member specs attain the maximum,
    # non-member specs fall short (independent construction as the oracle).
    E, m = 8.0, 2
    cases = [
        (np.eye(2), np.array([np.pi / 4, 3 * np.pi / 4]), None),
        (np.eye(2), np.array([np.pi / 4, 0.0]), None),
        (np.eye(2), np.array([np.pi / 3, np.pi / 4]), None),
    ]
    rot = lambda phi: np.array(
        [[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]]
    )
    cases.append((rot(0.3), np.array([np.pi / 4, 3 * np.pi / 4]), None))
    cases.append((rot(np.pi / 2), np.array([np.pi / 4, 3 * np.pi / 4]), None))
    c_max = max_symplectic_coherence(E, m)
    for o, theta, _ in cases:
        member = msc_membership_conditions(o, theta).is_member
        spec = MscSpec(
            E=E, m=m, r=msc_squeezing(E, m), theta=theta, o_inner=o, o_outer=np.eye(m)
        )
        attained = symplectic_coherence(msc_from_spec(spec).cov)
        if member:
            assert attained == pytest.approx(c_max, abs=1e-8)
        else:
            assert attained < c_max - 1e-6


def test_membership_invariant_under_outer_orthogonal(rng):
    # The gate applied after the phase shifters never changes the value.
    E, m = 8.0, 2
    theta = np.array([np.pi / 4, np.pi / 4])
    o_outer = haar_orthogonal(m, rng)
    spec = MscSpec(
        E=E, m=m, r=msc_squeezing(E, m), theta=theta, o_inner=np.eye(m), o_outer=o_outer
    )
    attained = symplectic_coherence(msc_from_spec(spec).cov)
    assert attained == pytest.approx(max_symplectic_coherence(E, m), abs=TOL)


def test_mixed_decomposition_check():
    msc = msc_canonical(6, 1).cov
    ok, reasons = mixed_msc_check(msc, msc, msc)
    assert ok and not reasons

    flipped = apply(phase_shifter(1, 1, np.pi / 2), GaussianState(msc)).cov
    avg = CovMat(0.5 * (msc.matrix + flipped.matrix))
    ok, reasons = mixed_msc_check(avg, msc, flipped)
    assert not ok
    assert any("position-momentum" in r for r in reasons)

    thermal = CovMat(2.0 * np.eye(2))
    ok, reasons = mixed_msc_check(msc, msc, thermal)
    assert not ok
    assert any("pure" in r for r in reasons)

    ok, reasons = mixed_msc_check(msc, msc, flipped)
    assert not ok
    assert any("average" in r for r in reasons)


def test_perturbation_bound_values():
    assert perturbation_bound(1.0, 2.0, 3.0, 0.0) == 0.0
    assert perturbation_bound(0.0, 0.0, 1.0, 1.0) == pytest.approx(800.0, abs=EXACT)
    assert perturbation_bound(1.0, 1.0, 1.0, 0.01) == pytest.approx(
        8.0 + 4.0 * np.sqrt(2.0), abs=EXACT
    )
    with pytest.raises(ValueError):
        perturbation_bound(-1.0, 0.0, 1.0, 0.1)


@settings(max_examples=60, deadline=None)
@given(
    c1=st.floats(0, 50),
    c2=st.floats(0, 50),
    E=st.floats(0, 100),
    eps=st.floats(0, 1),
    bump=st.floats(0, 5),
)
def test_perturbation_bound_monotone(c1, c2, E, eps, bump):
    base = perturbation_bound(c1, c2, E, eps)
    assert perturbation_bound(c1 + bump, c2, E, eps) >= base
    assert perturbation_bound(c1, c2 + bump, E, eps) >= base
    assert perturbation_bound(c1, c2, E + bump, eps) >= base
    assert perturbation_bound(c1, c2, E, eps + bump) >= base


def test_trace_distance_cov_bound_values():
    assert trace_distance_cov_bound(5.0, 2, 0.0) == 0.0
    assert trace_distance_cov_bound(1.0, 1, 1.0) == pytest.approx(40.0, abs=EXACT)
    assert trace_distance_cov_bound(2.0, 4, 0.25) == pytest.approx(80.0, abs=EXACT)


# ---------------------------------------------------------------------------
# Behaviour under operations that cannot create correlations
# ---------------------------------------------------------------------------


def test_invariance_under_block_orthogonal_and_displacement(rng):
    for _ in range(50):
        m = int(rng.integers(1, 4))
        state = GaussianState(random_valid_cov(rng, m), rng.normal(size=2 * m))
        c0 = symplectic_coherence(state.cov)
        rotated = apply(block_orthogonal(haar_orthogonal(m, rng)), state)
        displaced = apply(displacement(m, rng.normal(size=2 * m)), state)
        assert symplectic_coherence(rotated.cov) == pytest.approx(c0, abs=TOL)
        assert symplectic_coherence(displaced.cov) == pytest.approx(c0, abs=TOL)


def test_nonincreasing_under_partial_trace(rng):
    for _ in range(50):
        state = GaussianState(random_valid_cov(rng, 3))
        c0 = symplectic_coherence(state.cov)
        reduced = partial_trace(state, [1, 3])
        assert symplectic_coherence(reduced.cov) <= c0 + TOL


def test_zero_mean_mixture_bounded_by_components(rng):
    for _ in range(50):
        m = int(rng.integers(1, 3))
        comps = [GaussianState(random_valid_cov(rng, m)) for _ in range(3)]
        w = rng.dirichlet(np.ones(3))
        mixed = mix_states(list(zip(w, comps)))
        assert symplectic_coherence(mixed.cov) <= (
            max(symplectic_coherence(s.cov) for s in comps) + TOL
        )


def test_displaced_mixture_regression():
    # Equal mixture of vacuum and a coherent state with first moments (a, b)
    # picks up coherence a^2 b^2 / 16 from the moment bookkeeping alone.
    a, b = 1.3, -0.7
    mixed = mix_states(
        [
            (0.5, vacuum_state(1)),
            (0.5, GaussianState(CovMat(np.eye(2)), [a, b])),
        ]
    )
    assert symplectic_coherence(mixed.cov) == pytest.approx(
        a**2 * b**2 / 16.0, abs=EXACT
    )


def test_active_gate_counterexample_increases_coherence():
    witness = active_gate_counterexample()
    assert is_valid(witness.cov)
    assert witness.coherence_after > witness.coherence_before + 0.1
    assert witness.coherence_before == pytest.approx(1.0, abs=EXACT)
    assert witness.coherence_after == pytest.approx(4.0, abs=EXACT)


def test_active_gate_preserves_free_set(rng):
    witness = active_gate_counterexample()
    s = witness.gate.S
    for _ in range(20):
        free = random_free_cov(rng, 2)
        moved = s @ free.matrix @ s.T
        assert np.max(np.abs(moved[:2, 2:])) < TOL


# ---------------------------------------------------------------------------
# Randomized search for the maximum
# ---------------------------------------------------------------------------


def test_search_single_mode_approaches_maximum():
    outcome = numeric_max_search(6.0, 1, trials=100, seed=5)
    assert outcome.sup_c <= 8.0 + 1e-6
    assert outcome.sup_c >= 7.9


def test_search_trivial_trace_budget():
    assert numeric_max_search(2.0, 1, trials=10, seed=0).sup_c == 0.0
    assert numeric_max_search(4.0, 2, trials=10, seed=0).sup_c == 0.0


def test_search_sampled_maximum_is_nondecreasing_in_trials():
    small = numeric_max_search(10.0, 2, trials=40, seed=3)
    large = numeric_max_search(10.0, 2, trials=120, seed=3)
    assert large.argmax["sample_coherence"] >= small.argmax["sample_coherence"]
    assert large.sup_c >= large.argmax["sample_coherence"]


def test_search_never_beats_closed_form(rng):
    for m, E in [(1, 4.0), (2, 7.5), (3, 9.0)]:
        outcome = numeric_max_search(E, m, trials=60, seed=int(rng.integers(1 << 30)))
        assert outcome.sup_c <= max_symplectic_coherence(E, m) + 1e-6


def test_search_input_validation():
    with pytest.raises(ValueError):
        numeric_max_search(6.0, 1, trials=0, seed=0)
    with pytest.raises(ValueError):
        numeric_max_search(1.0, 1, trials=5, seed=0)


def test_loss_scaling_of_measure(rng):
    for _ in range(30):
        m = int(rng.integers(1, 5))
        cov = random_valid_cov(rng, m)
        eta = float(rng.uniform())
        assert symplectic_coherence(apply_loss(cov, eta)) == pytest.approx(
            eta**2 * symplectic_coherence(cov), abs=1e-12, rel=1e-12
        )


def test_norm_inequality_chain(rng):
    # Frobenius <= trace norm <= sqrt(m) * Frobenius for the qp block.
    for _ in range(20):
        m = int(rng.integers(1, 4))
        cov = random_valid_cov(rng, m)
        block = cov.matrix[:m, m:]
        fro = np.linalg.norm(block)
        nuc = np.linalg.norm(block, "nuc")
        assert fro <= nuc + TOL
        assert nuc <= np.sqrt(m) * fro + TOL
