import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sepconv.feasibility import Verdict, sep_witness_check
from sepconv.kraus import (SepMap, build_example, build_five_qubit_example, build_projectors_3q,
                           build_projectors_5q, build_three_qubit_example, verify_sep_map)
from sepconv.tensor import LocalOperator, apply_local, random_local_operator

A_GRID = np.linspace(0.05, 0.45, 9)


@pytest.mark.parametrize("projs,n", [(build_projectors_5q(), 5), (build_projectors_3q(), 3)])
def test_projectors(projs, n, ring5, ring3):
    psi = ring5 if n == 5 else ring3
    mats = [q.matrix() for q in projs]
    for m in mats:
        np.testing.assert_allclose(m @ m, m, atol=1e-15)
    for q in projs:
        assert apply_local(q, psi).norm() < 1e-14
        assert len(q.singular_sites()) == 3
    # each projector has rank 2^(n-3)
    assert np.trace(sum(mats)).real == pytest.approx(4 * 2 ** (n - 3))
    for i in range(4):
        for j in range(i + 1, 4):
            np.testing.assert_allclose(mats[i] @ mats[j], 0, atol=1e-15)


@pytest.mark.parametrize("which", ["5q", "3q"])
@pytest.mark.parametrize("a", A_GRID)
def test_completeness(which, a):
    ex = build_example(which, a)
    assert ex.map.completeness_residual() < 1e-10
    assert not ex.map.all_invertible()


@pytest.mark.parametrize("which", ["5q", "3q"])
@pytest.mark.parametrize("a", [0.1, 0.2, 0.3, 0.4])
def test_branches(which, a):
    ex = build_example(which, a)
    v = verify_sep_map(ex.map, ex.psi, ex.final_state)
    assert v.deterministic and v.output_residual < 1e-10
    classes = [b.cls for b in v.branches]
    assert classes == ["annihilates"] * 4 + ["reaches-final"] * 4
    assert max(v.annihilator_norms()) < 1e-11
    for b in v.branches[4:]:
        assert b.prob == pytest.approx(0.25, abs=1e-12)
    assert v.initial_fully_entangled and v.final_fully_entangled


def test_removing_projections_breaks_completeness():
    ex = build_five_qubit_example(0.25)
    short = SepMap(ex.map.kraus[4:], ex.map.labels[4:])
    assert short.completeness_residual() > 1e-3
    v = verify_sep_map(short, ex.psi, ex.final_state)
    assert not v.deterministic


def test_identity_map(ring5):
    m = SepMap([LocalOperator.identity(ring5.dims)])
    v = verify_sep_map(m, ring5, ring5)
    assert v.deterministic and v.branches[0].cls == "reaches-final"


def test_random_replacement_flagged(rng):
    ex = build_three_qubit_example(0.2)
    kraus = list(ex.map.kraus)
    kraus[5] = random_local_operator(ex.psi.dims, rng)
    v = verify_sep_map(SepMap(kraus), ex.psi, ex.final_state)
    assert v.branches[5].cls == "OTHER" and not v.deterministic


@pytest.mark.parametrize("a", [0.0, 0.5, -0.1, 0.7])
def test_parameter_range(a):
    with pytest.raises(ValueError):
        build_five_qubit_example(a)
    with pytest.raises(ValueError):
        build_three_qubit_example(a)


def test_unknown_example():
    with pytest.raises(ValueError):
        build_example("4q", 0.2)


def test_unnormalized_states_rejected(ring5):
    m = SepMap([LocalOperator.identity(ring5.dims)])
    with pytest.raises(ValueError):
        verify_sep_map(m, type(ring5)(ring5.dims, 2 * ring5.amps), ring5)


@pytest.mark.parametrize("which", ["5q", "3q"])
def test_witness_passes(which):
    ex = build_example(which, 0.3)
    rep = sep_witness_check(ex.conversion_instance(), ex.witness())
    assert rep.verdict is Verdict.FEASIBLE and rep.residual < 1e-10
    np.testing.assert_allclose(ex.witness().probs, 0.25)


def test_output_equals_normalized_target():
    ex = build_five_qubit_example(0.2)
    rho = ex.map.apply(ex.psi.projector())
    hp = apply_local(ex.h, ex.psi)
    target = np.outer(hp.amps, hp.amps.conj()) / hp.norm() ** 2
    assert np.abs(rho - target).max() < 1e-10
    assert np.trace(rho).real == pytest.approx(1)


@settings(max_examples=30, deadline=None)
@given(a=st.floats(0.01, 0.49))
def test_completeness_property(a):
    assert build_three_qubit_example(a).map.completeness_residual() < 1e-10
