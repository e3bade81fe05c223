import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finsler_lie import algebra as A
from finsler_lie.errors import (
    InputError,
    IntegrabilityError,
    ParameterError,
    ValidationError,
)

from oracles import bracket_pair, hol, anti


def test_real_builtins_validate():
    for name, kw in (("ch2", {}), ("abelian", {"n": 3}), ("complex_heisenberg", {}), ("su2_r", {})):
        alg, I, _ = A.builtin_real(name, **kw)
        rep = A.validate_real(alg)
        assert rep.passed, (name, rep)
        assert np.allclose(I @ I, -np.eye(alg.dim), atol=1e-12)


def test_antisymmetry_violation_is_named():
    c = np.zeros((2, 2, 2))
    c[0, 0, 1] = c[0, 1, 0] = 1.0
    rep = A.validate_real(A.RealLieAlgebra.from_dense(c))
    assert not rep.passed
    assert "antisymmetry" in rep.failures()
    assert rep.antisymmetry == 2.0


def test_jacobi_violation_detected():
    # [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e3 is antisymmetric but not a Lie bracket
    alg = A.RealLieAlgebra.from_brackets(4, {(0, 1): {2: 1.0}, (1, 2): {0: 1.0}, (2, 0): {2: 1.0}})
    rep = A.validate_real(alg)
    assert rep.antisymmetry == 0.0
    assert rep.jacobi > 0.5
    assert rep.failures() == ["jacobi"]


def test_odd_dimension_rejected():
    with pytest.raises(InputError):
        A.validate_real(A.RealLieAlgebra.from_dense(np.zeros((3, 3, 3))))


def test_index_out_of_range():
    with pytest.raises(InputError):
        A.RealLieAlgebra(2, (((0, 0, 5), 1.0),)).c


def test_complex_structure_checked():
    with pytest.raises((InputError, ValidationError)):
        A.check_complex_structure(np.eye(4), 4)


def test_ch2_nijenhuis_zero_and_table():
    for beta, gamma in ((1.0, 1.0), (2.0, 0.5), (0.3, 3.0)):
        alg, I, kw = A.ch2_real(beta, gamma)
        nj = A.nijenhuis(alg, I)
        assert nj.max_entry < 1e-12
        c = A.complexify(alg, I, **kw)
        s = 1 / math.sqrt(2 * gamma)
        r = math.sqrt(beta) / math.sqrt(2)
        # the six constants listed with the example (1-based names in comments)
        assert abs(c.hol[1, 0, 1] - s / 2) < 1e-12            # lambda^2_{12}
        assert abs(c.mixed_hol[0, 0, 0] + s) < 1e-12          # lambda^1_{1 1bar}
        assert abs(c.mixed_anti[0, 0, 0] - s) < 1e-12         # lambda^{1bar}_{1 1bar}
        assert abs(c.mixed_anti[1, 0, 1] - s / 2) < 1e-12     # lambda^{2bar}_{1 2bar}
        assert abs(c.mixed_hol[0, 1, 1] + r) < 1e-12          # lambda^1_{2 2bar}
        assert abs(c.mixed_anti[0, 1, 1] - r) < 1e-12         # lambda^{1bar}_{2 2bar}
        # forced by conjugation closure: [e_2, ebar_1] = -conj([e_1, ebar_2])
        assert abs(c.mixed_hol[1, 1, 0] + s / 2) < 1e-12
        assert np.max(np.abs(c.structure_tensor - A.ch2(beta, gamma).structure_tensor)) < 1e-12


def test_broken_structure_fails_integrability():
    alg, I, _ = A.su2_r_real(broken=True)
    assert np.allclose(I @ I, -np.eye(4), atol=1e-12)
    nj = A.nijenhuis(alg, I)
    assert not nj.integrable
    assert nj.max_entry > 0.5
    with pytest.raises(IntegrabilityError) as exc:
        A.complexify(alg, I)
    assert exc.value.worst_pair == nj.worst_pair


def test_nijenhuis_antisymmetric_in_slots():
    for alg, I, _ in (A.su2_r_real(broken=True), A.ch2_real(1.3, 0.4), A.complex_heisenberg_real()):
        t = A.nijenhuis(alg, I).tensor
        assert np.max(np.abs(t + np.transpose(t, (0, 2, 1)))) < 1e-12


def test_su2_r_hopf_surface_complexifies():
    alg, I, _ = A.su2_r_real()
    c = A.complexify(alg, I)
    assert A.validate_complex(c).passed
    ok, _ = A.is_complex_group_type(c)
    assert not ok  # S^1 x S^3 is not a complex Lie group


def test_complex_builtins_validate():
    for alg in (A.abelian(3), A.complex_heisenberg(), A.ch2(1, 1), A.ch2(2.5, 0.2)):
        rep = A.validate_complex(alg)
        assert rep.passed, (alg.name, rep)


def test_complex_jacobi_brute_force():
    """Jacobi on every basis triple of g^C using only pairwise brackets."""
    alg = A.ch2(1.7, 0.6)
    n = alg.n
    basis = [hol(np.eye(n)[i]) for i in range(n)] + [anti(np.eye(n)[i]) for i in range(n)]
    worst = 0.0
    for x in basis:
        for y in basis:
            for z in basis:
                t1 = bracket_pair(alg, x, bracket_pair(alg, y, z))
                t2 = bracket_pair(alg, y, bracket_pair(alg, z, x))
                t3 = bracket_pair(alg, z, bracket_pair(alg, x, y))
                worst = max(worst, np.max(np.abs(np.concatenate(t1) + np.concatenate(t2) + np.concatenate(t3))))
    assert worst < 1e-12


def test_conjugation_consistency():
    alg = A.ch2(0.8, 1.9)
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        y = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        a = alg.bracket(hol(x), anti(np.conj(y)))
        b = alg.bracket(hol(y), anti(np.conj(x)))
        # conj([x, ybar]) = [xbar, y] = -[y, xbar]
        assert np.allclose(np.conj(a[0]), -b[1], atol=1e-14)
        assert np.allclose(np.conj(a[1]), -b[0], atol=1e-14)


def test_broken_conjugation_reported():
    ch = A.ch2(1, 1)
    mh = np.array(ch.mixed_hol)
    mh[0, 0, 0] += 0.3
    bad = A.ComplexifiedAlgebra.from_dense(ch.hol, mh, ch.mixed_anti)
    rep = A.validate_complex(bad)
    assert "conjugation" in rep.failures()


def test_complex_group_type_brackets_vanish():
    rng = np.random.default_rng(1)
    for alg in (A.abelian(3), A.complex_heisenberg()):
        ok, mag = A.is_complex_group_type(alg)
        assert ok and mag == 0.0
        for _ in range(100):
            x = rng.standard_normal(alg.n) + 1j * rng.standard_normal(alg.n)
            y = rng.standard_normal(alg.n) + 1j * rng.standard_normal(alg.n)
            out = alg.bracket(hol(x), anti(y))
            assert max(np.max(np.abs(out[0])), np.max(np.abs(out[1]))) < 1e-12
    assert not A.is_complex_group_type(A.ch2(1, 1))[0]


def test_heisenberg_complexify_matches_builtin():
    alg, I, kw = A.complex_heisenberg_real()
    c = A.complexify(alg, I, **kw)
    assert np.max(np.abs(c.structure_tensor - A.complex_heisenberg().structure_tensor)) < 1e-12


@pytest.mark.parametrize("alg", [A.ch2(1, 1), A.ch2(2, 0.5), A.complex_heisenberg(), A.abelian(2)],
                         ids=lambda a: a.name)
def test_decomplexify_roundtrip(alg):
    real, I, weights, basis = A.decomplexify(alg)
    assert A.validate_real(real).passed
    back = A.complexify(real, I, weights=weights, basis=basis)
    assert np.max(np.abs(back.structure_tensor - alg.structure_tensor)) < 1e-12


@pytest.mark.parametrize("beta,gamma", [(0, 1), (1, -1), (-2, 3)])
def test_ch2_parameters_checked(beta, gamma):
    with pytest.raises(ParameterError):
        A.ch2(beta, gamma)


def test_unknown_builtin():
    with pytest.raises(ParameterError):
        A.builtin("sl2")


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 20), st.floats(0.05, 20))
def test_ch2_family_is_lie_and_integrable(beta, gamma):
    alg, I, kw = A.ch2_real(beta, gamma)
    assert A.nijenhuis(alg, I).max_entry < 1e-10
    c = A.complexify(alg, I, **kw)
    assert A.validate_complex(c).passed
    assert np.max(np.abs(c.structure_tensor - A.ch2(beta, gamma).structure_tensor)) < 1e-10
