import numpy as np
import pytest

from finsler_lie import algebra as A
from finsler_lie import norm as N
from finsler_lie.connection import (
    check_operator_identity,
    chern_torsion,
    connection_data,
    contraction_residual,
    linear_system_residual,
    nonlinear_connection,
)
from finsler_lie.errors import DomainError

from oracles import chern_torsion_reference, hermitian_N, hpd, unit

ALGEBRAS = [A.ch2(1, 1), A.ch2(2.0, 0.4), A.complex_heisenberg(), A.abelian(2)]


def _norms(n, rng):
    h = hpd(n, rng)
    return [N.hermitian(h), N.perturbed_hermitian(h, 0.1, 2), N.perturbed_hermitian(np.eye(n), 0.2, 3)]


@pytest.mark.parametrize("alg", ALGEBRAS, ids=lambda a: a.name)
def test_structural_identities(alg):
    rng = np.random.default_rng(11)
    for nm in _norms(alg.n, rng):
        for _ in range(3):
            v = unit(alg.n, rng, (0.5, 2))
            jet = N.metric_jet(nm, v)
            data = connection_data(alg, nm, v, jet=jet)
            assert linear_system_residual(alg, jet, data.N) < 1e-12
            assert contraction_residual(data) < 1e-12
            assert check_operator_identity(alg, jet, probes=10, seed=1) < 1e-12
            # Gamma_ik - Gamma_ki = -2 T - lambda (torsion of a connection on a Lie algebra)
            skew = data.Gamma - np.transpose(data.Gamma, (0, 2, 1))
            assert np.max(np.abs(skew + 2 * data.T + alg.hol)) < 1e-12
            # T is antisymmetric in its lower indices
            assert np.max(np.abs(data.T + np.transpose(data.T, (0, 2, 1)))) < 1e-12


@pytest.mark.parametrize("alg", ALGEBRAS[:3], ids=lambda a: a.name)
def test_hermitian_N_matches_pairing_oracle(alg):
    rng = np.random.default_rng(5)
    h = hpd(alg.n, rng)
    for _ in range(5):
        v = unit(alg.n, rng)
        N_lib, _ = nonlinear_connection(alg, N.metric_jet(N.hermitian(h), v))
        assert np.max(np.abs(N_lib - hermitian_N(alg, h, v))) < 1e-12


@pytest.mark.parametrize("alg", ALGEBRAS[:3], ids=lambda a: a.name)
def test_hermitian_torsion_is_chern_torsion(alg):
    rng = np.random.default_rng(6)
    h = hpd(alg.n, rng)
    ref = chern_torsion_reference(alg, h)
    assert np.max(np.abs(chern_torsion(alg, h) - ref)) < 1e-12
    for _ in range(5):
        data = connection_data(alg, N.hermitian(h), unit(alg.n, rng))
        assert np.max(np.abs(data.T - ref)) < 1e-10


def test_complex_group_type_connection_vanishes():
    rng = np.random.default_rng(7)
    alg = A.complex_heisenberg()
    for nm in _norms(3, rng):
        data = connection_data(alg, nm, unit(3, rng))
        assert np.max(np.abs(data.N)) == 0
        assert np.max(np.abs(data.Gamma)) == 0
        assert np.max(np.abs(data.T + 0.5 * alg.hol)) < 1e-15
        assert np.abs(data.T[2, 0, 1] + 0.5) < 1e-15


def test_mixed_coefficients_and_nbar():
    alg = A.ch2(1, 1)
    v = np.array([0.3 + 0.1j, -0.5j])
    data = connection_data(alg, N.identity(2), v)
    assert np.allclose(data.Gamma_mixed, -alg.mixed_hol)
    assert np.allclose(data.N_bar_arg, -np.einsum("iks,k->is", alg.mixed_hol, v))


def test_homogeneity_of_N_and_gamma():
    """N is homogeneous of degree (1, 0) in v, Gamma of degree 0."""
    rng = np.random.default_rng(8)
    alg = A.ch2(1.5, 0.7)
    nm = N.perturbed_hermitian(hpd(2, rng), 0.1, 2)
    for _ in range(5):
        v = unit(2, rng)
        lam = complex(*rng.standard_normal(2))
        a = connection_data(alg, nm, v)
        b = connection_data(alg, nm, lam * v)
        assert np.max(np.abs(b.N - lam * a.N)) < 1e-10 * max(1, abs(lam))
        assert np.max(np.abs(b.Gamma - a.Gamma)) < 1e-10


def test_zero_direction():
    with pytest.raises(DomainError):
        connection_data(A.ch2(), N.identity(2), [0, 0])
