"""Nonlinear connection, horizontal Chern-Rund coefficients and torsion at a direction v.

Index layout: ``N[i, k] = N^i_k``, ``Gamma[j, i, k] = Gamma^j_{ik}``,
``T[j, i, k] = T^j_{ik}`` (upper index first).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import ComplexifiedAlgebra
from .norm import DUAL, DiffConfig, MetricJet, metric_jet, unit_sphere_samples


@dataclass(frozen=True, eq=False)
class ConnectionData:
    v: np.ndarray
    N: np.ndarray
    N_bar_arg: np.ndarray  # N^i_{jbar} = -mixed_hol[i, k, j] v^k
    Gamma: np.ndarray
    Gamma_mixed: np.ndarray
    T: np.ndarray

    def operator(self, w):
        return self.N @ np.asarray(w, dtype=complex)


def _lam_bar_o(alg, v):
    """lambda^{tbar}_{obar k} = lam_bar[t, s, k] conj(v^s), as a matrix [t, k]."""
    return np.einsum("tsk,s->tk", alg.lam_bar, np.conj(v))


def nonlinear_rhs(alg: ComplexifiedAlgebra, jet: MetricJet):
    """Right-hand side R[j, k] of g_{s jbar} N^s_k = R[j, k]."""
    v = jet.v
    lam_o = np.einsum("it,i,tjk->jk", jet.g, v, alg.lam_bar)
    return lam_o + jet.g_antihol @ _lam_bar_o(alg, v)


def nonlinear_connection(alg: ComplexifiedAlgebra, jet: MetricJet):
    """Return ``(N, N_bar_arg)``; N from a dense solve against g (column by column)."""
    N = np.linalg.solve(jet.g.T, nonlinear_rhs(alg, jet))
    N_bar_arg = -np.einsum("iks,k->is", alg.mixed_hol, jet.v)
    return N, N_bar_arg


def raised_mixed(alg, jet):
    """lambda_i^j_k = g_{i sbar} g^{lbar j} lambda^{sbar}_{lbar k}, stored [i, j, k]."""
    return np.einsum("is,slk,lj->ijk", jet.g, alg.lam_bar, jet.g_inv)


def horizontal_coefficients(alg: ComplexifiedAlgebra, jet: MetricJet, N):
    lam_up = raised_mixed(alg, jet)
    c_plus_up = np.einsum("iql,qj->ijl", jet.C_plus, jet.g_inv)
    c_minus_up = np.einsum("iqt,qj->ijt", jet.C_minus, jet.g_inv)
    gamma_ijk = (
        lam_up
        - np.einsum("ijl,lk->ijk", c_plus_up, N)
        + np.einsum("ijt,tk->ijk", c_minus_up, _lam_bar_o(alg, jet.v))
    )
    Gamma = np.transpose(gamma_ijk, (1, 0, 2))
    Gamma_mixed = -np.asarray(alg.mixed_hol)
    return Gamma, Gamma_mixed


def torsion(alg: ComplexifiedAlgebra, jet: MetricJet, N):
    lam_up = raised_mixed(alg, jet)
    cpn = np.einsum("iql,qj,lk->ijk", jet.C_plus, jet.g_inv, N)
    cml = np.einsum("iqt,qj,tk->ijk", jet.C_minus, jet.g_inv, _lam_bar_o(alg, jet.v))
    # bracket below is indexed [i, j, k]; swapping the outer pair gives the (k, i) terms
    a = -lam_up + cpn - cml
    ijk = 0.5 * (a - np.transpose(a, (2, 1, 0)))
    return np.transpose(ijk, (1, 0, 2)) - 0.5 * np.asarray(alg.hol)


def chern_torsion(alg: ComplexifiedAlgebra, g):
    """Torsion with the Cartan terms dropped: 1/2 (lam_k^j_i - lambda^j_ik - lam_i^j_k)."""
    g = np.asarray(g)
    lam_up = np.einsum("is,slk,lj->ijk", g, alg.lam_bar, np.linalg.inv(g))
    return 0.5 * (
        np.transpose(lam_up, (1, 2, 0)) - np.asarray(alg.hol) - np.transpose(lam_up, (1, 0, 2))
    )


def connection_operator(alg: ComplexifiedAlgebra, jet: MetricJet, w):
    N, _ = nonlinear_connection(alg, jet)
    return N @ np.asarray(w, dtype=complex)


def connection_data(alg: ComplexifiedAlgebra, norm, v, cfg: DiffConfig = DUAL, jet=None):
    jet = jet if jet is not None else metric_jet(norm, v, cfg)
    N, Nbar = nonlinear_connection(alg, jet)
    Gamma, Gamma_mixed = horizontal_coefficients(alg, jet, N)
    return ConnectionData(jet.v, N, Nbar, Gamma, Gamma_mixed, torsion(alg, jet, N))


# ------------------------------------------------------------------ checks


def linear_system_residual(alg, jet, N):
    return float(np.max(np.abs(jet.g.T @ N - nonlinear_rhs(alg, jet))))


def contraction_residual(data: ConnectionData):
    """max |v^i Gamma^j_ik - N^j_k|."""
    return float(np.max(np.abs(np.einsum("jik,i->jk", data.Gamma, data.v) - data.N)))


def operator_identity_residual(alg, jet, N, u, w):
    """|g_v(N(w), u) - g_v(v, [u, wbar]^{1,0}) - conj(S_v(u, [v, wbar]^{1,0}))|."""
    v = jet.v
    zero = np.zeros_like(v)
    u_wbar = alg.bracket_hol((u, zero), (zero, np.conj(w)))
    v_wbar = alg.bracket_hol((v, zero), (zero, np.conj(w)))
    lhs = jet.g_v(N @ w, u)
    rhs = jet.g_v(v, u_wbar) + np.conj(jet.S_v(u, v_wbar))
    return float(abs(lhs - rhs))


def check_operator_identity(alg, jet, probes=20, seed=0):
    N, _ = nonlinear_connection(alg, jet)
    us = unit_sphere_samples(alg.n, probes, seed)
    ws = unit_sphere_samples(alg.n, probes, seed + 1)
    return max(operator_identity_residual(alg, jet, N, u, w) for u, w in zip(us, ws))
