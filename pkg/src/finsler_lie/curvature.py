"""Curvature block R^i_{k jbar}, the operator R(w, wbar)v, bisectional and sectional curvature.

Layout: ``R_block[i, k, j] = R^i_{k jbar}``; ``dN_dv[i, k, l] = dN^i_k / dv^l`` and
``dN_dvbar[i, k, t] = dN^i_k / dvbar^t``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .algebra import ComplexifiedAlgebra
from .connection import _lam_bar_o, nonlinear_connection
from .errors import NumericalDerivativeError
from .jets import richardson_diff
from .norm import DUAL, DiffConfig, MetricJet, metric_jet

log = logging.getLogger(__name__)

# step (relative to |v|_inf) for differentiating v -> N(v) by central differences
_N_STEP = 1e-2


def _dN_dual(alg, jet: MetricJet, N):
    """Forward-mode tangents of N through the linear solve: dN = g^{-T}(dR - dg^T N)."""
    v, G, A = jet.v, jet.g, jet.g_antihol
    Lb = alg.lam_bar
    Lo = _lam_bar_o(alg, v)
    n = v.size
    # holomorphic directions, indexed by trailing l
    dR = (
        np.einsum("itl,i,tjk->jkl", jet.C_plus, v, Lb)
        + np.einsum("lt,tjk->jkl", G, Lb)
        + np.einsum("ljt,tk->jkl", jet.C_minus, Lo)
        - np.einsum("sjl,sk->jkl", jet.C_plus, N)
    )
    # antiholomorphic directions
    dRb = (
        np.einsum("itl,i,tjk->jkl", jet.C_minus, v, Lb)
        + np.einsum("jtl,tk->jkl", jet.anti3, Lo)
        + np.einsum("jt,tlk->jkl", A, Lb)
        - np.einsum("sjl,sk->jkl", jet.C_minus, N)
    )
    solve = lambda B: np.linalg.solve(G.T, B.reshape(n, -1)).reshape(n, n, n)  # noqa: E731
    return solve(dR), solve(dRb)


def _n_map(alg, norm, cfg):
    def fn(v):
        return nonlinear_connection(alg, metric_jet(norm, v, cfg))[0]

    return fn


def _dN_fd(alg, norm, v, cfg):
    fn = _n_map(alg, norm, cfg)
    n = v.size
    h = _N_STEP * float(np.max(np.abs(v)))
    dx = np.stack([richardson_diff(fn, v, np.eye(n)[l], h) for l in range(n)], axis=-1)
    dy = np.stack([richardson_diff(fn, v, 1j * np.eye(n)[l], h) for l in range(n)], axis=-1)
    return 0.5 * (dx - 1j * dy), 0.5 * (dx + 1j * dy)


def assemble_R(alg: ComplexifiedAlgebra, v, N, dN_dv, dN_dvbar):
    mh, Lb = alg.mixed_hol, alg.lam_bar
    return (
        -np.einsum("ikl,lsj,s->ikj", dN_dv, mh, v)
        + np.einsum("ikt,tj->ikj", dN_dvbar, np.conj(N))
        - np.einsum("il,lkj->ikj", N, mh)
        + np.einsum("ilj,lk->ikj", mh, N)
        - np.einsum("ist,s,tjk->ikj", mh, v, Lb)
    )


@dataclass(frozen=True, eq=False)
class CurvatureData:
    v: np.ndarray
    jet: MetricJet
    N: np.ndarray
    dN_dv: np.ndarray
    dN_dvbar: np.ndarray
    R_block: np.ndarray

    def operator(self, w):
        """R(w, wbar)v = -w^k conj(w^j) R^i_{k jbar} e_i."""
        w = np.asarray(w, dtype=complex)
        return -np.einsum("ikj,k,j->i", self.R_block, w, np.conj(w))

    def bisectional_complex(self, w):
        w = np.asarray(w, dtype=complex)
        num = self.jet.g_v(self.operator(w), self.v)
        return num / (self.jet.g_v(self.v, self.v).real * self.jet.g_v(w, w).real)

    def bisectional(self, w):
        return float(self.bisectional_complex(w).real)

    def sectional(self):
        # F^4 = g_v(v, v)^2 by the Euler identity, so K(v) = 2 B(v, v) exactly
        return 2.0 * self.bisectional(self.v)


def curvature_block(alg: ComplexifiedAlgebra, norm, v, cfg: DiffConfig = DUAL) -> CurvatureData:
    jet = metric_jet(norm, v, cfg)
    N, _ = nonlinear_connection(alg, jet)
    if cfg.mode == "dual":
        dN_dv, dN_dvbar = _dN_dual(alg, jet, N)
    else:
        dN_dv, dN_dvbar = _dN_fd(alg, norm, jet.v, cfg)
    if not (np.all(np.isfinite(dN_dv)) and np.all(np.isfinite(dN_dvbar))):
        raise NumericalDerivativeError(
            "non-finite derivative of the nonlinear connection",
            {"v": jet.v.tolist(), "min_eig_g": float(np.linalg.eigvalsh(jet.g)[0])},
        )
    R = assemble_R(alg, jet.v, N, dN_dv, dN_dvbar)
    return CurvatureData(jet.v, jet, N, dN_dv, dN_dvbar, R)


def curvature_operator(alg, norm, v, w, cfg: DiffConfig = DUAL):
    return curvature_block(alg, norm, v, cfg).operator(w)


def _directional(fn, v, X, antiholomorphic=False):
    """X^l d f/dv^l (or conj(X^l) d f/dvbar^l) from two real directional derivatives."""
    size = float(np.max(np.abs(X)))
    if size == 0:
        return 0.0 * fn(v)
    u = X / size
    h = _N_STEP * float(np.max(np.abs(v)))
    d_re = richardson_diff(fn, v, u, h)
    d_im = richardson_diff(fn, v, 1j * u, h)
    sign = 1j if antiholomorphic else -1j
    return size * 0.5 * (d_re + sign * d_im)


def curvature_operator_free(alg: ComplexifiedAlgebra, norm, v, w, cfg: DiffConfig = DUAL):
    """Coordinate-free R(w, wbar)v built from brackets, the operator N and flat derivatives."""
    v = np.asarray(v, dtype=complex)
    w = np.asarray(w, dtype=complex)
    zero = np.zeros_like(v)
    n_of = _n_map(alg, norm, cfg)
    Nw = lambda x: n_of(x) @ w  # noqa: E731
    N = n_of(v)
    Nw_v = N @ w
    v_wbar = alg.bracket_hol((v, zero), (zero, np.conj(w)))
    w_wbar = alg.bracket_hol((w, zero), (zero, np.conj(w)))
    wbar_w_anti = alg.bracket((zero, np.conj(w)), (w, zero))[1]
    return (
        _directional(Nw, v, v_wbar)
        - _directional(Nw, v, Nw_v, antiholomorphic=True)
        + N @ w_wbar
        - alg.bracket_hol((Nw_v, zero), (zero, np.conj(w)))
        + alg.bracket_hol((v, zero), (zero, wbar_w_anti))
    )


def bisectional(alg, norm, v, w, cfg: DiffConfig = DUAL):
    b = curvature_block(alg, norm, v, cfg).bisectional_complex(w)
    if abs(b.imag) > 1e-9:
        log.info("bisectional curvature has imaginary residue %.3e", b.imag)
    return float(b.real)


def holomorphic_sectional(alg, norm, v, cfg: DiffConfig = DUAL):
    return curvature_block(alg, norm, v, cfg).sectional()
