"""Complex Minkowski norms on g^{1,0} and their Wirtinger jets.

A norm is represented by its square ``F^2`` written with numpy operations, so
the same code evaluates on batches of complex vectors (shape ``(..., n)``)
and on :class:`~finsler_lie.jets.Jet` vectors for forward-mode derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jets
from .errors import (
    DomainError,
    InputError,
    NumericalDerivativeError,
    ParameterError,
    StronglyPseudoconvexViolation,
)

TOL_JET = {"dual": 1e-8, "fd": 1e-5}


@dataclass(frozen=True)
class DiffConfig:
    mode: str = "dual"
    fd_step: float | None = None  # None: per-derivative-order optimal step
    richardson: bool = True

    def __post_init__(self):
        if self.mode not in ("dual", "fd"):
            raise ParameterError(f"diff mode must be 'dual' or 'fd', got {self.mode!r}")
        if self.fd_step is not None and not self.fd_step > 0:
            raise ParameterError("fd_step must be positive")

    @property
    def tol(self):
        return TOL_JET[self.mode]


DUAL = DiffConfig()
FD = DiffConfig(mode="fd")


def _check_hermitian(h, what="h"):
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise InputError(f"{what} must be a square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise InputError(f"{what} has non-finite entries")
    asym = float(np.max(np.abs(h - h.conj().T)))
    if asym > 1e-12:
        raise InputError(f"{what} is not Hermitian (max asymmetry {asym:.3e})")
    h = (h + h.conj().T) / 2
    lo = float(np.linalg.eigvalsh(h)[0])
    if lo <= 0:
        raise ParameterError(f"{what} is not positive definite (smallest eigenvalue {lo:.3e})")
    h.setflags(write=False)
    return h


@dataclass(frozen=True, eq=False)
class HermitianNorm:
    h: np.ndarray
    kind = "hermitian"

    def __post_init__(self):
        object.__setattr__(self, "h", _check_hermitian(self.h))

    @property
    def n(self):
        return self.h.shape[0]

    def f2(self, v):
        return np.real(np.sum(v * (np.conj(v) @ self.h.T), axis=-1))

    def to_dict(self):
        return {"kind": self.kind, "h": self.h}


@dataclass(frozen=True, eq=False)
class PerturbedHermitianNorm:
    """F^2 = H(v, vbar) + epsilon * (sum_i |v^i|^(2p))^(1/p)."""

    h: np.ndarray
    epsilon: float = 0.1
    p: int = 2
    kind = "perturbed_hermitian"

    def __post_init__(self):
        object.__setattr__(self, "h", _check_hermitian(self.h))
        if not (np.isfinite(self.epsilon) and self.epsilon >= 0):
            raise ParameterError(f"epsilon must be a finite real >= 0, got {self.epsilon}")
        if int(self.p) != self.p or self.p < 2:
            raise ParameterError(f"p must be an integer >= 2, got {self.p}")
        object.__setattr__(self, "p", int(self.p))

    @property
    def n(self):
        return self.h.shape[0]

    def f2(self, v):
        base = np.real(np.sum(v * (np.conj(v) @ self.h.T), axis=-1))
        if self.epsilon == 0:
            return base
        mod2 = np.real(v * np.conj(v))
        return base + self.epsilon * np.sum(mod2**self.p, axis=-1) ** (1.0 / self.p)

    def to_dict(self):
        return {"kind": self.kind, "h": self.h, "epsilon": self.epsilon, "p": self.p}


@dataclass(frozen=True, eq=False)
class CustomNorm:
    """Black-box F^2. ``func`` maps complex arrays (..., n) to reals; for dual mode it must
    use numpy operations (``np.conj``, ``np.real``, ``np.sum``, arithmetic, ``**``)."""

    func: Callable = field(repr=False)
    n: int = 2
    name: str = "custom"
    kind = "custom"

    def f2(self, v):
        return self.func(v)

    def to_dict(self):
        return {"kind": self.kind, "name": self.name, "n": self.n}


def hermitian(h):
    return HermitianNorm(np.asarray(h))


def identity(n):
    return HermitianNorm(np.eye(n))


def perturbed_hermitian(h, epsilon=0.1, p=2):
    return PerturbedHermitianNorm(np.asarray(h), epsilon, p)


def _as_vector(v, n):
    v = np.asarray(v, dtype=complex)
    if v.shape != (n,):
        raise InputError(f"expected a vector of length {n}, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InputError("vector has non-finite entries")
    return v


def f_squared(norm, v):
    v = _as_vector(v, norm.n)
    return float(norm.f2(v))


def check_homogeneity(norm, v, lam):
    v = _as_vector(v, norm.n)
    base = f_squared(norm, v)
    if base == 0:
        raise DomainError("homogeneity check needs v != 0")
    return abs(f_squared(norm, lam * v) - abs(lam) ** 2 * base) / base


# --------------------------------------------------------------------------
# metric jet
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MetricJet:
    v: np.ndarray
    F2: float
    g: np.ndarray          # g[i, j] = d^2 F^2 / dv^i dvbar^j
    g_inv: np.ndarray      # inverse matrix: g @ g_inv = Id, i.e. g_inv[q, j] = g^{qbar j}
    C_plus: np.ndarray     # C_plus[i, j, l] = d^3 F^2 / dv^i dvbar^j dv^l
    C_minus: np.ndarray    # C_minus[i, j, l] = d^3 F^2 / dv^i dvbar^j dvbar^l
    g_antihol: np.ndarray  # g_antihol[j, t] = d^2 F^2 / dvbar^j dvbar^t
    anti3: np.ndarray      # anti3[j, t, l] = d^3 F^2 / dvbar^j dvbar^t dvbar^l
    mode: str = "dual"

    @property
    def n(self):
        return self.v.size

    @property
    def g_hol(self):
        """Pure holomorphic block d^2 F^2 / dv^i dv^j (= conj of g_antihol)."""
        return np.conj(self.g_antihol)

    def g_v(self, u, w):
        """Hermitian product g_v(u, w) = g_{i jbar} u^i conj(w^j)."""
        return np.asarray(u) @ self.g @ np.conj(w)

    def S_v(self, u, w):
        """Symmetric product S_v(u, w) = g_{ij} u^i w^j."""
        return np.asarray(u) @ self.g_hol @ np.asarray(w)

    def C_plus_form(self, w, u, x):
        """C+_v(w, u, x) = C_{k qbar l} w^k conj(u^q) x^l."""
        return np.einsum("kql,k,q,l->", self.C_plus, w, np.conj(u), x)

    def C_minus_form(self, w, u, x):
        """C-_v(w, u, x) = C_{k qbar tbar} w^k conj(u^q) conj(x^t)."""
        return np.einsum("kqt,k,q,t->", self.C_minus, w, np.conj(u), np.conj(x))


def _real_derivatives(norm, v, cfg):
    n = norm.n
    if cfg.mode == "dual":
        try:
            return jets.real_derivatives_dual(norm.f2, v)
        except (TypeError, AttributeError) as exc:
            raise NumericalDerivativeError(
                f"norm {getattr(norm, 'name', norm.kind)!r} does not support dual mode; use fd",
                {"cause": repr(exc)},
            ) from exc

    def fr(X):
        Z = np.atleast_2d(X)[:, :n] + 1j * np.atleast_2d(X)[:, n:]
        out = np.asarray(norm.f2(Z), dtype=float)
        if out.shape != (len(Z),):
            # black box that only takes one vector at a time
            out = np.array([float(norm.f2(z)) for z in Z])
        return out

    x = np.concatenate([v.real, v.imag])
    scale = float(np.max(np.abs(v)))
    return jets.central_derivatives(fr, x, scale=scale, step=cfg.fd_step, richardson=cfg.richardson)


def wirtinger_blocks(n, grad, hess, third):
    P, Q = jets.wirtinger_matrices(n)
    g = np.einsum("ia,jb,ab->ij", P, Q, hess)
    g_antihol = np.einsum("ia,jb,ab->ij", Q, Q, hess)
    C_plus = np.einsum("ia,jb,lc,abc->ijl", P, Q, P, third)
    C_minus = np.einsum("ia,jb,lc,abc->ijl", P, Q, Q, third)
    anti3 = np.einsum("ia,jb,lc,abc->ijl", Q, Q, Q, third)
    return g, g_antihol, C_plus, C_minus, anti3


def metric_jet(norm, v, cfg: DiffConfig = DUAL) -> MetricJet:
    v = _as_vector(v, norm.n)
    if not np.any(v):
        raise DomainError("the fundamental tensor is undefined at v = 0")
    F2, grad, hess, third = _real_derivatives(norm, v, cfg)
    g, g_antihol, C_plus, C_minus, anti3 = wirtinger_blocks(norm.n, grad, hess, third)
    if not all(np.all(np.isfinite(t)) for t in (g, g_antihol, C_plus, C_minus, anti3)):
        raise NumericalDerivativeError("non-finite derivatives of F^2", {"v": v.tolist()})
    g = (g + g.conj().T) / 2
    eig = np.linalg.eigvalsh(g)
    if eig[0] <= 1e-12 * max(abs(eig[-1]), 1e-300):
        raise StronglyPseudoconvexViolation(
            f"Levi matrix not positive definite at v (smallest eigenvalue {eig[0]:.3e})",
            min_eigenvalue=float(eig[0]),
        )
    return MetricJet(v, F2, g, np.linalg.inv(g), C_plus, C_minus, g_antihol, anti3, cfg.mode)


def unit_sphere_samples(n, count, seed):
    """``count`` complex unit vectors, deterministic in ``seed``."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def check_pseudoconvexity(norm, sample_count, seed=0, cfg: DiffConfig = DUAL):
    if sample_count < 1:
        raise ParameterError("sample_count must be >= 1")
    lo = np.inf
    for v in unit_sphere_samples(norm.n, sample_count, seed):
        g = metric_jet(norm, v, cfg).g
        lo = min(lo, float(np.linalg.eigvalsh(g)[0]))
    return lo


def euler_residuals(jet: MetricJet, v=None):
    """Residuals of g v vbar = F^2, C+ . v = 0, C- . vbar = 0, C- contracted with v = g_antihol.

    The first is relative to F^2, the others relative to max |g|.
    """
    v = jet.v if v is None else np.asarray(v, dtype=complex)
    scale = float(np.max(np.abs(jet.g))) or 1.0
    r1 = abs(v @ jet.g @ np.conj(v) - jet.F2) / jet.F2
    r2 = float(np.max(np.abs(np.einsum("ijl,l->ij", jet.C_plus, v)))) / scale
    r3 = float(np.max(np.abs(np.einsum("ijl,l->ij", jet.C_minus, np.conj(v))))) / scale
    r4 = float(np.max(np.abs(np.einsum("ijt,i->jt", jet.C_minus, v) - jet.g_antihol))) / scale
    return float(r1), r2, r3, r4


def builtin(name, n, **params):
    h = np.asarray(params["h"], dtype=complex) if "h" in params else np.eye(n)
    if "diag" in params:
        h = np.diag(np.asarray(params["diag"], dtype=float))
    if name in ("hermitian", "identity"):
        return HermitianNorm(h)
    if name in ("perturbed", "perturbed_hermitian"):
        return PerturbedHermitianNorm(h, float(params.get("epsilon", 0.1)), int(params.get("p", 2)))
    raise ParameterError(f"unknown builtin norm {name!r}")
