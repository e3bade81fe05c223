"""Real and complexified Lie algebras.

Index conventions (0-based everywhere in code, 1-based only in JSON files):

* real structure constants ``c[k, i, j]`` with ``[f_i, f_j] = c[k, i, j] f_k``;
* an almost complex structure ``I`` acts on column vectors, ``I[:, i] = I(f_i)``;
* complex blocks

  - ``hol[i, j, k]``   : ``[e_j, e_k]   = hol[i, j, k] e_i``
  - ``mixed_hol[i, j, k]`` and ``mixed_anti[i, j, k]`` :
    ``[e_j, ebar_k] = mixed_hol[i, j, k] e_i + mixed_anti[i, j, k] ebar_i``.

Elements of the complexification are pairs ``(a, b)`` meaning
``a^i e_i + b^i ebar_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    ClosureError,
    InputError,
    IntegrabilityError,
    ParameterError,
    ValidationError,
)

TOL_STRUCTURAL = 1e-12
TOL_INTEGRABLE = 1e-10


def _sparse(arr, tol=0.0):
    """Nonzero entries of a dense tensor as ``((i, j, k), value)`` tuples."""
    idx = np.argwhere(np.abs(arr) > tol)
    return tuple((tuple(int(t) for t in ix), arr[tuple(ix)].item()) for ix in idx)


def _dense(entries, shape, dtype):
    out = np.zeros(shape, dtype=dtype)
    for ix, val in entries:
        out[ix] = val
    out.setflags(write=False)
    return out


def jacobi_residual(struct):
    """Max |Jacobi| for a structure tensor ``struct[c, a, b]`` (``[x_a, x_b] = struct[c,a,b] x_c``)."""
    # sum_m s[m,a,b] s[l,m,c] + cyclic(a,b,c)
    t = np.einsum("mab,lmc->abcl", struct, struct)
    jac = t + np.transpose(t, (1, 2, 0, 3)) + np.transpose(t, (2, 0, 1, 3))
    return float(np.max(np.abs(jac))) if jac.size else 0.0


@dataclass(frozen=True)
class ValidationReport:
    antisymmetry: float
    jacobi: float
    conjugation: float = 0.0
    tol: float = TOL_STRUCTURAL

    @property
    def passed(self):
        return max(self.antisymmetry, self.jacobi, self.conjugation) < self.tol

    def failures(self):
        names = ("antisymmetry", "jacobi", "conjugation")
        return [n for n in names if getattr(self, n) >= self.tol]

    def to_dict(self):
        return {
            "antisymmetry_residual": self.antisymmetry,
            "jacobi_residual": self.jacobi,
            "conjugation_residual": self.conjugation,
            "tol": self.tol,
            "pass": self.passed,
            "failed": self.failures(),
        }


# --------------------------------------------------------------------------
# real algebras
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RealLieAlgebra:
    dim: int
    entries: tuple = field(default=())  # ((k, i, j), value)
    name: str = ""

    @classmethod
    def from_dense(cls, c, name=""):
        c = np.asarray(c, dtype=float)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise InputError(f"structure tensor must be dim x dim x dim, got {c.shape}")
        return cls(c.shape[0], _sparse(c), name)

    @classmethod
    def from_brackets(cls, dim, brackets, name=""):
        """Build from ``{(i, j): {k: value}}``; the antisymmetric partner is filled in."""
        c = np.zeros((dim, dim, dim))
        for (i, j), rhs in brackets.items():
            for k, val in rhs.items():
                c[k, i, j] += val
                c[k, j, i] -= val
        return cls.from_dense(c, name)

    @cached_property
    def c(self):
        for ix, _ in self.entries:
            if len(ix) != 3 or any(not 0 <= t < self.dim for t in ix):
                raise InputError(f"structure-constant index {ix} out of range for dim {self.dim}")
        return _dense(self.entries, (self.dim,) * 3, float)

    def bracket(self, x, y):
        return np.einsum("kij,i,j->k", self.c, x, y)


def validate_real(alg: RealLieAlgebra) -> ValidationReport:
    if alg.dim <= 0 or alg.dim % 2:
        raise InputError(f"real algebra dimension must be positive and even, got {alg.dim}")
    c = alg.c
    anti = float(np.max(np.abs(c + np.transpose(c, (0, 2, 1)))))
    return ValidationReport(antisymmetry=anti, jacobi=jacobi_residual(c))


def check_complex_structure(I, dim=None):
    """Return ``I`` as an array after checking ``I @ I = -Id`` entrywise."""
    I = np.asarray(I, dtype=float)
    if I.ndim != 2 or I.shape[0] != I.shape[1] or (dim is not None and I.shape[0] != dim):
        raise InputError(f"almost complex structure must be {dim} x {dim}, got {I.shape}")
    res = float(np.max(np.abs(I @ I + np.eye(I.shape[0]))))
    if res >= TOL_STRUCTURAL:
        raise ValidationError(f"I^2 != -Id (max residual {res:.3e})")
    return I


@dataclass(frozen=True)
class NijenhuisResult:
    tensor: np.ndarray  # tensor[k, i, j] = N_I(f_i, f_j)^k
    max_entry: float
    worst_pair: tuple
    integrable: bool


def nijenhuis(alg: RealLieAlgebra, I) -> NijenhuisResult:
    rep = validate_real(alg)
    if not rep.passed:
        raise ValidationError(f"invalid real Lie algebra: {rep.failures()}", rep)
    I = check_complex_structure(I, alg.dim)
    c = alg.c
    # brackets of basis images: [I f_i, f_j], [f_i, I f_j], [I f_i, I f_j]
    b_if = np.einsum("kab,ai->kib", c, I)
    b_fi = np.einsum("kab,bj->kaj", c, I)
    b_ii = np.einsum("kab,ai,bj->kij", c, I, I)
    tensor = c - b_ii + np.einsum("lk,kij->lij", I, b_if + b_fi)
    flat = np.abs(tensor).max(axis=0)
    i, j = np.unravel_index(np.argmax(flat), flat.shape)
    max_entry = float(flat[i, j])
    return NijenhuisResult(tensor, max_entry, (int(i), int(j)), max_entry < TOL_INTEGRABLE)


# --------------------------------------------------------------------------
# complexified algebras
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ComplexifiedAlgebra:
    n: int
    hol_entries: tuple = ()
    mixed_hol_entries: tuple = ()
    mixed_anti_entries: tuple = ()
    name: str = ""

    @classmethod
    def from_dense(cls, hol, mixed_hol, mixed_anti, name=""):
        hol = np.asarray(hol, dtype=complex)
        n = hol.shape[0]
        shapes = {np.shape(hol), np.shape(mixed_hol), np.shape(mixed_anti)}
        if shapes != {(n, n, n)}:
            raise InputError(f"structure-constant blocks must all be {n}x{n}x{n}, got {shapes}")
        return cls(
            n,
            _sparse(hol),
            _sparse(np.asarray(mixed_hol, dtype=complex)),
            _sparse(np.asarray(mixed_anti, dtype=complex)),
            name,
        )

    @cached_property
    def hol(self):
        return _dense(self.hol_entries, (self.n,) * 3, complex)

    @cached_property
    def mixed_hol(self):
        return _dense(self.mixed_hol_entries, (self.n,) * 3, complex)

    @cached_property
    def mixed_anti(self):
        return _dense(self.mixed_anti_entries, (self.n,) * 3, complex)

    @cached_property
    def lam_bar(self):
        """``lam_bar[t, j, k]``: coefficient of ebar_t in ``[ebar_j, e_k]``, i.e. conj(mixed_hol[t, j, k])."""
        out = np.conj(self.mixed_hol)
        out.setflags(write=False)
        return out

    @cached_property
    def structure_tensor(self):
        """Structure tensor of the complexification on the basis (e_1..e_n, ebar_1..ebar_n)."""
        n = self.n
        s = np.zeros((2 * n, 2 * n, 2 * n), dtype=complex)
        s[:n, :n, :n] = self.hol
        s[n:, n:, n:] = np.conj(self.hol)
        s[:n, :n, n:] = self.mixed_hol
        s[n:, :n, n:] = self.mixed_anti
        s[:, n:, :n] = -np.transpose(s[:, :n, n:], (0, 2, 1))
        s.setflags(write=False)
        return s

    def bracket(self, a, b):
        """Bracket of two elements ``(hol, anti)``; returns ``(hol, anti)`` coefficient arrays.

        A bare vector argument is read as a (1,0)-vector.
        """
        a = _as_element(a, self.n)
        b = _as_element(b, self.n)
        out = np.einsum("cab,a,b->c", self.structure_tensor, np.concatenate(a), np.concatenate(b))
        return out[: self.n], out[self.n :]

    def bracket_hol(self, a, b):
        return self.bracket(a, b)[0]

    @property
    def max_mixed(self):
        return float(max(np.max(np.abs(self.mixed_hol), initial=0.0),
                         np.max(np.abs(self.mixed_anti), initial=0.0)))

    @property
    def is_abelian(self):
        return self.max_mixed < TOL_STRUCTURAL and float(np.max(np.abs(self.hol), initial=0.0)) < TOL_STRUCTURAL


def _as_element(x, n):
    if isinstance(x, tuple) and len(x) == 2:
        a, b = (np.asarray(t, dtype=complex) for t in x)
    else:
        a, b = np.asarray(x, dtype=complex), np.zeros(n, dtype=complex)
    if a.shape != (n,) or b.shape != (n,):
        raise InputError(f"expected vectors of length {n}")
    return a, b


def conj_element(x):
    a, b = x
    return np.conj(b), np.conj(a)


def validate_complex(alg: ComplexifiedAlgebra) -> ValidationReport:
    hol, mh, ma = alg.hol, alg.mixed_hol, alg.mixed_anti
    anti = float(np.max(np.abs(hol + np.transpose(hol, (0, 2, 1))), initial=0.0))
    # [ebar_j, e_k] computed two ways: -[e_k, ebar_j] and conj([e_j, ebar_k])
    conj_res = float(np.max(np.abs(np.transpose(mh, (0, 2, 1)) + np.conj(ma)), initial=0.0))
    return ValidationReport(antisymmetry=anti, jacobi=jacobi_residual(alg.structure_tensor),
                            conjugation=conj_res)


def is_complex_group_type(alg: ComplexifiedAlgebra):
    m = alg.max_mixed
    return m < TOL_STRUCTURAL, m


def _select_real_basis(I, dim):
    """Greedy choice of f_1..f_n with {f_i, I f_i} a real basis."""
    chosen, span = [], np.zeros((dim, 0))
    for a in range(dim):
        cand = np.column_stack([span, np.eye(dim)[:, a], I[:, a]])
        if np.linalg.matrix_rank(cand, tol=1e-9) == span.shape[1] + 2:
            chosen.append(a)
            span = cand
        if span.shape[1] == dim:
            break
    return chosen


def complexify(alg: RealLieAlgebra, I, weights=None, basis=None, name="") -> ComplexifiedAlgebra:
    """Structure constants of g^C on E_i = w_i (f_i - sqrt(-1) I f_i)."""
    result = nijenhuis(alg, I)
    if not result.integrable:
        raise IntegrabilityError(
            f"Nijenhuis tensor nonzero (max {result.max_entry:.3e} at basis pair "
            f"{tuple(t + 1 for t in result.worst_pair)})",
            worst_pair=result.worst_pair,
            max_entry=result.max_entry,
        )
    I = np.asarray(I, dtype=float)
    dim, n = alg.dim, alg.dim // 2
    if basis is None:
        basis = _select_real_basis(I, dim)
    basis = [int(b) for b in basis]
    if len(basis) != n:
        raise InputError(f"need {n} real basis vectors, got {len(basis)}")
    w = np.full(n, 1 / math.sqrt(2)) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (n,) or np.any(w <= 0):
        raise ParameterError("basis weights must be n positive reals")

    f = np.eye(dim)[:, basis]
    E = w * (f - 1j * (I @ f))
    P = np.column_stack([E, np.conj(E)])
    if np.linalg.cond(P) > 1e10:
        raise InputError("chosen real vectors do not give a basis of g^{1,0}")
    Pinv = np.linalg.inv(P)

    def decompose(x, y):
        coeff = Pinv @ np.einsum("kij,i,j->k", alg.c, x, y)
        return coeff[:n], coeff[n:]

    hol = np.zeros((n, n, n), complex)
    mh = np.zeros((n, n, n), complex)
    ma = np.zeros((n, n, n), complex)
    closure = 0.0
    for j in range(n):
        for k in range(n):
            h, stray = decompose(E[:, j], E[:, k])
            hol[:, j, k] = h
            closure = max(closure, float(np.max(np.abs(stray))))
            mh[:, j, k], ma[:, j, k] = decompose(E[:, j], np.conj(E[:, k]))
    if closure >= TOL_INTEGRABLE:
        raise ClosureError(f"[g10, g10] leaks into g01 (residual {closure:.3e})")
    # round-off below the structural tolerance is treated as an exact zero
    for arr in (hol, mh, ma):
        arr.real[np.abs(arr.real) < 1e-15] = 0.0
        arr.imag[np.abs(arr.imag) < 1e-15] = 0.0
    return ComplexifiedAlgebra.from_dense(hol, mh, ma, name or alg.name)


def decomplexify(alg: ComplexifiedAlgebra):
    """Real form of ``alg``: basis (X_1..X_n, Y_1..Y_n), X_i = e_i + ebar_i, Y_i = I X_i.

    Returns ``(real_algebra, I, weights, basis)`` such that ``complexify`` with these
    weights and basis reproduces ``alg``.
    """
    n = alg.n
    eye = np.eye(n)
    # columns: real basis vectors in (e, ebar) coordinates
    M = np.block([[eye, 1j * eye], [eye, -1j * eye]])
    Minv = np.linalg.inv(M)
    s = alg.structure_tensor
    c = np.einsum("kc,cab,ai,bj->kij", Minv, s, M, M)
    if np.max(np.abs(c.imag)) > 1e-12:
        raise ValidationError("complex algebra is not closed under conjugation")
    I = np.block([[np.zeros((n, n)), -eye], [eye, np.zeros((n, n))]])
    real = RealLieAlgebra.from_dense(np.where(np.abs(c.real) < 1e-15, 0.0, c.real), alg.name)
    return real, I, np.full(n, 0.5), list(range(n))


# --------------------------------------------------------------------------
# builtins
# --------------------------------------------------------------------------


def abelian(n):
    if int(n) != n or n < 1:
        raise ParameterError(f"abelian: n must be a positive integer, got {n}")
    n = int(n)
    z = np.zeros((n, n, n))
    return ComplexifiedAlgebra.from_dense(z, z, z, f"abelian({n})")


def complex_heisenberg():
    hol = np.zeros((3, 3, 3), complex)
    hol[2, 0, 1], hol[2, 1, 0] = 1.0, -1.0
    z = np.zeros((3, 3, 3))
    return ComplexifiedAlgebra.from_dense(hol, z, z, "complex_heisenberg")


def _check_ch2_params(beta, gamma):
    if not (beta > 0 and gamma > 0):
        raise ParameterError(f"ch2 requires beta > 0 and gamma > 0, got beta={beta}, gamma={gamma}")


def ch2(beta=1.0, gamma=1.0):
    """Complexified ch_2 on e_1 = (X - iIX)/sqrt(2 gamma), e_2 = (Y - iIY)/sqrt(2)."""
    _check_ch2_params(beta, gamma)
    a = 1 / math.sqrt(2 * gamma)
    b = math.sqrt(beta / 2)
    hol = np.zeros((2, 2, 2), complex)
    ma = np.zeros((2, 2, 2), complex)
    hol[1, 0, 1], hol[1, 1, 0] = a / 2, -a / 2
    ma[0, 0, 0] = a          # [e1, eb1] = a eb1 - a e1
    ma[1, 0, 1] = a / 2      # [e1, eb2] = a/2 eb2
    ma[0, 1, 1] = b          # [e2, eb2] = b eb1 - b e1
    # conjugation closure: mixed_hol[i, k, j] = -conj(mixed_anti[i, j, k])
    mh = -np.conj(np.transpose(ma, (0, 2, 1)))
    return ComplexifiedAlgebra.from_dense(hol, mh, ma, f"ch2(beta={beta:g},gamma={gamma:g})")


def builtin(name, **params) -> ComplexifiedAlgebra:
    if name == "abelian":
        return abelian(params.get("n", 2))
    if name == "complex_heisenberg":
        return complex_heisenberg()
    if name == "ch2":
        return ch2(float(params.get("beta", 1.0)), float(params.get("gamma", 1.0)))
    raise ParameterError(f"unknown builtin algebra {name!r}")


# real forms with almost complex structures; each returns (algebra, I, complexify kwargs)


def ch2_real(beta=1.0, gamma=1.0):
    _check_ch2_params(beta, gamma)
    X, Y, Z, W = range(4)
    alg = RealLieAlgebra.from_brackets(
        4, {(X, Y): {Y: 0.5}, (X, Z): {Z: 0.5}, (X, W): {W: 1.0}, (Z, Y): {W: 1.0}}, "ch2"
    )
    I = np.zeros((4, 4))
    I[W, X] = math.sqrt(gamma / beta)
    I[Z, Y] = -1.0
    I[Y, Z] = 1.0
    I[X, W] = -math.sqrt(beta / gamma)
    return alg, I, {"weights": [1 / math.sqrt(2 * gamma), 1 / math.sqrt(2)], "basis": [X, Y]}


def abelian_real(n):
    n = int(n)
    alg = RealLieAlgebra.from_dense(np.zeros((2 * n,) * 3), f"abelian({n})")
    eye, zero = np.eye(n), np.zeros((n, n))
    return alg, np.block([[zero, -eye], [eye, zero]]), {}


def complex_heisenberg_real():
    """Realification of [z1, z2] = z3 on (X1, Y1, X2, Y2, X3, Y3) with Y_j = sqrt(-1) X_j."""
    X1, Y1, X2, Y2, X3, Y3 = range(6)
    alg = RealLieAlgebra.from_brackets(
        6,
        {(X1, X2): {X3: 1.0}, (X1, Y2): {Y3: 1.0}, (Y1, X2): {Y3: 1.0}, (Y1, Y2): {X3: -1.0}},
        "complex_heisenberg",
    )
    I = np.zeros((6, 6))
    for x, y in ((X1, Y1), (X2, Y2), (X3, Y3)):
        I[y, x], I[x, y] = 1.0, -1.0
    return alg, I, {"weights": [0.5, 0.5, 0.5], "basis": [X1, X2, X3]}


def su2_r_real(broken=False):
    """su(2) + R with the Hopf-surface complex structure.

    ``broken=True`` conjugates I by the shear e1 -> e1 + e4: still I^2 = -Id, but not integrable.
    """
    e1, e2, e3, e4 = range(4)
    alg = RealLieAlgebra.from_brackets(
        4, {(e1, e2): {e3: 1.0}, (e2, e3): {e1: 1.0}, (e3, e1): {e2: 1.0}}, "su2+R"
    )
    I = np.zeros((4, 4))
    I[e2, e1], I[e1, e2] = 1.0, -1.0
    I[e4, e3], I[e3, e4] = 1.0, -1.0
    if broken:
        shear = np.eye(4)
        shear[e4, e1] = 1.0
        I = shear @ I @ np.linalg.inv(shear)
    return alg, I, {}


def builtin_real(name, **params):
    if name == "ch2":
        return ch2_real(float(params.get("beta", 1.0)), float(params.get("gamma", 1.0)))
    if name == "abelian":
        return abelian_real(params.get("n", 2))
    if name == "complex_heisenberg":
        return complex_heisenberg_real()
    if name in ("su2_r", "su2r"):
        return su2_r_real(bool(int(params.get("broken", 0))))
    raise ParameterError(f"unknown builtin real algebra {name!r}")
