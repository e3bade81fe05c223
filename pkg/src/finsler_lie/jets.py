"""Derivative engines for scalar functions of 2n real coordinates.

``Jet`` is forward-mode propagation of a truncated Taylor expansion: it
carries the value together with the first three derivative tensors with
respect to ``m`` real variables. Arithmetic follows the Leibniz rule and
composition with univariate functions follows Faa di Bruno; coefficients may
be complex (the variables themselves are always real).

``central_derivatives`` is the finite-difference counterpart used as the
independent oracle.
"""

from __future__ import annotations

from itertools import combinations_with_replacement, permutations

import numpy as np

ORDER = 3


def _sym3(a2, b1):
    """a2[..., i, j] * b1[..., k] symmetrized over the three slots (3 terms)."""
    return (
        a2[..., :, :, None] * b1[..., None, None, :]
        + a2[..., :, None, :] * b1[..., None, :, None]
        + a2[..., None, :, :] * b1[..., :, None, None]
    )


def _outer(a, b):
    return a[..., :, None] * b[..., None, :]


class Jet:
    """Value and derivatives d1, d2, d3 over ``m`` real variables, batched over ``shape``."""

    __array_priority__ = 1000

    def __init__(self, v, d1, d2, d3):
        self.v = np.asarray(v)
        self.d1, self.d2, self.d3 = d1, d2, d3

    # ---------------------------------------------------------------- basics
    @classmethod
    def variables(cls, x):
        """Independent real variables ``x`` (1-d, length m)."""
        x = np.asarray(x, dtype=float)
        m = x.size
        eye = np.eye(m)
        return cls(x.copy(), eye, np.zeros((m, m, m)), np.zeros((m, m, m, m)))

    @classmethod
    def constant(cls, c, m):
        c = np.asarray(c)
        s = c.shape
        z = np.zeros(s + (m,), dtype=c.dtype)
        return cls(c, z, np.zeros(s + (m, m), c.dtype), np.zeros(s + (m, m, m), c.dtype))

    @property
    def m(self):
        return self.d1.shape[-1]

    @property
    def shape(self):
        return self.v.shape

    @property
    def ndim(self):
        return self.v.ndim

    def _lift(self, other):
        if isinstance(other, Jet):
            return other
        return Jet.constant(np.asarray(other), self.m)

    def _map(self, fn):
        return Jet(fn(self.v), fn(self.d1), fn(self.d2), fn(self.d3))

    def __repr__(self):
        return f"Jet(shape={self.shape}, m={self.m}, value={self.v!r})"

    def __len__(self):
        return len(self.v)

    # ------------------------------------------------------------- indexing
    def _full_index(self, idx, k):
        if not isinstance(idx, tuple):
            idx = (idx,)
        if any(i is Ellipsis for i in idx):
            pos = idx.index(Ellipsis)
            used = sum(1 for i in idx if i is not None and i is not Ellipsis)
            idx = idx[:pos] + (slice(None),) * (self.ndim - used) + idx[pos + 1 :]
        return idx + (slice(None),) * k

    def __getitem__(self, idx):
        return Jet(
            self.v[idx],
            self.d1[self._full_index(idx, 1)],
            self.d2[self._full_index(idx, 2)],
            self.d3[self._full_index(idx, 3)],
        )

    # ----------------------------------------------------------- arithmetic
    def _bc(self, arr, k):
        """Broadcast helper: value-shaped array -> append k trailing axes."""
        return np.asarray(arr)[(...,) + (None,) * k]

    def __add__(self, other):
        o = self._lift(other)
        return Jet(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2, self.d3 + o.d3)

    __radd__ = __add__

    def __neg__(self):
        return self._map(np.negative)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            c = np.asarray(other)
            b = self._bc
            return Jet(self.v * c, self.d1 * b(c, 1), self.d2 * b(c, 2), self.d3 * b(c, 3))
        f, g, b = self, other, self._bc
        v = f.v * g.v
        d1 = f.d1 * b(g.v, 1) + b(f.v, 1) * g.d1
        d2 = f.d2 * b(g.v, 2) + _outer(f.d1, g.d1) + _outer(g.d1, f.d1) + b(f.v, 2) * g.d2
        d3 = (
            f.d3 * b(g.v, 3)
            + _sym3(f.d2, g.d1)
            + _sym3(g.d2, f.d1)
            + b(f.v, 3) * g.d3
        )
        return Jet(v, d1, d2, d3)

    __rmul__ = __mul__

    def compose(self, p0, p1, p2, p3):
        """phi(self) given phi and its first three derivatives evaluated at ``self.v``."""
        b = self._bc
        f1, f2 = self.d1, self.d2
        d1 = b(p1, 1) * f1
        d2 = b(p2, 2) * _outer(f1, f1) + b(p1, 2) * f2
        d3 = (
            b(p3, 3) * (f1[..., :, None, None] * f1[..., None, :, None] * f1[..., None, None, :])
            + b(p2, 3) * _sym3(f2, f1)
            + b(p1, 3) * self.d3
        )
        return Jet(p0, d1, d2, d3)

    def reciprocal(self):
        x = self.v
        return self.compose(1 / x, -1 / x**2, 2 / x**3, -6 / x**4)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return self * (1 / np.asarray(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, Jet):
            return (p * self.log()).exp()
        x = self.v
        if float(p).is_integer() and p >= 0:
            p = int(p)
            coef = [1, p, p * (p - 1), p * (p - 1) * (p - 2)]
            derivs = [c * x ** (p - k) if c else np.zeros_like(x) for k, c in enumerate(coef)]
            return self.compose(*derivs)
        return self.compose(x**p, p * x ** (p - 1), p * (p - 1) * x ** (p - 2),
                            p * (p - 1) * (p - 2) * x ** (p - 3))

    def sqrt(self):
        return self**0.5

    def exp(self):
        e = np.exp(self.v)
        return self.compose(e, e, e, e)

    def log(self):
        x = self.v
        return self.compose(np.log(x), 1 / x, -1 / x**2, 2 / x**3)

    def conjugate(self):
        return self._map(np.conj)

    conj = conjugate

    @property
    def real(self):
        return self._map(np.real)

    @property
    def imag(self):
        return self._map(np.imag)

    def abs2(self):
        return (self * self.conjugate()).real

    def __abs__(self):
        return self.abs2().sqrt()

    def sum(self, axis=None):
        nd = self.ndim
        if axis is None:
            axes = tuple(range(nd))
        else:
            axes = tuple(a % nd for a in np.atleast_1d(axis))
        return Jet(*(np.sum(t, axis=axes) for t in (self.v, self.d1, self.d2, self.d3)))

    def _contract_last(self, M, left):
        """Apply constant matrix along the last value axis."""
        nd = self.ndim
        out = []
        for t in (self.v, self.d1, self.d2, self.d3):
            ax = nd - 1
            moved = np.moveaxis(t, ax, -1)
            res = moved @ (M.T if left else M)
            out.append(np.moveaxis(res, -1, ax))
        return Jet(*out)

    def __matmul__(self, M):
        return self._contract_last(np.asarray(M), left=False)

    def __rmatmul__(self, M):
        return self._contract_last(np.asarray(M), left=True)

    # ----------------------------------------------------------- numpy hooks
    _UFUNCS = {
        np.add: lambda a, b: a + b,
        np.subtract: lambda a, b: a - b,
        np.multiply: lambda a, b: a * b,
        np.true_divide: lambda a, b: a / b,
        np.negative: lambda a: -a,
        np.positive: lambda a: a,
        np.conjugate: lambda a: a.conjugate(),
        np.real: lambda a: a.real,
        np.imag: lambda a: a.imag,
        np.sqrt: lambda a: a.sqrt(),
        np.exp: lambda a: a.exp(),
        np.log: lambda a: a.log(),
        np.power: lambda a, b: a**b,
        np.square: lambda a: a * a,
        np.absolute: abs,
        np.matmul: lambda a, b: a @ b,
    }

    def __array_ufunc__(self, ufunc, method, *inputs, **kwargs):
        fn = self._UFUNCS.get(ufunc)
        if method != "__call__" or fn is None or kwargs:
            return NotImplemented
        if len(inputs) == 2 and not isinstance(inputs[0], Jet):
            a = self._lift(inputs[0]) if ufunc not in (np.matmul,) else inputs[0]
            if ufunc is np.matmul:
                return self.__rmatmul__(a)
            return fn(a, inputs[1])
        return fn(*inputs)

    def __array_function__(self, func, types, args, kwargs):
        if func is np.sum:
            return args[0].sum(axis=kwargs.get("axis", args[1] if len(args) > 1 else None))
        if func is np.real:
            return args[0].real
        if func is np.imag:
            return args[0].imag
        if func is np.conj or func is np.conjugate:
            return args[0].conjugate()
        return NotImplemented


def complex_variables(v):
    """Jet vector for v = x + i y over the 2n real variables (x_1..x_n, y_1..y_n)."""
    v = np.asarray(v, dtype=complex)
    n = v.size
    m = 2 * n
    d1 = np.zeros((n, m), complex)
    d1[:, :n] = np.eye(n)
    d1[:, n:] = 1j * np.eye(n)
    return Jet(v.copy(), d1, np.zeros((n, m, m), complex), np.zeros((n, m, m, m), complex))


def real_derivatives_dual(f, v):
    """(value, grad, hessian, third) of real-valued f at complex v, w.r.t. (x, y)."""
    out = f(complex_variables(v))
    if not isinstance(out, Jet):
        raise TypeError("function did not propagate derivatives (returned a plain value)")
    vals = [np.real(t) for t in (out.v, out.d1, out.d2, out.d3)]
    return float(vals[0]), vals[1], vals[2], vals[3]


# --------------------------------------------------------------------------
# finite differences
# --------------------------------------------------------------------------

EPS = np.finfo(float).eps


# optimal steps for k-th derivatives: eps**(1/(k+2)) plain, eps**(1/(k+4)) with one Richardson level
def default_step(order, richardson=True):
    return EPS ** (1.0 / (order + (4 if richardson else 2)))


def _stencil_points(x, h, index_tuples):
    """Points x + h * sum_s sign_s e_{a_s} for all sign patterns; returns (points, signs)."""
    m = x.size
    k = len(index_tuples[0])
    signs = np.array(np.meshgrid(*([[-1.0, 1.0]] * k), indexing="ij")).reshape(k, -1).T
    pts = np.repeat(x[None, None, :], len(index_tuples), axis=0).repeat(len(signs), axis=1)
    for t, idx in enumerate(index_tuples):
        for s_i, a in enumerate(idx):
            pts[t, :, a] += h * signs[:, s_i]
    return pts.reshape(-1, m), np.prod(signs, axis=1)


def _central(f, x, h, order):
    """Symmetric tensor of k-th central differences, D_a..D_c f with D_a f = (f(+h) - f(-h)) / 2h."""
    m = x.size
    combos = list(combinations_with_replacement(range(m), order))
    pts, sgn = _stencil_points(x, h, combos)
    vals = np.asarray(f(pts), dtype=float).reshape(len(combos), -1)
    est = vals @ sgn / (2 * h) ** order
    out = np.zeros((m,) * order)
    for c, val in zip(combos, est):
        for perm in set(permutations(c)):
            out[perm] = val
    return out


def central_derivative(f, x, order, h, richardson=True):
    """k-th derivative tensor of scalar f (vectorized over leading axis) at real x."""
    x = np.asarray(x, dtype=float)
    d = _central(f, x, h, order)
    if not richardson:
        return d
    d_half = _central(f, x, h / 2, order)
    return (4 * d_half - d) / 3


def central_derivatives(f, x, scale=1.0, step=None, richardson=True, max_order=ORDER):
    """Value and derivative tensors up to ``max_order`` by central differences."""
    x = np.asarray(x, dtype=float)
    f0 = float(np.asarray(f(x[None, :]))[0])
    out = [f0]
    for k in range(1, max_order + 1):
        h = (step if step is not None else default_step(k, richardson)) * scale
        out.append(central_derivative(f, x, k, h, richardson))
    return tuple(out)


def richardson_diff(fn, x0, direction, h, levels=2):
    """Derivative of array-valued fn along ``direction`` at x0 (Richardson on central differences)."""
    table = []
    for lvl in range(levels + 1):
        hh = h / 2**lvl
        table.append((np.asarray(fn(x0 + hh * direction)) - np.asarray(fn(x0 - hh * direction))) / (2 * hh))
    for k in range(1, levels + 1):
        fac = 4.0**k
        table = [(fac * table[i + 1] - table[i]) / (fac - 1) for i in range(len(table) - 1)]
    return table[0]


def wirtinger_matrices(n):
    """P, Q with d/dv = P @ d/d(x,y) and d/dvbar = Q @ d/d(x,y)."""
    eye = np.eye(n)
    P = 0.5 * np.hstack([eye, -1j * eye])
    Q = 0.5 * np.hstack([eye, 1j * eye])
    return P, Q

