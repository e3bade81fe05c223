"""Independent reference computations used by the tests.

Nothing here goes through the library's index formulas: brackets are taken
from the structure tensor one basis pair at a time, metric tensors come from
plain central differences of F^2, and Hermitian curvature is assembled from
the coordinate-free operator expression with the connection obtained from the
defining pairing identity.
"""

import numpy as np


def unit(n, rng, scale=(1.0, 1.0)):
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z / np.linalg.norm(z) * rng.uniform(*scale)


def hpd(n, rng, lo=0.5):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = a @ a.conj().T
    return h / np.linalg.norm(h, 2) + lo * np.eye(n)


# ---------------------------------------------------------------- brackets


def bracket_pair(alg, x, y):
    """[x, y] for x, y given as (hol, anti) pairs, summing basis brackets one by one."""
    n = alg.n
    s = alg.structure_tensor
    xs = np.concatenate(x)
    ys = np.concatenate(y)
    out = np.zeros(2 * n, complex)
    for a in range(2 * n):
        for b in range(2 * n):
            if xs[a] != 0 and ys[b] != 0:
                out += xs[a] * ys[b] * s[:, a, b]
    return out[:n], out[n:]


def hol(x):
    return (np.asarray(x, complex), np.zeros(len(x), complex))


def anti(x):
    return (np.zeros(len(x), complex), np.asarray(x, complex))


def lam_anti_bar(alg):
    """L[s, l, k]: coefficient of ebar_s in [ebar_l, e_k]."""
    n = alg.n
    eye = np.eye(n)
    L = np.zeros((n, n, n), complex)
    for l in range(n):
        for k in range(n):
            L[:, l, k] = bracket_pair(alg, anti(eye[l]), hol(eye[k]))[1]
    return L


def hol_constants(alg):
    """lam[i, j, k]: coefficient of e_i in [e_j, e_k]."""
    n = alg.n
    eye = np.eye(n)
    lam = np.zeros((n, n, n), complex)
    for j in range(n):
        for k in range(n):
            lam[:, j, k] = bracket_pair(alg, hol(eye[j]), hol(eye[k]))[0]
    return lam


# ---------------------------------------------------------------- Hermitian geometry


def hermitian_N(alg, h, v):
    """N(v) for a Hermitian metric h from g(N w, u) = g(v, [u, wbar]^{1,0}) on basis vectors."""
    n = alg.n
    eye = np.eye(n)
    N = np.zeros((n, n), complex)
    for k in range(n):
        b = np.array([v @ h @ np.conj(bracket_pair(alg, hol(eye[q]), anti(eye[k]))[0]) for q in range(n)])
        # x @ h @ conj(e_q) = (h^T x)_q
        N[:, k] = np.linalg.solve(h.T, b)
    return N


def hermitian_curvature_operator(alg, h, v, w):
    """R(w, wbar)v for a Hermitian metric; N is complex-linear in v so its flat derivative is exact."""
    v = np.asarray(v, complex)
    w = np.asarray(w, complex)
    Nv = hermitian_N(alg, h, v)
    v_wbar = bracket_pair(alg, hol(v), anti(np.conj(w)))[0]
    w_wbar = bracket_pair(alg, hol(w), anti(np.conj(w)))
    wbar_w = bracket_pair(alg, anti(np.conj(w)), hol(w))
    return (
        hermitian_N(alg, h, v_wbar) @ w
        + Nv @ w_wbar[0]
        - bracket_pair(alg, hol(Nv @ w), anti(np.conj(w)))[0]
        + bracket_pair(alg, hol(v), anti(wbar_w[1]))[0]
    )


def hermitian_bisectional(alg, h, v, w):
    g = lambda a, b: a @ h @ np.conj(b)  # noqa: E731
    R = hermitian_curvature_operator(alg, h, v, w)
    return g(R, v) / (g(v, v) * g(w, w))


def hermitian_sectional(alg, h, v):
    return 2 * hermitian_bisectional(alg, h, v, v)


def chern_torsion_reference(alg, h):
    """1/2 (lam_k^j_i - lam^j_ik - lam_i^j_k) with lam_i^j_k = g_{i sbar} g^{lbar j} L^{sbar}_{lbar k}."""
    n = alg.n
    L = lam_anti_bar(alg)
    lam = hol_constants(alg)
    hinv = np.linalg.inv(h)
    up = np.zeros((n, n, n), complex)  # up[i, j, k] = lam_i^j_k
    for i in range(n):
        for j in range(n):
            for k in range(n):
                up[i, j, k] = sum(h[i, s] * hinv[l, j] * L[s, l, k] for s in range(n) for l in range(n))
    T = np.zeros((n, n, n), complex)  # T[j, i, k]
    for j in range(n):
        for i in range(n):
            for k in range(n):
                T[j, i, k] = 0.5 * (up[k, j, i] - lam[j, i, k] - up[i, j, k])
    return T


# ---------------------------------------------------------------- finite differences of F^2


def wirtinger_fd(f2, v, h=1e-3):
    """g[i,j] = d^2 F^2 / dv^i dvbar^j and the holomorphic block d^2 F^2 / dv^i dv^j by 4-point stencils."""
    v = np.asarray(v, complex)
    n = v.size
    dirs = [np.eye(n)[i] for i in range(n)] + [1j * np.eye(n)[i] for i in range(n)]

    def second(a, b):
        def d2(hh):
            return (f2(v + hh * a + hh * b) - f2(v + hh * a - hh * b) - f2(v - hh * a + hh * b)
                    + f2(v - hh * a - hh * b)) / (4 * hh * hh)
        return (4 * d2(h / 2) - d2(h)) / 3

    H = np.array([[second(a, b) for b in dirs] for a in dirs])
    P = 0.5 * np.hstack([np.eye(n), -1j * np.eye(n)])
    Q = 0.5 * np.hstack([np.eye(n), 1j * np.eye(n)])
    return P @ H @ Q.T, P @ H @ P.T
