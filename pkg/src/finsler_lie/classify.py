"""Kaehler / weakly-Kaehler / Berwald criteria and the complex-Lie-group rigidity checks."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import norm as normal_dist
from scipy.stats import qmc

from .algebra import TOL_STRUCTURAL, ComplexifiedAlgebra, is_complex_group_type
from .connection import horizontal_coefficients, nonlinear_connection, torsion
from .curvature import curvature_block
from .errors import ParameterError, PreconditionError
from .jets import richardson_diff
from .norm import DUAL, DiffConfig, MetricJet, metric_jet, unit_sphere_samples

BASIS_GRID_MAX_N = 8


@dataclass(frozen=True)
class ClassifyConfig:
    tol: float = 1e-7
    samples: int = 16
    seed: int = 0
    diff: DiffConfig = field(default_factory=DiffConfig)

    def __post_init__(self):
        if not self.tol > 0:
            raise ParameterError("tolerance must be positive")
        if self.samples < 1:
            raise ParameterError("samples must be >= 1")


def sample_directions(n, count, seed):
    """``count`` scrambled-Halton unit vectors followed by the basis directions."""
    pts = qmc.Halton(d=2 * n, scramble=True, seed=seed).random(count)
    z = normal_dist.ppf(np.clip(pts, 1e-12, 1 - 1e-12))
    z = z[:, :n] + 1j * z[:, n:]
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return np.vstack([z, np.eye(n, dtype=complex)])


def _probes(n, probe_count, seed):
    if n <= BASIS_GRID_MAX_N and (probe_count is None or probe_count >= n * n):
        eye = np.eye(n, dtype=complex)
        return [(eye[q], eye[k]) for q in range(n) for k in range(n)]
    count = probe_count or n * n
    us = unit_sphere_samples(n, count, seed)
    ws = unit_sphere_samples(n, count, seed + 1)
    return list(zip(us, ws))


def kahler_form(alg: ComplexifiedAlgebra, jet: MetricJet, N, u, w):
    v = jet.v
    z = np.zeros_like(v)
    br = lambda a, b: alg.bracket_hol(a, b)  # noqa: E731
    u_vbar = br((u, z), (z, np.conj(v)))
    v_w = br((v, z), (w, z))
    u_wbar = br((u, z), (z, np.conj(w)))
    v_wbar = br((v, z), (z, np.conj(w)))
    v_vbar = br((v, z), (z, np.conj(v)))
    return (
        jet.g_v(w, u_vbar)
        - jet.g_v(v_w, u)
        - jet.g_v(v, u_wbar)
        - np.conj(jet.S_v(u, v_wbar))
        - jet.C_plus_form(w, u, N @ v)
        + jet.C_minus_form(w, u, v_vbar)
    )


def weakly_kahler_form(alg: ComplexifiedAlgebra, jet: MetricJet, N, w):
    v = jet.v
    z = np.zeros_like(v)
    br = lambda a, b: alg.bracket_hol(a, b)  # noqa: E731
    return (
        jet.g_v(w, br((v, z), (z, np.conj(v))))
        - jet.g_v(br((v, z), (w, z)), v)
        - jet.g_v(v, br((v, z), (z, np.conj(w))))
        - jet.S_v(N @ v, w)
    )


def kahler_residual(alg, norm, v, probe_count=None, seed=0, cfg: DiffConfig = DUAL, jet=None):
    jet = jet if jet is not None else metric_jet(norm, v, cfg)
    N, _ = nonlinear_connection(alg, jet)
    return max(float(abs(kahler_form(alg, jet, N, u, w))) for u, w in _probes(alg.n, probe_count, seed))


def weakly_kahler_residual(alg, norm, v, probe_count=None, seed=0, cfg: DiffConfig = DUAL, jet=None):
    jet = jet if jet is not None else metric_jet(norm, v, cfg)
    N, _ = nonlinear_connection(alg, jet)
    n = alg.n
    if n <= BASIS_GRID_MAX_N and (probe_count is None or probe_count >= n):
        ws = np.eye(n, dtype=complex)
    else:
        ws = unit_sphere_samples(n, probe_count or n, seed)
    return max(float(abs(weakly_kahler_form(alg, jet, N, w))) for w in ws)


def _gamma_map(alg, norm, cfg):
    def fn(v):
        jet = metric_jet(norm, v, cfg)
        N, _ = nonlinear_connection(alg, jet)
        return horizontal_coefficients(alg, jet, N)[0]

    return fn


@dataclass(frozen=True)
class BerwaldResult:
    spread: float
    derivative: float

    @property
    def residual(self):
        return self.spread + self.derivative


def berwald_residual(alg, norm, sample_count=8, seed=0, cfg: DiffConfig = DUAL, directions=None):
    """Spread of Gamma over sampled directions plus max |dGamma/dv|, |dGamma/dvbar| at the samples.

    Gamma is homogeneous of degree 0, so unit directions suffice.
    """
    if directions is None:
        if sample_count < 2:
            raise ParameterError("berwald_residual needs at least 2 samples")
        directions = unit_sphere_samples(alg.n, sample_count, seed)
    fn = _gamma_map(alg, norm, cfg)
    gammas = [fn(v) for v in directions]
    spread = max(
        (float(np.max(np.abs(a - b))) for i, a in enumerate(gammas) for b in gammas[i + 1 :]),
        default=0.0,
    )
    deriv = 0.0
    n = alg.n
    for v in directions:
        h = 1e-2 * float(np.max(np.abs(v)))
        for l in range(n):
            e = np.eye(n)[l]
            dx = richardson_diff(fn, v, e, h)
            dy = richardson_diff(fn, v, 1j * e, h)
            deriv = max(deriv, float(np.max(np.abs(0.5 * (dx - 1j * dy)))),
                        float(np.max(np.abs(0.5 * (dx + 1j * dy)))))
    return BerwaldResult(spread, deriv)


@dataclass(frozen=True)
class ClassificationReport:
    kahler_residual: float
    weakly_kahler_residual: float
    berwald_residual: float
    bisectional_max: float
    is_complex_group_type: bool
    is_abelian: bool
    verdict_kahler: bool
    verdict_weakly_kahler: bool
    verdict_berwald: bool
    tol: float
    samples: int
    seed: int
    diff_mode: str

    @property
    def verdict_kahler_berwald(self):
        return self.verdict_kahler and self.verdict_berwald

    def invariant_violations(self):
        out = []
        if self.verdict_kahler and not self.verdict_weakly_kahler:
            out.append("kahler without weakly-kahler")
        if self.verdict_kahler and self.weakly_kahler_residual >= 10 * self.tol:
            out.append("kahler residual does not bound weakly-kahler residual")
        if self.is_complex_group_type and not (self.verdict_berwald and self.bisectional_max < self.tol):
            out.append("complex-group type but not Berwald with vanishing bisectional curvature")
        if self.is_complex_group_type and (self.verdict_kahler != self.is_abelian):
            out.append("complex-group type: kahler verdict disagrees with abelian test")
        return out

    def to_dict(self):
        d = asdict(self)
        d["verdict_kahler_berwald"] = self.verdict_kahler_berwald
        d["invariant_violations"] = self.invariant_violations()
        return d


def classify(alg: ComplexifiedAlgebra, norm, cfg: ClassifyConfig = ClassifyConfig()):
    dirs = sample_directions(alg.n, cfg.samples, cfg.seed)
    kahler = weakly = bis = 0.0
    blocks = []
    for v in dirs:
        cd = curvature_block(alg, norm, v, cfg.diff)
        blocks.append(cd)
        kahler = max(kahler, kahler_residual(alg, norm, v, jet=cd.jet))
        weakly = max(weakly, weakly_kahler_residual(alg, norm, v, jet=cd.jet))
    for cd in blocks:
        for w in dirs:
            bis = max(bis, abs(cd.bisectional(w)))
    berwald = berwald_residual(alg, norm, cfg=cfg.diff, directions=dirs).residual
    cgt, _ = is_complex_group_type(alg)
    tol = cfg.tol
    return ClassificationReport(
        kahler_residual=kahler,
        weakly_kahler_residual=weakly,
        berwald_residual=berwald,
        bisectional_max=bis,
        is_complex_group_type=cgt,
        is_abelian=alg.is_abelian,
        verdict_kahler=kahler < tol,
        verdict_weakly_kahler=weakly < tol,
        verdict_berwald=berwald < tol,
        tol=tol,
        samples=len(dirs),
        seed=cfg.seed,
        diff_mode=cfg.diff.mode,
    )


@dataclass(frozen=True)
class TheoremReport:
    gamma_max: float
    bisectional_max: float
    torsion_vs_minus_half_lambda_residual: float
    berwald_residual: float
    kahler_residual: float
    is_abelian: bool
    verdict_kahler: bool
    kahler_iff_abelian_consistent: bool
    tol: float

    @property
    def passed(self):
        return (
            self.gamma_max < self.tol
            and self.bisectional_max < self.tol
            and self.berwald_residual < self.tol
            and self.torsion_vs_minus_half_lambda_residual < 1e-12
            and self.kahler_iff_abelian_consistent
        )

    def to_dict(self):
        d = asdict(self)
        d["pass"] = self.passed
        return d


def _offending_mixed_entry(alg):
    blocks = {"lambda_mixed_hol": alg.mixed_hol, "lambda_mixed_anti": alg.mixed_anti}
    name, arr = max(blocks.items(), key=lambda kv: np.max(np.abs(kv[1])))
    i, j, k = np.unravel_index(np.argmax(np.abs(arr)), arr.shape)
    return name, (int(i) + 1, int(j) + 1, int(k) + 1), complex(arr[i, j, k])


def verify_complex_group_theorems(alg: ComplexifiedAlgebra, norm, cfg: ClassifyConfig = ClassifyConfig()):
    ok, mag = is_complex_group_type(alg)
    if not ok:
        name, idx, val = _offending_mixed_entry(alg)
        raise PreconditionError(
            f"{alg.name or 'algebra'} is not of complex-group type: {name} entry (i,j,k)={idx} "
            f"is {val.real:.6g}{val.imag:+.6g}j (|.| = {mag:.3e} >= {TOL_STRUCTURAL:g})"
        )
    dirs = sample_directions(alg.n, cfg.samples, cfg.seed)
    gamma_max = bis = tors = kahler = 0.0
    for v in dirs:
        cd = curvature_block(alg, norm, v, cfg.diff)
        N = cd.N
        Gamma, _ = horizontal_coefficients(alg, cd.jet, N)
        gamma_max = max(gamma_max, float(np.max(np.abs(Gamma))))
        T = torsion(alg, cd.jet, N)
        tors = max(tors, float(np.max(np.abs(T + 0.5 * alg.hol))))
        kahler = max(kahler, kahler_residual(alg, norm, v, jet=cd.jet))
        for w in dirs:
            bis = max(bis, abs(cd.bisectional(w)))
    berwald = berwald_residual(alg, norm, cfg=cfg.diff, directions=dirs).residual
    verdict = kahler < cfg.tol and berwald < cfg.tol
    return TheoremReport(
        gamma_max=gamma_max,
        bisectional_max=bis,
        torsion_vs_minus_half_lambda_residual=tors,
        berwald_residual=berwald,
        kahler_residual=kahler,
        is_abelian=alg.is_abelian,
        verdict_kahler=verdict,
        kahler_iff_abelian_consistent=verdict == alg.is_abelian,
        tol=cfg.tol,
    )
