"""The boundary cusp-count criterion.

For a map f = h + conj(g) with g' = z**(m-1) h', the boundary velocity
vanishes exactly where the phase function

    F(t) = (2p + m - 1) t + 2 arg H(e^{it}),      H(z) = h'(z) / z**(p-1),

crosses an integer multiple of 2 pi (the arg taken along a continuous
branch anchored at its principal value at t = -pi).  The sufficient
criterion for p-valence asks that H be zero-free on the closed disk and
that F meet the levels 2 k pi, k in K = {0, +-1, ..., +-floor((2p+m+1)/2)},
in exactly 2p+m-1 simple crossings, at most one per level.

This module computes the continuous branch of arg H on |z| = 1 (with local
grid refinement so no sampled increment reaches pi/2), locates the level
crossings by bisection, certifies zero-freeness of H via its boundary
winding number, and samples the monotonicity margin

    min Re(1 + z h''(z)/h'(z)) + (m - 1)/2

over circles; a positive margin forces F' > 0 so each level is hit at most
once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fncore import (
    BoundaryHypothesisError,
    DEFAULT_QUAD,
    FunctionSpec,
    HarmonicMapSpec,
    ParameterError,
    PoleError,
    PolySeries,
    QuadratureConfig,
    RationalDeriv,
    UnwrapError,
    denominator_roots,
    derive_g,
    eval_f_many,
    eval_h_prime_many,
    eval_h_second_many,
    eval_normalized_deriv_many,
    normalized_deriv_roots,
)

_TWO_PI = 2.0 * math.pi
_MAX_UNWRAP_POINTS = 1 << 20


@dataclass(frozen=True)
class CriterionConfig:
    grid_size: int = 8192
    bisect_tol: float = 1e-12
    tangency_threshold: float = 1e-7
    h_nonvanish_tol: float = 1e-9

    def __post_init__(self):
        if self.grid_size < 1024 or self.grid_size & (self.grid_size - 1):
            raise ParameterError("grid_size must be a power of two >= 1024")
        if not (self.bisect_tol > 0 and self.tangency_threshold > 0 and self.h_nonvanish_tol > 0):
            raise ParameterError("criterion tolerances must be positive")


DEFAULT_CRITERION = CriterionConfig()


def _wrap_angle(x):
    """Map angles into [-pi, pi)."""
    return (x + math.pi) % _TWO_PI - math.pi


@dataclass
class PhaseTable:
    """Continuous branch of arg H(e^{it}) on t in [-pi, pi].

    The table's grid is dense enough that successive increments stay below
    pi/2; ``eval`` returns exact on-branch values at arbitrary t by lifting
    the principal argument to the branch selected by table interpolation.
    """

    spec: FunctionSpec
    t: np.ndarray
    phase: np.ndarray
    min_modulus: float

    @property
    def winding(self) -> int:
        """Winding number of H around 0 along the boundary circle."""
        return int(round((self.phase[-1] - self.phase[0]) / _TWO_PI))

    def eval_many(self, tq) -> np.ndarray:
        tq = np.asarray(tq, dtype=float)
        flat = np.clip(tq.ravel(), self.t[0], self.t[-1])
        hv = eval_normalized_deriv_many(self.spec, np.exp(1j * flat))
        pv = np.angle(hv)
        j = np.clip(np.searchsorted(self.t, flat), 1, self.t.size - 1)
        t0, t1 = self.t[j - 1], self.t[j]
        p0, p1 = self.phase[j - 1], self.phase[j]
        est = p0 + (p1 - p0) * (flat - t0) / np.maximum(t1 - t0, 1e-300)
        lifted = pv + _TWO_PI * np.round((est - pv) / _TWO_PI)
        return lifted.reshape(tq.shape)

    def eval(self, tq: float) -> float:
        return float(self.eval_many(np.asarray(tq, dtype=float)))


def unwrap_boundary_phase(spec: FunctionSpec, grid_size: int = 8192,
                          nonvanish_tol: float = 1e-9) -> PhaseTable:
    """Continuous branch of arg H on the boundary, anchored at t = -pi.

    Raises ``BoundaryHypothesisError`` when H vanishes on the boundary (its
    minimum sampled modulus falls to nonvanish_tol) or blows up there (a
    denominator root sits on the unit circle), and ``UnwrapError`` when the
    refinement budget is exhausted.
    """
    if grid_size < 1024:
        raise ParameterError("grid_size must be at least 1024")
    if isinstance(spec, RationalDeriv):
        roots = denominator_roots(spec.denom)
        if roots.size and np.any(np.abs(np.abs(roots) - 1.0) <= 1e-8):
            raise BoundaryHypothesisError(
                "normalized derivative blows up on the boundary "
                "(denominator root on |z| = 1)"
            )
    t = np.linspace(-math.pi, math.pi, grid_size + 1)
    hv = eval_normalized_deriv_many(spec, np.exp(1j * t))
    pv = np.angle(hv)
    mod = np.abs(hv)
    while True:
        if float(mod.min()) <= nonvanish_tol:
            raise BoundaryHypothesisError(
                f"normalized derivative vanishes on the boundary "
                f"(min sampled modulus {mod.min():.3g})"
            )
        steps = _wrap_angle(np.diff(pv))
        bad = np.flatnonzero(np.abs(steps) >= math.pi / 2)
        if bad.size == 0:
            break
        if t.size + bad.size > _MAX_UNWRAP_POINTS:
            raise UnwrapError(
                f"phase refinement exceeded {_MAX_UNWRAP_POINTS} grid points"
            )
        t_mid = 0.5 * (t[bad] + t[bad + 1])
        hv_mid = eval_normalized_deriv_many(spec, np.exp(1j * t_mid))
        t = np.insert(t, bad + 1, t_mid)
        pv = np.insert(pv, bad + 1, np.angle(hv_mid))
        mod = np.insert(mod, bad + 1, np.abs(hv_mid))
    phase = np.concatenate(([pv[0]], pv[0] + np.cumsum(steps)))
    return PhaseTable(spec=spec, t=t, phase=phase, min_modulus=float(mod.min()))


def phase_function_many(spec: FunctionSpec, m: int, t, table: PhaseTable) -> np.ndarray:
    """F(t) = (2p+m-1) t + 2 arg H(e^{it}) on the table's continuous branch."""
    t = np.asarray(t, dtype=float)
    return (2 * spec.p + m - 1) * t + 2.0 * table.eval_many(t)


def phase_function(spec: FunctionSpec, m: int, t: float, table: PhaseTable) -> float:
    return float(phase_function_many(spec, m, np.asarray(t, dtype=float), table))


def phase_function_derivative_many(spec: FunctionSpec, m: int, t) -> np.ndarray:
    """F'(t) = m + 1 + 2 Re(z h''(z)/h'(z)) at z = e^{it}.

    Raises ``PoleError`` where h' vanishes (or has a pole) on the circle.
    """
    t = np.asarray(t, dtype=float)
    z = np.exp(1j * t)
    hp = eval_h_prime_many(spec, z)
    hpp = eval_h_second_many(spec, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = z * hpp / hp
    bad = ~np.isfinite(ratio)
    if np.any(bad):
        loc = z[np.atleast_1d(bad)].ravel()[0] if np.any(bad) else None
        raise PoleError("h' vanishes on the boundary circle", location=complex(loc))
    return m + 1 + 2.0 * np.real(ratio)


def phase_function_derivative(spec: FunctionSpec, m: int, t: float) -> float:
    return float(phase_function_derivative_many(spec, m, np.asarray(t, dtype=float)))


@dataclass(frozen=True)
class RootRecord:
    """One crossing (or suspected tangency) of F with the level 2 k pi."""

    k: int
    t: float
    boundary_image: complex | None
    suspected_tangency: bool
    residual: float


def level_set(p: int, m: int) -> range:
    """The searched level indices K = 0, +-1, ..., +-floor((2p+m+1)/2)."""
    k_max = (2 * p + m + 1) // 2
    return range(-k_max, k_max + 1)


def _bisect_level(fn, a: float, b: float, fa: float, fb: float, tol: float):
    """Bisection for fn on a sign-changing bracket, polished by secant steps."""
    for _ in range(200):
        if b - a <= tol:
            break
        mid = 0.5 * (a + b)
        fm = fn(mid)
        if fm == 0.0:
            return mid, 0.0
        if (fa < 0) != (fm < 0):
            b, fb = mid, fm
        else:
            a, fa = mid, fm
    lo, hi, flo, fhi = a, b, fa, fb
    t_best, f_best = (lo, flo) if abs(flo) <= abs(fhi) else (hi, fhi)
    for _ in range(5):
        if abs(f_best) < tol or fhi == flo:
            break
        t_sec = hi - fhi * (hi - lo) / (fhi - flo)
        if not (a <= t_sec <= b):
            break
        f_sec = fn(t_sec)
        if abs(f_sec) < abs(f_best):
            t_best, f_best = t_sec, f_sec
        lo, flo, hi, fhi = hi, fhi, t_sec, f_sec
    return t_best, f_best


def find_criterion_roots(spec: FunctionSpec, m: int,
                         cfg: CriterionConfig = DEFAULT_CRITERION,
                         table: PhaseTable | None = None,
                         quad: QuadratureConfig = DEFAULT_QUAD) -> tuple[RootRecord, ...]:
    """All crossings of F with the levels 2 k pi for k in the searched set.

    Sign changes on the dense grid are refined by bisection to ``bisect_tol``
    in t; local minima of |F - 2 k pi| below ``tangency_threshold`` without a
    sign change are recorded with ``suspected_tangency=True``.  Records are
    sorted by t.
    """
    if table is None:
        table = unwrap_boundary_phase(spec, cfg.grid_size, cfg.h_nonvanish_tol)
    map_spec = derive_g(spec, m)
    coef = 2 * spec.p + m - 1
    f_grid = coef * table.t + 2.0 * table.phase
    records: list[RootRecord] = []
    for k in level_set(spec.p, m):
        target = _TWO_PI * k
        g = f_grid - target

        def fn(tq, _target=target):
            return coef * tq + 2.0 * table.eval(tq) - _target

        roots_k: list[tuple[float, float]] = []
        zero_hits = np.flatnonzero(g == 0.0)
        for i in zero_hits:
            if table.t[i] < math.pi:  # domain is [-pi, pi)
                roots_k.append((float(table.t[i]), 0.0))
        sign_changes = np.flatnonzero(g[:-1] * g[1:] < 0.0)
        for i in sign_changes:
            t_root, resid = _bisect_level(
                fn, float(table.t[i]), float(table.t[i + 1]),
                float(g[i]), float(g[i + 1]), cfg.bisect_tol,
            )
            if t_root < math.pi - cfg.bisect_tol:
                roots_k.append((t_root, abs(resid)))
        # suspected tangencies: interior local minima of |g| below threshold
        # whose neighborhoods never change sign
        absg = np.abs(g)
        interior = np.arange(1, g.size - 1)
        is_min = (absg[interior] <= absg[interior - 1]) & (absg[interior] <= absg[interior + 1])
        small = absg[interior] < cfg.tangency_threshold
        for i in interior[is_min & small]:
            if g[i - 1] * g[i] > 0.0 and g[i] * g[i + 1] > 0.0:
                t_min = float(table.t[i])
                if all(abs(t_min - tr) > 1e-6 for tr, _ in roots_k):
                    records.append(RootRecord(k=k, t=t_min, boundary_image=None,
                                              suspected_tangency=True,
                                              residual=float(absg[i])))
        roots_k.sort()
        deduped: list[tuple[float, float]] = []
        for t_root, resid in roots_k:
            if deduped and t_root - deduped[-1][0] <= 10 * cfg.bisect_tol:
                continue
            deduped.append((t_root, resid))
        if deduped:
            images = eval_f_many(map_spec, np.exp(1j * np.array([tr for tr, _ in deduped])), quad)
            for (t_root, resid), img in zip(deduped, np.atleast_1d(images)):
                records.append(RootRecord(k=k, t=t_root, boundary_image=complex(img),
                                          suspected_tangency=False, residual=resid))
    records.sort(key=lambda r: r.t)
    return tuple(records)


def check_monotonicity_margin(spec: FunctionSpec, m: int,
                              cfg: CriterionConfig = DEFAULT_CRITERION) -> float:
    """Sampled margin of the monotonicity condition Re(1+zh''/h') > -(m-1)/2.

    Samples ``grid_size`` angles on circles of radius 0.9, 0.99, 0.999 and
    1 - 1e-6, plus a pair of circles hugging every interior zero of the
    normalized derivative (and every interior denominator root), since the
    condition always fails near such a point.  Returns
    min Re(1 + z h''/h') + (m-1)/2; positive means F is strictly increasing
    wherever the sampled circles are representative.
    """
    radii = [0.9, 0.99, 0.999, 1.0 - 1e-6]
    special = np.asarray(normalized_deriv_roots(spec), dtype=complex)
    if isinstance(spec, RationalDeriv):
        special = np.concatenate([special, denominator_roots(spec.denom)])
    for z0 in special:
        r0 = abs(z0)
        if 1e-9 < r0 < 1.0 - 1e-9:
            radii.extend([min(r0 * (1 + 1e-3), 1.0 - 1e-9), r0 * (1 - 1e-3)])
    t = np.linspace(-math.pi, math.pi, cfg.grid_size, endpoint=False)
    worst = math.inf
    for r in radii:
        z = r * np.exp(1j * t)
        hp = eval_h_prime_many(spec, z, on_pole="raise")
        hpp = eval_h_second_many(spec, z, on_pole="raise")
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.real(1.0 + z * hpp / hp)
        bad = ~np.isfinite(vals)
        if np.any(bad):
            loc = z[bad][0]
            raise PoleError(f"h' vanishes at a sampled point z = {loc:.6g}",
                            location=complex(loc))
        worst = min(worst, float(vals.min()))
    return worst + (m - 1) / 2.0


@dataclass(frozen=True)
class CriterionReport:
    """Outcome of the cusp-count criterion for one map (h, m)."""

    p: int
    m: int
    roots: tuple[RootRecord, ...]
    per_level_counts: dict[int, int]
    total_roots: int
    h_nonvanishing: bool
    min_modulus_boundary: float | None
    winding_boundary: int | None
    monotonicity_margin: float | None
    hypotheses_hold: bool
    criterion_satisfied: bool
    tangency_suspects: int
    failure_reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "m": self.m,
            "expected_roots": 2 * self.p + self.m - 1,
            "total_roots": self.total_roots,
            "per_level_counts": {str(k): v for k, v in sorted(self.per_level_counts.items())},
            "roots": [
                {
                    "k": r.k,
                    "t": r.t,
                    "image": None if r.boundary_image is None
                    else [r.boundary_image.real, r.boundary_image.imag],
                    "suspected_tangency": r.suspected_tangency,
                    "residual": r.residual,
                }
                for r in self.roots
            ],
            "h_nonvanishing": self.h_nonvanishing,
            "min_modulus_boundary": self.min_modulus_boundary,
            "winding_boundary": self.winding_boundary,
            "monotonicity_margin": self.monotonicity_margin,
            "hypotheses_hold": self.hypotheses_hold,
            "criterion_satisfied": self.criterion_satisfied,
            "tangency_suspects": self.tangency_suspects,
            "failure_reason": self.failure_reason,
        }


def check_criterion(spec: FunctionSpec, m: int,
                    cfg: CriterionConfig = DEFAULT_CRITERION,
                    quad: QuadratureConfig = DEFAULT_QUAD) -> CriterionReport:
    """Run the full sufficient-condition check and assemble a report.

    ``criterion_satisfied`` is true exactly when H is zero-free on the closed
    disk (boundary modulus above tolerance and boundary winding zero, with h
    analytic there), every searched level is crossed at most once, the total
    crossing count is 2p+m-1, and no tangency is suspected.
    """
    if not isinstance(m, int) or m < 2:
        raise ParameterError("m must be an integer >= 2")
    p = spec.p
    counts = {k: 0 for k in level_set(p, m)}

    def failed(reason: str, margin=None) -> CriterionReport:
        return CriterionReport(
            p=p, m=m, roots=(), per_level_counts=counts, total_roots=0,
            h_nonvanishing=False, min_modulus_boundary=None, winding_boundary=None,
            monotonicity_margin=margin, hypotheses_hold=False,
            criterion_satisfied=False, tangency_suspects=0, failure_reason=reason,
        )

    margin: float | None
    try:
        margin = check_monotonicity_margin(spec, m, cfg)
    except PoleError as exc:
        margin = None

    analytic = True
    if isinstance(spec, RationalDeriv):
        roots_q = denominator_roots(spec.denom)
        if roots_q.size and np.any(np.abs(roots_q) < 1.0 - 1e-8):
            return failed("h is not analytic on the closed disk "
                          "(denominator root inside |z| < 1)", margin)
    try:
        table = unwrap_boundary_phase(spec, cfg.grid_size, cfg.h_nonvanish_tol)
    except BoundaryHypothesisError as exc:
        return failed(str(exc), margin)

    winding = table.winding
    h_nonvanishing = analytic and table.min_modulus > cfg.h_nonvanish_tol and winding == 0
    roots = find_criterion_roots(spec, m, cfg, table=table, quad=quad)
    tangencies = sum(1 for r in roots if r.suspected_tangency)
    for r in roots:
        if not r.suspected_tangency:
            counts[r.k] += 1
    total = sum(counts.values())
    satisfied = (
        h_nonvanishing
        and all(v <= 1 for v in counts.values())
        and total == 2 * p + m - 1
        and tangencies == 0
    )
    reason = None
    if not satisfied:
        if not h_nonvanishing:
            reason = "normalized derivative is not zero-free on the closed disk"
        elif tangencies:
            reason = "suspected tangential level contact"
        elif any(v > 1 for v in counts.values()):
            reason = "some level is crossed more than once"
        else:
            reason = f"total crossings {total} != {2 * p + m - 1}"
    return CriterionReport(
        p=p, m=m, roots=roots, per_level_counts=counts, total_roots=total,
        h_nonvanishing=h_nonvanishing,
        min_modulus_boundary=table.min_modulus, winding_boundary=winding,
        monotonicity_margin=margin, hypotheses_hold=True,
        criterion_satisfied=satisfied, tangency_suspects=tangencies,
        failure_reason=reason,
    )
