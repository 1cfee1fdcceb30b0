"""Valence certification via winding numbers and Newton preimage counts.

For sense-preserving f the number of preimages of a point w inside the
circle |z| = r (counted with multiplicity) equals the winding number of the
traced image curve around w, so the maximum winding over a probe grid
bounds the valence of f on that disk from below.  The class handled here is
sense-preserving away from zeros of h' because |g'/h'| = |z|**(m-1) < 1 on
the open disk.

``winding_number`` sums angle increments along a ``CurveTrace``, refining
any step that turns by pi/2 or more via on-demand midpoint evaluation;
``valence_scan`` sweeps a padded bounding-box grid of probes;
``newton_preimages`` solves f(z) = w directly with a damped Newton method
for harmonic maps; ``cross_check`` plays the two routes against each other.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .fncore import (
    DEFAULT_QUAD,
    HarmonicMapSpec,
    IndeterminateProbeError,
    ParameterError,
    QuadratureConfig,
    ResolutionError,
    ScanQualityError,
    eval_f_many,
    eval_g_prime_many,
    eval_h_prime_many,
)
from .geometry import CurveTrace, trace_circle

_TWO_PI = 2.0 * math.pi
_SCAN_CHUNK = 256  # fixed so results never depend on the worker count


@dataclass(frozen=True)
class WindingResult:
    w: complex
    winding: int
    min_curve_distance: float


def _refined_increment(trace: CurveTrace, w: complex, t0: float, t1: float,
                       p0: complex, p1: complex, clearance: float,
                       depth: int) -> float:
    inc = float(np.angle((p1 - w) * np.conj(p0 - w)))
    if abs(inc) < math.pi / 2:
        return inc
    if depth <= 0:
        raise ResolutionError(
            f"angle increment stayed >= pi/2 after refinement near t = {t0:.6g}"
        )
    tm = 0.5 * (t0 + t1)
    pm = complex(trace.point_at(tm)[0])
    if abs(pm - w) <= clearance:
        raise IndeterminateProbeError(
            f"probe {w:.6g} within clearance of the curve at t = {tm:.6g}"
        )
    return (_refined_increment(trace, w, t0, tm, p0, pm, clearance, depth - 1)
            + _refined_increment(trace, w, tm, t1, pm, p1, clearance, depth - 1))


def winding_number(trace: CurveTrace, w, probe_clearance: float | None = None) -> WindingResult:
    """Winding number of the traced curve around w.

    Sums the turning angles between consecutive samples; any step of pi/2 or
    more is split by evaluating the map at parameter midpoints (two levels,
    so up to 4x the local density) before giving up with
    ``ResolutionError``.  Probes closer to the curve than
    ``probe_clearance`` (default 1e-4 times the curve diameter) raise
    ``IndeterminateProbeError`` rather than return an untrustworthy count.
    """
    w = complex(w)
    if probe_clearance is None:
        probe_clearance = 1e-4 * trace.diameter()
    d = trace.points - w
    dist = np.abs(d)
    mind = float(dist.min())
    if mind <= probe_clearance:
        raise IndeterminateProbeError(
            f"probe {w:.6g} lies within clearance {probe_clearance:.3g} "
            f"of the traced curve (distance {mind:.3g})"
        )
    inc = np.angle(np.roll(d, -1) * np.conj(d))
    bad = np.flatnonzero(np.abs(inc) >= math.pi / 2)
    total = float(inc.sum())
    if bad.size:
        n = trace.n
        step = _TWO_PI / n
        for j in bad:
            t0 = float(trace.t[j])
            p0 = complex(trace.points[j])
            p1 = complex(trace.points[(j + 1) % n])
            refined = _refined_increment(trace, w, t0, t0 + step, p0, p1,
                                         probe_clearance, depth=2)
            total += refined - float(inc[j])
    turns = total / _TWO_PI
    k = round(turns)
    if abs(turns - k) >= 0.05:
        raise ResolutionError(
            f"winding sum {turns:.6g} is not close to an integer; "
            "the trace is too coarse for this probe"
        )
    return WindingResult(w=w, winding=int(k), min_curve_distance=mind)


@dataclass(frozen=True)
class ValenceReport:
    """Outcome of a winding-number sweep over a probe grid."""

    p: int
    radius: float
    grid: tuple[int, int]
    n_probes: int
    n_indeterminate: int
    max_valence: int
    n_attained: int
    attained_at: tuple[complex, ...]
    counts: dict[int, int]
    consistent_with_p: bool

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "radius": self.radius,
            "grid": list(self.grid),
            "n_probes": self.n_probes,
            "n_indeterminate": self.n_indeterminate,
            "max_valence": self.max_valence,
            "n_attained": self.n_attained,
            "attained_at": [[z.real, z.imag] for z in self.attained_at],
            "counts": {str(k): v for k, v in sorted(self.counts.items())},
            "consistent_with_p": self.consistent_with_p,
        }


def _scan_chunk(trace: CurveTrace, probes: np.ndarray, clearance: float):
    """Winding numbers for one probe chunk; -1 marks indeterminate probes."""
    d = trace.points[:, None] - probes[None, :]
    mind = np.abs(d).min(axis=0)
    res = np.full(probes.size, -2, dtype=int)  # -2: needs scalar fallback
    ok = mind > clearance
    res[~ok] = -1
    if np.any(ok):
        dk = d[:, ok]
        inc = np.angle(np.roll(dk, -1, axis=0) * np.conj(dk))
        clean = np.max(np.abs(inc), axis=0) < math.pi / 2
        sums = inc.sum(axis=0) / _TWO_PI
        near_int = np.abs(sums - np.round(sums)) < 0.05
        vals = np.round(sums).astype(int)
        vals = np.where(clean & near_int & (vals >= 0), vals, -2)
        res[ok] = vals
    for j in np.flatnonzero(res == -2):
        try:
            k = winding_number(trace, complex(probes[j]), clearance).winding
            res[j] = k if k >= 0 else -1
        except (IndeterminateProbeError, ResolutionError):
            res[j] = -1
    return res


def valence_scan(map_spec: HarmonicMapSpec, r: float = 0.999,
                 grid: tuple[int, int] = (64, 64),
                 cfg: QuadratureConfig = DEFAULT_QUAD,
                 n_samples: int = 4096,
                 workers: int = 1,
                 trace: CurveTrace | None = None) -> ValenceReport:
    """Max winding number of the image of |z| = r over a grid of probes.

    Probes fill the curve's bounding box padded by 10 percent.  Probes that
    land within clearance of the curve are skipped; if more than 20 percent
    of the grid is skipped the scan aborts with ``ScanQualityError``.  Work
    is split into fixed 256-probe chunks so the outcome is identical for any
    ``workers`` count.
    """
    gx, gy = grid
    if gx < 2 or gy < 2:
        raise ParameterError("scan grid must be at least 2 x 2")
    if trace is None:
        trace = trace_circle(map_spec, r, n_samples, cfg)
    re, im = trace.points.real, trace.points.imag
    wx, wy = float(np.ptp(re)), float(np.ptp(im))
    pad_x = 0.1 * wx if wx > 0 else max(0.1 * wy, 1e-3)
    pad_y = 0.1 * wy if wy > 0 else max(0.1 * wx, 1e-3)
    xs = np.linspace(re.min() - pad_x, re.max() + pad_x, gx)
    ys = np.linspace(im.min() - pad_y, im.max() + pad_y, gy)
    probes = (xs[None, :] + 1j * ys[:, None]).ravel()
    clearance = 1e-4 * trace.diameter()
    chunks = [probes[i:i + _SCAN_CHUNK] for i in range(0, probes.size, _SCAN_CHUNK)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _scan_chunk(trace, c, clearance), chunks))
    else:
        parts = [_scan_chunk(trace, c, clearance) for c in chunks]
    windings = np.concatenate(parts) if parts else np.zeros(0, dtype=int)
    indet = windings < 0
    n_indet = int(indet.sum())
    if n_indet > 0.2 * probes.size:
        raise ScanQualityError(
            f"{n_indet} of {probes.size} probes were indeterminate; "
            "refine the trace or move the grid"
        )
    good = windings[~indet]
    counts: dict[int, int] = {}
    for v in np.unique(good):
        counts[int(v)] = int(np.count_nonzero(good == v))
    max_val = int(good.max()) if good.size else 0
    hit = np.flatnonzero(~indet & (windings == max_val))
    exemplars = tuple(complex(probes[j]) for j in hit[:8])
    return ValenceReport(
        p=map_spec.p, radius=r, grid=(gx, gy), n_probes=int(probes.size),
        n_indeterminate=n_indet, max_valence=max_val,
        n_attained=int(hit.size), attained_at=exemplars, counts=counts,
        consistent_with_p=(max_val == map_spec.p),
    )


@dataclass(frozen=True)
class PreimageSet:
    """Deduplicated Newton solutions of f(z) = w inside the disk."""

    w: complex
    roots: np.ndarray
    residuals: np.ndarray
    n_converged: int
    n_dropped: int

    @property
    def count(self) -> int:
        return int(self.roots.size)


def _halton_starts(n: int) -> np.ndarray:
    """First n Halton(2,3) points of the square, kept where |z| < 0.999."""
    out = np.empty(n, dtype=complex)
    got = 0
    i = 1
    while got < n:
        batch = np.arange(i, i + 4 * (n - got) + 16)
        i = int(batch[-1]) + 1
        uv = []
        for base in (2, 3):
            k = batch.astype(float)
            idx = batch.copy()
            val = np.zeros(batch.size)
            denom = np.ones(batch.size)
            while np.any(idx > 0):
                denom *= base
                val += (idx % base) / denom
                idx //= base
            uv.append(val)
        z = (2.0 * uv[0] - 1.0) + 1j * (2.0 * uv[1] - 1.0)
        z = z[np.abs(z) < 0.999]
        take = min(z.size, n - got)
        out[got:got + take] = z[:take]
        got += take
    return out


def newton_preimages(map_spec: HarmonicMapSpec, w, n_starts: int = 256,
                     cfg: QuadratureConfig = DEFAULT_QUAD,
                     newton_tol: float = 1e-10,
                     dedupe_radius: float = 1e-6,
                     max_iter: int = 100) -> PreimageSet:
    """Solve f(z) = w from Halton-distributed starts in |z| < 0.999.

    The Newton step solves the real-linear system a dz + conj(b dz) = -res
    with a = h'(z), b = g'(z), giving

        dz = (conj(b) conj(res) - conj(a) res) / (|a|**2 - |b|**2),

    damped by halving (at most 20 times) until the residual decreases;
    iterates are confined to |z| < 0.9995.  Converged points (residual at
    most ``newton_tol``) are merged within ``dedupe_radius`` and returned
    sorted lexicographically by (Re z, Im z).
    """
    if n_starts < 100:
        raise ParameterError("newton_preimages needs at least 100 starts")
    w = complex(w)
    z = _halton_starts(n_starts)
    vals, failed = eval_f_many(map_spec, z, cfg, on_failure="mask")
    res = np.atleast_1d(vals) - w
    alive = ~np.atleast_1d(failed)
    res[~alive] = np.inf
    done = np.zeros(n_starts, dtype=bool)
    for _ in range(max_iter):
        done |= alive & (np.abs(res) <= newton_tol)
        idx = np.flatnonzero(alive & ~done)
        if idx.size == 0:
            break
        za, ra = z[idx], res[idx]
        a = np.atleast_1d(eval_h_prime_many(map_spec.h, za, on_pole="nan"))
        b = np.atleast_1d(eval_g_prime_many(map_spec, za, on_pole="nan"))
        det = np.abs(a) ** 2 - np.abs(b) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            delta = (np.conj(b) * np.conj(ra) - np.conj(a) * ra) / det
        usable = np.isfinite(delta)
        alive[idx[~usable]] = False
        idx, za, ra, delta = idx[usable], za[usable], ra[usable], delta[usable]
        if idx.size == 0:
            continue
        accepted = np.zeros(idx.size, dtype=bool)
        z_new = za.copy()
        r_new = ra.copy()
        step = delta.copy()
        for _halving in range(21):
            todo = np.flatnonzero(~accepted)
            if todo.size == 0:
                break
            z_try = za[todo] + step[todo]
            inside = np.abs(z_try) < 0.9995
            r_try = np.full(todo.size, np.inf, dtype=complex)
            if np.any(inside):
                f_try, f_bad = eval_f_many(map_spec, z_try[inside], cfg,
                                           on_failure="mask")
                f_try = np.atleast_1d(f_try).astype(complex)
                f_try[np.atleast_1d(f_bad)] = np.nan
                r_try[inside] = f_try - w
            better = np.isfinite(r_try) & (np.abs(r_try) < np.abs(ra[todo]))
            sel = todo[better]
            z_new[sel] = za[sel] + step[sel]
            r_new[sel] = r_try[better]
            accepted[sel] = True
            step[todo[~better]] *= 0.5
        alive[idx[~accepted]] = False
        z[idx[accepted]] = z_new[accepted]
        res[idx[accepted]] = r_new[accepted]
    done |= alive & (np.abs(res) <= newton_tol)
    conv = np.flatnonzero(done)
    order = conv[np.lexsort((z[conv].imag, z[conv].real))]
    reps: list[complex] = []
    rres: list[float] = []
    for i in order:
        zi, ri = complex(z[i]), float(abs(res[i]))
        for j, zr in enumerate(reps):
            if abs(zi - zr) <= dedupe_radius:
                if ri < rres[j]:
                    reps[j], rres[j] = zi, ri
                break
        else:
            reps.append(zi)
            rres.append(ri)
    return PreimageSet(
        w=w, roots=np.asarray(reps, dtype=complex),
        residuals=np.asarray(rres, dtype=float),
        n_converged=int(done.sum()),
        n_dropped=int(n_starts - done.sum()),
    )


class CrossCheck(str, Enum):
    AGREE = "agree"
    DISAGREE = "disagree"
    INDETERMINATE_MULTIPLICITY = "indeterminate_multiplicity"


def cross_check(map_spec: HarmonicMapSpec, w, r: float = 0.999,
                cfg: QuadratureConfig = DEFAULT_QUAD,
                n_samples: int = 4096,
                n_starts: int = 256,
                newton_tol: float = 1e-10,
                trace: CurveTrace | None = None) -> tuple[CrossCheck, dict]:
    """Compare the winding count against the Newton preimage count at w.

    Returns (verdict, details): AGREE when the winding number of the image
    of |z| = r around w equals the number of Newton preimages strictly
    inside that circle, INDETERMINATE_MULTIPLICITY when some preimage has a
    Jacobian determinant |h'|**2 - |g'|**2 too close to zero for its
    multiplicity to be trusted, DISAGREE otherwise.  A root of multiplicity
    two is only located to distance ~sqrt(newton_tol), where the Jacobian
    has size ~newton_tol, so the degeneracy cut is 100 * newton_tol rather
    than a fixed machine-level constant.  The details dict carries both
    counts and the root list.  Pass a pre-computed ``trace`` of |z| = r to
    amortize the tracing cost over many probes.
    """
    if trace is None:
        trace = trace_circle(map_spec, r, n_samples, cfg)
    wres = winding_number(trace, w)
    pre = newton_preimages(map_spec, w, n_starts=n_starts, cfg=cfg,
                           newton_tol=newton_tol)
    inside = pre.roots[np.abs(pre.roots) < r]
    details: dict = {
        "winding": wres.winding,
        "preimages_inside": int(inside.size),
        "roots": inside,
        "min_jacobian": None,
    }
    if inside.size:
        a = np.atleast_1d(eval_h_prime_many(map_spec.h, inside, on_pole="nan"))
        b = np.atleast_1d(eval_g_prime_many(map_spec, inside, on_pole="nan"))
        jac = np.abs(a) ** 2 - np.abs(b) ** 2
        details["min_jacobian"] = float(np.nanmin(jac))
        jac_tol = max(1e-12, 100.0 * newton_tol)
        if np.any(~np.isfinite(jac)) or np.any(np.abs(jac) <= jac_tol):
            return CrossCheck.INDETERMINATE_MULTIPLICITY, details
    verdict = CrossCheck.AGREE if wres.winding == inside.size else CrossCheck.DISAGREE
    return verdict, details
