"""Image-curve geometry for maps f = h + conj(g) with g' = z**(m-1) h'.

Parametrize the image of the circle |z| = r by t -> f(r e^{it}).  On the
unit circle the derivatives in t have closed forms (writing z = e^{it} and
using conj(z) = 1/z there):

    f'(t)  = i z h'(z) - i conj(z)**m conj(h'(z))
    f''(t) = -(z h'(z) + z**2 h''(z)
              + m conj(z)**m conj(h'(z)) + conj(z)**(m+1) conj(h''(z)))

Both terms of f' share the modulus |h'|, so the boundary speed vanishes
exactly where their phases meet -- the cusp candidates located by the phase
criterion.  The cross product Im(f'' conj(f')) collapses to

    (m - 1) (Re(z**(m+1) h'(z)**2) - |h'(z)|**2) <= 0,

the h'' contributions cancelling, so the boundary curve never turns
counterclockwise; ``concavity_check`` verifies both the sign and the
identity numerically.  ``trace_circle`` produces sampled curves,
``detect_cusps`` confirms the stationary points certified by a criterion
report, and ``segment_collinearity`` measures how straight the curve runs
between prescribed break angles.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .fncore import (
    DEFAULT_QUAD,
    DomainError,
    HarmonicMapSpec,
    InconsistencyError,
    ParameterError,
    QuadratureConfig,
    QuadratureError,
    ResolutionError,
    clamp_to_interior,
    eval_f_many,
    eval_h_prime_many,
    eval_h_second_many,
)
from .criterion import CriterionReport

_TWO_PI = 2.0 * math.pi


def boundary_velocity_many(map_spec: HarmonicMapSpec, t, on_pole: str = "raise") -> np.ndarray:
    """d/dt f(e^{it}) via the closed form; needs h' finite on the circle."""
    t = np.asarray(t, dtype=float)
    z = np.exp(1j * t)
    hp = eval_h_prime_many(map_spec.h, z, on_pole=on_pole)
    w = np.conj(z)
    return 1j * z * hp - 1j * w ** map_spec.m * np.conj(hp)


def boundary_velocity(map_spec: HarmonicMapSpec, t: float) -> complex:
    return complex(boundary_velocity_many(map_spec, np.asarray(t, dtype=float)))


def boundary_acceleration_many(map_spec: HarmonicMapSpec, t, on_pole: str = "raise") -> np.ndarray:
    """d^2/dt^2 f(e^{it}) via the closed form."""
    t = np.asarray(t, dtype=float)
    z = np.exp(1j * t)
    m = map_spec.m
    hp = eval_h_prime_many(map_spec.h, z, on_pole=on_pole)
    hpp = eval_h_second_many(map_spec.h, z, on_pole=on_pole)
    w = np.conj(z)
    return -(z * hp + z ** 2 * hpp + m * w ** m * np.conj(hp) + w ** (m + 1) * np.conj(hpp))


def boundary_acceleration(map_spec: HarmonicMapSpec, t: float) -> complex:
    return complex(boundary_acceleration_many(map_spec, np.asarray(t, dtype=float)))


def boundary_point(map_spec: HarmonicMapSpec, t: float,
                   cfg: QuadratureConfig = DEFAULT_QUAD) -> complex:
    """f(e^{it}) (clamped into the disk near boundary poles of h')."""
    return complex(eval_f_many(map_spec, np.exp(1j * float(t)), cfg))


@dataclass
class CurveTrace:
    """Sampled image of a circle |z| = radius under f.

    ``velocity``/``acceleration`` are filled only for radius 1 (NaN at
    clamped samples, where the closed forms do not apply).  ``point_at``
    evaluates extra parameter values on demand with caching, so winding
    refinement can subdivide without re-tracing.
    """

    map: HarmonicMapSpec
    radius: float
    t: np.ndarray
    points: np.ndarray
    clamped: np.ndarray
    velocity: np.ndarray | None = None
    acceleration: np.ndarray | None = None
    quad: QuadratureConfig = DEFAULT_QUAD
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.t.size

    def diameter(self) -> float:
        re, im = self.points.real, self.points.imag
        return float(math.hypot(np.ptp(re), np.ptp(im)))

    def point_at(self, tq) -> np.ndarray:
        tq = np.atleast_1d(np.asarray(tq, dtype=float))
        out = np.empty(tq.shape, dtype=complex)
        missing: list[int] = []
        for i, tv in enumerate(tq):
            key = float(tv)
            if key in self._cache:
                out[i] = self._cache[key]
            else:
                missing.append(i)
        if missing:
            zq = self.radius * np.exp(1j * tq[missing])
            vals = np.atleast_1d(eval_f_many(self.map, zq, self.quad))
            for i, v in zip(missing, vals):
                self._cache[float(tq[i])] = complex(v)
                out[i] = v
        return out

    def to_csv(self) -> str:
        lines = ["t,re_f,im_f,clamped"]
        for tv, pv, cv in zip(self.t, self.points, self.clamped):
            lines.append("%.17g,%.17g,%.17g,%d" % (tv, pv.real, pv.imag, int(cv)))
        return "\n".join(lines) + "\n"


def trace_circle(map_spec: HarmonicMapSpec, r: float, n: int = 4096,
                 cfg: QuadratureConfig = DEFAULT_QUAD) -> CurveTrace:
    """Sample f on the circle |z| = r at n uniform angles starting at -pi.

    Requires n >= 256 so downstream winding estimates have headroom; points
    within ``cfg.boundary_epsilon`` of a pole of a rational h' are flagged in
    ``clamped`` and evaluated at the pulled-in radius.  Quadrature failures
    abort with a ``QuadratureError`` naming the first bad angles.
    """
    if n < 256:
        raise ParameterError("trace needs at least 256 samples")
    if not 0.0 < r <= 1.0:
        raise DomainError("trace radius must lie in (0, 1]")
    t = -math.pi + _TWO_PI * np.arange(n) / n
    z = r * np.exp(1j * t)
    _, clamped = clamp_to_interior(map_spec.h, z, cfg)
    vals, failed = eval_f_many(map_spec, z, cfg, on_failure="mask")
    if np.any(failed):
        bad_t = t[failed][:4]
        raise QuadratureError(
            "trace evaluation failed to converge at t = "
            + ", ".join(f"{tv:.6g}" for tv in bad_t)
            + (" ..." if np.count_nonzero(failed) > 4 else ""),
            worst_estimate=math.inf,
            where=complex(z[failed][0]),
        )
    vel = acc = None
    if r == 1.0:
        vel = boundary_velocity_many(map_spec, t, on_pole="nan")
        acc = boundary_acceleration_many(map_spec, t, on_pole="nan")
        if np.any(clamped):
            vel = np.where(clamped, np.nan + 0j, vel)
            acc = np.where(clamped, np.nan + 0j, acc)
    trace = CurveTrace(map=map_spec, radius=r, t=t, points=vals,
                       clamped=clamped, velocity=vel, acceleration=acc, quad=cfg)
    for tv, pv in zip(t, vals):
        trace._cache[float(tv)] = complex(pv)
    return trace


@dataclass(frozen=True)
class ConcavityReport:
    """Sampled check that the boundary image never turns counterclockwise."""

    n: int
    skipped: int
    max_cross: float
    max_identity_gap: float
    max_identity_rel_gap: float
    tol: float
    passed: bool


def concavity_check(map_spec: HarmonicMapSpec, n: int = 4096) -> ConcavityReport:
    """Verify Im(f'' conj(f')) <= 0 on the unit circle, and its closed form.

    Both the direct cross product and the reduced expression
    (m-1)(Re(z**(m+1) h'**2) - |h'|**2) are evaluated at n angles; the report
    records the largest (signed) cross product, the worst absolute and
    relative gap between the two routes, and a pass flag with tolerance
    1e-9 * max|f'| * max|f''|.  Samples where h' is singular are skipped.
    """
    if n < 16:
        raise ParameterError("concavity check needs at least 16 samples")
    t = -math.pi + _TWO_PI * np.arange(n) / n
    z = np.exp(1j * t)
    hp = eval_h_prime_many(map_spec.h, z, on_pole="nan")
    m = map_spec.m
    vel = boundary_velocity_many(map_spec, t, on_pole="nan")
    acc = boundary_acceleration_many(map_spec, t, on_pole="nan")
    direct = np.imag(acc * np.conj(vel))
    rhs = (m - 1) * (np.real(z ** (m + 1) * hp ** 2) - np.abs(hp) ** 2)
    ok = np.isfinite(direct) & np.isfinite(rhs)
    skipped = int(n - np.count_nonzero(ok))
    if not np.any(ok):
        raise ResolutionError("every concavity sample hit a singularity of h'")
    direct, rhs = direct[ok], rhs[ok]
    speed = np.abs(vel[ok])
    accel = np.abs(acc[ok])
    gap = np.abs(direct - rhs)
    scale = np.maximum(1.0, speed * accel)
    tol = 1e-9 * float(speed.max()) * float(accel.max()) if speed.size else 0.0
    max_cross = float(direct.max())
    report = ConcavityReport(
        n=n, skipped=skipped, max_cross=max_cross,
        max_identity_gap=float(gap.max()),
        max_identity_rel_gap=float((gap / scale).max()),
        tol=tol, passed=bool(max_cross <= tol and (gap / scale).max() <= 1e-9),
    )
    return report


@dataclass(frozen=True)
class CuspSet:
    """Angles (and images) of the boundary cusps confirmed for a map."""

    angles: np.ndarray
    points: np.ndarray
    speeds: np.ndarray
    cusp_tol: float

    @property
    def count(self) -> int:
        return int(self.angles.size)


def detect_cusps(map_spec: HarmonicMapSpec, report: CriterionReport,
                 override: bool = False,
                 cfg: QuadratureConfig = DEFAULT_QUAD) -> CuspSet:
    """Confirm that the phase-criterion roots are genuine stationary points.

    Requires a report with ``criterion_satisfied`` (pass ``override=True`` to
    inspect an uncertified map anyway).  Each root angle must have boundary
    speed below 1e-6 * max|f'|; a violation raises ``InconsistencyError``
    since it means the phase table and the velocity field disagree.
    """
    if not (report.criterion_satisfied or override):
        raise ParameterError(
            "cusp detection needs a satisfied criterion report "
            "(pass override=True to force)"
        )
    if report.m != map_spec.m or report.p != map_spec.p:
        raise ParameterError("criterion report does not match this map")
    angles = np.array([r.t for r in report.roots if not r.suspected_tangency])
    t_grid = -math.pi + _TWO_PI * np.arange(4096) / 4096
    vmax = float(np.nanmax(np.abs(boundary_velocity_many(map_spec, t_grid, on_pole="nan"))))
    cusp_tol = 1e-6 * vmax
    if angles.size == 0:
        warnings.warn("criterion report carries no roots; no cusps to confirm")
        empty = np.zeros(0)
        return CuspSet(angles=empty, points=np.zeros(0, dtype=complex),
                       speeds=empty, cusp_tol=cusp_tol)
    speeds = np.abs(boundary_velocity_many(map_spec, angles, on_pole="nan"))
    bad = ~(speeds < cusp_tol)
    if np.any(bad):
        j = int(np.flatnonzero(bad)[0])
        raise InconsistencyError(
            f"root at t = {angles[j]:.12g} has boundary speed "
            f"{speeds[j]:.3g} >= tolerance {cusp_tol:.3g}"
        )
    points = np.array([
        complex(r.boundary_image) if r.boundary_image is not None
        else complex(eval_f_many(map_spec, np.exp(1j * r.t), cfg))
        for r in report.roots if not r.suspected_tangency
    ])
    return CuspSet(angles=angles, points=points, speeds=speeds, cusp_tol=cusp_tol)


def segment_collinearity(trace: CurveTrace, breakpoints) -> np.ndarray:
    """Normalized straightness defect of each arc between consecutive breaks.

    ``breakpoints`` are angles in [-pi, pi); arcs run cyclically from each
    breakpoint to the next.  For each arc the samples of ``trace`` strictly
    inside it are fit by the chord through the first and last of them, and
    the largest perpendicular distance, divided by the trace diameter, is
    returned.  Arcs with fewer than 3 interior samples raise
    ``ResolutionError``: the trace is too coarse to judge straightness.
    """
    bp = np.sort(np.asarray(breakpoints, dtype=float).ravel())
    if bp.size < 2:
        raise ParameterError("need at least two breakpoints")
    if bp[0] < -math.pi - 1e-12 or bp[-1] >= math.pi + 1e-12:
        raise ParameterError("breakpoints must lie in [-pi, pi)")
    diam = trace.diameter()
    if diam <= 0:
        raise ResolutionError("degenerate trace: zero diameter")
    out = np.empty(bp.size)
    eps = 1e-12
    for j in range(bp.size):
        lo = bp[j]
        hi = bp[(j + 1) % bp.size]
        if j + 1 < bp.size:
            inside = (trace.t > lo + eps) & (trace.t < hi - eps)
        else:
            hi = hi + _TWO_PI
            tt = np.where(trace.t > lo + eps, trace.t, trace.t + _TWO_PI)
            inside = (tt > lo + eps) & (tt < hi - eps)
        pts = trace.points[inside]
        if pts.size < 3:
            raise ResolutionError(
                f"arc ({lo:.6g}, {hi:.6g}) holds only {pts.size} trace samples"
            )
        a, b = pts[0], pts[-1]
        chord = b - a
        if abs(chord) < 1e-12 * diam:
            dev = float(np.max(np.abs(pts - a)))
        else:
            u = chord / abs(chord)
            dev = float(np.max(np.abs(np.imag((pts - a) * np.conj(u)))))
        out[j] = dev / diam
    return out
