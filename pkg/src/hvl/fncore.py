"""Representations and evaluators for planar harmonic maps f = h + conj(g).

The analytic part h comes in two machine forms:

* ``PolySeries`` -- a finite power series h(z) = z**p + a[p+1] z**(p+1) + ...
  with the leading coefficient normalized to exactly 1.
* ``RationalDeriv`` -- h given through its derivative h'(z) = P(z)/Q(z) for
  polynomials P, Q, with h(0) = 0 recovered by integrating h' along the
  radial segment from the origin.

The co-analytic part is never stored independently: it is tied to h through

    g'(z) = z**(m-1) * h'(z),        m = 2, 3, 4, ...

so a ``HarmonicMapSpec`` is just (h, m) plus the derived series for g when h
is a series.  All evaluators are pure functions of immutable specs and are
safe to share across threads.

Rational specs may have poles of h' on the unit circle (the flat-sided
presets do).  Evaluation requests that land within ``boundary_epsilon`` of
such a pole at near-boundary radius are pulled back to radius
1 - boundary_epsilon; see ``clamp_to_interior``.  Radial integrals are done
by composite Gauss-Legendre quadrature on a mesh geometrically graded toward
the outer endpoint, refined until successive refinements agree to tolerance.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.polynomial import polynomial as npoly


# ---------------------------------------------------------------------------
# Errors


class HvlError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(HvlError, ValueError):
    """An argument violates its documented contract."""


class DomainError(HvlError):
    """Evaluation requested outside the closed unit disk."""


class PoleError(HvlError):
    """Evaluation at (or numerically on top of) a pole or zero of h'."""

    def __init__(self, message: str, location: complex | None = None):
        super().__init__(message)
        self.location = location


class QuadratureError(HvlError):
    """Adaptive integration did not reach tolerance within its depth budget."""

    def __init__(self, message: str, worst_estimate: float | None = None, where=None):
        super().__init__(message)
        self.worst_estimate = worst_estimate
        self.where = where


class BoundaryHypothesisError(HvlError):
    """The normalized derivative h'/z^(p-1) vanishes or blows up on |z| = 1."""


class UnwrapError(HvlError):
    """Continuous-phase refinement exceeded its point budget."""


class InconsistencyError(HvlError):
    """Two independent computations of the same quantity disagree."""


class ResolutionError(HvlError):
    """Sampling density is insufficient for a reliable answer."""


class IndeterminateProbeError(HvlError):
    """A winding probe lies too close to the curve to classify."""


class ScanQualityError(HvlError):
    """Too many probes of a scan were indeterminate."""


class SpecFileError(HvlError, ValueError):
    """A spec document is malformed."""


# ---------------------------------------------------------------------------
# Configuration


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances for the radial/arc integrals behind rational evaluation.

    ``max_depth`` caps the number of mesh-doubling rounds.  A node-budget
    guard may stop earlier for integrands that are singular in the middle of
    the path (poles of h' strictly inside the disk); the failure carries the
    worst per-point residual estimate.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_depth: int = 40
    boundary_epsilon: float = 1e-6

    def __post_init__(self):
        if not (self.abs_tol > 0.0) or not (self.rel_tol > 0.0):
            raise ParameterError("quadrature tolerances must be positive")
        if not (0.0 < self.boundary_epsilon < 0.01):
            raise ParameterError("boundary_epsilon must lie in (0, 0.01)")
        if self.max_depth < 10:
            raise ParameterError("max_depth must be at least 10")


DEFAULT_QUAD = QuadratureConfig()


# ---------------------------------------------------------------------------
# Function specs


@dataclass(frozen=True)
class PolySeries:
    """h as a finite series z**p + a[p+1] z**(p+1) + ... + a[N] z**N.

    ``coeffs[j]`` holds the coefficient of z**(p+j); ``coeffs[0]`` must be
    exactly 1 (the normalization of the class).
    """

    p: int
    coeffs: tuple[complex, ...]

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or isinstance(self.p, bool) or self.p < 1:
            raise ParameterError("p must be a positive integer")
        object.__setattr__(self, "p", int(self.p))
        try:
            coeffs = tuple(complex(c) for c in self.coeffs)
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"coeffs must be complex numbers: {exc}") from None
        if not coeffs:
            raise ParameterError("coeffs must be non-empty")
        if coeffs[0] != 1:
            raise ParameterError(
                f"normalization violated: coefficient of z**p must be exactly 1, got {coeffs[0]!r}"
            )
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return self.p + len(self.coeffs) - 1


@dataclass(frozen=True)
class RationalDeriv:
    """h given through h'(z) = numer(z)/denom(z), with h(0) = 0.

    Coefficient tuples are ascending in the exponent.  numer must vanish to
    order exactly p-1 at the origin (so h behaves like a multiple of z**p
    there) and denom(0) must be nonzero.
    """

    p: int
    numer: tuple[complex, ...]
    denom: tuple[complex, ...]

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or isinstance(self.p, bool) or self.p < 1:
            raise ParameterError("p must be a positive integer")
        object.__setattr__(self, "p", int(self.p))
        numer = _trim_poly(self.numer, "numer")
        denom = _trim_poly(self.denom, "denom")
        if denom[0] == 0:
            raise ParameterError("denom(0) must be nonzero")
        if len(numer) < self.p:
            raise ParameterError("numer must have degree at least p-1")
        if any(c != 0 for c in numer[: self.p - 1]) or numer[self.p - 1] == 0:
            raise ParameterError(
                "numer must vanish to order exactly p-1 at the origin "
                "(coefficients below z**(p-1) zero, coefficient of z**(p-1) nonzero)"
            )
        object.__setattr__(self, "numer", numer)
        object.__setattr__(self, "denom", denom)


def _trim_poly(coeffs, name: str) -> tuple[complex, ...]:
    try:
        vals = [complex(c) for c in coeffs]
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"{name} must be complex numbers: {exc}") from None
    while len(vals) > 1 and vals[-1] == 0:
        vals.pop()
    if not vals or all(c == 0 for c in vals):
        raise ParameterError(f"{name} must not be the zero polynomial")
    return tuple(vals)


FunctionSpec = Union[PolySeries, RationalDeriv]


@dataclass(frozen=True)
class HarmonicMapSpec:
    """The pair (h, m) defining f = h + conj(g) with g' = z**(m-1) h'.

    ``g_coeffs`` is the derived series for g when h is a ``PolySeries``:
    ``g_coeffs[j]`` is the coefficient of z**(p+m-1+j).  For rational h it is
    None and g is evaluated by integration.
    """

    h: FunctionSpec
    m: int
    g_coeffs: tuple[complex, ...] | None = None

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or isinstance(self.m, bool) or self.m < 2:
            raise ParameterError("m must be an integer >= 2")
        object.__setattr__(self, "m", int(self.m))

    @property
    def p(self) -> int:
        return self.h.p


def derive_g(h: FunctionSpec, m: int) -> HarmonicMapSpec:
    """Build the full map spec from h and the linkage exponent m.

    For a series h the coefficient of z**(n+m-1) in g is (n/(n+m-1)) a_n,
    which is exactly the antiderivative of z**(m-1) h'(z).
    """
    if not isinstance(m, (int, np.integer)) or isinstance(m, bool) or m < 2:
        raise ParameterError("m must be an integer >= 2")
    if isinstance(h, PolySeries):
        n = h.p + np.arange(len(h.coeffs))
        g = (n / (n + m - 1)) * np.asarray(h.coeffs, dtype=complex)
        return HarmonicMapSpec(h=h, m=int(m), g_coeffs=tuple(complex(c) for c in g))
    if isinstance(h, RationalDeriv):
        return HarmonicMapSpec(h=h, m=int(m), g_coeffs=None)
    raise ParameterError(f"unsupported function spec: {type(h).__name__}")


# ---------------------------------------------------------------------------
# Cached derived coefficient tables


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@functools.lru_cache(maxsize=None)
def _series_tables(spec: PolySeries):
    a = np.asarray(spec.coeffs, dtype=complex)
    n = spec.p + np.arange(a.size)
    d1 = _frozen(n * a)                    # h'  = z**(p-1) * D1(z)
    d2 = _frozen(n * (n - 1) * a)          # h'' = z**(p-2) * D2(z)   (p >= 2)
    return _frozen(a), d1, d2


@functools.lru_cache(maxsize=None)
def _rational_tables(spec: RationalDeriv):
    numer = np.asarray(spec.numer, dtype=complex)
    denom = np.asarray(spec.denom, dtype=complex)
    hnum = _frozen(numer[spec.p - 1:])     # normalized derivative = hnum/denom
    # h'' = (numer' denom - numer denom') / denom**2
    second_num = npoly.polysub(
        npoly.polymul(npoly.polyder(numer), denom),
        npoly.polymul(numer, npoly.polyder(denom)),
    )
    return _frozen(numer), _frozen(denom), hnum, _frozen(np.asarray(second_num, dtype=complex))


@functools.lru_cache(maxsize=None)
def denominator_roots(denom: tuple[complex, ...]) -> np.ndarray:
    """Roots of an ascending-coefficient polynomial (cached)."""
    c = np.asarray(denom, dtype=complex)
    if c.size <= 1:
        return _frozen(np.zeros(0, dtype=complex))
    return _frozen(np.asarray(npoly.polyroots(c), dtype=complex))


@functools.lru_cache(maxsize=None)
def normalized_deriv_roots(spec: FunctionSpec) -> np.ndarray:
    """Zeros of the normalized derivative h'(z)/z**(p-1) (cached)."""
    if isinstance(spec, PolySeries):
        _, d1, _ = _series_tables(spec)
        return denominator_roots(tuple(d1))
    _, _, hnum, _ = _rational_tables(spec)
    return denominator_roots(tuple(hnum))


# ---------------------------------------------------------------------------
# Shared helpers


def _check_disk(zs: np.ndarray) -> None:
    mags = np.abs(zs)
    if np.any(mags > 1.0 + 1e-12):
        flat = np.asarray(zs).ravel()
        worst = flat[int(np.argmax(np.abs(flat)))]
        raise DomainError(f"evaluation outside the closed unit disk: |z| = {abs(worst):.6g}")


def _prepare(z):
    arr = np.asarray(z, dtype=complex)
    return np.atleast_1d(arr), arr.ndim == 0


def clamp_to_interior(spec: FunctionSpec, zs, cfg: QuadratureConfig = DEFAULT_QUAD):
    """Pull near-boundary points out of pole sectors of a rational h'.

    A point with |z| > 1 - boundary_epsilon lying within boundary_epsilon of
    a denominator root is moved radially to radius 1 - boundary_epsilon.
    Returns ``(points, clamped_mask)``; series specs never clamp.
    """
    zs = np.asarray(zs, dtype=complex)
    clamped = np.zeros(zs.shape, dtype=bool)
    if isinstance(spec, RationalDeriv):
        poles = denominator_roots(spec.denom)
        if poles.size:
            dist = np.min(np.abs(zs[..., None] - poles), axis=-1)
            near = (dist < cfg.boundary_epsilon) & (np.abs(zs) > 1.0 - cfg.boundary_epsilon)
            if np.any(near):
                zs = np.array(zs, copy=True)
                zn = zs[near]
                zs[near] = zn * ((1.0 - cfg.boundary_epsilon) / np.abs(zn))
                clamped = near
    return zs, clamped


# ---------------------------------------------------------------------------
# Quadrature engine

_GAUSS_ORDER = 16
_NODE_BUDGET = 40_000_000  # total integrand evaluations allowed per round


@functools.lru_cache(maxsize=64)
def _graded_rule(levels: int, m_refine: int):
    """Gauss-Legendre rule on [0, 1] over panels geometrically graded toward 1.

    Panel breakpoints are 0, 1/2, 3/4, ..., 1 - 2**-levels, 1; each panel is
    split into ``m_refine`` equal subpanels.  The grading resolves integrands
    whose only sharp feature sits at the outer endpoint (a pole of h' just
    beyond the evaluation point) at cost O(levels * m_refine).
    """
    x, w = np.polynomial.legendre.leggauss(_GAUSS_ORDER)
    breaks = np.array([0.0] + [1.0 - 2.0 ** (-k) for k in range(1, levels + 1)] + [1.0])
    a, b = breaks[:-1], breaks[1:]
    frac = np.arange(m_refine) / m_refine
    lo = (a[:, None] + (b - a)[:, None] * frac).ravel()
    hi = (a[:, None] + (b - a)[:, None] * (frac + 1.0 / m_refine)).ravel()
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    nodes = (mid[:, None] + half[:, None] * x).ravel()
    weights = (half[:, None] * w).ravel()
    return _frozen(nodes), _frozen(weights)


def _levels_for(cfg: QuadratureConfig) -> int:
    return max(24, int(np.ceil(-np.log2(cfg.boundary_epsilon))) + 6)


def _h_prime_raw(spec: RationalDeriv, pts: np.ndarray) -> np.ndarray:
    numer, denom, _, _ = _rational_tables(spec)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return npoly.polyval(pts, numer) / npoly.polyval(pts, denom)


def _radial_integrals(spec: RationalDeriv, zs: np.ndarray, s_powers, cfg: QuadratureConfig):
    """For each z, integrals of s**q * h'(s z) over s in [0, 1], all q at once.

    Returns ``(vals, fail_idx, fail_est)`` where vals has shape
    (len(s_powers), len(zs)) and the failure arrays list points whose
    refinement never converged, with their last residual estimates.
    """
    zs = np.asarray(zs, dtype=complex).ravel()
    levels = _levels_for(cfg)
    rounds = min(cfg.max_depth, 12)
    nq = len(s_powers)
    out = np.zeros((nq, zs.size), dtype=complex)
    last_est = np.full(zs.size, np.inf)
    active = np.arange(zs.size)
    prev = None
    m_refine = 1
    for _ in range(rounds + 1):
        nodes, weights = _graded_rule(levels, m_refine)
        if nodes.size * max(active.size, 1) > _NODE_BUDGET:
            break
        hp = _h_prime_raw(spec, nodes[:, None] * zs[active][None, :])
        cur = np.empty((nq, active.size), dtype=complex)
        for i, q in enumerate(s_powers):
            wq = weights if q == 0 else weights * nodes ** q
            cur[i] = wq @ hp
        if prev is not None:
            delta = np.max(np.abs(cur - prev), axis=0)
            tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.max(np.abs(cur), axis=0))
            done = np.isfinite(delta) & (delta <= tol)
            out[:, active[done]] = cur[:, done]
            last_est[active[done]] = delta[done]
            if np.all(done):
                return out, np.zeros(0, dtype=int), np.zeros(0)
            keep = ~done
            last_est[active[keep]] = np.where(
                np.isfinite(delta[keep]), delta[keep], np.inf
            )
            active = active[keep]
            prev = cur[:, keep]
        else:
            prev = cur
        m_refine *= 2
    out[:, active] = prev if prev is not None else 0.0
    return out, active, last_est[active]


def _raise_quadrature(fail_idx, fail_est, zs):
    worst = int(np.argmax(fail_est))
    raise QuadratureError(
        f"radial quadrature failed to converge at {fail_idx.size} point(s); "
        f"worst residual estimate {fail_est[worst]:.3g}",
        worst_estimate=float(fail_est[worst]),
        where=complex(np.asarray(zs).ravel()[fail_idx[worst]]),
    )


def h_prime_arc_integral(spec: FunctionSpec, r: float, t0: float, t1: float,
                         cfg: QuadratureConfig = DEFAULT_QUAD) -> complex:
    """Integral of h' along the arc z = r e^{i t}, t from t0 to t1.

    Used together with radial evaluation to check path independence of the
    primitive; uniform panel doubling since arcs carry no endpoint grading.
    """
    if not 0.0 < r <= 1.0:
        raise DomainError("arc radius must lie in (0, 1]")
    x, w = np.polynomial.legendre.leggauss(_GAUSS_ORDER)
    prev = None
    panels = 8
    for _ in range(min(cfg.max_depth, 16)):
        edges = np.linspace(t0, t1, panels + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1:] - edges[:-1])
        ts = (mid[:, None] + half[:, None] * x).ravel()
        ws = (half[:, None] * w).ravel()
        zs = r * np.exp(1j * ts)
        if isinstance(spec, RationalDeriv):
            hp = _h_prime_raw(spec, zs)
        else:
            _, d1, _ = _series_tables(spec)
            hp = zs ** (spec.p - 1) * npoly.polyval(zs, d1)
        cur = complex(np.sum(ws * hp * 1j * zs))
        if prev is not None:
            err = abs(cur - prev)
            if err <= max(cfg.abs_tol, cfg.rel_tol * abs(cur)):
                return cur
        prev = cur
        panels *= 2
    raise QuadratureError("arc quadrature failed to converge", worst_estimate=err)


# ---------------------------------------------------------------------------
# Evaluators


def eval_h_many(spec: FunctionSpec, zs, cfg: QuadratureConfig = DEFAULT_QUAD,
                on_failure: str = "raise"):
    """h at an array of points inside the closed disk.

    Rational specs integrate h' radially from the origin (clamping near
    boundary poles, silently; use ``clamp_to_interior`` for the flags).
    With ``on_failure="mask"`` returns (values, failed_mask) instead of
    raising on quadrature failure.
    """
    arr, scalar = _prepare(zs)
    _check_disk(arr)
    if isinstance(spec, PolySeries):
        a, _, _ = _series_tables(spec)
        vals = arr ** spec.p * npoly.polyval(arr, a)
        failed = np.zeros(arr.shape, dtype=bool)
    else:
        zeff, _ = clamp_to_interior(spec, arr, cfg)
        flat = zeff.ravel()
        ints, fail_idx, fail_est = _radial_integrals(spec, flat, (0,), cfg)
        if fail_idx.size and on_failure == "raise":
            _raise_quadrature(fail_idx, fail_est, flat)
        vals = (flat * ints[0]).reshape(arr.shape)
        failed = np.zeros(flat.size, dtype=bool)
        failed[fail_idx] = True
        failed = failed.reshape(arr.shape)
    if on_failure == "mask":
        return vals, failed
    return vals[0] if scalar else vals


def eval_h(spec: FunctionSpec, z: complex, cfg: QuadratureConfig = DEFAULT_QUAD) -> complex:
    """h at a single point; see eval_h_many."""
    return complex(eval_h_many(spec, z, cfg))


def eval_h_prime_many(spec: FunctionSpec, zs, on_pole: str = "raise"):
    """h' at an array of points; exact evaluation, no quadrature.

    Rational specs raise ``PoleError`` on a denominator zero (``on_pole="nan"``
    substitutes NaN instead, for sampling sweeps that skip poles).
    """
    arr, scalar = _prepare(zs)
    _check_disk(arr)
    if isinstance(spec, PolySeries):
        _, d1, _ = _series_tables(spec)
        vals = arr ** (spec.p - 1) * npoly.polyval(arr, d1)
    else:
        vals = _h_prime_raw(spec, arr)
        bad = ~np.isfinite(vals)
        if np.any(bad):
            if on_pole == "raise":
                loc = arr[bad].ravel()[0]
                raise PoleError(f"h' has a pole at z = {loc:.6g}", location=complex(loc))
            vals = np.where(bad, np.nan + 0j, vals)
    return vals[0] if scalar else vals


def eval_h_prime(spec: FunctionSpec, z: complex) -> complex:
    return complex(eval_h_prime_many(spec, z))


def eval_h_second_many(spec: FunctionSpec, zs, on_pole: str = "raise"):
    """h'' at an array of points; exact evaluation."""
    arr, scalar = _prepare(zs)
    _check_disk(arr)
    if isinstance(spec, PolySeries):
        _, _, d2 = _series_tables(spec)
        if spec.p >= 2:
            vals = arr ** (spec.p - 2) * npoly.polyval(arr, d2)
        elif d2.size > 1:
            vals = npoly.polyval(arr, d2[1:])  # d2[0] == 0 for p == 1
        else:
            vals = np.zeros(arr.shape, dtype=complex)
    else:
        numer, denom, _, second_num = _rational_tables(spec)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            q = npoly.polyval(arr, denom)
            vals = npoly.polyval(arr, second_num) / (q * q)
        bad = ~np.isfinite(vals)
        if np.any(bad):
            if on_pole == "raise":
                loc = arr[bad].ravel()[0]
                raise PoleError(f"h'' has a pole at z = {loc:.6g}", location=complex(loc))
            vals = np.where(bad, np.nan + 0j, vals)
    return vals[0] if scalar else vals


def eval_h_second(spec: FunctionSpec, z: complex) -> complex:
    return complex(eval_h_second_many(spec, z))


def eval_normalized_deriv_many(spec: FunctionSpec, zs, on_pole: str = "raise"):
    """The normalized derivative h'(z)/z**(p-1), evaluated without division.

    This is the function whose boundary phase drives the cusp criterion; it
    extends analytically through the origin with value p at z = 0.
    """
    arr, scalar = _prepare(zs)
    _check_disk(arr)
    if isinstance(spec, PolySeries):
        _, d1, _ = _series_tables(spec)
        vals = npoly.polyval(arr, d1)
    else:
        _, denom, hnum, _ = _rational_tables(spec)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            vals = npoly.polyval(arr, hnum) / npoly.polyval(arr, denom)
        bad = ~np.isfinite(vals)
        if np.any(bad):
            if on_pole == "raise":
                loc = arr[bad].ravel()[0]
                raise PoleError(f"normalized derivative has a pole at z = {loc:.6g}",
                                location=complex(loc))
            vals = np.where(bad, np.nan + 0j, vals)
    return vals[0] if scalar else vals


def eval_normalized_deriv(spec: FunctionSpec, z: complex) -> complex:
    return complex(eval_normalized_deriv_many(spec, z))


def eval_g_prime_many(map_spec: HarmonicMapSpec, zs, on_pole: str = "raise"):
    """g'(z) = z**(m-1) h'(z), exact."""
    arr, scalar = _prepare(zs)
    hp = eval_h_prime_many(map_spec.h, arr, on_pole=on_pole)
    vals = arr ** (map_spec.m - 1) * hp
    return vals[0] if scalar else vals


def eval_g_prime(map_spec: HarmonicMapSpec, z: complex) -> complex:
    return complex(eval_g_prime_many(map_spec, z))


def eval_g_many(map_spec: HarmonicMapSpec, zs, cfg: QuadratureConfig = DEFAULT_QUAD,
                on_failure: str = "raise"):
    """g at an array of points; series form when available, else integration."""
    arr, scalar = _prepare(zs)
    _check_disk(arr)
    if map_spec.g_coeffs is not None:
        gc = np.asarray(map_spec.g_coeffs, dtype=complex)
        vals = arr ** (map_spec.p + map_spec.m - 1) * npoly.polyval(arr, gc)
        failed = np.zeros(arr.shape, dtype=bool)
    else:
        zeff, _ = clamp_to_interior(map_spec.h, arr, cfg)
        flat = zeff.ravel()
        ints, fail_idx, fail_est = _radial_integrals(map_spec.h, flat, (map_spec.m - 1,), cfg)
        if fail_idx.size and on_failure == "raise":
            _raise_quadrature(fail_idx, fail_est, flat)
        vals = (flat ** map_spec.m * ints[0]).reshape(arr.shape)
        failed = np.zeros(flat.size, dtype=bool)
        failed[fail_idx] = True
        failed = failed.reshape(arr.shape)
    if on_failure == "mask":
        return vals, failed
    return vals[0] if scalar else vals


def eval_g(map_spec: HarmonicMapSpec, z: complex, cfg: QuadratureConfig = DEFAULT_QUAD) -> complex:
    return complex(eval_g_many(map_spec, z, cfg))


def eval_f_many(map_spec: HarmonicMapSpec, zs, cfg: QuadratureConfig = DEFAULT_QUAD,
                on_failure: str = "raise"):
    """f = h + conj(g) at an array of points.

    For rational h both radial integrals share one set of h' evaluations.
    """
    arr, scalar = _prepare(zs)
    _check_disk(arr)
    if map_spec.g_coeffs is not None:
        h_vals = eval_h_many(map_spec.h, arr, cfg)
        g_vals = eval_g_many(map_spec, arr, cfg)
        vals = h_vals + np.conj(g_vals)
        failed = np.zeros(arr.shape, dtype=bool)
    else:
        zeff, _ = clamp_to_interior(map_spec.h, arr, cfg)
        flat = zeff.ravel()
        ints, fail_idx, fail_est = _radial_integrals(
            map_spec.h, flat, (0, map_spec.m - 1), cfg
        )
        if fail_idx.size and on_failure == "raise":
            _raise_quadrature(fail_idx, fail_est, flat)
        vals = (flat * ints[0] + np.conj(flat ** map_spec.m * ints[1])).reshape(arr.shape)
        failed = np.zeros(flat.size, dtype=bool)
        failed[fail_idx] = True
        failed = failed.reshape(arr.shape)
    if on_failure == "mask":
        return vals, failed
    return vals[0] if scalar else vals


def eval_f(map_spec: HarmonicMapSpec, z: complex, cfg: QuadratureConfig = DEFAULT_QUAD) -> complex:
    return complex(eval_f_many(map_spec, z, cfg))
