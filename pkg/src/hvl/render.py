"""Deterministic SVG pictures of image domains.

``render_scene`` draws the image of the unit disk under f: the image of a
circle just inside the boundary, the images of a few interior circles and
radial rays (the curvilinear "polar grid" that shows how the disk folds),
and, when a satisfied criterion report is supplied, dots at the boundary
cusps.  Output is a plain SVG string assembled with fixed 6-decimal
formatting and no timestamps, so identical inputs give identical bytes.
Curves that fail to evaluate (a ray running into a pole of h', say) degrade
to an SVG comment instead of aborting the whole picture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .criterion import CriterionReport
from .fncore import (
    DEFAULT_QUAD,
    HarmonicMapSpec,
    HvlError,
    ParameterError,
    QuadratureConfig,
    eval_f_many,
)

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RenderOptions:
    width: int = 800
    height: int = 800
    circle_radii: tuple[float, ...] = (0.2, 0.4, 0.6, 0.8, 0.95, 0.999)
    ray_count: int = 24
    samples_per_curve: int = 2048
    max_radius: float = 1.0 - 1e-6
    boundary_color: str = "#13315c"
    circle_color: str = "#6e9bc5"
    ray_color: str = "#c9d6e3"
    cusp_color: str = "#c0392b"
    background: str = "#ffffff"
    show_cusps: bool = True

    def __post_init__(self):
        if self.samples_per_curve < 512:
            raise ParameterError("samples_per_curve must be at least 512")
        if self.width < 64 or self.height < 64:
            raise ParameterError("image must be at least 64 x 64")
        if not 0.0 < self.max_radius <= 1.0:
            raise ParameterError("max_radius must lie in (0, 1]")
        if self.ray_count < 0:
            raise ParameterError("ray_count must be nonnegative")
        for r in self.circle_radii:
            if not 0.0 < r <= 1.0:
                raise ParameterError("circle radii must lie in (0, 1]")


def _fmt(x: float) -> str:
    return "%.6f" % x


def _polyline_points(pts: np.ndarray) -> str:
    # SVG y axis points down; flip the imaginary part
    return " ".join(_fmt(p.real) + "," + _fmt(-p.imag) for p in pts)


def _curve_samples(map_spec: HarmonicMapSpec, zs: np.ndarray,
                   cfg: QuadratureConfig) -> np.ndarray:
    vals, failed = eval_f_many(map_spec, zs, cfg, on_failure="mask")
    vals = np.atleast_1d(vals)
    keep = ~np.atleast_1d(failed) & np.isfinite(vals)
    return vals[keep]


def render_scene(map_spec: HarmonicMapSpec,
                 criterion: CriterionReport | None = None,
                 opts: RenderOptions = RenderOptions(),
                 cfg: QuadratureConfig = DEFAULT_QUAD) -> str:
    """Compose the SVG scene for one map; returns the file content."""
    n = opts.samples_per_curve
    t = -math.pi + _TWO_PI * np.arange(n) / n
    warnings: list[str] = []

    boundary = _curve_samples(map_spec, opts.max_radius * np.exp(1j * t), cfg)
    if boundary.size < 2:
        raise ParameterError("boundary curve failed to evaluate; nothing to draw")
    re, im = boundary.real, -boundary.imag
    pad = 0.05 * max(float(np.ptp(re)), float(np.ptp(im)), 1e-9)
    x0, y0 = float(re.min()) - pad, float(im.min()) - pad
    vw, vh = float(np.ptp(re)) + 2 * pad, float(np.ptp(im)) + 2 * pad
    extent = max(vw, vh)

    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
        'viewBox="%s %s %s %s">'
        % (opts.width, opts.height, _fmt(x0), _fmt(y0), _fmt(vw), _fmt(vh)),
        '<rect x="%s" y="%s" width="%s" height="%s" fill="%s"/>'
        % (_fmt(x0), _fmt(y0), _fmt(vw), _fmt(vh), opts.background),
    ]

    ray_n = max(256, n // 8)
    s = np.linspace(0.0, opts.max_radius, ray_n)
    for j in range(opts.ray_count):
        theta = -math.pi + _TWO_PI * j / opts.ray_count
        try:
            pts = _curve_samples(map_spec, s * np.exp(1j * theta), cfg)
            if pts.size < 2:
                raise HvlError("fewer than 2 finite samples")
            parts.append(
                '<polyline fill="none" stroke="%s" stroke-width="%s" points="%s"/>'
                % (opts.ray_color, _fmt(extent * 0.0012), _polyline_points(pts))
            )
        except HvlError as exc:
            warnings.append(f"ray {j} skipped: {exc}")

    for r in opts.circle_radii:
        try:
            pts = _curve_samples(map_spec, r * np.exp(1j * t), cfg)
            if pts.size < 2:
                raise HvlError("fewer than 2 finite samples")
            closed = np.concatenate([pts, pts[:1]])
            parts.append(
                '<polyline fill="none" stroke="%s" stroke-width="%s" points="%s"/>'
                % (opts.circle_color, _fmt(extent * 0.0018), _polyline_points(closed))
            )
        except HvlError as exc:
            warnings.append(f"circle r={r:g} skipped: {exc}")

    closed = np.concatenate([boundary, boundary[:1]])
    parts.append(
        '<polyline fill="none" stroke="%s" stroke-width="%s" points="%s"/>'
        % (opts.boundary_color, _fmt(extent * 0.0035), _polyline_points(closed))
    )

    if opts.show_cusps and criterion is not None and criterion.criterion_satisfied:
        marker_r = 0.009 * extent
        for rec in criterion.roots:
            if rec.suspected_tangency:
                continue
            img = rec.boundary_image
            if img is None:
                img = complex(eval_f_many(map_spec, np.exp(1j * rec.t), cfg))
            parts.append(
                '<circle cx="%s" cy="%s" r="%s" fill="%s"/>'
                % (_fmt(img.real), _fmt(-img.imag), _fmt(marker_r), opts.cusp_color)
            )

    for msg in warnings:
        parts.append("<!-- warning: %s -->" % msg.replace("--", "- -"))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
